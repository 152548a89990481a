#include "isingbath/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace isingbath {

namespace {

Eigen::Matrix4cd sigma_yy() {
    Eigen::Matrix4cd Y = Eigen::Matrix4cd::Zero();
    Y(0, 3) = -1.0;
    Y(1, 2) = 1.0;
    Y(2, 1) = 1.0;
    Y(3, 0) = -1.0;
    return Y;
}

constexpr double kEigClamp = 1e-12;

} // namespace

Eigen::Matrix4cd spin_flip(const Eigen::Matrix4cd& rho_standard) {
    static const Eigen::Matrix4cd Y = sigma_yy();
    return Y * rho_standard.conjugate() * Y;
}

ConcurrenceResult concurrence(const DefectState& state) {
    const DefectState std_state = to_basis(state, Basis::StandardZ);
    const Eigen::Matrix4cd rho = 0.5 * (std_state.rho + std_state.rho.adjoint());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> rho_solver(rho);
    if (rho_solver.eigenvalues().minCoeff() < -1e-8) {
        throw std::invalid_argument("concurrence: state is not positive semidefinite (min eig " +
                                    std::to_string(rho_solver.eigenvalues().minCoeff()) + ")");
    }
    Eigen::Vector4d evals = rho_solver.eigenvalues().cwiseMax(0.0);
    const Eigen::Matrix4cd sqrt_rho = rho_solver.eigenvectors() *
                                      evals.cwiseSqrt().asDiagonal() *
                                      rho_solver.eigenvectors().adjoint();

    const Eigen::Matrix4cd M = sqrt_rho * spin_flip(rho) * sqrt_rho;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> m_solver(0.5 * (M + M.adjoint()),
                                                             Eigen::EigenvaluesOnly);
    ConcurrenceResult result;
    Eigen::Vector4d mu = m_solver.eigenvalues();
    for (int i = 0; i < 4; ++i) {
        const double m = mu(3 - i);
        result.lambdas[static_cast<std::size_t>(i)] = m > kEigClamp ? std::sqrt(m) : 0.0;
    }
    std::sort(result.lambdas.begin(), result.lambdas.end(), std::greater<double>());
    result.value = std::max(0.0, result.lambdas[0] - result.lambdas[1] - result.lambdas[2] -
                                     result.lambdas[3]);
    result.value = std::min(result.value, 1.0);
    return result;
}

} // namespace isingbath

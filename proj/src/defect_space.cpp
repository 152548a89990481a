#include "isingbath/defect_space.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace isingbath {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Eigen::Vector4cd bell_vector(int index) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    switch (index) {
        case 0: v(0) = kInvSqrt2; v(3) = kInvSqrt2; break;   // phi_S
        case 1: v(1) = kInvSqrt2; v(2) = kInvSqrt2; break;   // psi_S
        case 2: v(0) = kInvSqrt2; v(3) = -kInvSqrt2; break;  // phi_A
        case 3: v(1) = kInvSqrt2; v(2) = -kInvSqrt2; break;  // psi_A
        default: throw std::invalid_argument("bell_vector: index must be 0..3");
    }
    return v;
}
} // namespace

Eigen::Matrix4cd bell_from_standard() {
    Eigen::Matrix4cd U;
    for (int c = 0; c < 4; ++c) U.col(c) = bell_vector(c);
    return U;
}

Eigen::Matrix4cd coupling_operator_S() {
    const Eigen::Vector4cd phi = bell_vector(0), psi = bell_vector(1);
    return psi * phi.adjoint() + phi * psi.adjoint();
}

Eigen::Matrix4cd coupling_operator_A() {
    const Eigen::Vector4cd phi = bell_vector(2), psi = bell_vector(3);
    return psi * phi.adjoint() + phi * psi.adjoint();
}

PointerBasis PointerBasis::make(Placement placement) {
    PointerBasis basis;
    basis.placement = placement;
    const Eigen::Vector4cd phiS = bell_vector(0), psiS = bell_vector(1);
    const Eigen::Vector4cd phiA = bell_vector(2), psiA = bell_vector(3);
    basis.vectors.col(0) = (phiS + psiS) * kInvSqrt2;
    basis.vectors.col(1) = (phiS - psiS) * kInvSqrt2;
    if (placement == Placement::DistantSites) {
        basis.vectors.col(2) = (phiA + psiA) * kInvSqrt2;
        basis.vectors.col(3) = (phiA - psiA) * kInvSqrt2;
        basis.s_S = {1.0, -1.0, 0.0, 0.0};
        basis.s_A = {0.0, 0.0, 1.0, -1.0};
    } else {
        // Shared-site coupling acts through S_x^S alone; |phi_A>, |psi_A>
        // span its kernel and form the decoherence-free subspace.
        basis.vectors.col(2) = phiA;
        basis.vectors.col(3) = psiA;
        basis.s_S = {1.0, -1.0, 0.0, 0.0};
        basis.s_A = {1.0, -1.0, 0.0, 0.0};
    }
    return basis;
}

DefectState product_state(double alpha_A, double alpha_B) {
    Eigen::Vector2cd a(std::cos(alpha_A), std::sin(alpha_A));
    Eigen::Vector2cd b(std::cos(alpha_B), std::sin(alpha_B));
    Eigen::Vector4cd v;
    v << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
    DefectState state;
    state.rho = v * v.adjoint();
    state.basis = Basis::StandardZ;
    return state;
}

DefectState bell_state(int index) {
    if (index < 0 || index > 3) throw std::invalid_argument("bell_state: index must be 0..3");
    DefectState state;
    state.rho = Eigen::Matrix4cd::Zero();
    state.rho(index, index) = 1.0;
    state.basis = Basis::Bell;
    return state;
}

namespace {

// Unitary whose columns express the given basis in StandardZ coordinates.
Eigen::Matrix4cd basis_vectors(Basis basis, Placement placement) {
    switch (basis) {
        case Basis::StandardZ: return Eigen::Matrix4cd::Identity();
        case Basis::Bell: return bell_from_standard();
        default: return PointerBasis::make(placement).vectors;
    }
}

} // namespace

DefectState to_basis(const DefectState& state, Basis target, Placement pointer_placement) {
    const Placement from_placement = state.placement;
    const Placement to_placement =
        target == Basis::Pointer ? pointer_placement : from_placement;
    const Eigen::Matrix4cd U_from = basis_vectors(state.basis, from_placement);
    const Eigen::Matrix4cd U_to = basis_vectors(target, to_placement);
    DefectState out;
    out.rho = U_to.adjoint() * (U_from * state.rho * U_from.adjoint()) * U_to;
    out.basis = target;
    out.placement = to_placement;
    return out;
}

DefectState evolve(const DefectState& state, const DephasingCoefficients& coeffs,
                   std::size_t t_index) {
    if (t_index >= coeffs.size()) {
        throw std::out_of_range("evolve: time index beyond coefficient grid");
    }
    if (state.basis == Basis::Pointer && state.placement != coeffs.placement) {
        throw std::invalid_argument(
            "evolve: state pointer basis placement does not match the chain placement "
            "the coefficients were built for");
    }
    const PointerBasis pointer = PointerBasis::make(coeffs.placement);
    DefectState out = to_basis(state, Basis::Pointer, coeffs.placement);
    const double fS = coeffs.f_S[t_index], fA = coeffs.f_A[t_index];
    const double pS = coeffs.phi_S[t_index], pA = coeffs.phi_A[t_index];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            const double dS = pointer.s_S[i] - pointer.s_S[j];
            const double dA = pointer.s_A[i] - pointer.s_A[j];
            const double qS = pointer.s_S[i] * pointer.s_S[i] - pointer.s_S[j] * pointer.s_S[j];
            const double qA = pointer.s_A[i] * pointer.s_A[i] - pointer.s_A[j] * pointer.s_A[j];
            const std::complex<double> arg(-(fS * dS * dS + fA * dA * dA), pS * qS + pA * qA);
            out.rho(i, j) *= std::exp(arg);
        }
    }
    return out;
}

Eigen::Matrix4cd zeeman_matrix(double h) {
    Eigen::Matrix4cd Hd = Eigen::Matrix4cd::Zero();
    Hd(0, 2) = -2.0 * h;  // |phi_S><phi_A|
    Hd(2, 0) = -2.0 * h;
    return Hd;
}

StateCheck check_state(const DefectState& state) {
    StateCheck check;
    check.hermiticity_error = (state.rho - state.rho.adjoint()).cwiseAbs().maxCoeff();
    check.trace_error = std::abs(state.rho.trace() - std::complex<double>(1.0, 0.0));
    const Eigen::Matrix4cd herm = 0.5 * (state.rho + state.rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(herm);
    check.min_eigenvalue = solver.eigenvalues().minCoeff();
    return check;
}

void write_state_csv_header(std::ostream& out) {
    out << "t,basis";
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            out << ",re_" << i << j << ",im_" << i << j;
        }
    }
    out << "\n";
}

void append_state_csv_row(std::ostream& out, double t, const DefectState& state) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    out << buf << "," << to_string(state.basis);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g", state.rho(i, j).real(),
                          state.rho(i, j).imag());
            out << buf;
        }
    }
    out << "\n";
}

} // namespace isingbath

#include "isingbath/bath_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace isingbath {

Eigen::MatrixXd build_potential_matrix(const ChainSpec& spec) {
    spec.validate();
    const int M = 2 * spec.N;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(M, M);
    const double c = -2.0 * spec.J;
    for (int i = 0; i + 1 < M; ++i) {
        V(i, i + 1) = c;
        V(i + 1, i) = c;
    }
    V(0, M - 1) = c;
    V(M - 1, 0) = c;
    return V;
}

Eigen::MatrixXd parity_transform(int N) {
    if (N < 1) throw std::invalid_argument("parity_transform: N >= 1 required");
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    const double s = 1.0 / std::sqrt(2.0);
    for (int n = 0; n < N; ++n) {
        // row n: x_{n+1}^S picks x_{-(n+1)} (index N-1-n) and x_{n+1} (index N+n)
        R(n, N - 1 - n) = s;
        R(n, N + n) = s;
        R(N + n, N - 1 - n) = -s;
        R(N + n, N + n) = s;
    }
    return R;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> parity_split(const Eigen::MatrixXd& V_b) {
    if (V_b.rows() != V_b.cols() || V_b.rows() < 4 || V_b.rows() % 2 != 0) {
        throw std::invalid_argument("parity_split: expected a 2N x 2N matrix with N >= 2");
    }
    const int N = static_cast<int>(V_b.rows()) / 2;
    const Eigen::MatrixXd R = parity_transform(N);
    const Eigen::MatrixXd Lambda = R * V_b * R.transpose();
    const double off = std::max(Lambda.topRightCorner(N, N).cwiseAbs().maxCoeff(),
                                Lambda.bottomLeftCorner(N, N).cwiseAbs().maxCoeff());
    if (off > 1e-12) {
        throw std::runtime_error("parity_split: off-diagonal blocks do not vanish (|max| = " +
                                 std::to_string(off) + "); potential is not reflection symmetric");
    }
    return {Lambda.topLeftCorner(N, N), Lambda.bottomRightCorner(N, N)};
}

namespace {

bool is_tridiagonal(const Eigen::MatrixXd& V) {
    const int n = static_cast<int>(V.rows());
    for (int j = 0; j < n; ++j) {
        for (int i = j + 2; i < n; ++i) {
            if (V(i, j) != 0.0 || V(j, i) != 0.0) return false;
        }
    }
    return true;
}

void fix_signs(Eigen::MatrixXd& O) {
    for (int c = 0; c < O.cols(); ++c) {
        int arg = 0;
        double best = 0.0;
        for (int r = 0; r < O.rows(); ++r) {
            const double a = std::abs(O(r, c));
            if (a > best) {
                best = a;
                arg = r;
            }
        }
        if (O(arg, c) < 0.0) O.col(c) *= -1.0;
    }
}

} // namespace

SectorModes diagonalize_sector(const Eigen::MatrixXd& V) {
    if (V.rows() != V.cols() || V.rows() < 1) {
        throw std::invalid_argument("diagonalize_sector: square matrix required");
    }
    if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, V.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("diagonalize_sector: matrix is not symmetric");
    }
    const int n = static_cast<int>(V.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    if (n >= 3 && is_tridiagonal(V)) {
        Eigen::VectorXd diag = V.diagonal();
        Eigen::VectorXd sub(n - 1);
        for (int i = 0; i + 1 < n; ++i) sub(i) = V(i + 1, i);
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    } else {
        solver.compute(V, Eigen::ComputeEigenvectors);
    }
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("diagonalize_sector: eigendecomposition failed to converge");
    }
    SectorModes modes;
    Eigen::VectorXd evals = solver.eigenvalues();
    modes.vectors = solver.eigenvectors();
    if (evals(0) <= 0.0) {
        throw std::runtime_error("diagonalize_sector: non-positive squared frequency " +
                                 std::to_string(evals(0)) + " (J out of range?)");
    }
    const double ortho = (modes.vectors.transpose() * modes.vectors -
                          Eigen::MatrixXd::Identity(n, n))
                             .cwiseAbs()
                             .maxCoeff();
    if (ortho > 1e-10) {
        throw std::runtime_error("diagonalize_sector: eigenvector matrix lost orthogonality");
    }
    fix_signs(modes.vectors);
    modes.frequencies = evals.cwiseSqrt();
    return modes;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
coupling_vectors(const ChainSpec& spec, const Eigen::MatrixXd& O_S, const Eigen::MatrixXd& O_A) {
    const int N = static_cast<int>(O_S.rows());
    if (O_A.rows() != N || O_S.cols() != N || O_A.cols() != N) {
        throw std::invalid_argument("coupling_vectors: sector matrices must be N x N");
    }
    if (spec.l < 1 || spec.l > N) {
        throw std::invalid_argument("coupling_vectors: site index l out of range");
    }
    Eigen::VectorXd source = Eigen::VectorXd::Zero(N);
    source(spec.l - 1) = spec.coupling_prefactor();
    return {O_S.transpose() * source, O_A.transpose() * source};
}

double thermal_occupation(double omega, double T) {
    if (!(omega > 0.0)) throw std::invalid_argument("thermal_occupation: omega > 0 required");
    if (!(T >= 0.0)) throw std::invalid_argument("thermal_occupation: T >= 0 required");
    if (T == 0.0) return 0.0;
    // expm1 overflows to +inf for large omega/T, which correctly yields 0.
    const double e = std::expm1(omega / T);
    return std::isinf(e) ? 0.0 : 1.0 / e;
}

BathModes build_bath_modes(const ChainSpec& spec) {
    spec.validate();
    auto [V_S, V_A] = parity_split(build_potential_matrix(spec));
    const SectorModes mS = diagonalize_sector(V_S);
    const SectorModes mA = diagonalize_sector(V_A);
    auto [gS, gA] = coupling_vectors(spec, mS.vectors, mA.vectors);
    BathModes modes;
    modes.spec = spec;
    modes.omega_S = mS.frequencies;
    modes.omega_A = mA.frequencies;
    modes.gamma_S = std::move(gS);
    modes.gamma_A = std::move(gA);
    modes.occupation_S.resize(spec.N);
    modes.occupation_A.resize(spec.N);
    for (int i = 0; i < spec.N; ++i) {
        modes.occupation_S(i) = thermal_occupation(modes.omega_S(i), spec.T);
        modes.occupation_A(i) = thermal_occupation(modes.omega_A(i), spec.T);
    }
    return modes;
}

namespace {
constexpr const char* kCacheVersion = "isingbath-bath-modes-v1";

std::string format17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}
} // namespace

void save_bath_modes(const std::string& path, const BathModes& modes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_bath_modes: cannot open " + path);
    const ChainSpec& s = modes.spec;
    out << kCacheVersion << "\n"
        << s.N << " " << format17(s.J) << " " << format17(s.gamma) << " " << s.l << " "
        << to_string(s.coupling_norm) << "\n";
    auto dump = [&](const Eigen::VectorXd& v) {
        for (int i = 0; i < v.size(); ++i) out << format17(v(i)) << (i + 1 < v.size() ? " " : "\n");
    };
    dump(modes.omega_S);
    dump(modes.omega_A);
    dump(modes.gamma_S);
    dump(modes.gamma_A);
    if (!out) throw std::runtime_error("save_bath_modes: write failed for " + path);
}

std::optional<BathModes> load_bath_modes(const std::string& path, const ChainSpec& spec) {
    spec.validate();
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string version;
    if (!std::getline(in, version) || version != kCacheVersion) return std::nullopt;
    int N = 0, l = 0;
    double J = 0, gamma = 0;
    std::string norm;
    if (!(in >> N >> J >> gamma >> l >> norm)) return std::nullopt;
    if (N != spec.N || J != spec.J || gamma != spec.gamma || l != spec.l ||
        norm != to_string(spec.coupling_norm)) {
        return std::nullopt;
    }
    BathModes modes;
    modes.spec = spec;
    auto read_vec = [&](Eigen::VectorXd& v) {
        v.resize(N);
        for (int i = 0; i < N; ++i) {
            if (!(in >> v(i))) throw std::runtime_error("load_bath_modes: truncated cache " + path);
        }
    };
    read_vec(modes.omega_S);
    read_vec(modes.omega_A);
    read_vec(modes.gamma_S);
    read_vec(modes.gamma_A);
    modes.occupation_S.resize(N);
    modes.occupation_A.resize(N);
    for (int i = 0; i < N; ++i) {
        modes.occupation_S(i) = thermal_occupation(modes.omega_S(i), spec.T);
        modes.occupation_A(i) = thermal_occupation(modes.omega_A(i), spec.T);
    }
    return modes;
}

} // namespace isingbath

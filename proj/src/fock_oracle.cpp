#include "isingbath/fock_oracle.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>

#include "isingbath/bath_model.hpp"

namespace isingbath::oracle {

namespace {

using SparseReal = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Complex = std::complex<double>;

Eigen::VectorXcd sparse_apply(const SparseReal& H, const Eigen::VectorXcd& v) {
    const Eigen::VectorXd re = H * v.real().eval();
    const Eigen::VectorXd im = H * v.imag().eval();
    Eigen::VectorXcd out(v.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

double energy_expectation(const SparseReal& H, const Eigen::VectorXcd& psi) {
    return psi.dot(sparse_apply(H, psi)).real();
}

struct ModeLayout {
    int n_modes = 0;
    int fock_dim_per_mode = 0;
    std::size_t fock_dim = 1;  // (n_max+1)^n_modes
    std::vector<std::size_t> stride;

    ModeLayout(int modes, int n_max) : n_modes(modes), fock_dim_per_mode(n_max + 1) {
        stride.resize(static_cast<std::size_t>(modes));
        for (int i = modes - 1; i >= 0; --i) {
            stride[static_cast<std::size_t>(i)] = fock_dim;
            fock_dim *= static_cast<std::size_t>(fock_dim_per_mode);
        }
    }

    int occupation(std::size_t fock_index, int mode) const {
        return static_cast<int>((fock_index / stride[static_cast<std::size_t>(mode)]) %
                                static_cast<std::size_t>(fock_dim_per_mode));
    }
};

SparseReal build_hamiltonian(const BathModes& modes, const ModeLayout& layout) {
    const int n_modes = layout.n_modes;
    std::vector<double> omega(static_cast<std::size_t>(n_modes));
    std::vector<double> coupling(static_cast<std::size_t>(n_modes));
    std::vector<Eigen::Matrix4cd> sector_op(static_cast<std::size_t>(n_modes));
    const int N = modes.spec.N;
    const Eigen::Matrix4cd SxS = coupling_operator_S();
    const Eigen::Matrix4cd SxA = coupling_operator_A();
    for (int i = 0; i < n_modes; ++i) {
        const bool symmetric = i < N;
        omega[static_cast<std::size_t>(i)] = symmetric ? modes.omega_S(i) : modes.omega_A(i - N);
        coupling[static_cast<std::size_t>(i)] =
            symmetric ? modes.gamma_S(i) : modes.gamma_A(i - N);
        sector_op[static_cast<std::size_t>(i)] =
            (modes.spec.placement == Placement::SameSite || symmetric) ? SxS : SxA;
    }

    const std::size_t dim = 4 * layout.fock_dim;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(dim * static_cast<std::size_t>(2 + 4 * n_modes));
    for (std::size_t fock = 0; fock < layout.fock_dim; ++fock) {
        double diag = 0.0;
        for (int i = 0; i < n_modes; ++i) {
            diag += omega[static_cast<std::size_t>(i)] * layout.occupation(fock, i);
        }
        for (int d = 0; d < 4; ++d) {
            const auto row = static_cast<Eigen::Index>(d * layout.fock_dim + fock);
            triplets.emplace_back(row, row, diag);
        }
        for (int i = 0; i < n_modes; ++i) {
            const int n = layout.occupation(fock, i);
            if (n + 1 >= layout.fock_dim_per_mode) continue;
            const std::size_t raised = fock + layout.stride[static_cast<std::size_t>(i)];
            const double x_elem = std::sqrt(static_cast<double>(n + 1)) /
                                  std::sqrt(2.0 * omega[static_cast<std::size_t>(i)]);
            const Eigen::Matrix4cd& S = sector_op[static_cast<std::size_t>(i)];
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    const double s = S(a, b).real();
                    if (s == 0.0) continue;
                    const double v = -coupling[static_cast<std::size_t>(i)] * s * x_elem;
                    triplets.emplace_back(
                        static_cast<Eigen::Index>(a * layout.fock_dim + raised),
                        static_cast<Eigen::Index>(b * layout.fock_dim + fock), v);
                    triplets.emplace_back(
                        static_cast<Eigen::Index>(a * layout.fock_dim + fock),
                        static_cast<Eigen::Index>(b * layout.fock_dim + raised), v);
                }
            }
        }
    }
    SparseReal H(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    H.setFromTriplets(triplets.begin(), triplets.end());
    return H;
}

// Thermal product-Fock states enumerated in decreasing weight until the
// residual drops below the cutoff. Deterministic, no sampling noise.
struct WeightedFockState {
    std::size_t index = 0;
    double weight = 1.0;
};

std::vector<WeightedFockState> enumerate_thermal_states(const BathModes& modes,
                                                        const ModeLayout& layout,
                                                        double T, double cutoff) {
    const int n_modes = layout.n_modes;
    if (T <= 0.0) return {{0, 1.0}};
    std::vector<double> q(static_cast<std::size_t>(n_modes));
    double vacuum_weight = 1.0;
    const int N = modes.spec.N;
    for (int i = 0; i < n_modes; ++i) {
        const double w = i < N ? modes.omega_S(i) : modes.omega_A(i - N);
        q[static_cast<std::size_t>(i)] = std::exp(-w / T);
        vacuum_weight *= 1.0 - q[static_cast<std::size_t>(i)];
    }
    struct Node {
        double weight;
        std::size_t index;
        int frontier;  // children may only raise modes >= frontier (unique enumeration)
        bool operator<(const Node& other) const { return weight < other.weight; }
    };
    std::priority_queue<Node> heap;
    heap.push({vacuum_weight, 0, 0});
    std::vector<WeightedFockState> states;
    double accumulated = 0.0;
    while (!heap.empty() && accumulated < 1.0 - cutoff) {
        const Node node = heap.top();
        heap.pop();
        states.push_back({node.index, node.weight});
        accumulated += node.weight;
        for (int i = node.frontier; i < n_modes; ++i) {
            if (layout.occupation(node.index, i) + 1 >= layout.fock_dim_per_mode) continue;
            heap.push({node.weight * q[static_cast<std::size_t>(i)],
                       node.index + layout.stride[static_cast<std::size_t>(i)], i});
        }
    }
    return states;
}

struct DensePropagator {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd energies;
    double unitarity_error = 0.0;

    explicit DensePropagator(const SparseReal& H) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(H));
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("exact_boson_evolution: dense eigendecomposition failed");
        }
        vectors = solver.eigenvectors();
        energies = solver.eigenvalues();
        const Eigen::Index dim = vectors.rows();
        unitarity_error = (vectors.transpose() * vectors -
                           Eigen::MatrixXd::Identity(dim, dim))
                              .cwiseAbs()
                              .maxCoeff();
    }

    Eigen::VectorXcd at_time(const Eigen::VectorXcd& psi0, double t) const {
        const Eigen::VectorXd cr = vectors.transpose() * psi0.real();
        const Eigen::VectorXd ci = vectors.transpose() * psi0.imag();
        Eigen::VectorXcd c(cr.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) {
            c(k) = Complex(cr(k), ci(k)) * std::exp(Complex(0.0, -energies(k) * t));
        }
        const Eigen::VectorXd outr = vectors * c.real().eval();
        const Eigen::VectorXd outi = vectors * c.imag().eval();
        Eigen::VectorXcd out(outr.size());
        out.real() = outr;
        out.imag() = outi;
        return out;
    }
};

// exp(-iH dt) acting on a state through a Chebyshev expansion, truncated once
// the Bessel coefficients fall below machine precision. Spectral bounds come
// from Gershgorin disks, so the scaled operator is safely inside [-1, 1].
struct ChebyshevPropagator {
    const SparseReal& H;
    double center, half_width;

    explicit ChebyshevPropagator(const SparseReal& ham) : H(ham) {
        double lo = std::numeric_limits<double>::max();
        double hi = std::numeric_limits<double>::lowest();
        for (int r = 0; r < H.outerSize(); ++r) {
            double diag = 0.0, radius = 0.0;
            for (SparseReal::InnerIterator it(H, r); it; ++it) {
                if (it.col() == r) {
                    diag = it.value();
                } else {
                    radius += std::abs(it.value());
                }
            }
            lo = std::min(lo, diag - radius);
            hi = std::max(hi, diag + radius);
        }
        center = 0.5 * (hi + lo);
        half_width = std::max(0.5 * (hi - lo), 1e-12);
    }

    Eigen::VectorXcd step(const Eigen::VectorXcd& psi, double dt) const {
        const double tau = half_width * dt;
        Eigen::VectorXcd phi_prev = psi;                       // T_0 psi
        Eigen::VectorXcd phi = apply_scaled(psi);              // T_1 psi
        const Complex phase = std::exp(Complex(0.0, -center * dt));
        Eigen::VectorXcd acc = std::cyl_bessel_j(0, tau) * phi_prev;
        Complex ik(0.0, -1.0);
        acc += 2.0 * ik * std::cyl_bessel_j(1, tau) * phi;
        for (int k = 2;; ++k) {
            Eigen::VectorXcd next = 2.0 * apply_scaled(phi) - phi_prev;
            phi_prev.swap(phi);
            phi.swap(next);
            ik *= Complex(0.0, -1.0);
            const double bessel = std::cyl_bessel_j(k, tau);
            acc += 2.0 * ik * bessel * phi;
            if (std::abs(bessel) < 1e-17 && k > static_cast<int>(tau) + 8) break;
            if (k > static_cast<int>(tau) + 4000) {
                throw std::runtime_error("ChebyshevPropagator: expansion failed to converge");
            }
        }
        return phase * acc;
    }

private:
    Eigen::VectorXcd apply_scaled(const Eigen::VectorXcd& v) const {
        return (sparse_apply(H, v) - center * v) / half_width;
    }
};

Eigen::VectorXcd embed(const Eigen::Vector4cd& defect, std::size_t fock_index,
                       std::size_t fock_dim) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(4 * fock_dim));
    for (int d = 0; d < 4; ++d) {
        psi(static_cast<Eigen::Index>(d * fock_dim + fock_index)) = defect(d);
    }
    return psi;
}

void accumulate_partial_trace(std::vector<Eigen::Matrix4cd>& acc, std::size_t t_index,
                              const Eigen::VectorXcd& psi, double weight, std::size_t fock_dim) {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
            Complex sum = 0.0;
            const auto* pa = psi.data() + a * static_cast<Eigen::Index>(fock_dim);
            const auto* pb = psi.data() + b * static_cast<Eigen::Index>(fock_dim);
            for (std::size_t k = 0; k < fock_dim; ++k) sum += pa[k] * std::conj(pb[k]);
            rho(a, b) = sum;
            rho(b, a) = std::conj(sum);
        }
    }
    acc[t_index] += weight * rho;
}

} // namespace

void FockBathConfig::validate() const {
    if (N_small < 2 || N_small > 3) {
        throw std::invalid_argument("FockBathConfig: N_small must be 2 or 3");
    }
    if (n_max < 1) throw std::invalid_argument("FockBathConfig: n_max >= 1 required");
    if (!(T >= 0.0)) throw std::invalid_argument("FockBathConfig: T >= 0 required");
    if (dimension() > 200000) {
        throw std::invalid_argument("FockBathConfig: Hilbert dimension " +
                                    std::to_string(dimension()) + " exceeds the 2e5 cap");
    }
    if (t_grid.empty()) throw std::invalid_argument("FockBathConfig: empty time grid");
    double prev = -1.0;
    for (double t : t_grid) {
        if (!(t >= 0.0) || t < prev) {
            throw std::invalid_argument("FockBathConfig: time grid must be ascending and >= 0");
        }
        prev = t;
    }
}

std::size_t FockBathConfig::dimension() const {
    std::size_t dim = 4;
    for (int i = 0; i < 2 * N_small; ++i) dim *= static_cast<std::size_t>(n_max + 1);
    return dim;
}

FockEvolutionResult exact_boson_evolution(const FockBathConfig& cfg, const ChainSpec& spec,
                                          const DefectState& initial) {
    cfg.validate();
    if (spec.N != cfg.N_small) {
        throw std::invalid_argument("exact_boson_evolution: spec.N must equal cfg.N_small");
    }
    const BathModes modes = build_bath_modes(spec);
    const ModeLayout layout(2 * cfg.N_small, cfg.n_max);
    const SparseReal H = build_hamiltonian(modes, layout);

    const DefectState init_std = to_basis(initial, Basis::StandardZ);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> defect_solver(
        0.5 * (init_std.rho + init_std.rho.adjoint()));
    const auto bath_states = enumerate_thermal_states(modes, layout, cfg.T, cfg.weight_cutoff);

    FockEvolutionResult result;
    result.dimension = cfg.dimension();
    result.bath_states = bath_states.size();
    result.used_dense_propagator = result.dimension <= 4096;

    const std::size_t nt = cfg.t_grid.size();
    std::vector<Eigen::Matrix4cd> rho_acc(nt, Eigen::Matrix4cd::Zero());
    double total_weight = 0.0;

    std::optional<DensePropagator> dense;
    std::optional<ChebyshevPropagator> chebyshev;
    if (result.used_dense_propagator) {
        dense.emplace(H);
        result.unitarity_error = dense->unitarity_error;
    } else {
        chebyshev.emplace(H);
    }

    for (int d = 0; d < 4; ++d) {
        const double pd = defect_solver.eigenvalues()(d);
        if (pd < 1e-14) continue;
        const Eigen::Vector4cd defect_vec = defect_solver.eigenvectors().col(d);
        for (const auto& bath : bath_states) {
            const double weight = pd * bath.weight;
            total_weight += weight;
            Eigen::VectorXcd psi0 = embed(defect_vec, bath.index, layout.fock_dim);
            const double e0 = energy_expectation(H, psi0);
            if (dense) {
                for (std::size_t k = 0; k < nt; ++k) {
                    const Eigen::VectorXcd psi = dense->at_time(psi0, cfg.t_grid[k]);
                    result.norm_drift = std::max(result.norm_drift, std::abs(psi.norm() - 1.0));
                    result.energy_drift =
                        std::max(result.energy_drift, std::abs(energy_expectation(H, psi) - e0));
                    accumulate_partial_trace(rho_acc, k, psi, weight, layout.fock_dim);
                }
            } else {
                Eigen::VectorXcd psi = psi0;
                double t_now = 0.0;
                for (std::size_t k = 0; k < nt; ++k) {
                    const double dt = cfg.t_grid[k] - t_now;
                    if (dt > 0.0) psi = chebyshev->step(psi, dt);
                    t_now = cfg.t_grid[k];
                    result.norm_drift = std::max(result.norm_drift, std::abs(psi.norm() - 1.0));
                    result.energy_drift =
                        std::max(result.energy_drift, std::abs(energy_expectation(H, psi) - e0));
                    accumulate_partial_trace(rho_acc, k, psi, weight, layout.fock_dim);
                }
            }
        }
    }

    // Renormalize by the enumerated weight so the truncated thermal mixture
    // still traces to one.
    result.states.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        DefectState state;
        state.rho = rho_acc[k] / total_weight;
        state.basis = Basis::StandardZ;
        state.placement = spec.placement;
        result.states.push_back(state);
    }
    return result;
}

} // namespace isingbath::oracle

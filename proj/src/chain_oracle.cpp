#include "isingbath/chain_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace isingbath::oracle {

namespace {

using Complex = std::complex<double>;

// Qubit order within a basis index: bit 0 = defect A, bit 1 = defect B,
// bits 2.. = chain sites in the order (-N, ..., -1, 1, ..., N). A set bit
// means spin down.
int chain_bit(int ordered_site) { return 2 + ordered_site; }

void add_xx_bond(Eigen::MatrixXd& H, int bit_a, int bit_b, double strength, std::size_t dim) {
    const std::size_t mask = (std::size_t{1} << bit_a) | (std::size_t{1} << bit_b);
    for (std::size_t b = 0; b < dim; ++b) {
        H(static_cast<Eigen::Index>(b ^ mask), static_cast<Eigen::Index>(b)) += strength;
    }
}

Eigen::MatrixXd chain_only_hamiltonian(const SpinChainConfig& cfg) {
    const std::size_t dim = std::size_t{1} << cfg.n_sites;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        double field = 0.0;
        for (int s = 0; s < cfg.n_sites; ++s) {
            field += ((b >> s) & 1U) ? 0.5 : -0.5;  // -(1/2) sigma_z per site
        }
        H(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) += field;
    }
    for (int s = 0; s + 1 < cfg.n_sites; ++s) {
        const std::size_t mask = (std::size_t{1} << s) | (std::size_t{1} << (s + 1));
        for (std::size_t b = 0; b < dim; ++b) {
            H(static_cast<Eigen::Index>(b ^ mask), static_cast<Eigen::Index>(b)) += -cfg.J;
        }
    }
    const std::size_t corner =
        (std::size_t{1} << 0) | (std::size_t{1} << (cfg.n_sites - 1));
    for (std::size_t b = 0; b < dim; ++b) {
        H(static_cast<Eigen::Index>(b ^ corner), static_cast<Eigen::Index>(b)) += -cfg.J;
    }
    return H;
}

Eigen::MatrixXd full_hamiltonian(const SpinChainConfig& cfg) {
    const std::size_t dim = cfg.dimension();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        double field = 0.0;
        for (int s = 0; s < cfg.n_sites; ++s) {
            field += ((b >> chain_bit(s)) & 1U) ? 0.5 : -0.5;
        }
        H(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) += field;
    }
    for (int s = 0; s + 1 < cfg.n_sites; ++s) {
        add_xx_bond(H, chain_bit(s), chain_bit(s + 1), -cfg.J, dim);
    }
    add_xx_bond(H, chain_bit(0), chain_bit(cfg.n_sites - 1), -cfg.J, dim);
    const int half = cfg.n_sites / 2;
    add_xx_bond(H, 0, chain_bit(half - cfg.l), -cfg.gamma, dim);      // A at site -l
    add_xx_bond(H, 1, chain_bit(half + cfg.l - 1), -cfg.gamma, dim);  // B at site +l
    return H;
}

} // namespace

void SpinChainConfig::validate() const {
    if (n_sites < 2 || n_sites % 2 != 0) {
        throw std::invalid_argument("SpinChainConfig: n_sites must be even and >= 2");
    }
    if (dimension() > 4096) {
        throw std::invalid_argument("SpinChainConfig: Hilbert dimension exceeds 4096");
    }
    if (!(J >= 0.0) || !(gamma >= 0.0) || !(T >= 0.0)) {
        throw std::invalid_argument("SpinChainConfig: J, gamma, T must be >= 0");
    }
    if (l < 1 || l > n_sites / 2) {
        throw std::invalid_argument("SpinChainConfig: require 1 <= l <= n_sites/2");
    }
    if (t_grid.empty()) throw std::invalid_argument("SpinChainConfig: empty time grid");
    double prev = -1.0;
    for (double t : t_grid) {
        if (!(t >= 0.0) || t < prev) {
            throw std::invalid_argument("SpinChainConfig: time grid must be ascending and >= 0");
        }
        prev = t;
    }
}

ChainEvolutionResult exact_spin_chain_evolution(const SpinChainConfig& cfg,
                                                const DefectState& initial) {
    cfg.validate();
    const std::size_t chain_dim = std::size_t{1} << cfg.n_sites;
    const std::size_t dim = cfg.dimension();

    // Thermal chain eigenstates with Boltzmann weights above the cutoff.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> chain_solver(chain_only_hamiltonian(cfg));
    if (chain_solver.info() != Eigen::Success) {
        throw std::runtime_error("exact_spin_chain_evolution: chain eigendecomposition failed");
    }
    std::vector<std::pair<Eigen::Index, double>> chain_states;
    if (cfg.T <= 0.0) {
        chain_states.emplace_back(0, 1.0);
    } else {
        const Eigen::VectorXd& E = chain_solver.eigenvalues();
        double Z = 0.0;
        for (Eigen::Index k = 0; k < E.size(); ++k) Z += std::exp(-(E(k) - E(0)) / cfg.T);
        double accumulated = 0.0;
        for (Eigen::Index k = 0; k < E.size() && accumulated < 1.0 - cfg.weight_cutoff; ++k) {
            const double w = std::exp(-(E(k) - E(0)) / cfg.T) / Z;
            chain_states.emplace_back(k, w);
            accumulated += w;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full_solver(full_hamiltonian(cfg));
    if (full_solver.info() != Eigen::Success) {
        throw std::runtime_error("exact_spin_chain_evolution: full eigendecomposition failed");
    }
    const Eigen::MatrixXd& V = full_solver.eigenvectors();
    const Eigen::VectorXd& E = full_solver.eigenvalues();

    const DefectState init_std = to_basis(initial, Basis::StandardZ);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> defect_solver(
        0.5 * (init_std.rho + init_std.rho.adjoint()));

    const std::size_t nt = cfg.t_grid.size();
    std::vector<Eigen::Matrix4cd> rho_acc(nt, Eigen::Matrix4cd::Zero());
    ChainEvolutionResult result;
    result.dimension = dim;
    result.chain_states = chain_states.size();
    result.site_occupation_max.assign(nt, 0.0);
    std::vector<std::vector<double>> occupation(nt,
                                                std::vector<double>(cfg.n_sites, 0.0));
    double total_weight = 0.0;

    // Defect basis index d (bits: A=bit0, B=bit1) maps standard-basis index
    // |uu>,|ud>,|du>,|dd| = (A,B) bit pairs (0,0),(0,1),(1,0),(1,1) -> here
    // bit0 is A and bit1 is B, so standard index i = (A_bit << 1 | B_bit)
    // corresponds to machine index (B_bit << 1 | A_bit).
    const auto machine_defect_index = [](int standard_index) {
        const int a = (standard_index >> 1) & 1;
        const int b = standard_index & 1;
        return (b << 1) | a;
    };

    for (int d = 0; d < 4; ++d) {
        const double pd = defect_solver.eigenvalues()(d);
        if (pd < 1e-14) continue;
        const Eigen::Vector4cd defect_vec = defect_solver.eigenvectors().col(d);
        for (const auto& [chain_index, wc] : chain_states) {
            const double weight = pd * wc;
            total_weight += weight;
            Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
            const Eigen::VectorXd chain_vec = chain_solver.eigenvectors().col(chain_index);
            for (int i = 0; i < 4; ++i) {
                const std::size_t defect_bits =
                    static_cast<std::size_t>(machine_defect_index(i));
                for (std::size_t c = 0; c < chain_dim; ++c) {
                    psi0(static_cast<Eigen::Index>((c << 2) | defect_bits)) +=
                        defect_vec(i) * chain_vec(static_cast<Eigen::Index>(c));
                }
            }
            const Eigen::VectorXd c_re = V.transpose() * psi0.real().eval();
            const Eigen::VectorXd c_im = V.transpose() * psi0.imag().eval();
            const double e0 = c_re.dot(E.asDiagonal() * c_re) + c_im.dot(E.asDiagonal() * c_im);
            for (std::size_t k = 0; k < nt; ++k) {
                Eigen::VectorXcd c(c_re.size());
                double e_t = 0.0;
                for (Eigen::Index m = 0; m < c.size(); ++m) {
                    c(m) = Complex(c_re(m), c_im(m)) *
                           std::exp(Complex(0.0, -E(m) * cfg.t_grid[k]));
                    e_t += std::norm(c(m)) * E(m);
                }
                result.energy_drift = std::max(result.energy_drift, std::abs(e_t - e0));
                const Eigen::VectorXd psi_re = V * c.real().eval();
                const Eigen::VectorXd psi_im = V * c.imag().eval();
                // reduced defect state and per-site occupations
                Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
                for (std::size_t b = 0; b < dim; ++b) {
                    const Complex amp(psi_re(static_cast<Eigen::Index>(b)),
                                      psi_im(static_cast<Eigen::Index>(b)));
                    const double prob = std::norm(amp);
                    for (int s = 0; s < cfg.n_sites; ++s) {
                        if ((b >> chain_bit(s)) & 1U) {
                            occupation[k][static_cast<std::size_t>(s)] += weight * prob;
                        }
                    }
                }
                for (int i = 0; i < 4; ++i) {
                    const std::size_t bi = static_cast<std::size_t>(machine_defect_index(i));
                    for (int j = i; j < 4; ++j) {
                        const std::size_t bj = static_cast<std::size_t>(machine_defect_index(j));
                        Complex sum = 0.0;
                        for (std::size_t c2 = 0; c2 < chain_dim; ++c2) {
                            const std::size_t idx_i = (c2 << 2) | bi;
                            const std::size_t idx_j = (c2 << 2) | bj;
                            const Complex ai(psi_re(static_cast<Eigen::Index>(idx_i)),
                                             psi_im(static_cast<Eigen::Index>(idx_i)));
                            const Complex aj(psi_re(static_cast<Eigen::Index>(idx_j)),
                                             psi_im(static_cast<Eigen::Index>(idx_j)));
                            sum += ai * std::conj(aj);
                        }
                        rho(i, j) = sum;
                        if (j != i) rho(j, i) = std::conj(sum);
                    }
                }
                rho_acc[k] += weight * rho;
            }
        }
    }

    result.states.reserve(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        DefectState state;
        state.rho = rho_acc[k] / total_weight;
        state.basis = Basis::StandardZ;
        result.states.push_back(state);
        double occ_max = 0.0;
        for (int s = 0; s < cfg.n_sites; ++s) {
            occ_max = std::max(occ_max, occupation[k][static_cast<std::size_t>(s)] / total_weight);
        }
        result.site_occupation_max[k] = occ_max;
    }
    return result;
}

} // namespace isingbath::oracle

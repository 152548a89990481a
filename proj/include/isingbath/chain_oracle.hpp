// chain_oracle.hpp — exact diagonalization of the original small spin chain

#pragma once

#include <vector>

#include "isingbath/defect_space.hpp"

namespace isingbath::oracle {

// Exact Schroedinger evolution of defects + spin chain before bosonization,
// for chains small enough to diagonalize in full. Used to validate the
// weak-coupling, low-temperature regime behind the oscillator picture.
struct SpinChainConfig {
    int n_sites = 8;   // even; ring sites labeled -n/2..-1, 1..n/2
    double J = 0.05;
    double gamma = 0.02;
    double T = 1e-5;
    int l = 1;
    std::vector<double> t_grid;
    double weight_cutoff = 1e-10;  // residual thermal weight dropped

    // Hilbert dimension 4 * 2^n_sites must stay <= 4096.
    void validate() const;
    std::size_t dimension() const { return std::size_t{4} << n_sites; }
};

struct ChainEvolutionResult {
    std::vector<DefectState> states;           // reduced defect state, StandardZ
    std::vector<double> site_occupation_max;   // per time: max_i <(1 - sigma_i^z)/2>
    double energy_drift = 0.0;
    std::size_t dimension = 0;
    std::size_t chain_states = 0;              // thermal chain eigenstates used
};

// Chain Hamiltonian -J sum sigma_i^x sigma_{i+1}^x - (1/2) sum sigma_i^z on
// the ring (the transverse-field term carries the spin-1/2 normalization the
// bosonization assumes), with defect coupling
// -gamma (sigma_A^x sigma_{-l}^x + sigma_B^x sigma_{+l}^x) and degenerate
// defects. The chain starts in its thermal state at cfg.T.
// site_occupation_max tracks the per-site magnetization deviation, i.e. how
// far the chain leaves the polarized sector the bosonic picture requires.
ChainEvolutionResult exact_spin_chain_evolution(const SpinChainConfig& cfg,
                                                const DefectState& initial);

} // namespace isingbath::oracle

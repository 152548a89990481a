// fock_oracle.hpp — exact defects + truncated-Fock-bath evolution (brute force)

#pragma once

#include <vector>

#include "isingbath/defect_space.hpp"

namespace isingbath::oracle {

// Brute-force verifier for the dephasing map: the full Hamiltonian of the two
// defects and every bath normal mode is built in a truncated Fock space and
// evolved exactly, with no reference to the closed-form f/phi route.
struct FockBathConfig {
    int N_small = 2;             // half chain size; 2 N_small modes in total
    int n_max = 6;               // Fock cutoff per normal mode
    double T = 0.0;              // bath temperature
    std::vector<double> t_grid;  // ascending, non-negative
    double weight_cutoff = 1e-10;  // residual thermal weight dropped at T > 0

    // Total Hilbert dimension 4 * (n_max+1)^(2 N_small) must stay <= 2e5.
    void validate() const;
    std::size_t dimension() const;
};

struct FockEvolutionResult {
    std::vector<DefectState> states;  // reduced defect state, StandardZ basis
    double norm_drift = 0.0;          // max ||psi(t)|| deviation from 1
    double energy_drift = 0.0;        // max |<H>(t) - <H>(0)|
    double unitarity_error = 0.0;     // dense path: max |V^T V - 1|
    std::size_t dimension = 0;
    std::size_t bath_states = 0;      // thermal Fock states enumerated
    bool used_dense_propagator = false;
};

// Evolves rho_d(0) (x) thermal bath under
//   H = sum_i w_i n_i - sum_i g_i S_i x_i,   x_i = (a_i + a_i^dag)/sqrt(2 w_i),
// where S_i is the sector coupling operator (S_x^S for symmetric modes and
// S_x^A for antisymmetric ones, or S_x^S for all modes when the defects share
// a site). Dimensions up to 4096 use a dense eigendecomposition propagator;
// larger ones a Chebyshev expansion of exp(-iHt) truncated at machine
// precision. spec.N must equal cfg.N_small.
FockEvolutionResult exact_boson_evolution(const FockBathConfig& cfg, const ChainSpec& spec,
                                          const DefectState& initial);

} // namespace isingbath::oracle

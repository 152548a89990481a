// bath_model.hpp — bosonized chain potential, parity split, and normal modes

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>

#include "isingbath/chain_spec.hpp"

namespace isingbath {

// Normal-mode data of the symmetric (center-of-mass) and antisymmetric
// (relative) sectors: frequencies, couplings in the mode basis, and the
// thermal occupation of every mode. Immutable after construction.
struct BathModes {
    ChainSpec spec;
    Eigen::VectorXd omega_S, omega_A;            // ascending, in [sqrt(1-4J), sqrt(1+4J)]
    Eigen::VectorXd gamma_S, gamma_A;            // (O^{S,A})^T applied to the coupling vector
    Eigen::VectorXd occupation_S, occupation_A;  // 1/(exp(w/T)-1), zero at T=0
};

// 2N x 2N potential of the bosonized ring: unit diagonal, -2J on the
// nearest-neighbor and periodic corner entries. Site order is
// (-N, ..., -1, 1, ..., N).
Eigen::MatrixXd build_potential_matrix(const ChainSpec& spec);

// Orthogonal parity transform mapping site coordinates to
// (x_1^S..x_N^S, x_1^A..x_N^A) with x_n^{S,A} = (x_n +- x_{-n})/sqrt(2).
Eigen::MatrixXd parity_transform(int N);

// Applies the parity transform and returns the two diagonal blocks (V_S, V_A).
// Throws std::runtime_error if the off-diagonal blocks exceed 1e-12, which
// would signal a construction bug rather than a parameter problem.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> parity_split(const Eigen::MatrixXd& V_b);

struct SectorModes {
    Eigen::VectorXd frequencies;  // ascending; squared eigenvalues of V
    Eigen::MatrixXd vectors;      // orthogonal, deterministic sign convention
};

// Dense symmetric eigendecomposition with frequencies = sqrt(eigenvalues).
// Tridiagonal inputs (the parity blocks always are) take a fast path. The
// sign of each eigenvector is fixed so that its largest-magnitude component
// (first such index on ties) is positive.
SectorModes diagonalize_sector(const Eigen::MatrixXd& V);

// Coupling vector in the normal-mode basis of each sector. The source vector
// has a single nonzero entry, spec.coupling_prefactor(), at the index of site
// l; sites 1..N map to indices 0..N-1 of the parity-reduced subvectors.
std::pair<Eigen::VectorXd, Eigen::VectorXd>
coupling_vectors(const ChainSpec& spec, const Eigen::MatrixXd& O_S, const Eigen::MatrixXd& O_A);

double thermal_occupation(double omega, double T);

// Full pipeline: potential -> parity split -> per-sector modes -> couplings
// and occupations.
BathModes build_bath_modes(const ChainSpec& spec);

// Text cache keyed by (N, J, gamma, l, coupling_norm). Occupations are not
// cached; they are recomputed from the requesting spec's temperature.
void save_bath_modes(const std::string& path, const BathModes& modes);
std::optional<BathModes> load_bath_modes(const std::string& path, const ChainSpec& spec);

} // namespace isingbath

// entanglement.hpp — two-qubit concurrence

#pragma once

#include <Eigen/Dense>

#include <array>

#include "isingbath/defect_space.hpp"

namespace isingbath {

struct ConcurrenceResult {
    double value = 0.0;                 // max(0, l1 - l2 - l3 - l4), in [0, 1]
    std::array<double, 4> lambdas{};    // descending, all >= 0
};

// Spin-flipped matrix (sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y), with
// the complex conjugate taken in the StandardZ basis. Involutive.
Eigen::Matrix4cd spin_flip(const Eigen::Matrix4cd& rho_standard);

// Wootters concurrence. The lambdas are square roots of the eigenvalues of
// rho * rho_tilde, computed through the equivalent Hermitian form
// sqrt(rho) * rho_tilde * sqrt(rho); eigenvalues below 1e-12 are clamped to
// zero, which keeps separable states at exactly C = 0 instead of sqrt(eps)
// noise. Throws if the state fails positivity beyond tolerance.
ConcurrenceResult concurrence(const DefectState& state);

} // namespace isingbath

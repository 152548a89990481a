// dephasing.hpp — exact attenuation f(t) and phase phi(t) of the dephasing map

#pragma once

#include <iosfwd>
#include <vector>

#include "isingbath/bath_model.hpp"

namespace isingbath {

// Sign of the constant term in the thermal weight (2n +- 1) entering f(t).
// Plus is the physical choice: every summand of f is then non-negative and
// the T=0 limit reproduces the exact truncated-Fock evolution. Minus is kept
// behind this switch purely to audit the alternate printed convention, which
// makes coherences grow at low temperature.
enum class OccupationSign { Plus, Minus };

// f^{S,A} and phi^{S,A} evaluated on a shared time grid:
//   f(t)   = sum_i g_i^2 (2 n_i +- 1) / (2 w_i^3) * (1 - cos(w_i t))
//   phi(t) = sum_i g_i^2 / (2 w_i^2) * (t - sin(w_i t)/w_i)
// Off-diagonal elements of the defect density matrix in the pointer basis
// evolve as exp(-f * (ds)^2 + i * phi * d(s^2)); diagonals are invariant.
struct DephasingCoefficients {
    Placement placement = Placement::DistantSites;
    OccupationSign occupation = OccupationSign::Plus;
    std::vector<double> times;
    std::vector<double> f_S, f_A, phi_S, phi_A;

    std::size_t size() const noexcept { return times.size(); }
};

// Mode sums are accumulated in ascending frequency order with compensated
// summation, so results are reproducible digit-for-digit across platforms.
DephasingCoefficients dephasing_coefficients(const BathModes& modes,
                                             std::vector<double> times,
                                             OccupationSign occupation = OccupationSign::Plus);

// Columns: t, f_S, f_A, phi_S, phi_A. Full double precision.
void write_csv(const DephasingCoefficients& coeffs, std::ostream& out);

inline const char* to_string(OccupationSign s) noexcept {
    return s == OccupationSign::Plus ? "plus" : "minus";
}

} // namespace isingbath

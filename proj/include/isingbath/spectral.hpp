// spectral.hpp — bath spectral densities, their analytic zeros, and DFS feasibility

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isingbath/bath_model.hpp"

namespace isingbath {

enum class Sector { Symmetric, Antisymmetric };

struct SpectralDensity {
    Sector sector = Sector::Antisymmetric;
    std::vector<double> omegas;  // sample grid
    std::vector<double> values;  // broadened I(omega) >= 0
    std::vector<double> nodes;   // analytic zeros (antisymmetric sector only)
    double band_min = 0.0;       // sqrt(1 - 4J)
    double band_max = 0.0;       // sqrt(1 + 4J)
};

// I(w) = (pi/2) sum_n g_n^2 / w_n * L(w - w_n) with L a normalized Lorentzian
// of half-width `broadening`. Grid points outside
// [0, band_max + 5 * broadening] are rejected as likely misuse.
SpectralDensity spectral_density(const BathModes& modes, Sector sector, double broadening,
                                 std::vector<double> grid);

// Zeros of the antisymmetric-sector spectral density in the continuum limit:
// w0(p) = sqrt(1 - 4J cos(2 p pi / (2l - 1))), p = 0..l-1, ascending. p = 0 is
// the lower band edge; the l-1 remaining zeros are interior.
std::vector<double> node_frequencies(const ChainSpec& spec);

struct DfsNode {
    int p = 0;
    double omega = 0.0;
    double required_h = 0.0;  // defect splitting that would match this zero
    bool compatible = false;  // required_h below the bosonization threshold
};

// Feasibility of tuning the defect splitting h onto a spectral-density zero
// while staying in the weakly-coupled regime the bosonization needs. All
// zeros sit inside the frequency band around 1, so for J << 1 matching any of
// them requires h of order one and the report comes back negative.
struct DfsFeasibilityReport {
    std::vector<DfsNode> nodes;
    double band_min = 0.0, band_max = 0.0;
    double h_threshold = 0.2;
    bool has_interior_nodes = false;      // l >= 2
    bool bosonization_compatible = false; // any node with required_h < threshold

    std::string summary() const;
};

DfsFeasibilityReport dfs_feasibility(const ChainSpec& spec, double h_threshold = 0.2);

// Columns: omega, I_S, I_A (grids must match).
void write_csv(const SpectralDensity& symmetric, const SpectralDensity& antisymmetric,
               std::ostream& out);
// Columns: p, omega, required_h, compatible.
void write_csv(const DfsFeasibilityReport& report, std::ostream& out);

inline const char* to_string(Sector s) noexcept {
    return s == Sector::Symmetric ? "S" : "A";
}

} // namespace isingbath

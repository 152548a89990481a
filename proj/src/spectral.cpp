#include "isingbath/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "isingbath/numerics.hpp"

namespace isingbath {

SpectralDensity spectral_density(const BathModes& modes, Sector sector, double broadening,
                                 std::vector<double> grid) {
    if (!(broadening > 0.0)) {
        throw std::invalid_argument("spectral_density: broadening must be positive");
    }
    const double limit = modes.spec.band_max() + 5.0 * broadening;
    for (double w : grid) {
        if (!(w >= 0.0) || w > limit) {
            throw std::invalid_argument("spectral_density: grid point " + std::to_string(w) +
                                        " outside [0, band_max + 5*broadening]");
        }
    }
    const Eigen::VectorXd& omega =
        sector == Sector::Symmetric ? modes.omega_S : modes.omega_A;
    const Eigen::VectorXd& coupling =
        sector == Sector::Symmetric ? modes.gamma_S : modes.gamma_A;

    SpectralDensity density;
    density.sector = sector;
    density.band_min = modes.spec.band_min();
    density.band_max = modes.spec.band_max();
    if (sector == Sector::Antisymmetric) density.nodes = node_frequencies(modes.spec);
    density.values.resize(grid.size());
    const double half_pi = 0.5 * 3.14159265358979323846;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CompensatedSum sum;
        for (int n = 0; n < omega.size(); ++n) {
            const double weight = half_pi * coupling(n) * coupling(n) / omega(n);
            sum.add(weight * lorentzian(grid[k] - omega(n), broadening));
        }
        density.values[k] = sum.value();
    }
    density.omegas = std::move(grid);
    return density;
}

std::vector<double> node_frequencies(const ChainSpec& spec) {
    spec.validate();
    const double pi = 3.14159265358979323846;
    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(spec.l));
    for (int p = 0; p < spec.l; ++p) {
        const double c = std::cos(2.0 * p * pi / (2.0 * spec.l - 1.0));
        nodes.push_back(std::sqrt(1.0 - 4.0 * spec.J * c));
    }
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

DfsFeasibilityReport dfs_feasibility(const ChainSpec& spec, double h_threshold) {
    DfsFeasibilityReport report;
    report.band_min = spec.band_min();
    report.band_max = spec.band_max();
    report.h_threshold = h_threshold;
    report.has_interior_nodes = spec.l >= 2;
    const std::vector<double> nodes = node_frequencies(spec);
    for (int p = 0; p < static_cast<int>(nodes.size()); ++p) {
        DfsNode node;
        node.p = p;
        node.omega = nodes[static_cast<std::size_t>(p)];
        node.required_h = node.omega;
        node.compatible = node.required_h < h_threshold;
        report.bosonization_compatible = report.bosonization_compatible || node.compatible;
        report.nodes.push_back(node);
    }
    return report;
}

std::string DfsFeasibilityReport::summary() const {
    std::ostringstream out;
    out << "spectral-density zeros in band [" << band_min << ", " << band_max << "]:\n";
    for (const DfsNode& node : nodes) {
        out << "  p=" << node.p << "  omega=" << node.omega << "  required h=" << node.required_h
            << (node.compatible ? "  (below threshold)" : "  (incompatible, needs h ~ 1)") << "\n";
    }
    if (!has_interior_nodes) {
        out << "  no interior zero for l=1; only the band-edge node exists\n";
    }
    out << "protected-subspace tuning "
        << (bosonization_compatible ? "compatible" : "incompatible")
        << " with the weak-coupling regime (threshold h < " << h_threshold << ")\n";
    return out.str();
}

void write_csv(const SpectralDensity& symmetric, const SpectralDensity& antisymmetric,
               std::ostream& out) {
    if (symmetric.omegas != antisymmetric.omegas) {
        throw std::invalid_argument("write_csv: spectral densities sampled on different grids");
    }
    out << "omega,I_S,I_A\n";
    char buf[128];
    for (std::size_t k = 0; k < symmetric.omegas.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", symmetric.omegas[k],
                      symmetric.values[k], antisymmetric.values[k]);
        out << buf;
    }
}

void write_csv(const DfsFeasibilityReport& report, std::ostream& out) {
    out << "p,omega,required_h,compatible\n";
    char buf[96];
    for (const DfsNode& node : report.nodes) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", node.p, node.omega,
                      node.required_h, node.compatible ? 1 : 0);
        out << buf;
    }
}

} // namespace isingbath

// chain_spec.hpp — physical parameters of the chain and the two defect spins

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace isingbath {

// Where the two defects attach: two mirror sites -l and +l, or one shared site l.
enum class Placement { DistantSites, SameSite };

// Prefactor of the defect-bath coupling vector. Two conventions are in
// circulation for this model: `Paper` uses 2*sqrt(2)*gamma, `Derived` uses
// 2*gamma as obtained by direct substitution of the parity transform into the
// site-coupling Hamiltonian. They differ by sqrt(2), which rescales the
// dephasing functions f and phi by a factor of 2 and nothing else.
enum class CouplingNorm { Paper, Derived };

// Chain of 2N sites labeled -N..-1, 1..N on a ring, with transverse field 1,
// nearest-neighbor coupling J, and two defect spins attached with strength
// gamma at distance 2l-1 (or at the single site l in SameSite mode).
struct ChainSpec {
    double J = 0.2;
    double gamma = 0.04;
    double T = 1e-5;  // temperature, k_B = 1
    double h = 0.0;   // defect Zeeman splitting; spectral analysis only
    int N = 1000;     // half chain length
    int l = 1;        // attachment half-distance, 1 <= l <= N
    Placement placement = Placement::DistantSites;
    CouplingNorm coupling_norm = CouplingNorm::Paper;

    double coupling_prefactor() const noexcept {
        return coupling_norm == CouplingNorm::Paper ? 2.0 * std::sqrt(2.0) * gamma
                                                    : 2.0 * gamma;
    }

    // Throws std::invalid_argument on parameter violations. J < 1/4 keeps all
    // squared mode frequencies 1 - 4J cos(n pi / N) strictly positive.
    void validate() const {
        if (!(J >= 0.0) || !(J < 0.25)) {
            throw std::invalid_argument("ChainSpec: require 0 <= J < 1/4, got J=" + std::to_string(J));
        }
        if (!(gamma >= 0.0)) throw std::invalid_argument("ChainSpec: require gamma >= 0");
        if (!(T >= 0.0)) throw std::invalid_argument("ChainSpec: require T >= 0");
        if (N < 2) throw std::invalid_argument("ChainSpec: require N >= 2");
        if (l < 1 || l > N) throw std::invalid_argument("ChainSpec: require 1 <= l <= N");
    }

    double band_min() const noexcept { return std::sqrt(1.0 - 4.0 * J); }
    double band_max() const noexcept { return std::sqrt(1.0 + 4.0 * J); }
};

inline const char* to_string(Placement p) noexcept {
    return p == Placement::DistantSites ? "distant" : "same";
}

inline const char* to_string(CouplingNorm c) noexcept {
    return c == CouplingNorm::Paper ? "paper" : "derived";
}

} // namespace isingbath

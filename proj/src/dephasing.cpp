#include "isingbath/dephasing.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "isingbath/numerics.hpp"

namespace isingbath {

namespace {

void accumulate_sector(const Eigen::VectorXd& omega,
                       const Eigen::VectorXd& coupling,
                       const Eigen::VectorXd& occupation,
                       double sign,
                       const std::vector<double>& times,
                       std::vector<double>& f,
                       std::vector<double>& phi) {
    const int n = static_cast<int>(omega.size());
    const std::size_t nt = times.size();
    f.assign(nt, 0.0);
    phi.assign(nt, 0.0);
    for (std::size_t k = 0; k < nt; ++k) {
        const double t = times[k];
        CompensatedSum fsum, psum;
        for (int i = 0; i < n; ++i) {
            const double w = omega(i);
            const double g2 = coupling(i) * coupling(i);
            const double weight = 2.0 * occupation(i) + sign;
            fsum.add(g2 * weight / (2.0 * w * w * w) * (1.0 - std::cos(w * t)));
            psum.add(g2 / (2.0 * w * w) * (t - std::sin(w * t) / w));
        }
        f[k] = fsum.value();
        phi[k] = psum.value();
    }
}

} // namespace

DephasingCoefficients dephasing_coefficients(const BathModes& modes,
                                             std::vector<double> times,
                                             OccupationSign occupation) {
    for (double t : times) {
        if (!std::isfinite(t) || t < 0.0) {
            throw std::invalid_argument("dephasing_coefficients: times must be finite and >= 0");
        }
    }
    DephasingCoefficients c;
    c.placement = modes.spec.placement;
    c.occupation = occupation;
    const double sign = occupation == OccupationSign::Plus ? 1.0 : -1.0;
    accumulate_sector(modes.omega_S, modes.gamma_S, modes.occupation_S, sign, times, c.f_S, c.phi_S);
    accumulate_sector(modes.omega_A, modes.gamma_A, modes.occupation_A, sign, times, c.f_A, c.phi_A);
    c.times = std::move(times);
    return c;
}

void write_csv(const DephasingCoefficients& coeffs, std::ostream& out) {
    out << "t,f_S,f_A,phi_S,phi_A\n";
    char buf[192];
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", coeffs.times[k],
                      coeffs.f_S[k], coeffs.f_A[k], coeffs.phi_S[k], coeffs.phi_A[k]);
        out << buf;
    }
}

} // namespace isingbath

#include "isingbath/numerics.hpp"

#include <atomic>
#include <cmath>

namespace isingbath {

void fft_pow2(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("fft_pow2: size must be a nonzero power of two");
    }
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = data[i + k];
                const auto v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::optional<double> dominant_bin(const std::vector<std::complex<double>>& spectrum,
                                   std::size_t half_size,
                                   double noise_floor) {
    if (spectrum.size() < 4 || half_size < 2) return std::nullopt;
    std::size_t best = 0;
    double best_mag = 0.0;
    for (std::size_t k = 1; k < half_size; ++k) {
        const double m = std::abs(spectrum[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    if (best == 0 || best_mag <= noise_floor) return std::nullopt;
    double shift = 0.0;
    if (best + 1 < half_size) {
        const double a = std::abs(spectrum[best - 1]);
        const double b = best_mag;
        const double c = std::abs(spectrum[best + 1]);
        const double den = a - 2.0 * b + c;
        if (den != 0.0) shift = 0.5 * (a - c) / den;
    }
    return static_cast<double>(best) + shift;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("linear_fit: need two series of equal length >= 2");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LinearFit fit;
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissa");
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = fit.slope * x[i] + fit.intercept;
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, n_threads)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace isingbath

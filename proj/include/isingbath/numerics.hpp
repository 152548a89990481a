// numerics.hpp — compensated summation, FFT, peak refinement, and small fit helpers

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace isingbath {

// Neumaier variant of Kahan summation; keeps mode sums reproducible across
// platforms when accumulating thousands of trigonometric terms.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& data);

// Index of the largest-magnitude bin with k >= 1 (skips DC), refined by
// parabolic interpolation on the magnitude. Returns fractional bin index.
std::optional<double> dominant_bin(const std::vector<std::complex<double>>& spectrum,
                                   std::size_t half_size,
                                   double noise_floor = 1e-12);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Normalized Lorentzian of half-width eta.
inline double lorentzian(double x, double eta) noexcept {
    return eta / (3.14159265358979323846 * (x * x + eta * eta));
}

// Runs fn(i) for i in [0, n) on up to n_threads workers. fn must be pure with
// respect to shared state; each index writes only its own output slot.
void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn);

} // namespace isingbath

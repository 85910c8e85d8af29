#pragma once

// -----------------------------------------------------------------------------
// Order-zero Bessel functions J0, Y0 for real nonnegative arguments and the
// outgoing 2-D fundamental solution  Phi(k,r) = (i/4) H0^(1)(k r).
//
// Small arguments use the ascending power series accumulated in long double;
// beyond the crossover the Hankel amplitude/phase asymptotic expansion takes
// over. The crossover sits at x = 17: there the asymptotic tail bottoms out
// near e^(-2x) ~ 2e-15 while the series still holds ~5e-14 absolute, so both
// branches stay inside a 1e-10 budget with margin.
//
// Negative wavenumbers route through the conjugation identity
// H0^(1)(-x) = -conj(H0^(1)(x)), i.e. Phi(-k,r) = conj(Phi(k,r)).
// -----------------------------------------------------------------------------

#include <cmath>
#include <stdexcept>

#include "scatter2d/types.hpp"

namespace scatter2d {

namespace detail {

inline constexpr long double euler_gamma_l = 0.5772156649015328606065120900824024310422L;
inline constexpr long double pi_l = 3.141592653589793238462643383279502884197L;

inline constexpr double bessel_series_cut = 17.0;

inline long double j0_series_l(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int m = 1; m <= 200; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        sum += term;
        if (std::abs(term) < 1e-25L * (1.0L + std::abs(sum))) break;
    }
    return sum;
}

inline long double y0_series_l(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L;  // q^m / (m!)^2
    long double harmonic = 0.0L;
    long double sum = 0.0L;
    for (int m = 1; m <= 200; ++m) {
        term *= q / (static_cast<long double>(m) * m);
        harmonic += 1.0L / m;
        const long double contrib = ((m & 1) ? 1.0L : -1.0L) * harmonic * term;
        sum += contrib;
        if (std::abs(contrib) < 1e-25L * (1.0L + std::abs(sum))) break;
    }
    return (2.0L / pi_l) * ((std::log(x / 2.0L) + euler_gamma_l) * j0_series_l(x) + sum);
}

// Amplitude/phase expansion: with mu_m = ((2m)!)^2 / (m!^3 32^m),
//   P0(x) = 1 - mu_2/x^2 + mu_4/x^4 - ...,  Q0(x) = -mu_1/x + mu_3/x^3 - ...
// and  J0 = sqrt(2/(pi x)) (P0 cos(x - pi/4) - Q0 sin(x - pi/4)),
//      Y0 = sqrt(2/(pi x)) (P0 sin(x - pi/4) + Q0 cos(x - pi/4)).
// The series is asymptotic; terms are summed while they decrease.
inline void j0y0_asymptotic_l(long double x, long double& j0, long double& y0) {
    long double p = 1.0L, q = 0.0L;
    long double mu = 1.0L;  // mu_m / x^m
    long double prev = 1.0L;
    for (int m = 1; m <= 40; ++m) {
        // mu_{m}/mu_{m-1} = (2m-1)^2 / (8m)
        mu *= static_cast<long double>(2 * m - 1) * (2 * m - 1) / (8.0L * m * x);
        if (std::abs(mu) >= prev) break;
        prev = std::abs(mu);
        const long double s = ((m / 2) % 2 == 0) ? 1.0L : -1.0L;
        if (m % 2 == 1)
            q += -s * mu;  // odd m: -mu1/x + mu3/x^3 - ...
        else
            p += s * mu;  // even m: -mu2/x^2 + mu4/x^4 - ... (s flips sign)
        if (prev < 1e-22L) break;
    }
    const long double amp = std::sqrt(2.0L / (pi_l * x));
    const long double chi = x - pi_l / 4.0L;
    const long double c = std::cos(chi), s = std::sin(chi);
    j0 = amp * (p * c - q * s);
    y0 = amp * (p * s + q * c);
}

}  // namespace detail

inline double bessel_j0(double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("bessel_j0: argument must be finite and >= 0");
    if (x <= detail::bessel_series_cut) return static_cast<double>(detail::j0_series_l(x));
    long double j0, y0;
    detail::j0y0_asymptotic_l(x, j0, y0);
    return static_cast<double>(j0);
}

inline double bessel_y0(double x) {
    if (!std::isfinite(x) || x <= 0.0)
        throw std::invalid_argument("bessel_y0: argument must be finite and > 0");
    if (x <= detail::bessel_series_cut) return static_cast<double>(detail::y0_series_l(x));
    long double j0, y0;
    detail::j0y0_asymptotic_l(x, j0, y0);
    return static_cast<double>(y0);
}

/// Outgoing fundamental solution Phi(k,r) = (i/4) H0^(1)(|k| r), conjugated
/// for k < 0. The r = 0 singularity is the kernel builder's business.
inline cdouble phi(double k, double r) {
    if (!std::isfinite(k) || k == 0.0) throw std::invalid_argument("phi: k must be finite and nonzero");
    if (!std::isfinite(r) || r <= 0.0) throw std::invalid_argument("phi: r must be finite and > 0");
    const double x = std::abs(k) * r;
    const cdouble h0{bessel_j0(x), bessel_y0(x)};
    const cdouble value = cdouble{0.0, 0.25} * h0;
    return k > 0.0 ? value : std::conj(value);
}

}  // namespace scatter2d

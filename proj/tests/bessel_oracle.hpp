#pragma once

// Test-side reference for J0/Y0, independent of the implementation's
// large-argument path: ascending series in long double for x <= 10,
// integral representations evaluated by composite Gauss-Legendre panels
// beyond. Good to ~1e-16 absolute over [1e-6, 1e3].

#include <cmath>
#include <vector>

namespace bessel_oracle {

inline constexpr long double pi_l = 3.141592653589793238462643383279502884197L;
inline constexpr long double gamma_l = 0.5772156649015328606065120900824024310422L;

struct GaussRule {
    std::vector<long double> nodes;    // on (-1, 1)
    std::vector<long double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n.
inline const GaussRule& gl16() {
    static const GaussRule rule = [] {
        const int n = 16;
        GaussRule r;
        r.nodes.resize(n);
        r.weights.resize(n);
        for (int i = 0; i < n; ++i) {
            long double x = std::cos(pi_l * (i + 0.75L) / (n + 0.5L));
            for (int it = 0; it < 100; ++it) {
                long double p0 = 1.0L, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
                const long double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-20L) break;
            }
            long double p0 = 1.0L, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
            r.nodes[i] = x;
            r.weights[i] = 2.0L / ((1.0L - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

template <class F>
long double integrate_panels(const F& f, long double a, long double b, int panels) {
    const GaussRule& rule = gl16();
    const long double dx = (b - a) / panels;
    long double total = 0.0L;
    for (int p = 0; p < panels; ++p) {
        const long double mid = a + (p + 0.5L) * dx;
        long double acc = 0.0L;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f(mid + 0.5L * dx * rule.nodes[i]);
        total += acc * 0.5L * dx;
    }
    return total;
}

inline long double j0_series(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int m = 1; m <= 300; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        sum += term;
        if (std::abs(term) < 1e-30L * (1.0L + std::abs(sum))) break;
    }
    return sum;
}

inline long double y0_series(long double x) {
    const long double q = x * x / 4.0L;
    long double term = 1.0L, harmonic = 0.0L, sum = 0.0L;
    for (int m = 1; m <= 300; ++m) {
        term *= q / (static_cast<long double>(m) * m);
        harmonic += 1.0L / m;
        sum += ((m & 1) ? 1.0L : -1.0L) * harmonic * term;
        if (term < 1e-30L * (1.0L + std::abs(sum))) break;
    }
    return (2.0L / pi_l) * ((std::log(x / 2.0L) + gamma_l) * j0_series(x) + sum);
}

// J0(x) = (1/pi) int_0^pi cos(x sin t) dt
inline long double j0_quadrature(long double x) {
    const int panels = std::max(16, static_cast<int>(x));
    return integrate_panels([x](long double t) { return std::cos(x * std::sin(t)); }, 0.0L, pi_l,
                            panels) /
           pi_l;
}

// Y0(x) = (1/pi) int_0^pi sin(x sin t) dt - (2/pi) int_0^inf e^{-x sinh t} dt
inline long double y0_quadrature(long double x) {
    const int panels = std::max(16, static_cast<int>(x));
    const long double osc =
        integrate_panels([x](long double t) { return std::sin(x * std::sin(t)); }, 0.0L, pi_l,
                         panels) /
        pi_l;
    const long double T = std::asinh(90.0L / x);
    const long double lap =
        integrate_panels([x](long double t) { return std::exp(-x * std::sinh(t)); }, 0.0L, T, 64);
    return osc - (2.0L / pi_l) * lap;
}

inline long double j0_ref(long double x) { return x <= 10.0L ? j0_series(x) : j0_quadrature(x); }

inline long double y0_ref(long double x) { return x <= 10.0L ? y0_series(x) : y0_quadrature(x); }

}  // namespace bessel_oracle

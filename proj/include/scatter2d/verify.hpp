#pragma once

// -----------------------------------------------------------------------------
// Self-check suites shared by the CLI `verify` subcommand and the acceptance
// tests: geometry identities, matrix-free solver vs dense direct solve, and
// the discrete sampling-theorem study.
// -----------------------------------------------------------------------------

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "scatter2d/format.hpp"
#include "scatter2d/geometry.hpp"
#include "scatter2d/metrics.hpp"
#include "scatter2d/oracle/dense_ls.hpp"
#include "scatter2d/phantom.hpp"

namespace scatter2d {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// For random in-Omega frequencies: k(theta'-theta) = 2 pi xi and unit angles.
inline std::vector<CheckResult> verify_geometry(int samples = 1000, std::uint64_t seed = 2026) {
    std::vector<CheckResult> results;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-5.0, 5.0);

    struct Case {
        std::string name;
        ScatteringScenario scenario;
    };
    const std::vector<Case> cases = {
        {"fixed-energy", FixedEnergy(10.0)},
        {"fixed-angle", FixedAngle::from_angle(0.7)},
        {"backscattering", Backscattering{}},
        {"full-data-angle", FixedAngle::from_angle(2.0 * pi * 3 / 10)},
    };
    for (const auto& c : cases) {
        double worst_identity = 0.0, worst_unit = 0.0;
        int found = 0;
        while (found < samples) {
            Vec2 xi{box(rng), box(rng)};
            if (const auto* fe = std::get_if<FixedEnergy>(&c.scenario))
                xi = xi * (fe->k0 / (pi * 5.0 * std::sqrt(2.0)));  // keep inside the disk
            if (!in_omega(c.scenario, xi)) continue;
            const auto ep = experiment_params(c.scenario, xi);
            if (!ep) continue;
            ++found;
            const Vec2 lhs = (ep->theta_out - ep->theta_in) * ep->k;
            const Vec2 rhs = xi * (2.0 * pi);
            const double id_err = (lhs - rhs).norm() / std::max(1.0, rhs.norm());
            const double unit_err = std::max(std::abs(ep->theta_in.norm() - 1.0),
                                             std::abs(ep->theta_out.norm() - 1.0));
            worst_identity = std::max(worst_identity, id_err);
            worst_unit = std::max(worst_unit, unit_err);
        }
        const bool pass = worst_identity <= 1e-10 && worst_unit <= 1e-12;
        results.push_back({"geometry/" + c.name, pass,
                           "max identity residual " + detail::fmt_g17(worst_identity) +
                               ", max unit deviation " + detail::fmt_g17(worst_unit)});
    }
    return results;
}

// Matrix-free collocation solve against the dense direct solve of the same
// discrete system (N = 16, phantom potential).
inline std::vector<CheckResult> verify_solver(std::vector<double> ks = {1.0, 2.0, pi},
                                              double rel_tol = 1e-8) {
    std::vector<CheckResult> results;
    const GridSpec g(2.1, 16);
    const NodalField V = build_phantom("paper", g);
    for (double k : ks) {
        const PeriodizedKernel kern = build_kernel(g, k);
        const NodalField u_fft = solve_scattered_field(kern, V, {1.0, 0.0}, k, 1e-10);
        const NodalField u_dense = oracle::dense_solve_scattered(g, k, V, {1.0, 0.0});
        NodalField diff = u_fft;
        for (std::size_t p = 0; p < diff.values.size(); ++p) diff.values[p] -= u_dense.values[p];
        const double rel = norm0(diff) / norm0(u_dense);
        results.push_back({"solver/dense-oracle k=" + detail::fmt_g17(k), rel <= rel_tol,
                           "relative difference " + detail::fmt_g17(rel)});
    }
    return results;
}

namespace detail {

// separable triangle bump of half-width 1 and its transform
inline double hat_function(Vec2 x) {
    const double t1 = std::max(0.0, 1.0 - std::abs(x.x));
    const double t2 = std::max(0.0, 1.0 - std::abs(x.y));
    return t1 * t2;
}

inline double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

inline double hat_transform(Vec2 xi) {
    const double s1 = sinc(pi * xi.x);
    const double s2 = sinc(pi * xi.y);
    return s1 * s1 * s2 * s2;
}

inline double gauss_function(Vec2 x) { return std::exp(-8.0 * x.norm2()); }

inline double gauss_transform(Vec2 xi) {
    return (pi / 8.0) * std::exp(-pi * pi * xi.norm2() / 8.0);
}

}  // namespace detail

// Discrete sampling theorem: exact recovery of a trigonometric polynomial,
// order ~1.5 for the separable hat, superalgebraic for a Gaussian.
inline std::vector<CheckResult> verify_sampling(std::vector<int> N_list = {16, 32, 64, 128},
                                                double hat_min_order = 1.4) {
    std::vector<CheckResult> results;
    const double R = 2.1;

    // trigonometric polynomial: modes (1,0), (3,-2), (-5,4)
    const std::vector<std::pair<Index2, cdouble>> modes = {
        {{1, 0}, {1.0, 0.0}}, {{3, -2}, {0.5, -0.25}}, {{-5, 4}, {-0.75, 0.5}}};
    auto trig_transform = [&](Vec2 xi) -> cdouble {
        for (const auto& [j, a] : modes) {
            const Vec2 xij{j.j1 / (2.0 * R), j.j2 / (2.0 * R)};
            if (std::abs(xi.x - xij.x) < 1e-12 && std::abs(xi.y - xij.y) < 1e-12)
                return a * 4.0 * R * R;
        }
        return 0.0;
    };
    auto trig_function = [&](Vec2 x) -> cdouble {
        cdouble s = 0.0;
        for (const auto& [j, a] : modes)
            s += a * std::polar(1.0, 2.0 * pi * (j.j1 * x.x + j.j2 * x.y) / (2.0 * R));
        return s;
    };
    const auto trig = sampling_study(trig_transform, trig_function, R, N_list, 0);
    double worst = 0.0;
    for (const auto& [N, e] : trig.errors) worst = std::max(worst, e);
    results.push_back({"sampling/trig-polynomial", worst <= 1e-12,
                       "max error " + detail::fmt_g17(worst)});

    const auto hat = sampling_study(detail::hat_transform, detail::hat_function, R, N_list, 1);
    results.push_back({"sampling/hat-order", hat.fitted_order >= hat_min_order,
                       "fitted order " + detail::fmt_g17(hat.fitted_order)});

    const auto gauss = sampling_study(detail::gauss_transform, detail::gauss_function, R, N_list, 2);
    results.push_back({"sampling/gaussian-superalgebraic", gauss.fitted_order > 4.0,
                       "fitted order " + detail::fmt_g17(gauss.fitted_order)});
    return results;
}

}  // namespace scatter2d

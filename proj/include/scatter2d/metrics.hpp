#pragma once

// -----------------------------------------------------------------------------
// Error norms, convergence-rate fits, and the aliasing / sampling studies.
// -----------------------------------------------------------------------------

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scatter2d/born.hpp"
#include "scatter2d/forward.hpp"
#include "scatter2d/grid.hpp"

namespace scatter2d {

// error^2 = (4R^2/N^2) sum_j |a(x_j) - b(x_j)|^2, an approximation of the
// L^2(G_R) distance; equals 2R * norm0(a - b) by construction.
inline double l2_error(const NodalField& approx, const NodalField& reference) {
    if (!(approx.grid == reference.grid)) throw std::invalid_argument("l2_error: grid mismatch");
    NodalField diff = approx;
    for (std::size_t p = 0; p < diff.values.size(); ++p) diff.values[p] -= reference.values[p];
    return 2.0 * approx.grid.R * norm0(diff);
}

struct RateFit {
    double exponent = 0.0;   // fitted alpha in error ~ k^-alpha
    double intercept = 0.0;  // log-log intercept
    double residual = 0.0;   // rms residual of the log-log fit
    std::vector<std::pair<double, double>> points;
};

// Least-squares line through (log k, log error); exponent = -slope.
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("fit_rate: need at least 2 points");
    const std::size_t n = points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [k, e] : points) {
        if (!(k > 0.0) || !(e > 0.0))
            throw std::invalid_argument("fit_rate: points must be positive");
        const double x = std::log(k), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (const auto& [k, e] : points) {
        const double r = std::log(e) - (slope * std::log(k) + intercept);
        ss += r * r;
    }
    RateFit fit;
    fit.exponent = -slope;
    fit.intercept = intercept;
    fit.residual = std::sqrt(ss / n);
    fit.points = points;
    return fit;
}

struct AliasingErrors {
    double vs_coarse = 0.0;        // against V sampled on the coarse mesh
    double vs_fine = 0.0;          // against V on the fine mesh (upsampled reconstruction)
    double vs_fine_lowpass = 0.0;  // against the half-band low pass of V on the fine mesh
};

// Reconstruct on a coarse grid from data synthesized on a grid twice finer,
// then compare against the raw and low-passed potential. Quantifies what part
// of the error is plain aliasing: the low-passed comparison should be smaller.
inline AliasingErrors aliasing_study(const NodalField& V_fine, const FarFieldDataset& d_fine,
                                     int coarse_N) {
    if (!(V_fine.grid == d_fine.grid)) throw std::invalid_argument("aliasing_study: grid mismatch");
    if (d_fine.grid.N != 2 * coarse_N)
        throw std::invalid_argument("aliasing_study: fine N must be twice the coarse N");
    const GridSpec fine = d_fine.grid;
    const GridSpec coarse(fine.R, coarse_N);

    // restrict the dataset to the coarse frequency range (same xi spacing)
    FarFieldDataset d_coarse(coarse, d_fine.scenario);
    for (std::size_t p = 0; p < d_coarse.values.size(); ++p)
        d_coarse.values[p] = d_fine.values[fine.flatten(coarse.unflatten(p))];
    d_coarse.noise_level = d_fine.noise_level;
    d_coarse.seed = d_fine.seed;

    const NodalField rec = born_invert(d_coarse).potential;

    NodalField v_sub(coarse);
    for (std::size_t p = 0; p < v_sub.values.size(); ++p) {
        const Index2 j = coarse.unflatten(p);
        v_sub.values[p] = V_fine.at({2 * j.j1, 2 * j.j2});
    }

    const NodalField rec_up = from_spectral(embed_spectral(to_spectral(rec), fine));
    const NodalField v_lp = from_spectral(lowpass(to_spectral(V_fine), 0.5));

    AliasingErrors out;
    out.vs_coarse = l2_error(rec, v_sub);
    out.vs_fine = l2_error(rec_up, V_fine);
    out.vs_fine_lowpass = l2_error(rec_up, v_lp);
    return out;
}

struct SamplingStudy {
    std::vector<std::pair<int, double>> errors;  // (N, ||q_h - q_sharp||_0)
    double fitted_order = 0.0;                   // +inf when recovery is exact
};

// Discrete inverse-transform approximation against the periodized reference:
// build q_h from samples of the continuous transform g on the fixed frequency
// lattice xi_j = j/(2R), compare with the lattice sum of q, and fit the decay
// order in h. Use copies = 0 for references that are already 2R-periodic.
template <class G, class Q>
SamplingStudy sampling_study(const G& g_transform, const Q& q, double R,
                             const std::vector<int>& N_list, int copies = 1) {
    if (N_list.size() < 3) throw std::invalid_argument("sampling_study: need >= 3 grid sizes");
    SamplingStudy study;
    for (int N : N_list) {
        const GridSpec grid(R, N);
        SpectralField c(grid);
        const double inv_scale = 1.0 / (4.0 * R * R);
        for (std::size_t p = 0; p < c.coeffs.size(); ++p)
            c.coeffs[p] = cdouble(g_transform(grid.freq(grid.unflatten(p)))) * inv_scale;
        const NodalField q_h = from_spectral(c);
        const NodalField ref = periodize(q, grid, copies);
        NodalField diff = q_h;
        for (std::size_t p = 0; p < diff.values.size(); ++p) diff.values[p] -= ref.values[p];
        study.errors.emplace_back(N, norm0(diff));
    }
    bool all_positive = true;
    for (const auto& [N, e] : study.errors)
        if (!(e > 0.0)) all_positive = false;
    if (all_positive) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [N, e] : study.errors) pts.emplace_back(static_cast<double>(N), e);
        study.fitted_order = fit_rate(pts).exponent;  // error ~ N^-order = C h^order
    } else {
        study.fitted_order = inf;
    }
    return study;
}

}  // namespace scatter2d

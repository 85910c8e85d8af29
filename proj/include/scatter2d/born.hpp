#pragma once

// -----------------------------------------------------------------------------
// Born inversion: the discrete potential V_B,h is defined by matching its
// (2R)^2-scaled spectral coefficients to the far-field samples,
//   (2R)^2 c_j(V_B,h) = u_inf(theta'(xi_j), theta(xi_j), k(xi_j)),
// so recovery is a single inverse transform. Mesh points outside Omega are
// zero-filled (and defensively re-zeroed here: datasets loaded from files may
// violate the convention).
// -----------------------------------------------------------------------------

#include <stdexcept>
#include <variant>
#include <vector>

#include "scatter2d/forward.hpp"
#include "scatter2d/geometry.hpp"
#include "scatter2d/grid.hpp"

namespace scatter2d {

struct BornResult {
    NodalField potential;
    ScatteringScenario scenario;
    int zero_filled_count = 0;               // mesh points outside Omega
    std::vector<int> per_angle_zero_filled;  // full data only
};

namespace detail {

inline NodalField invert_data_to_potential(const GridSpec& g, const ScatteringScenario& s,
                                           const std::vector<cdouble>& values,
                                           int* zero_filled = nullptr) {
    SpectralField c(g);
    const double inv_scale = 1.0 / (4.0 * g.R * g.R);
    int zeros = 0;
    for (std::size_t p = 0; p < c.coeffs.size(); ++p) {
        if (in_omega(s, g.freq(g.unflatten(p)))) {
            c.coeffs[p] = values[p] * inv_scale;
        } else {
            c.coeffs[p] = 0.0;
            ++zeros;
        }
    }
    if (zero_filled) *zero_filled = zeros;
    return from_spectral(c);
}

}  // namespace detail

inline BornResult born_invert(const FarFieldDataset& d) {
    int zeros = 0;
    NodalField v = detail::invert_data_to_potential(d.grid, d.scenario, d.values, &zeros);
    return {std::move(v), d.scenario, zeros, {}};
}

// Full-data inversion: arithmetic mean of the per-angle potentials. Each
// angle's hyperplane stays zero-filled in its own term, so excluded rays are
// averaged as zeros.
inline BornResult born_full_data(const std::vector<FarFieldDataset>& per_angle) {
    if (per_angle.empty()) throw std::invalid_argument("born_full_data: empty dataset list");
    const GridSpec g = per_angle.front().grid;
    std::vector<Vec2> angles;
    std::vector<int> zero_counts;
    NodalField mean(g);
    for (const auto& d : per_angle) {
        if (!(d.grid == g)) throw std::invalid_argument("born_full_data: grid mismatch");
        BornResult one = born_invert(d);
        for (std::size_t p = 0; p < mean.values.size(); ++p)
            mean.values[p] += one.potential.values[p];
        zero_counts.push_back(one.zero_filled_count);
        if (const auto* fa = std::get_if<FixedAngle>(&d.scenario)) angles.push_back(fa->theta0);
    }
    const double inv = 1.0 / static_cast<double>(per_angle.size());
    for (auto& z : mean.values) z *= inv;
    // the combined Omega excludes only the origin
    ScatteringScenario combined =
        angles.size() == per_angle.size() ? ScatteringScenario(FullData(angles))
                                          : per_angle.front().scenario;
    int zeros = 0;
    for (std::size_t p = 0; p < g.size(); ++p)
        if (!in_omega(combined, g.freq(g.unflatten(p)))) ++zeros;
    return {std::move(mean), std::move(combined), zeros, std::move(zero_counts)};
}

}  // namespace scatter2d

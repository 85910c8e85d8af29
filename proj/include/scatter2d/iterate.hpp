#pragma once

// -----------------------------------------------------------------------------
// Fixed-point refinement of the Born inversion. Starting from V^0 = 0, each
// step solves the periodized Lippmann-Schwinger equation with the current
// iterate at every in-Omega mesh frequency, subtracts the resulting nonlinear
// correction from the data, and inverts the transform:
//
//   (2R)^2 c_j(V^{n+1}) = u_inf(xi_j)
//                       - h^2 sum_y e^{-i k_j theta'_j . y} V^n(y) u_s^n(y)
//
// V^1 coincides with the Born inversion (the correction vanishes for V^0=0).
// The correction quadrature runs over the whole cell by default; restricting
// it to the unit disk (where u_s is physically reliable) is an option.
// Nothing guarantees convergence; a divergence guard aborts once an iterate
// outgrows the Born inversion by 10^3.
// -----------------------------------------------------------------------------

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "scatter2d/born.hpp"
#include "scatter2d/forward.hpp"
#include "scatter2d/metrics.hpp"
#include "scatter2d/parallel.hpp"

namespace scatter2d {

struct IterateOptions {
    double tol = 1e-7;
    double support_radius = inf;  // correction quadrature region
    int threads = 1;
    double divergence_factor = 1e3;
    GmresOptions gmres;
    KernelCache* cache = nullptr;
    ForwardStats* stats = nullptr;
};

struct ReconstructionRun {
    std::vector<NodalField> iterates;  // V^0 = 0, V^1, ..., V^K
    std::vector<double> errors;        // vs reference, one per iterate (when given)
    ScatteringScenario scenario;
    long total_solves = 0;
    long solver_failures = 0;

    explicit ReconstructionRun(ScatteringScenario s) : scenario(std::move(s)) {}
};

struct IterateError : std::runtime_error {
    std::vector<std::size_t> failed_indices;
    std::shared_ptr<ReconstructionRun> partial;
    IterateError(const std::string& msg, std::vector<std::size_t> failed,
                 std::shared_ptr<ReconstructionRun> run)
        : std::runtime_error(msg), failed_indices(std::move(failed)), partial(std::move(run)) {}
};

inline NodalField iterate_step(const NodalField& Vn, const FarFieldDataset& d,
                               const IterateOptions& opt = {}) {
    if (!(Vn.grid == d.grid)) throw std::invalid_argument("iterate_step: grid mismatch");
    if (std::holds_alternative<FullData>(d.scenario))
        throw std::invalid_argument("iterate_step: full data is handled per angle");
    const GridSpec& g = d.grid;

    bool vn_zero = true;
    for (const auto& z : Vn.values)
        if (z != cdouble(0.0)) {
            vn_zero = false;
            break;
        }
    // V^n = 0: the correction vanishes identically and no solves are needed,
    // so the step reduces to the Born inversion bit for bit.
    if (vn_zero) return detail::invert_data_to_potential(g, d.scenario, d.values);

    KernelCache local_cache(g);
    KernelCache& cache = opt.cache ? *opt.cache : local_cache;
    const long builds_before = cache.build_count();

    std::vector<cdouble> corrected = d.values;
    const auto groups = detail::collect_solve_groups(g, d.scenario);
    std::vector<std::size_t> failed;
    std::mutex failed_mutex;
    detail::parallel_for(groups.size(), opt.threads, [&](std::size_t gi) {
        const auto& grp = groups[gi];
        const PeriodizedKernel kern = cache.get(g, grp.k);
        NodalField u_s(g);
        try {
            u_s = solve_scattered_field(kern, Vn, grp.theta, grp.k, opt.tol, opt.gmres);
        } catch (const SolverError&) {
            std::lock_guard<std::mutex> lock(failed_mutex);
            for (const auto& e : grp.entries) failed.push_back(e.p);
            return;
        }
        for (const auto& entry : grp.entries)
            corrected[entry.p] -=
                far_field(Vn, u_s, entry.ep.theta_out, entry.ep.k, opt.support_radius);
    });
    if (opt.stats) {
        opt.stats->solves += static_cast<long>(groups.size());
        opt.stats->kernel_builds += cache.build_count() - builds_before;
    }
    if (!failed.empty()) {
        std::sort(failed.begin(), failed.end());
        std::string msg = "iterate_step: solver failed at " + std::to_string(failed.size()) +
                          " mesh points, first " + detail::index_label(g, failed.front());
        throw IterateError(msg, std::move(failed), nullptr);
    }
    return detail::invert_data_to_potential(g, d.scenario, corrected);
}

namespace detail {

inline void record_error(ReconstructionRun& run, const NodalField* reference) {
    if (reference) run.errors.push_back(l2_error(run.iterates.back(), *reference));
}

template <class StepFn>
ReconstructionRun run_iteration_loop(const GridSpec& g, const ScatteringScenario& scenario, int K,
                                     const NodalField* reference, const IterateOptions& opt,
                                     const StepFn& step) {
    if (K < 1) throw std::invalid_argument("run: K must be >= 1");
    ForwardStats stats;
    IterateOptions local = opt;
    local.stats = &stats;

    ReconstructionRun run(scenario);
    run.iterates.push_back(NodalField(g));  // V^0 = 0
    record_error(run, reference);
    double born_norm = 0.0;
    for (int n = 0; n < K; ++n) {
        NodalField next(g);
        try {
            next = step(run.iterates.back(), local);
        } catch (IterateError& e) {
            run.total_solves = stats.solves;
            run.solver_failures = static_cast<long>(e.failed_indices.size());
            throw IterateError(e.what(), e.failed_indices,
                               std::make_shared<ReconstructionRun>(std::move(run)));
        }
        run.iterates.push_back(std::move(next));
        record_error(run, reference);
        const double norm = norm0(run.iterates.back());
        if (n == 0) born_norm = norm;
        if (n > 0 && norm > opt.divergence_factor * born_norm) {
            run.total_solves = stats.solves;
            throw IterateError("run: diverged at iteration " + std::to_string(n + 1) +
                                   " (|V^n|_0 = " + fmt_g17(norm) + " vs |V^1|_0 = " +
                                   fmt_g17(born_norm) + ")",
                               {}, std::make_shared<ReconstructionRun>(std::move(run)));
        }
    }
    run.total_solves = stats.solves;
    return run;
}

}  // namespace detail

// K refinement steps from V^0 = 0; run.iterates[1] is the Born inversion.
inline ReconstructionRun run(const FarFieldDataset& d, int K, const NodalField* reference = nullptr,
                             const IterateOptions& opt = {}) {
    return detail::run_iteration_loop(
        d.grid, d.scenario, K, reference, opt,
        [&](const NodalField& Vn, const IterateOptions& o) { return iterate_step(Vn, d, o); });
}

// Full data: one common sequence; each step averages the per-angle updates
// computed from the same V^n.
inline ReconstructionRun run_full_data(const std::vector<FarFieldDataset>& per_angle, int K,
                                       const NodalField* reference = nullptr,
                                       const IterateOptions& opt = {}) {
    if (per_angle.empty()) throw std::invalid_argument("run_full_data: empty dataset list");
    const GridSpec g = per_angle.front().grid;
    std::vector<Vec2> angles;
    for (const auto& d : per_angle) {
        if (!(d.grid == g)) throw std::invalid_argument("run_full_data: grid mismatch");
        if (const auto* fa = std::get_if<FixedAngle>(&d.scenario)) angles.push_back(fa->theta0);
    }
    ScatteringScenario scenario = angles.size() == per_angle.size()
                                      ? ScatteringScenario(FullData(angles))
                                      : per_angle.front().scenario;
    return detail::run_iteration_loop(
        g, scenario, K, reference, opt, [&](const NodalField& Vn, const IterateOptions& o) {
            NodalField mean(g);
            for (const auto& d : per_angle) {
                NodalField upd = iterate_step(Vn, d, o);
                for (std::size_t p = 0; p < mean.values.size(); ++p)
                    mean.values[p] += upd.values[p];
            }
            const double inv = 1.0 / static_cast<double>(per_angle.size());
            for (auto& z : mean.values) z *= inv;
            return mean;
        });
}

}  // namespace scatter2d

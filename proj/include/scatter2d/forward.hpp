#pragma once

// -----------------------------------------------------------------------------
// Direct scattering on the torus: the free-space Lippmann-Schwinger equation
//
//   [I - Phi_k * (V .)] u_s = Phi_k * (V e^{i k theta . x})
//
// is periodized by cutting the outgoing fundamental solution smoothly at
// radius ~2 and convolving on the 2R-periodic square. For potentials supported
// in the unit disk and R > 2 the cut changes nothing at the distances that
// matter, so nodal values of u_s inside the disk coincide with the free-space
// solution up to discretization.
//
// Convolution runs through the spectral multiplier ghat = (2R)^2 c(K), so that
// coefficient-wise multiplication implements the h^2-weighted quadrature
//   (A f)(x_l) = h^2 sum_m K(x_l - x_m) f(x_m)   (torus wrap).
//
// The linear system is solved matrix-free with restarted GMRES. Far-field
// values follow by quadrature of e^{-i k theta'. x} V u over the support
// region, and datasets are assembled per frequency-mesh point with solve
// reuse across mesh points that share (theta, k).
// -----------------------------------------------------------------------------

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatter2d/format.hpp"
#include "scatter2d/geometry.hpp"
#include "scatter2d/grid.hpp"
#include "scatter2d/parallel.hpp"
#include "scatter2d/rng.hpp"
#include "scatter2d/special.hpp"
#include "scatter2d/types.hpp"

namespace scatter2d {

// C^2 radial cutoff: 1 on [0,2], 0 on [2.05,inf), quintic smoothstep between.
// Fits inside the R = 2.1 cell while leaving every distance realizable within
// the unit disk untouched.
inline double cutoff_w(double r) {
    if (r <= 2.0) return 1.0;
    if (r >= 2.05) return 0.0;
    const double s = (r - 2.0) / 0.05;
    const double s3 = s * s * s;
    return 1.0 - s3 * (10.0 + s * (-15.0 + 6.0 * s));
}

struct PeriodizedKernel {
    GridSpec grid;
    double k;
    SpectralField ghat;  // (2R)^2-scaled coefficients of the cut kernel
};

namespace detail {

// Nodal samples of W(|x|) Phi(k_abs |x|); the log-singular origin sample is
// set to 0 (the omitted cell contributes O(h^2 log h) to the quadrature).
inline NodalField kernel_samples(const GridSpec& g, double k_abs) {
    NodalField kern(g);
    for (std::size_t p = 0; p < kern.values.size(); ++p) {
        const Vec2 x = g.node(g.unflatten(p));
        const double r = x.norm();
        if (r == 0.0) {
            kern.values[p] = 0.0;
            continue;
        }
        const double w = cutoff_w(r);
        kern.values[p] = w == 0.0 ? cdouble(0.0) : w * phi(k_abs, r);
    }
    return kern;
}

inline SpectralField kernel_multiplier_positive(const GridSpec& g, double k_abs) {
    SpectralField ghat = to_spectral(kernel_samples(g, k_abs));
    const double scale = 4.0 * g.R * g.R;
    for (auto& z : ghat.coeffs) z *= scale;
    return ghat;
}

}  // namespace detail

inline PeriodizedKernel build_kernel(const GridSpec& g, double k) {
    if (!std::isfinite(k) || k == 0.0)
        throw std::invalid_argument("build_kernel: k must be finite and nonzero");
    if (g.R < 2.05)
        std::fprintf(stderr,
                     "build_kernel: warning: R=%g < 2.05, cut kernel wraps around the cell "
                     "(unit-disk potentials need R > 2)\n",
                     g.R);
    SpectralField ghat = detail::kernel_multiplier_positive(g, std::abs(k));
    if (k < 0.0)
        for (auto& z : ghat.coeffs) z = std::conj(z);
    return {g, k, std::move(ghat)};
}

// Kernel reuse across solves, keyed by |k| (negative k is the conjugate of the
// cached positive kernel). Safe for concurrent lookup/insert.
class KernelCache {
public:
    explicit KernelCache(const GridSpec& g) : grid_(g) {}

    PeriodizedKernel get(const GridSpec& g, double k) {
        if (!(g == grid_)) throw std::invalid_argument("KernelCache: grid mismatch");
        if (!std::isfinite(k) || k == 0.0)
            throw std::invalid_argument("KernelCache: k must be finite and nonzero");
        const double ka = std::abs(k);
        const std::uint64_t key = quantize(ka);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it == cache_.end()) {
                it = cache_.emplace(key, detail::kernel_multiplier_positive(grid_, ka)).first;
                ++builds_;
            }
            SpectralField ghat = it->second;
            if (k < 0.0)
                for (auto& z : ghat.coeffs) z = std::conj(z);
            return {grid_, k, std::move(ghat)};
        }
    }

    long build_count() const { return builds_; }

private:
    // round(|k|*1e12) for moderate k; exact bit pattern beyond, kept disjoint
    // by a tag bit.
    static std::uint64_t quantize(double ka) {
        if (ka < 4.0e6)
            return static_cast<std::uint64_t>(std::llround(ka * 1e12)) << 1;
        return (std::bit_cast<std::uint64_t>(ka) << 1) | 1u;
    }

    GridSpec grid_;
    std::mutex mutex_;
    std::map<std::uint64_t, SpectralField> cache_;
    std::atomic<long> builds_{0};
};

// Discrete convolution term Phi_k * (V u) via the spectral multiplier.
inline NodalField apply_ls_operator(const PeriodizedKernel& kern, const NodalField& V,
                                    const NodalField& u) {
    if (!(V.grid == kern.grid) || !(u.grid == kern.grid))
        throw std::invalid_argument("apply_ls_operator: grid mismatch");
    NodalField vu(kern.grid);
    for (std::size_t p = 0; p < vu.values.size(); ++p) vu.values[p] = V.values[p] * u.values[p];
    SpectralField c = to_spectral(vu);
    for (std::size_t p = 0; p < c.coeffs.size(); ++p) c.coeffs[p] *= kern.ghat.coeffs[p];
    return from_spectral(c);
}

inline NodalField incident_wave(const GridSpec& g, Vec2 theta, double k) {
    NodalField u(g);
    for (std::size_t p = 0; p < u.values.size(); ++p)
        u.values[p] = std::polar(1.0, k * theta.dot(g.node(g.unflatten(p))));
    return u;
}

struct SolverError : std::runtime_error {
    double residual;
    int iterations;
    SolverError(const std::string& msg, double res, int iters)
        : std::runtime_error(msg), residual(res), iterations(iters) {}
};

struct GmresOptions {
    int restart = 30;
    int max_iters = 500;
};

namespace detail {

inline cdouble cdot(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    cdouble s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double cnorm(const std::vector<cdouble>& a) {
    double s = 0.0;
    for (const auto& z : a) s += std::norm(z);
    return std::sqrt(s);
}

struct GmresReport {
    bool converged = false;
    int iterations = 0;
    double relative_residual = 0.0;
};

// Restarted GMRES with modified Gram-Schmidt Arnoldi and complex Givens
// rotations. Convergence is declared on the true residual, recomputed at the
// end of each cycle.
template <class Op>
GmresReport gmres_solve(const Op& apply, const std::vector<cdouble>& b, std::vector<cdouble>& x,
                        double tol, const GmresOptions& opt) {
    const std::size_t n = b.size();
    const double bnorm = cnorm(b);
    x.assign(n, 0.0);
    GmresReport rep;
    if (bnorm == 0.0) {
        rep.converged = true;
        return rep;
    }
    const int m = std::max(1, opt.restart);
    std::vector<std::vector<cdouble>> basis;
    std::vector<cdouble> hess(static_cast<std::size_t>(m + 1) * m);
    auto H = [&](int i, int j) -> cdouble& { return hess[static_cast<std::size_t>(i) * m + j]; };
    std::vector<cdouble> rot_a(m), rot_b(m), g(m + 1), y(m);
    std::vector<cdouble> r = b;  // x = 0 initially

    while (rep.iterations < opt.max_iters) {
        double beta = cnorm(r);
        rep.relative_residual = beta / bnorm;
        if (rep.relative_residual <= tol) {
            rep.converged = true;
            return rep;
        }
        basis.assign(1, r);
        for (auto& z : basis[0]) z /= beta;
        std::fill(g.begin(), g.end(), cdouble(0.0));
        g[0] = beta;
        int jdim = 0;
        for (int j = 0; j < m && rep.iterations < opt.max_iters; ++j) {
            std::vector<cdouble> w = apply(basis[j]);
            ++rep.iterations;
            for (int i = 0; i <= j; ++i) {
                H(i, j) = cdot(basis[i], w);
                for (std::size_t q = 0; q < n; ++q) w[q] -= H(i, j) * basis[i][q];
            }
            const double hnext = cnorm(w);
            H(j + 1, j) = hnext;
            if (hnext > 0.0) {
                for (auto& z : w) z /= hnext;
                basis.push_back(std::move(w));
            }
            // previously computed rotations, then a new one zeroing H(j+1,j)
            for (int i = 0; i < j; ++i) {
                const cdouble u = H(i, j), v = H(i + 1, j);
                H(i, j) = rot_a[i] * u + rot_b[i] * v;
                H(i + 1, j) = -std::conj(rot_b[i]) * u + std::conj(rot_a[i]) * v;
            }
            const cdouble a = H(j, j);
            const cdouble bb = H(j + 1, j);
            const double t = std::sqrt(std::norm(a) + std::norm(bb));
            if (t == 0.0) break;  // full breakdown: operator is singular on the Krylov space
            rot_a[j] = std::conj(a) / t;
            rot_b[j] = std::conj(bb) / t;
            H(j, j) = t;
            H(j + 1, j) = 0.0;
            const cdouble gu = g[j];
            g[j] = rot_a[j] * gu;
            g[j + 1] = -std::conj(rot_b[j]) * gu;
            jdim = j + 1;
            const double inner_res = std::abs(g[j + 1]) / bnorm;
            if (inner_res <= tol || hnext == 0.0) break;
        }
        if (jdim == 0) break;
        // back substitution on the triangularized Hessenberg
        for (int i = jdim - 1; i >= 0; --i) {
            cdouble s = g[i];
            for (int j = i + 1; j < jdim; ++j) s -= H(i, j) * y[j];
            y[i] = s / H(i, i);
        }
        for (int i = 0; i < jdim; ++i)
            for (std::size_t q = 0; q < n; ++q) x[q] += y[i] * basis[i][q];
        std::vector<cdouble> ax = apply(x);
        for (std::size_t q = 0; q < n; ++q) r[q] = b[q] - ax[q];
    }
    rep.relative_residual = cnorm(r) / bnorm;
    rep.converged = rep.relative_residual <= tol;
    return rep;
}

}  // namespace detail

// Solve [I - Phi_k * (V .)] u_s = Phi_k * (V u_i) for the scattered field at
// one (theta, k), matrix-free.
inline NodalField solve_scattered_field(const PeriodizedKernel& kern, const NodalField& V,
                                        Vec2 theta, double k, double tol,
                                        const GmresOptions& opt = {}) {
    if (kern.k != k) throw std::invalid_argument("solve_scattered_field: kernel/wavenumber mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_scattered_field: tol must be positive");
    const NodalField u_i = incident_wave(kern.grid, theta, k);
    const NodalField b = apply_ls_operator(kern, V, u_i);
    NodalField u_s(kern.grid);
    auto op = [&](const std::vector<cdouble>& u) {
        NodalField un(kern.grid, u);
        NodalField au = apply_ls_operator(kern, V, un);
        std::vector<cdouble> out(u.size());
        for (std::size_t q = 0; q < u.size(); ++q) out[q] = u[q] - au.values[q];
        return out;
    };
    const auto rep = detail::gmres_solve(op, b.values, u_s.values, tol, opt);
    if (!rep.converged)
        throw SolverError("solve_scattered_field: no convergence after " +
                              std::to_string(rep.iterations) + " iterations (relative residual " +
                              detail::fmt_g17(rep.relative_residual) + ")",
                          rep.relative_residual, rep.iterations);
    return u_s;
}

// Far-field quadrature  h^2 sum_{|x_l| <= radius} e^{-i k theta'.x_l} V(x_l) u(x_l).
// Pass radius = inf to sum over the whole cell.
inline cdouble far_field(const NodalField& V, const NodalField& u_total, Vec2 theta_out, double k,
                         double support_radius) {
    if (!(V.grid == u_total.grid)) throw std::invalid_argument("far_field: grid mismatch");
    if (!(support_radius > 0.0)) throw std::invalid_argument("far_field: radius must be positive");
    const GridSpec& g = V.grid;
    cdouble s = 0.0;
    for (std::size_t p = 0; p < V.values.size(); ++p) {
        const Vec2 x = g.node(g.unflatten(p));
        if (x.norm() > support_radius) continue;
        s += std::polar(1.0, -k * theta_out.dot(x)) * V.values[p] * u_total.values[p];
    }
    return g.h() * g.h() * s;
}

struct FarFieldDataset {
    GridSpec grid;
    ScatteringScenario scenario;
    std::vector<cdouble> values;  // u_inf at (theta'(xi_j), theta(xi_j), k(xi_j)); 0 off Omega
    double noise_level = 0.0;
    std::optional<std::int64_t> seed;

    FarFieldDataset(const GridSpec& g, ScatteringScenario s)
        : grid(g), scenario(std::move(s)), values(g.size()) {}
};

// Multiplicative Gaussian noise (1 + level n_j), n_j drawn in row-major entry
// order from the seeded generator; exact zeros stay zero.
inline FarFieldDataset add_noise(const FarFieldDataset& d, double level, std::int64_t seed) {
    if (!(level >= 0.0)) throw std::invalid_argument("add_noise: level must be >= 0");
    FarFieldDataset out = d;
    GaussianSequence gauss(static_cast<std::uint64_t>(seed));
    for (auto& z : out.values) z *= 1.0 + level * gauss.next();
    out.noise_level = level;
    out.seed = seed;
    return out;
}

struct ForwardStats {
    long solves = 0;
    long kernel_builds = 0;
};

enum class NoiseMode { dataset, nodal };

struct SynthesisOptions {
    double tol = 1e-7;
    double support_radius = 1.0;  // quadrature restriction, inf = whole cell
    bool linearized = false;      // u = u_i only (no solves)
    int threads = 1;
    double noise = 0.0;
    std::optional<std::int64_t> seed;
    NoiseMode noise_mode = NoiseMode::dataset;
    GmresOptions gmres;
    KernelCache* cache = nullptr;
    ForwardStats* stats = nullptr;
};

namespace detail {

struct SolveEntry {
    std::size_t p;  // flat index into the frequency mesh
    ExperimentParams ep;
};

struct SolveGroup {
    Vec2 theta;
    double k = 0.0;
    std::vector<SolveEntry> entries;
};

// One group per distinct (theta, k) among the in-Omega mesh points, ordered by
// first appearance (row-major), so reductions are schedule-independent.
inline std::vector<SolveGroup> collect_solve_groups(const GridSpec& g,
                                                    const ScatteringScenario& s) {
    std::vector<SolveGroup> groups;
    std::map<std::array<std::uint64_t, 3>, std::size_t> lookup;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Vec2 xi = g.freq(g.unflatten(p));
        const auto ep = experiment_params(s, xi);
        if (!ep) continue;
        const std::array<std::uint64_t, 3> key = {std::bit_cast<std::uint64_t>(ep->theta_in.x),
                                                  std::bit_cast<std::uint64_t>(ep->theta_in.y),
                                                  std::bit_cast<std::uint64_t>(ep->k)};
        auto it = lookup.find(key);
        if (it == lookup.end()) {
            it = lookup.emplace(key, groups.size()).first;
            groups.push_back({ep->theta_in, ep->k, {}});
        }
        groups[it->second].entries.push_back({p, *ep});
    }
    return groups;
}

inline std::string index_label(const GridSpec& g, std::size_t p) {
    const Index2 j = g.unflatten(p);
    return "j=(" + std::to_string(j.j1) + "," + std::to_string(j.j2) + ")";
}

}  // namespace detail

// Simulate far-field data for every in-Omega frequency-mesh point; out-of-Omega
// entries stay exactly zero. Full-data scenarios go through
// synthesize_full_data, which produces one dataset per incident angle.
inline FarFieldDataset synthesize_dataset(const NodalField& V, const ScatteringScenario& s,
                                          const SynthesisOptions& opt = {}) {
    if (std::holds_alternative<FullData>(s))
        throw std::invalid_argument("synthesize_dataset: use synthesize_full_data for full data");
    const GridSpec& g = V.grid;
    FarFieldDataset d(g, s);

    KernelCache local_cache(g);
    KernelCache& cache = opt.cache ? *opt.cache : local_cache;
    const long builds_before = cache.build_count();

    const auto groups = detail::collect_solve_groups(g, s);
    detail::parallel_for(groups.size(), opt.threads, [&](std::size_t gi) {
        const auto& grp = groups[gi];
        const PeriodizedKernel kern = cache.get(g, grp.k);
        const NodalField u_i = incident_wave(g, grp.theta, grp.k);
        NodalField u_s(g);
        if (!opt.linearized) {
            try {
                u_s = solve_scattered_field(kern, V, grp.theta, grp.k, opt.tol, opt.gmres);
            } catch (const SolverError& e) {
                throw SolverError("synthesize_dataset at " + detail::index_label(g, grp.entries[0].p) +
                                      ": " + e.what(),
                                  e.residual, e.iterations);
            }
        }
        const bool nodal_noise =
            opt.noise > 0.0 && opt.noise_mode == NoiseMode::nodal && !opt.linearized;
        NodalField u_tot(g);
        for (const auto& entry : grp.entries) {
            if (nodal_noise) {
                GaussianSequence gauss(
                    child_seed(static_cast<std::uint64_t>(opt.seed.value_or(0)), entry.p));
                for (std::size_t q = 0; q < u_tot.values.size(); ++q)
                    u_tot.values[q] =
                        u_i.values[q] + (1.0 + opt.noise * gauss.next()) * u_s.values[q];
            } else {
                for (std::size_t q = 0; q < u_tot.values.size(); ++q)
                    u_tot.values[q] = u_i.values[q] + u_s.values[q];
            }
            d.values[entry.p] =
                far_field(V, u_tot, entry.ep.theta_out, entry.ep.k, opt.support_radius);
        }
    });

    if (opt.stats) {
        opt.stats->solves += opt.linearized ? 0 : static_cast<long>(groups.size());
        opt.stats->kernel_builds += cache.build_count() - builds_before;
    }
    d.noise_level = opt.noise;
    d.seed = opt.noise > 0.0 ? std::optional<std::int64_t>(opt.seed.value_or(0)) : opt.seed;
    if (opt.noise > 0.0 && opt.noise_mode == NoiseMode::dataset)
        d = add_noise(d, opt.noise, opt.seed.value_or(0));
    return d;
}

inline std::vector<FarFieldDataset> synthesize_full_data(const NodalField& V, const FullData& s,
                                                         const SynthesisOptions& opt = {}) {
    std::vector<FarFieldDataset> out;
    out.reserve(s.angles.size());
    for (std::size_t i = 0; i < s.angles.size(); ++i) {
        SynthesisOptions per_angle = opt;
        if (opt.noise > 0.0)
            per_angle.seed = static_cast<std::int64_t>(
                child_seed(static_cast<std::uint64_t>(opt.seed.value_or(0)), i));
        out.push_back(synthesize_dataset(V, FixedAngle(s.angles[i]), per_angle));
    }
    return out;
}

// --------- dataset CSV ---------
// # scatter2d-farfield v1
// # R=<float> N=<int> scenario=<name> params=<params> noise=<float> seed=<int|->
// j1,j2,re,im  (row-major)

inline void write_csv(const FarFieldDataset& d, std::ostream& os) {
    os << "# scatter2d-farfield v1\n";
    os << "# R=" << detail::fmt_g17(d.grid.R) << " N=" << d.grid.N
       << " scenario=" << scenario_name(d.scenario) << " params=" << scenario_params_string(d.scenario)
       << " noise=" << detail::fmt_g17(d.noise_level)
       << " seed=" << (d.seed ? std::to_string(*d.seed) : std::string("-")) << "\n";
    for (std::size_t p = 0; p < d.values.size(); ++p) {
        const Index2 j = d.grid.unflatten(p);
        os << j.j1 << ',' << j.j2 << ',' << detail::fmt_g17(d.values[p].real()) << ','
           << detail::fmt_g17(d.values[p].imag()) << "\n";
    }
}

inline FarFieldDataset read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "# scatter2d-farfield v1")
        throw std::runtime_error("dataset csv: missing format line");
    if (!std::getline(is, line)) throw std::runtime_error("dataset csv: missing header");
    double R, noise;
    int N;
    char scen[32] = {0}, params[512] = {0}, seedbuf[64] = {0};
    if (std::sscanf(line.c_str(), "# R=%lf N=%d scenario=%31s params=%511s noise=%lf seed=%63s", &R,
                    &N, scen, params, &noise, seedbuf) != 6)
        throw std::runtime_error("dataset csv: bad header: " + line);
    GridSpec g(R, N);
    FarFieldDataset d(g, parse_scenario(scen, params));
    d.noise_level = noise;
    if (std::string(seedbuf) != "-") d.seed = std::stoll(seedbuf);
    d.values = detail::read_field_rows(is, g);
    return d;
}

inline void save_dataset(const FarFieldDataset& d, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(d, os);
}

inline FarFieldDataset load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_dataset_csv(is);
}

}  // namespace scatter2d

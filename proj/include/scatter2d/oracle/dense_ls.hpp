#pragma once

// -----------------------------------------------------------------------------
// Reference implementations used by the verification suites and tests: the
// collocation system assembled as a dense matrix and solved by LU with partial
// pivoting, independent of the FFT/GMRES production path. Feasible for small
// grids only (the matrix is N^2 x N^2).
// -----------------------------------------------------------------------------

#include <cmath>
#include <stdexcept>
#include <vector>

#include "scatter2d/forward.hpp"
#include "scatter2d/grid.hpp"
#include "scatter2d/types.hpp"

namespace scatter2d::oracle {

// LU solve with partial pivoting; A is n x n row-major and is overwritten.
inline std::vector<cdouble> lu_solve(std::vector<cdouble> A, std::vector<cdouble> b) {
    const std::size_t n = b.size();
    if (A.size() != n * n) throw std::invalid_argument("lu_solve: dimension mismatch");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(A[perm[col] * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double cand = std::abs(A[perm[r] * n + col]);
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("lu_solve: singular matrix");
        std::swap(perm[col], perm[pivot]);
        const cdouble d = A[perm[col] * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const cdouble f = A[perm[r] * n + col] / d;
            A[perm[r] * n + col] = f;
            if (f == cdouble(0.0)) continue;
            for (std::size_t c = col + 1; c < n; ++c) A[perm[r] * n + c] -= f * A[perm[col] * n + c];
        }
    }
    // forward substitution (unit lower triangular), permuted rhs
    std::vector<cdouble> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cdouble s = b[perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= A[perm[i] * n + j] * y[j];
        y[i] = s;
    }
    std::vector<cdouble> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cdouble s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= A[perm[ii] * n + j] * x[j];
        x[ii] = s / A[perm[ii] * n + ii];
    }
    return x;
}

// Torus wrap of a signed index difference back into [-N/2, N/2).
inline Index2 wrap_diff(const GridSpec& g, Index2 a, Index2 b) {
    auto wrap1 = [&](int d) {
        const int N = g.N;
        int w = (d + N / 2) % N;
        if (w < 0) w += N;
        return w - N / 2;
    };
    return {wrap1(a.j1 - b.j1), wrap1(a.j2 - b.j2)};
}

// Dense quadrature of the convolution term: (A u)(l) = h^2 sum_m K(l-m) V(m) u(m).
inline NodalField dense_apply(const GridSpec& g, const NodalField& kernel_nodal,
                              const NodalField& V, const NodalField& u) {
    NodalField out(g);
    const double h2 = g.h() * g.h();
    for (std::size_t l = 0; l < out.values.size(); ++l) {
        const Index2 jl = g.unflatten(l);
        cdouble s = 0.0;
        for (std::size_t m = 0; m < out.values.size(); ++m) {
            s += kernel_nodal.values[g.flatten(wrap_diff(g, jl, g.unflatten(m)))] *
                 V.values[m] * u.values[m];
        }
        out.values[l] = h2 * s;
    }
    return out;
}

// Direct solve of the same discrete system the matrix-free path iterates on:
// (I - h^2 C(K) diag(V)) u_s = h^2 C(K) diag(V) u_i.
inline NodalField dense_solve_scattered(const GridSpec& g, double k, const NodalField& V,
                                        Vec2 theta) {
    const NodalField kern = detail::kernel_samples(g, std::abs(k));
    NodalField kern_signed = kern;
    if (k < 0.0)
        for (auto& z : kern_signed.values) z = std::conj(z);
    const std::size_t n = g.size();
    const double h2 = g.h() * g.h();
    std::vector<cdouble> A(n * n);
    for (std::size_t l = 0; l < n; ++l) {
        const Index2 jl = g.unflatten(l);
        for (std::size_t m = 0; m < n; ++m) {
            const cdouble conv =
                h2 * kern_signed.values[g.flatten(wrap_diff(g, jl, g.unflatten(m)))] * V.values[m];
            A[l * n + m] = (l == m ? cdouble(1.0) : cdouble(0.0)) - conv;
        }
    }
    const NodalField u_i = incident_wave(g, theta, k);
    const NodalField b = dense_apply(g, kern_signed, V, u_i);
    return NodalField(g, lu_solve(std::move(A), b.values));
}

}  // namespace scatter2d::oracle

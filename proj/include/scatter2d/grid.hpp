#pragma once

// -----------------------------------------------------------------------------
// Trigonometric collocation space on the square G_R = (-R,R)^2.
//
// A field lives on the uniform mesh x_j = j*h, h = 2R/N, with signed indices
// j = (j1,j2), -N/2 <= jk < N/2 (the Nyquist row sits on the negative side).
// The spectral representation stores normalized coefficients c_j of the
// orthonormal exponentials phi_j(x) = exp(2*pi*i*xi_j.x), xi_j = j/(2R), so
// that Parseval holds literally: norm0(v)^2 = sum |c_j|^2.
//
// Storage is row-major over (j1,j2) ascending; serialization preserves this
// order bit-for-bit.
// -----------------------------------------------------------------------------

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scatter2d/dft.hpp"
#include "scatter2d/format.hpp"
#include "scatter2d/types.hpp"

namespace scatter2d {

struct GridSpec {
    double R;
    int N;

    GridSpec(double R_, int N_) : R(R_), N(N_) {
        if (!std::isfinite(R) || R <= 0.0)
            throw std::invalid_argument("GridSpec: R must be positive and finite");
        if (N < 4 || N % 2 != 0)
            throw std::invalid_argument("GridSpec: N must be even and >= 4");
    }

    double h() const { return 2.0 * R / N; }
    std::size_t size() const { return static_cast<std::size_t>(N) * N; }

    bool contains(Index2 j) const {
        return j.j1 >= -N / 2 && j.j1 < N / 2 && j.j2 >= -N / 2 && j.j2 < N / 2;
    }

    std::size_t flatten(Index2 j) const {
        return static_cast<std::size_t>(j.j1 + N / 2) * N + static_cast<std::size_t>(j.j2 + N / 2);
    }

    Index2 unflatten(std::size_t p) const {
        const int q = static_cast<int>(p);
        return {q / N - N / 2, q % N - N / 2};
    }

    Vec2 node(Index2 j) const { return {j.j1 * h(), j.j2 * h()}; }
    Vec2 freq(Index2 j) const { return {j.j1 / (2.0 * R), j.j2 / (2.0 * R)}; }

    bool operator==(const GridSpec&) const = default;
};

struct NodalField {
    GridSpec grid;
    std::vector<cdouble> values;  // v(jh), row-major over signed (j1,j2)

    explicit NodalField(const GridSpec& g) : grid(g), values(g.size()) {}
    NodalField(const GridSpec& g, std::vector<cdouble> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw std::invalid_argument("NodalField: value count must be N^2");
    }

    cdouble& at(Index2 j) { return values[grid.flatten(j)]; }
    const cdouble& at(Index2 j) const { return values[grid.flatten(j)]; }
};

struct SpectralField {
    GridSpec grid;
    std::vector<cdouble> coeffs;  // c_j, same index order as NodalField

    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(g.size()) {}
    SpectralField(const GridSpec& g, std::vector<cdouble> c) : grid(g), coeffs(std::move(c)) {
        if (coeffs.size() != grid.size())
            throw std::invalid_argument("SpectralField: coefficient count must be N^2");
    }

    cdouble& at(Index2 j) { return coeffs[grid.flatten(j)]; }
    const cdouble& at(Index2 j) const { return coeffs[grid.flatten(j)]; }
};

inline Vec2 node_coords(const GridSpec& g, Index2 j) {
    if (!g.contains(j)) throw std::invalid_argument("node_coords: index outside Z_h^2");
    return g.node(j);
}

inline Vec2 freq_coords(const GridSpec& g, Index2 j) {
    if (!g.contains(j)) throw std::invalid_argument("freq_coords: index outside Z_h^2");
    return g.freq(j);
}

namespace detail {

// Signed storage order <-> transform order is a half-period circular shift in
// each axis; the shift is its own inverse for even N.
inline void shift_pack(int N, const cdouble* in, cdouble* out) {
    for (int a = 0; a < N; ++a) {
        const int ua = (a + N / 2) % N;
        for (int b = 0; b < N; ++b) {
            const int ub = (b + N / 2) % N;
            out[static_cast<std::size_t>(ua) * N + ub] = in[static_cast<std::size_t>(a) * N + b];
        }
    }
}

}  // namespace detail

// c_j = (1/N^2) sum_n v(nh) exp(-2*pi*i*xi_j.(nh))
inline SpectralField to_spectral(const NodalField& v) {
    const int N = v.grid.N;
    const std::size_t n2 = v.grid.size();
    std::vector<cdouble> in(n2), out(n2);
    detail::shift_pack(N, v.values.data(), in.data());
    detail::fft2(N, -1, in.data(), out.data());
    SpectralField c(v.grid);
    detail::shift_pack(N, out.data(), c.coeffs.data());
    const double scale = 1.0 / static_cast<double>(n2);
    for (auto& z : c.coeffs) z *= scale;
    return c;
}

inline NodalField from_spectral(const SpectralField& c) {
    const int N = c.grid.N;
    const std::size_t n2 = c.grid.size();
    std::vector<cdouble> in(n2), out(n2);
    detail::shift_pack(N, c.coeffs.data(), in.data());
    detail::fft2(N, +1, in.data(), out.data());
    NodalField v(c.grid);
    detail::shift_pack(N, out.data(), v.values.data());
    return v;
}

// Discrete version of ||.||_0 on G_R: (sum |v(jh)|^2 / N^2)^(1/2).
inline double norm0(const NodalField& v) {
    double s = 0.0;
    for (const auto& z : v.values) s += std::norm(z);
    return std::sqrt(s) / v.grid.N;
}

// Sobolev-type weighted norm (sum |xi_j|_u^(2*lambda) |c_j|^2)^(1/2), where
// the zero frequency carries weight 1.
inline double norm_lambda(const SpectralField& c, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("norm_lambda: lambda must be >= 0");
    double s = 0.0;
    for (std::size_t p = 0; p < c.coeffs.size(); ++p) {
        const Index2 j = c.grid.unflatten(p);
        const double xi = (j.j1 == 0 && j.j2 == 0) ? 1.0 : c.grid.freq(j).norm();
        s += std::pow(xi, 2.0 * lambda) * std::norm(c.coeffs[p]);
    }
    return std::sqrt(s);
}

// Orthogonal projection onto the coarse trigonometric space: keep the
// coefficients whose index lies in the coarse Z_h^2, drop the rest.
inline SpectralField project_ph(const SpectralField& fine, const GridSpec& coarse) {
    if (fine.grid.R != coarse.R) throw std::invalid_argument("project_ph: R mismatch");
    if (coarse.N > fine.grid.N || fine.grid.N % coarse.N != 0)
        throw std::invalid_argument("project_ph: coarse N must divide fine N");
    SpectralField out(coarse);
    for (std::size_t p = 0; p < out.coeffs.size(); ++p) {
        const Index2 j = coarse.unflatten(p);
        out.coeffs[p] = fine.at(j);
    }
    return out;
}

// Zero-pad coefficients into a finer grid (trigonometric upsampling).
inline SpectralField embed_spectral(const SpectralField& v, const GridSpec& fine) {
    if (v.grid.R != fine.R) throw std::invalid_argument("embed_spectral: R mismatch");
    if (fine.N < v.grid.N) throw std::invalid_argument("embed_spectral: target grid is coarser");
    SpectralField out(fine);
    for (std::size_t p = 0; p < v.coeffs.size(); ++p) out.at(v.grid.unflatten(p)) = v.coeffs[p];
    return out;
}

// Interpolation projection Q_h: nodal samples f(jh).
template <class F>
NodalField interpolate_qh(F&& f, const GridSpec& g) {
    NodalField v(g);
    for (std::size_t p = 0; p < v.values.size(); ++p) v.values[p] = cdouble(f(g.node(g.unflatten(p))));
    return v;
}

// Nodal samples of the lattice sum  sum_{|m|_inf <= copies} f(x + 2R*m).
template <class F>
NodalField periodize(F&& f, const GridSpec& g, int copies) {
    if (copies < 0) throw std::invalid_argument("periodize: copies must be >= 0");
    NodalField v(g);
    const double period = 2.0 * g.R;
    for (std::size_t p = 0; p < v.values.size(); ++p) {
        const Vec2 x = g.node(g.unflatten(p));
        cdouble s = 0.0;
        for (int m1 = -copies; m1 <= copies; ++m1)
            for (int m2 = -copies; m2 <= copies; ++m2)
                s += cdouble(f(Vec2{x.x + period * m1, x.y + period * m2}));
        v.values[p] = s;
    }
    return v;
}

// Zero all coefficients with max(|j1|,|j2|) > keep_fraction * N/2.
inline SpectralField lowpass(const SpectralField& v, double keep_fraction) {
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw std::invalid_argument("lowpass: keep_fraction must lie in (0,1]");
    const double cut = keep_fraction * v.grid.N / 2.0;
    SpectralField out = v;
    for (std::size_t p = 0; p < out.coeffs.size(); ++p) {
        const Index2 j = out.grid.unflatten(p);
        if (std::max(std::abs(j.j1), std::abs(j.j2)) > cut) out.coeffs[p] = 0.0;
    }
    return out;
}

// --------- CSV serialization ---------
// Header line "# R=<float> N=<int> kind=<nodal|spectral>", then one row
// "j1,j2,re,im" per entry in storage order. %.17g keeps the round trip
// bit-exact.

namespace detail {

inline void write_field_rows(const GridSpec& g, const std::vector<cdouble>& data,
                             const char* kind, std::ostream& os) {
    os << "# R=" << fmt_g17(g.R) << " N=" << g.N << " kind=" << kind << "\n";
    for (std::size_t p = 0; p < data.size(); ++p) {
        const Index2 j = g.unflatten(p);
        os << j.j1 << ',' << j.j2 << ',' << fmt_g17(data[p].real()) << ','
           << fmt_g17(data[p].imag()) << "\n";
    }
}

inline void parse_field_header(const std::string& line, double& R, int& N, std::string& kind) {
    char kindbuf[16] = {0};
    if (std::sscanf(line.c_str(), "# R=%lf N=%d kind=%15s", &R, &N, kindbuf) != 3)
        throw std::runtime_error("field csv: bad header: " + line);
    kind = kindbuf;
}

inline std::vector<cdouble> read_field_rows(std::istream& is, const GridSpec& g) {
    std::vector<cdouble> data(g.size());
    std::string line;
    for (std::size_t p = 0; p < data.size(); ++p) {
        if (!std::getline(is, line)) throw std::runtime_error("field csv: truncated file");
        int j1, j2;
        double re, im;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &j1, &j2, &re, &im) != 4)
            throw std::runtime_error("field csv: bad row: " + line);
        if (g.unflatten(p) != Index2{j1, j2})
            throw std::runtime_error("field csv: rows out of order");
        data[p] = {re, im};
    }
    return data;
}

}  // namespace detail

inline void write_csv(const NodalField& v, std::ostream& os) {
    detail::write_field_rows(v.grid, v.values, "nodal", os);
}

inline void write_csv(const SpectralField& v, std::ostream& os) {
    detail::write_field_rows(v.grid, v.coeffs, "spectral", os);
}

inline NodalField read_nodal_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("field csv: empty stream");
    double R;
    int N;
    std::string kind;
    detail::parse_field_header(header, R, N, kind);
    if (kind != "nodal") throw std::runtime_error("field csv: expected kind=nodal, got " + kind);
    GridSpec g(R, N);
    return NodalField(g, detail::read_field_rows(is, g));
}

inline SpectralField read_spectral_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("field csv: empty stream");
    double R;
    int N;
    std::string kind;
    detail::parse_field_header(header, R, N, kind);
    if (kind != "spectral")
        throw std::runtime_error("field csv: expected kind=spectral, got " + kind);
    GridSpec g(R, N);
    return SpectralField(g, detail::read_field_rows(is, g));
}

inline void save_field(const NodalField& v, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(v, os);
}

inline NodalField load_nodal(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_nodal_csv(is);
}

}  // namespace scatter2d

#pragma once

// -----------------------------------------------------------------------------
// Scattering-data geometries. Each scenario picks, for a frequency point xi,
// one experiment (theta_out, theta_in, k) from the compatibility set
//   G_xi = { (theta', theta, k) : k (theta' - theta) = 2 pi xi },
// and decides which xi are reachable at all (the set Omega):
//
//   fixed energy   : |xi| < k0/pi (open disk; the boundary would duplicate
//                    backscattering), theta from a rotation of xi/|xi|
//   fixed angle    : xi off the hyperplane xi.theta0 = 0, k = -pi|xi|^2/(xi.theta0)
//                    (k of both signs occurs)
//   backscattering : xi != 0, k = pi |xi|, theta = -xi/|xi|, theta' = -theta
//   full data      : a list of fixed-angle scenarios plus an averaging rule
// -----------------------------------------------------------------------------

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "scatter2d/format.hpp"
#include "scatter2d/types.hpp"

namespace scatter2d {

struct ExperimentParams {
    Vec2 theta_out;  // theta'
    Vec2 theta_in;   // theta
    double k;        // signed wavenumber
};

struct FixedEnergy {
    double k0;
    explicit FixedEnergy(double k0_) : k0(k0_) {
        if (!std::isfinite(k0) || k0 <= 0.0)
            throw std::invalid_argument("FixedEnergy: k0 must be positive");
    }
    bool operator==(const FixedEnergy&) const = default;
};

struct FixedAngle {
    Vec2 theta0;  // unit incident direction
    explicit FixedAngle(Vec2 dir) {
        const double n = dir.norm();
        if (!std::isfinite(n) || n == 0.0)
            throw std::invalid_argument("FixedAngle: direction must be nonzero");
        theta0 = dir / n;
    }
    static FixedAngle from_angle(double a) { return FixedAngle({std::cos(a), std::sin(a)}); }
    bool operator==(const FixedAngle&) const = default;
};

struct Backscattering {
    bool operator==(const Backscattering&) const = default;
};

struct FullData {
    std::vector<Vec2> angles;
    explicit FullData(std::vector<Vec2> dirs) {
        if (dirs.empty()) throw std::invalid_argument("FullData: angle list must be nonempty");
        for (auto& d : dirs) {
            const double n = d.norm();
            if (!std::isfinite(n) || n == 0.0)
                throw std::invalid_argument("FullData: directions must be nonzero");
            d = d / n;
        }
        angles = std::move(dirs);
    }
    // m incident directions equally spaced in [0, 2 pi)
    static FullData equispaced(int m = 10) {
        if (m < 1) throw std::invalid_argument("FullData: need at least one angle");
        std::vector<Vec2> dirs;
        dirs.reserve(m);
        for (int i = 0; i < m; ++i) {
            const double a = 2.0 * pi * i / m;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return FullData(std::move(dirs));
    }
    bool operator==(const FullData&) const = default;
};

using ScatteringScenario = std::variant<FixedEnergy, FixedAngle, Backscattering, FullData>;

inline constexpr double hyperplane_rel_tol = 1e-14;

inline bool in_omega(const FixedEnergy& s, Vec2 xi) { return xi.norm() < s.k0 / pi; }

inline bool in_omega(const FixedAngle& s, Vec2 xi) {
    return std::abs(xi.dot(s.theta0)) > hyperplane_rel_tol * xi.norm() && !xi.is_zero();
}

inline bool in_omega(const Backscattering&, Vec2 xi) { return !xi.is_zero(); }

inline bool in_omega(const FullData&, Vec2 xi) { return !xi.is_zero(); }

inline bool in_omega(const ScatteringScenario& s, Vec2 xi) {
    return std::visit([&](const auto& alt) { return in_omega(alt, xi); }, s);
}

inline std::optional<ExperimentParams> experiment_params(const FixedEnergy& s, Vec2 xi) {
    if (!in_omega(s, xi)) return std::nullopt;
    const double r = xi.norm();
    const Vec2 dir = r > 0.0 ? xi / r : Vec2{1.0, 0.0};  // xi = 0: forward scattering
    const double alpha = std::acos(std::max(-1.0, std::min(1.0, -pi * r / s.k0)));
    const Vec2 theta = rotate(dir, alpha);
    const Vec2 theta_out = theta + xi * (2.0 * pi / s.k0);
    return ExperimentParams{theta_out, theta, s.k0};
}

inline std::optional<ExperimentParams> experiment_params(const FixedAngle& s, Vec2 xi) {
    if (!in_omega(s, xi)) return std::nullopt;
    const double k = -pi * xi.norm2() / xi.dot(s.theta0);
    const Vec2 theta_out = s.theta0 + xi * (2.0 * pi / k);
    return ExperimentParams{theta_out, s.theta0, k};
}

inline std::optional<ExperimentParams> experiment_params(const Backscattering& s, Vec2 xi) {
    if (!in_omega(s, xi)) return std::nullopt;
    const Vec2 dir = xi / xi.norm();
    return ExperimentParams{dir, -dir, pi * xi.norm()};
}

inline std::optional<ExperimentParams> experiment_params(const ScatteringScenario& s, Vec2 xi) {
    if (std::holds_alternative<FullData>(s))
        throw std::invalid_argument(
            "experiment_params: full data is handled per angle; use full_data_components");
    return std::visit(
        [&](const auto& alt) -> std::optional<ExperimentParams> {
            if constexpr (std::is_same_v<std::decay_t<decltype(alt)>, FullData>)
                return std::nullopt;
            else
                return experiment_params(alt, xi);
        },
        s);
}

inline std::vector<FixedAngle> full_data_components(const FullData& s) {
    std::vector<FixedAngle> out;
    out.reserve(s.angles.size());
    for (const auto& a : s.angles) out.push_back(FixedAngle(a));
    return out;
}

// Largest even N with N < 4 R k0 / pi, i.e. the finest mesh on which the
// fixed-energy disk still covers every frequency node. Returns 0 if none.
inline int max_full_mesh_N(const FixedEnergy& s, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("max_full_mesh_N: R must be positive");
    const double bound = 4.0 * R * s.k0 / pi;
    int m = static_cast<int>(std::ceil(bound)) - 1;  // largest integer < bound
    if (m < 0) m = 0;
    return m - (m % 2);
}

// --------- header serialization ---------

inline std::string scenario_name(const ScatteringScenario& s) {
    if (std::holds_alternative<FixedEnergy>(s)) return "fixed-energy";
    if (std::holds_alternative<FixedAngle>(s)) return "fixed-angle";
    if (std::holds_alternative<Backscattering>(s)) return "backscattering";
    return "full-data";
}

inline std::string scenario_params_string(const ScatteringScenario& s) {
    if (const auto* fe = std::get_if<FixedEnergy>(&s)) return "k0=" + detail::fmt_g17(fe->k0);
    if (const auto* fa = std::get_if<FixedAngle>(&s))
        return "theta0=" + detail::fmt_g17(fa->theta0.x) + ":" + detail::fmt_g17(fa->theta0.y);
    if (const auto* fd = std::get_if<FullData>(&s)) {
        std::string out = "angles=";
        for (std::size_t i = 0; i < fd->angles.size(); ++i) {
            if (i) out += ";";
            out += detail::fmt_g17(fd->angles[i].x) + ":" + detail::fmt_g17(fd->angles[i].y);
        }
        return out;
    }
    return "-";
}

inline ScatteringScenario parse_scenario(const std::string& name, const std::string& params) {
    if (name == "fixed-energy") {
        double k0;
        if (std::sscanf(params.c_str(), "k0=%lf", &k0) != 1)
            throw std::runtime_error("parse_scenario: bad fixed-energy params: " + params);
        return FixedEnergy(k0);
    }
    if (name == "fixed-angle") {
        double x, y;
        if (std::sscanf(params.c_str(), "theta0=%lf:%lf", &x, &y) != 2)
            throw std::runtime_error("parse_scenario: bad fixed-angle params: " + params);
        return FixedAngle({x, y});
    }
    if (name == "backscattering") return Backscattering{};
    if (name == "full-data") {
        std::vector<Vec2> dirs;
        std::string body = params;
        if (body.rfind("angles=", 0) != 0)
            throw std::runtime_error("parse_scenario: bad full-data params: " + params);
        body = body.substr(7);
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t end = body.find(';', pos);
            if (end == std::string::npos) end = body.size();
            double x, y;
            if (std::sscanf(body.substr(pos, end - pos).c_str(), "%lf:%lf", &x, &y) != 2)
                throw std::runtime_error("parse_scenario: bad full-data angle: " + params);
            dirs.push_back({x, y});
            pos = end + 1;
        }
        return FullData(std::move(dirs));
    }
    throw std::runtime_error("parse_scenario: unknown scenario: " + name);
}

}  // namespace scatter2d

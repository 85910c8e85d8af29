#pragma once

#include <stdexcept>
#include <string>

#include "scatter2d/grid.hpp"
#include "scatter2d/types.hpp"

namespace scatter2d {

// Test potential: 1 on the annulus 0.7 < |x| < 1, plus 1.2 on the square
// |x1|+|x2| < 0.3 (which sits in the annulus hole, so the regions are
// disjoint and the values taken are {0, 1, 1.2}).
inline double paper_potential(Vec2 x) {
    const double r = x.norm();
    double v = 0.0;
    if (r > 0.7 && r < 1.0) v += 1.0;
    if (std::abs(x.x) + std::abs(x.y) < 0.3) v += 1.2;
    return v;
}

// Smooth bump, numerically supported in the unit disk.
inline double gaussian_potential(Vec2 x) {
    const double r2 = x.norm2();
    return r2 < 1.0 ? std::exp(-16.0 * r2) : 0.0;
}

// Named phantoms: "paper", "zero", "gaussian", "scaled:<f>:<name>".
inline NodalField build_phantom(const std::string& name, const GridSpec& grid) {
    if (name == "paper") return interpolate_qh(paper_potential, grid);
    if (name == "zero") return NodalField(grid);
    if (name == "gaussian") return interpolate_qh(gaussian_potential, grid);
    if (name.rfind("scaled:", 0) == 0) {
        const std::size_t sep = name.find(':', 7);
        if (sep != std::string::npos) {
            std::size_t parsed = 0;
            double factor = 0.0;
            try {
                factor = std::stod(name.substr(7, sep - 7), &parsed);
            } catch (const std::exception&) {
                throw std::invalid_argument("build_phantom: bad scale factor in " + name);
            }
            if (parsed != sep - 7)
                throw std::invalid_argument("build_phantom: bad scale factor in " + name);
            NodalField base = build_phantom(name.substr(sep + 1), grid);
            for (auto& v : base.values) v *= factor;
            return base;
        }
    }
    throw std::invalid_argument("build_phantom: unknown phantom '" + name + "'");
}

}  // namespace scatter2d

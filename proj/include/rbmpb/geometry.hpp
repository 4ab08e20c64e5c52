#pragma once

#include <cassert>
#include <cmath>
#include <numbers>

#include "rbmpb/errors.hpp"
#include "rbmpb/vec.hpp"

namespace rbmpb {

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return std::numbers::pi;
        case 3: return 4.0 * std::numbers::pi / 3.0;
        default: assert(false); return 0.0;
    }
}

inline constexpr double kBoundaryTol = 1e-9;

// Truncated simulation domain. d=1: the half-domain (a, L) to the right of
// the membrane. d>=2: the spherical shell {R <= |x| <= L} between the cell
// membrane and the artificial outer wall, centered at the origin.
template <int D>
struct SimDomain {
    double inner;  // a (d=1) or R (d>=2)
    double outer;  // L

    SimDomain(double inner_, double outer_) : inner(inner_), outer(outer_) {
        assert(inner > 0.0 && inner < outer);
    }

    double volume() const {
        if constexpr (D == 1) return outer - inner;
        return unit_ball_volume(D) * (std::pow(outer, D) - std::pow(inner, D));
    }

    bool contains(const Vec<D>& x) const {
        if constexpr (D == 1) return x[0] >= inner && x[0] <= outer;
        const double r2 = norm2(x);
        return r2 >= inner * inner && r2 <= outer * outer;
    }

    // Orthogonal projection onto the closest boundary component; identity on
    // interior points. A point exactly at the center of a shell has no
    // projection direction; it is displaced along the first coordinate axis
    // so runs stay reproducible.
    Vec<D> project_to_boundary(const Vec<D>& x) const {
        if constexpr (D == 1) {
            if (x[0] < inner) return Vec<1>{inner};
            if (x[0] > outer) return Vec<1>{outer};
            return x;
        } else {
            double r = norm(x);
            Vec<D> dir = x;
            if (r == 0.0) {
                dir = Vec<D>{};
                dir[0] = 1.0;
                r = 1.0;
            }
            if (r < inner) return dir * (inner / r);
            if (r > outer) return dir * (outer / r);
            return x;
        }
    }

    // Outward unit normal of Omega_L: at the inner boundary it points into
    // the cell, at the outer wall away from the origin.
    Vec<D> outward_normal(const Vec<D>& x) const {
        if constexpr (D == 1) {
            if (std::abs(x[0] - inner) <= kBoundaryTol) return Vec<1>{-1.0};
            if (std::abs(x[0] - outer) <= kBoundaryTol) return Vec<1>{1.0};
            throw NotOnBoundaryError("outward_normal: point is not on the domain boundary");
        } else {
            const double r = norm(x);
            if (std::abs(r - inner) <= kBoundaryTol) return x * (-1.0 / r);
            if (std::abs(r - outer) <= kBoundaryTol) return x * (1.0 / r);
            throw NotOnBoundaryError("outward_normal: point is not on the domain boundary");
        }
    }
};

using Interval1D = SimDomain<1>;

}

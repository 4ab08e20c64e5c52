#pragma once

#include <cmath>

#include "rbmpb/errors.hpp"
#include "rbmpb/geometry.hpp"
#include "rbmpb/rng.hpp"
#include "rbmpb/vec.hpp"

namespace rbmpb {

enum class SchemeKind { Projection, Reflection, Penalization };

// Boundary handling for the reflected SDE. Penalization keeps the weight
// lambda in (0,1]; lambda = 1 coincides with projection.
struct ReflectionScheme {
    SchemeKind kind = SchemeKind::Reflection;
    double lambda = 1.0;

    static ReflectionScheme projection() { return {SchemeKind::Projection, 1.0}; }
    static ReflectionScheme reflection() { return {SchemeKind::Reflection, 1.0}; }
    static ReflectionScheme penalization(double lambda) {
        return {SchemeKind::Penalization, lambda};
    }
};

// Euler-Maruyama displacement with diffusion coefficient sqrt(2); boundary
// handling is applied separately.
template <int D>
inline Vec<D> em_step(const Vec<D>& x, const Vec<D>& drift, double tau, const Vec<D>& gauss) {
    return x + drift * tau + gauss * std::sqrt(2.0 * tau);
}

inline constexpr int kBoundaryIterationCap = 8;

// Applies the reflecting scheme to a point that may have left the domain.
//
// Projection lands on the boundary immediately. Reflection mirrors about the
// projection point; a large overshoot across a shell may need several
// bounces, so it is iterated up to a cap and failure to land inside signals
// that tau is too large for the geometry. Penalization is a single partial
// push toward the boundary: for lambda < 1 the result may remain slightly
// outside, which is the scheme's expected near-wall behavior.
template <int D>
inline Vec<D> apply_boundary(Vec<D> x, const SimDomain<D>& domain, const ReflectionScheme& scheme) {
    if (domain.contains(x)) return x;
    switch (scheme.kind) {
        case SchemeKind::Projection:
            return domain.project_to_boundary(x);
        case SchemeKind::Penalization: {
            const Vec<D> pi = domain.project_to_boundary(x);
            return x - (x - pi) * scheme.lambda;
        }
        case SchemeKind::Reflection: {
            for (int it = 0; it < kBoundaryIterationCap; ++it) {
                const Vec<D> pi = domain.project_to_boundary(x);
                x = pi * 2.0 - x;
                if (domain.contains(x)) return x;
            }
            throw ReflectionFailure("apply_boundary: point still outside after iteration cap");
        }
    }
    return x;
}

}

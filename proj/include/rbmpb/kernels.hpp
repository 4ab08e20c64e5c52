#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "rbmpb/errors.hpp"
#include "rbmpb/geometry.hpp"
#include "rbmpb/vec.hpp"

namespace rbmpb {

// Physical parameterization of one experiment. nu is the squared ratio of
// Debye length to cell size, Q_f the total free charge inside the cell at
// x_c, q the charge carried by one numerical particle.
template <int D>
struct PhysicalParams {
    double nu = 1.0;
    double Q_f = 0.0;
    Vec<D> x_c{};
    double q = 1e-4;
    std::optional<double> rho_inf{};
};

// Coulomb potential Psi with -nu Laplacian(Psi) = delta.
template <int D>
inline double coulomb_potential(double nu, const Vec<D>& x) {
    if constexpr (D == 1) {
        return -std::abs(x[0]) / (2.0 * nu);
    } else {
        const double r = norm(x);
        if (r == 0.0) throw SingularityError("coulomb_potential: |x| = 0");
        if constexpr (D == 2) return -std::log(r) / (2.0 * std::numbers::pi * nu);
        return 1.0 / (D * (D - 2) * unit_ball_volume(D) * nu * std::pow(r, D - 2));
    }
}

// Repulsive force F = -grad Psi. In 1D, F(0) = 0 (sign convention), so two
// coincident particles exert no force.
template <int D>
inline Vec<D> coulomb_force(double nu, const Vec<D>& x) {
    if constexpr (D == 1) {
        const double s = (x[0] > 0.0) ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0);
        return Vec<1>{s / (2.0 * nu)};
    } else {
        const double r = norm(x);
        if (r == 0.0) throw SingularityError("coulomb_force: |x| = 0");
        return x * (1.0 / (D * unit_ball_volume(D) * nu * std::pow(r, D)));
    }
}

// Field generated by the fixed free charge, evaluated at a solvent point.
//
// The 1D half-domain mode returns the constant Q_f/(4 nu): the free charge
// contributes Q_f/(2 nu) and the mirrored left-half ensemble (net charge
// -Q_f/2) contributes -Q_f/(4 nu), leaving the effective drive Q_f/(4 nu).
template <int D>
inline Vec<D> external_field(const PhysicalParams<D>& params, const SimDomain<D>& domain,
                             const Vec<D>& x) {
    (void)domain;
    if (params.Q_f == 0.0) return Vec<D>{};
    if constexpr (D == 1) {
        return Vec<1>{params.Q_f / (4.0 * params.nu)};
    } else {
        return coulomb_force<D>(params.nu, x - params.x_c) * params.Q_f;
    }
}

}

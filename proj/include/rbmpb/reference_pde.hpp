#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "rbmpb/errors.hpp"

namespace rbmpb {

enum class GridKind { Interval, Radial3D };

// Nodal solution of the truncated Poisson-Boltzmann problem produced by the
// Newton finite-difference solver.
struct GridSolution {
    std::vector<double> nodes;  // uniform spacing
    std::vector<double> phi;
    double nu = 1.0;
    double rho_inf = 0.0;
    double sigma_f = 0.0;
    GridKind kind = GridKind::Interval;
    double residual_norm = 0.0;
    int newton_iterations = 0;

    double h() const { return nodes[1] - nodes[0]; }

    double interp_phi(double x) const {
        if (x <= nodes.front()) return phi.front();
        if (x >= nodes.back()) return phi.back();
        const double t = (x - nodes.front()) / h();
        const auto i = std::min(nodes.size() - 2, static_cast<std::size_t>(t));
        const double w = t - static_cast<double>(i);
        return phi[i] * (1.0 - w) + phi[i + 1] * w;
    }
};

namespace detail {

// Thomas algorithm; overwrites its inputs.
inline void solve_tridiagonal(std::vector<double>& dl, std::vector<double>& d,
                              std::vector<double>& du, std::vector<double>& b) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = dl[i - 1] / d[i - 1];
        d[i] -= w * du[i - 1];
        b[i] -= w * b[i - 1];
    }
    b[n - 1] /= d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1]) / d[i];
}

struct PbProblem {
    double nu, rho_inf, sigma_f, lo, hi;
    GridKind kind;
};

// Residual of the central-difference discretization with second-order
// ghost-point Neumann conditions: -phi'(lo) = sigma_f, phi'(hi) = 0.
inline void pb_residual(const PbProblem& p, const std::vector<double>& x,
                        const std::vector<double>& phi, std::vector<double>& r) {
    const std::size_t n = phi.size();
    const double h = x[1] - x[0];
    const double ih2 = 1.0 / (h * h);
    auto source = [&](double v) { return p.rho_inf * (std::exp(-v) - std::exp(v)); };
    auto curv = [&](double rad) {
        return (p.kind == GridKind::Radial3D) ? 2.0 * p.nu / rad : 0.0;
    };
    for (std::size_t i = 1; i + 1 < n; ++i) {
        r[i] = -p.nu * (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) * ih2 -
               curv(x[i]) * (phi[i + 1] - phi[i - 1]) / (2.0 * h) - source(phi[i]);
    }
    // ghost at lo: phi[-1] = phi[1] + 2 h sigma_f, so phi'(lo) = -sigma_f
    r[0] = -p.nu * (2.0 * phi[1] + 2.0 * h * p.sigma_f - 2.0 * phi[0]) * ih2 +
           curv(x[0]) * p.sigma_f - source(phi[0]);
    // ghost at hi: phi[n] = phi[n-2], so phi'(hi) = 0
    r[n - 1] = -p.nu * (2.0 * phi[n - 2] - 2.0 * phi[n - 1]) * ih2 - source(phi[n - 1]);
}

inline double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline GridSolution newton_solve(const PbProblem& p, std::size_t n_nodes, double tol,
                                 int max_iters) {
    GridSolution sol;
    sol.nu = p.nu;
    sol.rho_inf = p.rho_inf;
    sol.sigma_f = p.sigma_f;
    sol.kind = p.kind;
    sol.nodes.resize(n_nodes);
    const double h = (p.hi - p.lo) / static_cast<double>(n_nodes - 1);
    for (std::size_t i = 0; i < n_nodes; ++i) sol.nodes[i] = p.lo + h * static_cast<double>(i);
    sol.phi.assign(n_nodes, 0.0);

    std::vector<double> r(n_nodes), trial(n_nodes);
    std::vector<double> dl(n_nodes - 1), d(n_nodes), du(n_nodes - 1);
    const double ih2 = 1.0 / (h * h);

    pb_residual(p, sol.nodes, sol.phi, r);
    double rn = sup_norm(r);
    int it = 0;
    while (rn > tol) {
        if (it >= max_iters)
            throw NewtonFailure("solve_pb: Newton did not converge", rn);
        for (std::size_t i = 0; i < n_nodes; ++i)
            d[i] = 2.0 * p.nu * ih2 + p.rho_inf * (std::exp(-sol.phi[i]) + std::exp(sol.phi[i]));
        std::fill(dl.begin(), dl.end(), -p.nu * ih2);
        std::fill(du.begin(), du.end(), -p.nu * ih2);
        if (p.kind == GridKind::Radial3D) {
            for (std::size_t i = 1; i + 1 < n_nodes; ++i) {
                const double c = 2.0 * p.nu / sol.nodes[i] / (2.0 * h);
                dl[i - 1] += c;
                du[i] -= c;
            }
        }
        du[0] = -2.0 * p.nu * ih2;
        dl[n_nodes - 2] = -2.0 * p.nu * ih2;

        std::vector<double> rhs(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) rhs[i] = -r[i];
        solve_tridiagonal(dl, d, du, rhs);

        // line search: halve until the residual decreases
        double lambda = 1.0;
        double new_rn = rn;
        for (int halving = 0; halving <= 30; ++halving) {
            for (std::size_t i = 0; i < n_nodes; ++i) trial[i] = sol.phi[i] + lambda * rhs[i];
            pb_residual(p, sol.nodes, trial, r);
            new_rn = sup_norm(r);
            if (new_rn < rn) break;
            lambda *= 0.5;
        }
        sol.phi.swap(trial);
        rn = new_rn;
        ++it;
    }
    sol.residual_norm = rn;
    sol.newton_iterations = it;
    return sol;
}

}  // namespace detail

// -nu phi'' = rho_inf (e^-phi - e^phi) on (a, L), -phi'(a) = sigma_f, phi'(L) = 0.
inline GridSolution solve_pb_1d(double nu, double rho_inf, double sigma_f, double a, double L,
                                std::size_t n_nodes = 2001, double tol = 1e-10,
                                int max_iters = 50) {
    return detail::newton_solve({nu, rho_inf, sigma_f, a, L, GridKind::Interval}, n_nodes, tol,
                                max_iters);
}

// Radial form -nu phi'' - (2 nu / r) phi' = rho_inf (e^-phi - e^phi) on (R, L)
// with -phi'(R) = sigma_f = Q_f / (4 pi R^2 nu), phi'(L) = 0.
inline GridSolution solve_pb_radial3d(double nu, double rho_inf, double Q_f, double R, double L,
                                      std::size_t n_nodes = 2001, double tol = 1e-10,
                                      int max_iters = 50) {
    const double sigma_f = Q_f / (4.0 * std::numbers::pi * R * R * nu);
    return detail::newton_solve({nu, rho_inf, sigma_f, R, L, GridKind::Radial3D}, n_nodes, tol,
                                max_iters);
}

// Boltzmann densities rho_± = rho_inf e^{∓phi}.
inline std::pair<std::vector<double>, std::vector<double>> densities_from_phi(
    const GridSolution& sol) {
    std::vector<double> rp(sol.phi.size()), rm(sol.phi.size());
    for (std::size_t i = 0; i < sol.phi.size(); ++i) {
        rp[i] = sol.rho_inf * std::exp(-sol.phi[i]);
        rm[i] = sol.rho_inf * std::exp(sol.phi[i]);
    }
    return {std::move(rp), std::move(rm)};
}

// Trapezoid integral of nodal values, weighted by the volume measure
// (4 pi r^2 dr for the radial solver).
inline double integrate(const GridSolution& sol, const std::vector<double>& values) {
    double acc = 0.0;
    const double h = sol.h();
    for (std::size_t i = 0; i + 1 < sol.nodes.size(); ++i) {
        auto w = [&](std::size_t j) {
            return sol.kind == GridKind::Radial3D
                       ? 4.0 * std::numbers::pi * sol.nodes[j] * sol.nodes[j]
                       : 1.0;
        };
        acc += 0.5 * h * (values[i] * w(i) + values[i + 1] * w(i + 1));
    }
    return acc;
}

// Total positive charge carried by the Boltzmann density of a solution.
inline double positive_charge(const GridSolution& sol) {
    std::vector<double> rp(sol.phi.size());
    for (std::size_t i = 0; i < sol.phi.size(); ++i)
        rp[i] = sol.rho_inf * std::exp(-sol.phi[i]);
    return integrate(sol, rp);
}

// Finds the far-field concentration for which the equilibrium positive
// charge in the domain equals Q_plus (log-bisection; the charge is monotone
// increasing in rho_inf).
inline double match_rho_inf_1d(double nu, double sigma_f, double a, double L, double Q_plus,
                               std::size_t n_nodes = 2001) {
    double lo = 1e-10, hi = 50.0;
    for (int it = 0; it < 120; ++it) {
        const double mid = std::sqrt(lo * hi);
        const GridSolution sol = solve_pb_1d(nu, mid, sigma_f, a, L, n_nodes);
        (positive_charge(sol) > Q_plus ? hi : lo) = mid;
        if (hi / lo < 1.0 + 1e-13) break;
    }
    return std::sqrt(lo * hi);
}

inline double match_rho_inf_radial3d(double nu, double Q_f, double R, double L, double Q_plus,
                                     std::size_t n_nodes = 2001) {
    double lo = 1e-10, hi = 50.0;
    for (int it = 0; it < 120; ++it) {
        const double mid = std::sqrt(lo * hi);
        const GridSolution sol = solve_pb_radial3d(nu, mid, Q_f, R, L, n_nodes);
        (positive_charge(sol) > Q_plus ? hi : lo) = mid;
        if (hi / lo < 1.0 + 1e-13) break;
    }
    return std::sqrt(lo * hi);
}

// One row of the domain-truncation error table.
struct TruncationRow {
    double L;
    double l1_error;
};

// Solves the 1D problem on (a, L) for each L and against the reference
// length L_ref, and reports ||phi_L - phi_ref||_L1(Omega_L). All solves share
// the node spacing of the reference grid so nodes align.
inline std::vector<TruncationRow> truncation_study(double nu, double rho_inf, double sigma_f,
                                                   double a, const std::vector<double>& L_list,
                                                   double L_ref,
                                                   std::size_t nodes_per_unit = 64) {
    for (double L : L_list)
        if (L > 0.5 * L_ref)
            throw Error("truncation_study: require max(L_list) <= L_ref / 2");
    const auto n_ref = static_cast<std::size_t>(
        std::llround((L_ref - a) * static_cast<double>(nodes_per_unit))) + 1;
    const GridSolution ref = solve_pb_1d(nu, rho_inf, sigma_f, a, L_ref, n_ref);

    std::vector<TruncationRow> rows;
    for (double L : L_list) {
        const auto n = static_cast<std::size_t>(
            std::llround((L - a) * static_cast<double>(nodes_per_unit))) + 1;
        const GridSolution sol = solve_pb_1d(nu, rho_inf, sigma_f, a, L, n);
        std::vector<double> diff(sol.nodes.size());
        for (std::size_t i = 0; i < sol.nodes.size(); ++i)
            diff[i] = std::abs(sol.phi[i] - ref.interp_phi(sol.nodes[i]));
        rows.push_back({L, integrate(sol, diff)});
    }
    return rows;
}

struct DecayBoundReport {
    bool passed = true;
    double max_phi_ratio = 0.0;   // max |phi| / (slack * bound)
    double max_dphi_ratio = 0.0;  // max |phi'| / (slack * bound)
    double worst_node = 0.0;
};

// Checks the exponential decay bounds for the 1D problem at nu = 1:
//   |phi(x)|  <= (|sigma_f|/sqrt(2 rho_inf)) exp(-sqrt(2 rho_inf) dist(x, membrane)),
//   |phi'(x)| <=  |sigma_f|                  exp(-sqrt(2 rho_inf) dist(x, membrane)),
// at every node, with a slack factor for discretization error. The bounds
// describe the unbounded-domain solution, so the solution handed in should
// be unpolluted by the artificial wall over the nodes it carries.
inline DecayBoundReport decay_bound_check(const GridSolution& sol, double slack = 1.05) {
    DecayBoundReport rep;
    if (sol.rho_inf <= 0.0) return rep;
    const double kappa = std::sqrt(2.0 * sol.rho_inf);
    const double asf = std::abs(sol.sigma_f);
    const double h = sol.h();
    const std::size_t n = sol.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double dist = sol.nodes[i] - sol.nodes.front();
        const double decay = std::exp(-kappa * dist);
        double dphi;
        if (i == 0)
            dphi = (-3.0 * sol.phi[0] + 4.0 * sol.phi[1] - sol.phi[2]) / (2.0 * h);
        else if (i == n - 1)
            dphi = (3.0 * sol.phi[n - 1] - 4.0 * sol.phi[n - 2] + sol.phi[n - 3]) / (2.0 * h);
        else
            dphi = (sol.phi[i + 1] - sol.phi[i - 1]) / (2.0 * h);

        const double phi_bound = slack * asf / kappa * decay;
        const double dphi_bound = slack * asf * decay;
        const double pr = (phi_bound > 0.0) ? std::abs(sol.phi[i]) / phi_bound : 0.0;
        const double dr = (dphi_bound > 0.0) ? std::abs(dphi) / dphi_bound : 0.0;
        if (pr > rep.max_phi_ratio) {
            rep.max_phi_ratio = pr;
            if (pr > 1.0) rep.worst_node = sol.nodes[i];
        }
        rep.max_dphi_ratio = std::max(rep.max_dphi_ratio, dr);
    }
    rep.passed = rep.max_phi_ratio <= 1.0 && rep.max_dphi_ratio <= 1.0;
    return rep;
}

// Restriction of a solution to nodes <= x_max (used to verify decay bounds
// on a region far from the artificial wall of a larger solve).
inline GridSolution restrict_solution(const GridSolution& sol, double x_max) {
    GridSolution out = sol;
    std::size_t keep = 0;
    while (keep < sol.nodes.size() && sol.nodes[keep] <= x_max + 1e-12) ++keep;
    out.nodes.assign(sol.nodes.begin(), sol.nodes.begin() + static_cast<long>(keep));
    out.phi.assign(sol.phi.begin(), sol.phi.begin() + static_cast<long>(keep));
    return out;
}

}

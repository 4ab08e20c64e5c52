#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rbmpb/ensemble.hpp"
#include "rbmpb/errors.hpp"
#include "rbmpb/observables.hpp"
#include "rbmpb/rbm.hpp"

namespace rbmpb {

struct IterationRecord {
    double Q_plus;
    double bulk_rho_plus;
    double bulk_rho_minus;
    double err;
};

struct IterationState {
    double Q_plus = 0.0;
    double err = 0.0;
    std::size_t iterations = 0;
    std::vector<IterationRecord> history;
    bool converged = false;
    bool removal_floor_hit = false;
};

template <int D>
struct ChargeIterationOptions {
    double Q_plus_init = 1.0;
    double T_c = 50.0;
    double tau = 0.1;
    double epsilon = 1e-5;
    int max_iters = 20;
    Vec<D> x_bar{};        // point on the outer wall
    double h = 2.0;        // bulk half-ball radius
    double tail_fraction = 0.25;  // time-average window at the end of each T_c run
    RbmOptions<D> rbm{};
};

// Determines the total positive charge matching a prescribed far-field
// concentration: simulate for T_c, measure the bulk densities at the wall,
// and add or remove equal numbers of positive and negative particles until
// the bulk concentration sqrt(rho_+ rho_-) agrees with rho_inf.
//
// Err is the signed deviation sqrt(rho_+ rho_-) - rho_inf. Adding 2*dN
// particles (dN per species) raises each bulk density by about dQ/|Omega_L|,
// so the update dQ = (alpha(d) L^d / 2) |Err| is a unit-gain fixed-point
// step; sign(Err) decides between adding and removing.
template <int D>
inline IterationState iterate_q_plus(ParticleEnsemble<D>& ens, const PhysicalParams<D>& params,
                                     const SimDomain<D>& domain, const ReflectionScheme& scheme,
                                     const InitDistribution<D>& init, const RngSpec& rng,
                                     const ChargeIterationOptions<D>& opt) {
    if (!params.rho_inf.has_value() || *params.rho_inf <= 0.0)
        throw Error("iterate_q_plus: rho_inf must be given and positive");
    const double rho_inf = *params.rho_inf;

    IterationState state;
    state.Q_plus = ens.q_plus();

    const auto n_steps = static_cast<std::uint64_t>(std::llround(opt.T_c / opt.tau));
    const auto tail = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(static_cast<double>(n_steps) * opt.tail_fraction));
    std::uint64_t step_base = 0;

    for (int it = 0; it < opt.max_iters; ++it) {
        // run T_c and accumulate the wall half-ball occupancy over the tail
        double acc_p = 0.0, acc_m = 0.0;
        std::uint64_t frames = 0;
        const StepObserver<D> observer = [&](std::uint64_t s, const ParticleEnsemble<D>& e) {
            if (s + tail < n_steps) return;
            std::size_t in_p = 0, in_m = 0;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (norm(e.positions[i] - opt.x_bar) > opt.h) continue;
                (e.signs[i] > 0 ? in_p : in_m)++;
            }
            const double denom = unit_ball_volume(D) * std::pow(opt.h, D);
            acc_p += e.q_plus() * 2.0 * static_cast<double>(in_p) /
                     (denom * static_cast<double>(e.n_plus()));
            acc_m += e.q_minus() * 2.0 * static_cast<double>(in_m) /
                     (denom * static_cast<double>(e.n_minus()));
            ++frames;
        };
        simulate(ens, params, domain, scheme, opt.tau, n_steps, rng, {}, opt.rbm, step_base,
                 observer);
        step_base += n_steps;

        const double rho_p = acc_p / static_cast<double>(frames);
        const double rho_m = acc_m / static_cast<double>(frames);
        const double product = rho_p * rho_m;
        const double err = std::sqrt(std::max(product, 0.0)) - rho_inf;

        state.Q_plus = ens.q_plus();
        state.err = err;
        state.iterations = static_cast<std::size_t>(it + 1);
        state.history.push_back({state.Q_plus, rho_p, rho_m, err});

        if (std::abs(err) <= opt.epsilon) {
            state.converged = true;
            return state;
        }

        const double dQ = 0.5 * unit_ball_volume(D) * std::pow(domain.outer, D) * std::abs(err);
        const auto dN = static_cast<std::size_t>(std::floor(dQ / ens.q));
        if (dN == 0) continue;

        if (err < 0.0) {
            for (std::size_t k = 0; k < dN; ++k)
                ens.add_particle(init.sample(rng.with_stream(ens.next_stream)), +1);
            for (std::size_t k = 0; k < dN; ++k)
                ens.add_particle(init.sample(rng.with_stream(ens.next_stream)), -1);
        } else {
            remove_random(ens, +1, dN, rng, static_cast<std::uint64_t>(it), state);
            remove_random(ens, -1, dN, rng, static_cast<std::uint64_t>(it), state);
        }
        state.Q_plus = ens.q_plus();
    }
    return state;
}

// Removes up to n uniformly chosen particles of one species, never dropping
// the species below one particle.
template <int D>
inline void remove_random(ParticleEnsemble<D>& ens, int species, std::size_t n,
                          const RngSpec& rng, std::uint64_t iteration, IterationState& state) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ens.size(); ++i)
        if (ens.signs[i] == species) members.push_back(i);
    if (members.size() <= 1) {
        state.removal_floor_hit = true;
        return;
    }
    std::size_t target = n;
    if (target > members.size() - 1) {
        target = members.size() - 1;
        state.removal_floor_hit = true;
    }
    const RngSpec removal = rng.with_stream(kRemovalStream);
    const std::uint32_t salt = (species > 0) ? 0u : 0x40000000u;
    // partial Fisher-Yates selecting `target` victims
    for (std::size_t k = 0; k < target; ++k) {
        const auto j = k + static_cast<std::size_t>(uniform_below(
                               removal, iteration, salt + static_cast<std::uint32_t>(k),
                               members.size() - k));
        std::swap(members[k], members[j]);
    }
    std::vector<std::size_t> victims(members.begin(),
                                     members.begin() + static_cast<long>(target));
    std::sort(victims.rbegin(), victims.rend());
    for (std::size_t idx : victims) ens.remove_particle(idx);
}

}

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "rbmpb/batch.hpp"
#include "rbmpb/ensemble.hpp"
#include "rbmpb/errors.hpp"
#include "rbmpb/geometry.hpp"
#include "rbmpb/kernels.hpp"
#include "rbmpb/parallel.hpp"
#include "rbmpb/rng.hpp"
#include "rbmpb/sde.hpp"
#include "rbmpb/vec.hpp"

namespace rbmpb {

template <int D>
struct RbmOptions {
    int batch_size = 2;      // d >= 2 supports p = 2 only (closed-form split)
    bool with_noise = true;  // test hook: disable diffusion
    int threads = 1;
};

// Drift on particle i from the external field plus the within-batch
// interaction, evaluated on frozen step-start positions:
//   z_i E_f(X_i) + (1/(p-1)) sum_{k in batch, k != i} z_i z_k |Q| (N-1)/N F(X_i - X_k)
template <int D>
inline double batch_drift_1d(const ParticleEnsemble<D>& ens, const BatchPartition& part,
                             const PhysicalParams<D>& params, const SimDomain<D>& domain,
                             std::size_t i)
    requires(D == 1)
{
    const std::size_t n = ens.size();
    const double coupling =
        ens.abs_charge() * static_cast<double>(n - 1) / static_cast<double>(n);
    const int p = part.batch_size;

    std::size_t slot = 0;
    while (slot < n && part.order[slot] != i) ++slot;
    const std::size_t b = slot / static_cast<std::size_t>(p);

    const double zi = ens.signs[i];
    double drift = zi * external_field(params, domain, ens.positions[i])[0];
    const std::uint32_t* members = part.batch(b);
    for (int m = 0; m < p; ++m) {
        const std::size_t k = members[m];
        if (k == i) continue;
        const double zk = ens.signs[k];
        drift += zi * zk * coupling / static_cast<double>(p - 1) *
                 coulomb_force<1>(params.nu, ens.positions[i] - ens.positions[k])[0];
    }
    return drift;
}

// Exact solution of the two-body Coulomb flow over one step (p = 2). The
// separation obeys d(|Y|^d)/dt = beta with
//   beta = 2 z_i z_k |Q| (N-1) / (alpha(d) nu N),
// so the pair moves symmetrically about its midpoint; an attracting pair
// whose separation would vanish within the step collapses to the midpoint
// and is left to separate in a later step when re-batched.
template <int D>
inline std::pair<Vec<D>, Vec<D>> pair_splitting_exact(const Vec<D>& xi, const Vec<D>& xk,
                                                      double zi, double zk, double tau,
                                                      double abs_charge, std::size_t n,
                                                      double nu)
    requires(D >= 2)
{
    const double beta = 2.0 * zi * zk * abs_charge * static_cast<double>(n - 1) /
                        (unit_ball_volume(D) * nu * static_cast<double>(n));
    if (beta * tau == 0.0) return {xi, xk};

    const Vec<D> diff = xi - xk;
    const double dist = norm(diff);
    if (dist == 0.0) {
        // coincident pair: attracting stays merged; repulsive has no
        // direction, keep both in place for this sub-step
        return {xi, xk};
    }
    const Vec<D> mid = (xi + xk) * 0.5;
    const double s = std::pow(dist, D) + beta * tau;
    if (s <= 0.0) return {mid, mid};
    const Vec<D> half = diff * (0.5 * std::pow(s, 1.0 / D) / dist);
    return {mid + half, mid - half};
}

// One full RBM step: re-shuffle batches, apply the batch interaction from
// frozen step-start positions (1D: bounded pairwise force in the drift;
// d >= 2: exact pair splitting), then the external-field drift, diffusion,
// and boundary handling. Gaussian draws are keyed by (particle stream, step).
template <int D>
inline void rbm_step(ParticleEnsemble<D>& ens, const PhysicalParams<D>& params,
                     const SimDomain<D>& domain, const ReflectionScheme& scheme, double tau,
                     const RngSpec& rng, std::uint64_t step, const RbmOptions<D>& opt = {}) {
    const std::size_t n = ens.size();
    if (n == 0) return;
    if constexpr (D >= 2) {
        if (opt.batch_size != 2)
            throw InvalidBatchSize("rbm_step: only p = 2 is supported for d >= 2");
    }
    if (n == 1) {
        // single particle: external field and noise only
        const double z = ens.signs[0];
        Vec<D> drift = external_field(params, domain, ens.positions[0]) * z;
        Vec<D> g{};
        if (opt.with_noise) g = gaussian_vec<D>(rng.with_stream(ens.streams[0]), step);
        ens.positions[0] = apply_boundary(em_step(ens.positions[0], drift, tau, g), domain, scheme);
        return;
    }

    const BatchPartition part = shuffle_batches(n, opt.batch_size, rng, step);
    const double coupling =
        ens.abs_charge() * static_cast<double>(n - 1) / static_cast<double>(n);

    if constexpr (D == 1) {
        std::vector<double> drifts(n);
        const int p = part.batch_size;
        parallel_for(part.n_batches(), opt.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t b = lo; b < hi; ++b) {
                const std::uint32_t* members = part.batch(b);
                for (int mi = 0; mi < p; ++mi) {
                    const std::size_t i = members[mi];
                    const double zi = ens.signs[i];
                    double drift = zi * external_field(params, domain, ens.positions[i])[0];
                    for (int mk = 0; mk < p; ++mk) {
                        const std::size_t k = members[mk];
                        if (k == i) continue;
                        drift += zi * ens.signs[k] * coupling / static_cast<double>(p - 1) *
                                 coulomb_force<1>(params.nu,
                                                  ens.positions[i] - ens.positions[k])[0];
                    }
                    drifts[i] = drift;
                }
            }
        });
        parallel_for(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                Vec<1> g{};
                if (opt.with_noise) g = gaussian_vec<1>(rng.with_stream(ens.streams[i]), step);
                ens.positions[i] = apply_boundary(
                    em_step(ens.positions[i], Vec<1>{drifts[i]}, tau, g), domain, scheme);
            }
        });
    } else {
        parallel_for(part.n_batches(), opt.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t b = lo; b < hi; ++b) {
                const std::uint32_t* members = part.batch(b);
                const std::size_t i = members[0], k = members[1];
                auto [xi, xk] = pair_splitting_exact<D>(
                    ens.positions[i], ens.positions[k], ens.signs[i], ens.signs[k], tau,
                    ens.abs_charge(), n, params.nu);
                ens.positions[i] = xi;
                ens.positions[k] = xk;
            }
        });
        parallel_for(n, opt.threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double z = ens.signs[i];
                const Vec<D> drift = external_field(params, domain, ens.positions[i]) * z;
                Vec<D> g{};
                if (opt.with_noise) g = gaussian_vec<D>(rng.with_stream(ens.streams[i]), step);
                ens.positions[i] =
                    apply_boundary(em_step(ens.positions[i], drift, tau, g), domain, scheme);
            }
        });
    }
}

template <int D>
struct Frame {
    std::uint64_t step;
    std::vector<Vec<D>> positions;
    std::vector<std::int8_t> signs;
};

template <int D>
using StepObserver = std::function<void(std::uint64_t, const ParticleEnsemble<D>&)>;

// Runs n_steps of the RBM dynamics, recording snapshots at the requested
// (sorted) step indices relative to first_step. An optional observer sees the
// ensemble after every step.
template <int D>
inline std::vector<Frame<D>> simulate(ParticleEnsemble<D>& ens, const PhysicalParams<D>& params,
                                      const SimDomain<D>& domain, const ReflectionScheme& scheme,
                                      double tau, std::uint64_t n_steps, const RngSpec& rng,
                                      const std::vector<std::uint64_t>& frame_steps = {},
                                      const RbmOptions<D>& opt = {},
                                      std::uint64_t first_step = 0,
                                      const StepObserver<D>& observer = {}) {
    std::vector<Frame<D>> frames;
    frames.reserve(frame_steps.size());
    std::size_t next_frame = 0;
    for (std::uint64_t s = 0; s < n_steps; ++s) {
        rbm_step(ens, params, domain, scheme, tau, rng, first_step + s, opt);
        if (observer) observer(s, ens);
        while (next_frame < frame_steps.size() && frame_steps[next_frame] == s) {
            frames.push_back({first_step + s, ens.positions, ens.signs});
            ++next_frame;
        }
    }
    return frames;
}

// Step indices for n frames ending at the last step of a run, spaced stride
// steps apart.
inline std::vector<std::uint64_t> trailing_frames(std::uint64_t n_steps, std::uint64_t n_frames,
                                                  std::uint64_t stride = 1) {
    std::vector<std::uint64_t> out;
    if (n_frames == 0 || n_steps == 0) return out;
    const std::uint64_t span = (n_frames - 1) * stride;
    const std::uint64_t first = (span + 1 <= n_steps) ? n_steps - 1 - span : 0;
    for (std::uint64_t s = first; s < n_steps; s += stride) out.push_back(s);
    return out;
}

}

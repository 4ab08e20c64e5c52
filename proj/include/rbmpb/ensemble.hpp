#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rbmpb/geometry.hpp"
#include "rbmpb/kernels.hpp"
#include "rbmpb/rng.hpp"
#include "rbmpb/vec.hpp"

namespace rbmpb {

// Net negative-charge excess the solvent must carry to neutralize the free
// charge: Q_f in the full shell, Q_f/2 in the mirrored 1D half-domain.
template <int D>
inline double neutralizing_charge(double Q_f) {
    return (D == 1) ? 0.5 * Q_f : Q_f;
}

// Initial sampling distribution. In 1D a uniform interval [lo, hi]; for
// d >= 2 positions are uniform in the shell volume between radii lo and hi
// with an isotropic direction.
template <int D>
struct InitDistribution {
    double lo;
    double hi;

    static InitDistribution whole(const SimDomain<D>& domain) {
        return {domain.inner, domain.outer};
    }

    Vec<D> sample(const RngSpec& stream) const {
        if constexpr (D == 1) {
            return Vec<1>{lo + (hi - lo) * uniform(stream, kInitStep, 0)};
        } else {
            const double u = uniform(stream, kInitStep, 0);
            const double r = std::pow(std::pow(lo, D) + u * (std::pow(hi, D) - std::pow(lo, D)),
                                      1.0 / D);
            Vec<D> dir;
            dir[0] = gaussian(stream, kInitStep, 2);
            if constexpr (D >= 2) dir[1] = gaussian(stream, kInitStep, 3);
            if constexpr (D == 3) dir[2] = gaussian(stream, kInitStep, 4);
            double n = norm(dir);
            if (n == 0.0) {  // probability-zero degenerate draw
                dir = Vec<D>{};
                dir[0] = 1.0;
                n = 1.0;
            }
            return dir * (r / n);
        }
    }
};

// The interacting particle ensemble: positions, species signs, and the
// charge q carried by each numerical particle. Each particle owns an RNG
// stream id so noise is independent of execution order and survives
// add/remove cycles.
template <int D>
struct ParticleEnsemble {
    std::vector<Vec<D>> positions;
    std::vector<std::int8_t> signs;
    std::vector<std::uint64_t> streams;
    double q = 1e-4;
    std::uint64_t next_stream = 0;

    std::size_t size() const { return positions.size(); }

    std::size_t n_plus() const { return n_plus_; }
    std::size_t n_minus() const { return size() - n_plus_; }

    double q_plus() const { return q * static_cast<double>(n_plus()); }
    double q_minus() const { return q * static_cast<double>(n_minus()); }
    double abs_charge() const { return q * static_cast<double>(size()); }

    void add_particle(const Vec<D>& x, std::int8_t sign) {
        positions.push_back(x);
        signs.push_back(sign);
        streams.push_back(next_stream++);
        if (sign > 0) ++n_plus_;
    }

    void remove_particle(std::size_t i) {
        if (signs[i] > 0) --n_plus_;
        positions[i] = positions.back();
        signs[i] = signs.back();
        streams[i] = streams.back();
        positions.pop_back();
        signs.pop_back();
        streams.pop_back();
    }

    void recount() {
        n_plus_ = 0;
        for (auto s : signs)
            if (s > 0) ++n_plus_;
    }

  private:
    std::size_t n_plus_ = 0;
};

// Builds an ensemble carrying total positive charge Q_plus at charge q per
// particle; the negative count follows from neutralization. For d >= 2 the
// total count is rounded up to an even number (within one particle charge of
// exact balance) so that pair batches always cover the ensemble.
template <int D>
inline ParticleEnsemble<D> make_ensemble(const PhysicalParams<D>& params, double Q_plus,
                                         const InitDistribution<D>& init, const RngSpec& rng) {
    ParticleEnsemble<D> ens;
    ens.q = params.q;
    auto n_plus = static_cast<std::size_t>(std::llround(Q_plus / params.q));
    if (n_plus == 0) n_plus = 1;
    const double Q_minus = Q_plus + neutralizing_charge<D>(params.Q_f);
    auto n_minus = static_cast<std::size_t>(std::llround(Q_minus / params.q));
    if (n_minus == 0) n_minus = 1;
    if (D >= 2 && (n_plus + n_minus) % 2 != 0) ++n_minus;

    ens.positions.reserve(n_plus + n_minus);
    for (std::size_t i = 0; i < n_plus; ++i)
        ens.add_particle(init.sample(rng.with_stream(ens.next_stream)), +1);
    for (std::size_t i = 0; i < n_minus; ++i)
        ens.add_particle(init.sample(rng.with_stream(ens.next_stream)), -1);
    return ens;
}

}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rbmpb/errors.hpp"
#include "rbmpb/geometry.hpp"
#include "rbmpb/rbm.hpp"
#include "rbmpb/reference_pde.hpp"

namespace rbmpb {

// Binned empirical probability density pooled over frames. In shell mode the
// binning coordinate is the radius and the bin measure is the shell volume.
struct DensityEstimate {
    std::vector<double> bin_edges;
    std::vector<double> pdf;  // probability density per unit measure
    int species = +1;
    double charge_scale = 1.0;  // Q_±: charge density = charge_scale * pdf
    std::size_t frame_count = 0;
    std::size_t total_samples = 0;
    std::size_t outside_samples = 0;
    int dimension = 1;

    std::size_t n_bins() const { return pdf.size(); }

    double bin_center(std::size_t b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }

    double bin_measure(std::size_t b) const {
        if (dimension == 1) return bin_edges[b + 1] - bin_edges[b];
        return unit_ball_volume(dimension) *
               (std::pow(bin_edges[b + 1], dimension) - std::pow(bin_edges[b], dimension));
    }

    double charge_density(std::size_t b) const { return charge_scale * pdf[b]; }

    double normalization() const {
        double s = 0.0;
        for (std::size_t b = 0; b < n_bins(); ++b) s += pdf[b] * bin_measure(b);
        return s;
    }
};

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t n_bins) {
    std::vector<double> e(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i)
        e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
    return e;
}

// Pooled histogram of one species over all frames, normalized by the total
// sample count (including any out-of-range samples, which only a penalized
// run can produce). strict mode treats out-of-range samples as a contract
// violation.
template <int D>
inline DensityEstimate histogram_density(const std::vector<Frame<D>>& frames, int species,
                                         const std::vector<double>& bin_edges, double charge_scale,
                                         bool strict = true) {
    if (frames.empty()) throw Error("histogram_density: no frames");
    for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i)
        if (!(bin_edges[i] < bin_edges[i + 1]))
            throw Error("histogram_density: bin edges must be strictly increasing");

    DensityEstimate est;
    est.bin_edges = bin_edges;
    est.species = species;
    est.charge_scale = charge_scale;
    est.dimension = D;
    est.frame_count = frames.size();
    const std::size_t nb = bin_edges.size() - 1;
    std::vector<std::size_t> counts(nb, 0);
    const double lo = bin_edges.front(), hi = bin_edges.back();
    const double width = (hi - lo) / static_cast<double>(nb);

    for (const auto& f : frames) {
        for (std::size_t i = 0; i < f.positions.size(); ++i) {
            if (f.signs[i] != species) continue;
            const double v = (D == 1) ? f.positions[i][0] : norm(f.positions[i]);
            ++est.total_samples;
            if (v < lo || v > hi) {
                if (strict)
                    throw CoverageError("histogram_density: sample outside bin range");
                ++est.outside_samples;
                continue;
            }
            auto b = static_cast<std::size_t>((v - lo) / width);
            if (b >= nb) b = nb - 1;
            ++counts[b];
        }
    }
    if (est.total_samples == 0) throw Error("histogram_density: no samples of requested species");

    est.pdf.resize(nb);
    for (std::size_t b = 0; b < nb; ++b)
        est.pdf[b] = static_cast<double>(counts[b]) /
                     (static_cast<double>(est.total_samples) * est.bin_measure(b));
    return est;
}

// Bulk charge density at a wall point, estimated from the half-ball
// D_h = {x in Omega_L : |x - x_bar| <= h}:
//   rho_±(x_bar) = Q_± 2 N_±(D_h) / (alpha(d) h^d N_±),
// averaged over frames. Returns 0 when the species is absent.
template <int D>
inline double bulk_density(const std::vector<Frame<D>>& frames, const Vec<D>& x_bar, double h,
                           int species, double charge_per_particle) {
    if (frames.empty()) throw Error("bulk_density: no frames");
    double acc = 0.0;
    for (const auto& f : frames) {
        std::size_t n_species = 0, n_ball = 0;
        for (std::size_t i = 0; i < f.positions.size(); ++i) {
            if (f.signs[i] != species) continue;
            ++n_species;
            if (norm(f.positions[i] - x_bar) <= h) ++n_ball;
        }
        if (n_species == 0) continue;
        const double q_species = charge_per_particle * static_cast<double>(n_species);
        acc += q_species * 2.0 * static_cast<double>(n_ball) /
               (unit_ball_volume(D) * std::pow(h, D) * static_cast<double>(n_species));
    }
    return acc / static_cast<double>(frames.size());
}

struct BinnedPotential {
    std::vector<double> centers;
    std::vector<double> phi;  // NaN where either density vanishes
};

// Equilibrium potential from the two charge densities, Phi = (1/2) ln(rho_-/rho_+);
// forming the ratio eliminates rho_inf. Bins with a vanishing density are
// marked undefined rather than treated as errors.
inline BinnedPotential potential_from_densities(const DensityEstimate& plus,
                                                const DensityEstimate& minus) {
    if (plus.bin_edges != minus.bin_edges)
        throw Error("potential_from_densities: bin edges must match");
    BinnedPotential out;
    out.centers.resize(plus.n_bins());
    out.phi.resize(plus.n_bins());
    for (std::size_t b = 0; b < plus.n_bins(); ++b) {
        out.centers[b] = plus.bin_center(b);
        const double rp = plus.charge_density(b);
        const double rm = minus.charge_density(b);
        out.phi[b] = (rp > 0.0 && rm > 0.0) ? 0.5 * std::log(rm / rp)
                                            : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

enum class TestFunction { X, X2, Cos8, GaussMid };

inline const char* test_function_id(TestFunction f) {
    switch (f) {
        case TestFunction::X: return "f1_x";
        case TestFunction::X2: return "f2_x2";
        case TestFunction::Cos8: return "f3_cos";
        case TestFunction::GaussMid: return "f4_gauss";
    }
    return "?";
}

inline double eval_test_function(TestFunction f, double x, double L) {
    switch (f) {
        case TestFunction::X: return x;
        case TestFunction::X2: return x * x;
        case TestFunction::Cos8: return std::cos(x / 8.0);
        case TestFunction::GaussMid: return std::exp(-(x - 0.5 * L) * (x - 0.5 * L) / 4.0);
    }
    return 0.0;
}

struct MseReport {
    std::string f_id;
    int species = +1;
    double rel_rmse = 0.0;
    std::size_t repetitions = 0;
    std::size_t n_plus = 0;
};

// Relative root mean square error of the species sample mean of f against
// the reference expectation under the FD equilibrium density, over M
// independent repetitions.
inline MseReport weak_error(const std::vector<std::vector<double>>& samples_per_rep,
                            TestFunction f, const GridSolution& reference, int species,
                            std::size_t n_plus = 0) {
    const double L = reference.nodes.back();
    auto [rp, rm] = densities_from_phi(reference);
    const std::vector<double>& dens = (species > 0) ? rp : rm;
    const double mass = integrate(reference, dens);
    std::vector<double> fdens(dens.size());
    for (std::size_t i = 0; i < dens.size(); ++i)
        fdens[i] = eval_test_function(f, reference.nodes[i], L) * dens[i] / mass;
    const double ref_integral = integrate(reference, fdens);
    if (std::abs(ref_integral) < 1e-14)
        throw DegenerateReference("weak_error: reference integral vanishes");

    double acc = 0.0;
    for (const auto& rep : samples_per_rep) {
        double mean = 0.0;
        for (double x : rep) mean += eval_test_function(f, x, L);
        mean /= static_cast<double>(rep.size());
        const double rel = (mean - ref_integral) / ref_integral;
        acc += rel * rel;
    }
    MseReport rep;
    rep.f_id = test_function_id(f);
    rep.species = species;
    rep.repetitions = samples_per_rep.size();
    rep.n_plus = n_plus;
    rep.rel_rmse = std::sqrt(acc / static_cast<double>(samples_per_rep.size()));
    return rep;
}

enum class KdePlane { XY, YZ, RPhi };

struct Field2D {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> values;  // row-major, values[j * xs.size() + i]

    double at(std::size_t i, std::size_t j) const { return values[j * xs.size() + i]; }

    double integral() const {
        const double dx = xs[1] - xs[0];
        const double dy = ys[1] - ys[0];
        double s = 0.0;
        for (double v : values) s += v;
        return s * dx * dy;
    }
};

// Gaussian-kernel density of one species projected onto a coordinate plane
// (or the r-phi plane in spherical coordinates, polar angle from +z and
// azimuth from +x). bandwidth 0 selects Scott's rule per axis. Azimuth
// samples are wrapped by ±2 pi so the estimate is periodic.
template <int D>
inline Field2D planar_kde(const std::vector<Frame<D>>& frames, int species, KdePlane plane,
                          double bandwidth, std::size_t nx, std::size_t ny, double x_lo,
                          double x_hi, double y_lo, double y_hi,
                          std::size_t max_samples = 200000)
    requires(D == 3)
{
    std::vector<double> px, py;
    for (const auto& f : frames)
        for (std::size_t i = 0; i < f.positions.size(); ++i) {
            if (f.signs[i] != species) continue;
            const auto& p = f.positions[i];
            switch (plane) {
                case KdePlane::XY: px.push_back(p[0]); py.push_back(p[1]); break;
                case KdePlane::YZ: px.push_back(p[1]); py.push_back(p[2]); break;
                case KdePlane::RPhi:
                    px.push_back(norm(p));
                    py.push_back(std::atan2(p[1], p[0]));
                    break;
            }
        }
    if (px.empty()) throw Error("planar_kde: no samples");
    if (px.size() > max_samples) {
        const std::size_t stride = (px.size() + max_samples - 1) / max_samples;
        std::vector<double> tx, ty;
        for (std::size_t i = 0; i < px.size(); i += stride) {
            tx.push_back(px[i]);
            ty.push_back(py[i]);
        }
        px.swap(tx);
        py.swap(ty);
    }
    const auto m = static_cast<double>(px.size());

    auto scott = [&](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= m;
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= m;
        return std::sqrt(var) * std::pow(m, -1.0 / 6.0);
    };
    const double hx = bandwidth > 0.0 ? bandwidth : std::max(scott(px), 1e-12);
    const double hy = bandwidth > 0.0 ? bandwidth : std::max(scott(py), 1e-12);

    const bool wrap = (plane == KdePlane::RPhi);
    Field2D field;
    field.xs.resize(nx);
    field.ys.resize(ny);
    for (std::size_t i = 0; i < nx; ++i)
        field.xs[i] = x_lo + (x_hi - x_lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx);
    for (std::size_t j = 0; j < ny; ++j)
        field.ys[j] = y_lo + (y_hi - y_lo) * (static_cast<double>(j) + 0.5) / static_cast<double>(ny);
    field.values.assign(nx * ny, 0.0);

    const double norm_c = 1.0 / (2.0 * std::numbers::pi * hx * hy * m);
    const double cut2 = 25.0;  // 5 sigma
    for (std::size_t s = 0; s < px.size(); ++s) {
        for (int image = (wrap ? -1 : 0); image <= (wrap ? 1 : 0); ++image) {
            const double sx = px[s];
            const double sy = py[s] + 2.0 * std::numbers::pi * image;
            for (std::size_t j = 0; j < ny; ++j) {
                const double dy = (field.ys[j] - sy) / hy;
                if (dy * dy > cut2) continue;
                for (std::size_t i = 0; i < nx; ++i) {
                    const double dx = (field.xs[i] - sx) / hx;
                    const double r2 = dx * dx + dy * dy;
                    if (r2 > cut2) continue;
                    field.values[j * nx + i] += norm_c * std::exp(-0.5 * r2);
                }
            }
        }
    }
    return field;
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error("two_sample_ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * lambda * lambda * static_cast<double>(k) *
                                     static_cast<double>(k));
        p += 2.0 * sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    KsResult r;
    r.statistic = d;
    r.p_value = std::clamp(p, 0.0, 1.0);
    return r;
}

struct CapacitanceRow {
    double Q_f;
    double V;
    double C;  // NaN where the neighboring voltage interval is degenerate
};

// Differential capacitance C = dQ_f/dV by central differences on the sampled
// (Q_f, V) curve; one-sided at the ends. The runner maps a free charge to
// the equilibrium voltage V = Phi(membrane) - Phi(wall).
template <typename Runner>
inline std::vector<CapacitanceRow> capacitance_curve(const std::vector<double>& qf_grid,
                                                     Runner&& runner) {
    if (qf_grid.size() < 3) throw Error("capacitance_curve: need at least 3 grid points");
    for (std::size_t i = 0; i + 1 < qf_grid.size(); ++i)
        for (std::size_t j = i + 1; j < qf_grid.size(); ++j)
            if (qf_grid[i] == qf_grid[j])
                throw Error("capacitance_curve: duplicate Q_f entries");

    std::vector<CapacitanceRow> rows;
    for (double qf : qf_grid) rows.push_back({qf, runner(qf), 0.0});
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = (i == 0) ? 0 : i - 1;
        const std::size_t hi = (i == n - 1) ? n - 1 : i + 1;
        const double dv = rows[hi].V - rows[lo].V;
        rows[i].C = (dv != 0.0 && std::isfinite(dv))
                        ? (rows[hi].Q_f - rows[lo].Q_f) / dv
                        : std::numeric_limits<double>::quiet_NaN();
    }
    return rows;
}

}

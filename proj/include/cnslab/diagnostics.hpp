#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnslab/errors.hpp"
#include "cnslab/norms.hpp"
#include "cnslab/path_norms.hpp"
#include "cnslab/presets.hpp"
#include "cnslab/solver.hpp"

namespace cnslab {

// ---------------- conservation and sign ----------------

struct ConservationSeries {
    std::vector<double> times;
    std::vector<double> mass;  // zero Fourier mode of n times the box volume
    std::vector<double> min_n, max_n, min_c, max_c;
    std::vector<double> l1_n;
};

inline ConservationSeries conservation_series(const Trajectory& traj)
{
    if (traj.size() == 0)
        throw std::invalid_argument("empty trajectory");
    ConservationSeries s;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const ScalarField& n = traj.n[k];
        const ScalarField& c = traj.c[k];
        s.times.push_back(traj.times[k]);
        s.mass.push_back(fourier(n).coeffs[0].real() * n.grid().volume());
        s.min_n.push_back(n.min());
        s.max_n.push_back(n.max());
        s.min_c.push_back(c.min());
        s.max_c.push_back(c.max());
        s.l1_n.push_back(n.l1_norm());
    }
    return s;
}

struct MassVerdict {
    ConservationSeries series;
    double max_drift = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline MassVerdict check_mass_conservation(const Trajectory& traj)
{
    MassVerdict v{conservation_series(traj)};
    const double m0 = v.series.mass.front();
    for (double m : v.series.mass)
        v.max_drift = std::max(v.max_drift, std::abs(m - m0));
    v.tolerance = 1e-10 * std::max(1.0, std::abs(m0));
    v.pass = v.max_drift <= v.tolerance;
    return v;
}

struct NonnegativityReport {
    std::vector<double> min_c, min_n;
    double tolerance = 0.0;
    bool hypothesis_met = false;  // c0, n0 >= 0 at grid points
    std::optional<bool> pass;     // only set when the hypothesis holds
    double worst = 0.0;           // smallest value seen over c and n
};

inline NonnegativityReport check_nonnegativity(const Trajectory& traj)
{
    if (traj.size() == 0)
        throw std::invalid_argument("empty trajectory");
    NonnegativityReport r;
    r.hypothesis_met = traj.c[0].min() >= 0.0 && traj.n[0].min() >= 0.0;
    r.tolerance = 1e-6 * (traj.c[0].sup_norm() + traj.n[0].sup_norm());
    r.worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        r.min_c.push_back(traj.c[k].min());
        r.min_n.push_back(traj.n[k].min());
        r.worst = std::min({r.worst, r.min_c.back(), r.min_n.back()});
    }
    if (r.hypothesis_met)
        r.pass = r.worst >= -r.tolerance;
    return r;
}

struct L1Report {
    std::vector<double> l1;
    double max_increase = 0.0;  // largest relative step-up
    bool pass = false;
};

inline L1Report check_l1_contraction(const Trajectory& traj, double slack = 1e-8)
{
    if (traj.size() == 0)
        throw std::invalid_argument("empty trajectory");
    L1Report r;
    for (std::size_t k = 0; k < traj.size(); ++k)
        r.l1.push_back(traj.n[k].l1_norm());
    const double ref = std::max(r.l1.front(), std::numeric_limits<double>::min());
    for (std::size_t k = 1; k < r.l1.size(); ++k)
        r.max_increase = std::max(r.max_increase, (r.l1[k] - r.l1[k - 1]) / ref);
    r.pass = r.max_increase <= slack;
    return r;
}

// ---------------- decay weights ----------------

struct DecaySeries {
    std::vector<double> times;
    std::vector<double> n_weight;      // t ||n - mean n||_inf
    std::vector<double> u_weight;      // t^{1/2} ||u - mean u||_inf
    std::vector<double> grad_c_weight; // t^{1/2} ||grad c||_inf
    std::size_t reference_node = 0;    // first node past T/10
    bool pass = false;
};

inline DecaySeries decay_weight_series(const Trajectory& traj)
{
    if (traj.size() == 0)
        throw std::invalid_argument("empty trajectory");
    DecaySeries d;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.times[k];
        d.times.push_back(t);
        const ScalarField& n = traj.n[k];
        d.n_weight.push_back(t * (n - ScalarField(n.grid(), n.mean())).sup_norm());
        VectorField u = traj.u[k];
        std::vector<ScalarField> centred;
        for (int j = 0; j < u.dim(); ++j)
            centred.push_back(u[j] - ScalarField(u.grid(), u[j].mean()));
        d.u_weight.push_back(std::sqrt(t) * VectorField(u.grid(), std::move(centred)).sup_norm());
        d.grad_c_weight.push_back(std::sqrt(t) * gradient(traj.c[k]).sup_norm());
    }
    const double T = traj.times.horizon();
    while (d.reference_node + 1 < d.times.size() && !(d.times[d.reference_node] > 0.1 * T))
        ++d.reference_node;
    auto bounded = [&](const std::vector<double>& w) {
        const double ref = w[d.reference_node];
        for (std::size_t k = d.reference_node; k < w.size(); ++k)
            if (w[k] > 2.0 * ref)
                return false;
        return true;
    };
    d.pass = bounded(d.n_weight) && bounded(d.u_weight) && bounded(d.grad_c_weight);
    return d;
}

// ---------------- parabolic scaling ----------------

/// Trigonometric interpolation of f onto a grid with `factor` times as many
/// points per axis over the same box (Nyquist coefficients split evenly).
inline ScalarField spectral_refine(const ScalarField& f, int factor)
{
    const Grid& g = f.grid();
    if (factor < 1)
        throw std::invalid_argument("refinement factor must be >= 1");
    const Grid fine(g.dim(), g.box_length(), g.points_per_axis() * factor);
    const Spectrum s = fourier(f);
    Spectrum out(fine);
    const int M = g.points_per_axis();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.unravel(i);
        // enumerate +-M/2 images of Nyquist indices
        int nyq = 0;
        for (int d = 0; d < g.dim(); ++d)
            if (idx[d] == M / 2)
                nyq |= 1 << d;
        for (int mask = 0; mask < (1 << g.dim()); ++mask) {
            if ((mask & ~nyq) != 0)
                continue;
            std::array<int, 3> m{0, 0, 0};
            double weight = 1.0;
            for (int d = 0; d < g.dim(); ++d) {
                m[d] = g.mode_index(idx[d]);
                if (nyq & (1 << d)) {
                    weight *= 0.5;
                    if (mask & (1 << d))
                        m[d] = M / 2;
                }
            }
            out.coeffs[fine.ravel(m)] += weight * s.coeffs[i];
        }
    }
    return physical(out);
}

inline VectorField spectral_refine(const VectorField& v, int factor)
{
    std::vector<ScalarField> comp;
    for (int j = 0; j < v.dim(); ++j)
        comp.push_back(spectral_refine(v[j], factor));
    const Grid& g = comp.front().grid();
    return VectorField(g, std::move(comp));
}

inline ScalarField relabel(const ScalarField& f, const Grid& g)
{
    const auto vals = f.values();
    return ScalarField(g, std::vector<double>(vals.begin(), vals.end()));
}

inline VectorField relabel(const VectorField& v, const Grid& g)
{
    std::vector<ScalarField> comp;
    for (int j = 0; j < v.dim(); ++j)
        comp.push_back(relabel(v[j], g));
    return VectorField(g, std::move(comp));
}

/// Every `stride`-th point per axis of a fine field, as a field on `coarse`.
inline ScalarField subsample(const ScalarField& f, const Grid& coarse, int stride)
{
    std::vector<double> v(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        auto idx = coarse.unravel(i);
        for (int d = 0; d < coarse.dim(); ++d)
            idx[d] *= stride;
        v[i] = f[f.grid().ravel(idx)];
    }
    return ScalarField(coarse, std::move(v));
}

struct ScalingReport {
    double delta = 2.0;
    double discrepancy_c = 0.0, discrepancy_n = 0.0, discrepancy_u = 0.0, discrepancy_v = 0.0;
    double max_discrepancy = 0.0;
    bool base_converged = false;
    bool rescaled_converged = false;
};

/// Solves on (M, L, T) and on the delta-rescaled problem (2M, L/delta, T/delta^2) and
/// compares c, delta^{-2} n, delta^{-1} u under the map x -> delta x, t -> delta^2 t.
/// Data are transferred by trigonometric interpolation, so the rescaled run is the
/// same continuum problem at twice the effective resolution.
inline ScalingReport scaling_covariance_test(SystemKind system, const SolutionState& init, const SolverConfig& cfg,
                                             double delta = 2.0)
{
    if (delta != 2.0)
        throw std::invalid_argument("scaling test supports delta = 2 (grid-compatible) only");
    if (system == SystemKind::dcns && cfg.kappa != 0.0)
        throw std::invalid_argument("the double system is scale-invariant only for kappa = 0");
    const Grid& g = init.c.grid();
    const Grid fine(g.dim(), g.box_length() / delta, 2 * g.points_per_axis());
    auto lift = [&](const ScalarField& f, double factor) { return relabel(spectral_refine(f, 2), fine) * factor; };
    auto lift_v = [&](const VectorField& f, double factor) { return relabel(spectral_refine(f, 2), fine) * factor; };

    SolutionState scaled{lift(init.c, 1.0), lift(init.n, delta * delta), lift_v(init.u, delta), {}};
    if (init.v)
        scaled.v = lift(*init.v, 1.0);
    SolverConfig cfg2 = cfg;
    cfg2.times = cfg.times.scaled(1.0 / (delta * delta));
    cfg2.ball_stride = 2 * cfg.ball_stride;
    if (cfg.grad_phi)
        cfg2.grad_phi = lift_v(*cfg.grad_phi, delta);
    if (cfg.psi)
        cfg2.psi = lift_v(*cfg.psi, delta);
    if (cfg.d0) {
        cfg2.d0 = lift(*cfg.d0, 1.0);
        cfg2.delta0 = cfg.delta0 / delta;
    }
    const auto base = system == SystemKind::cns ? solve_cns_picard(init, cfg) : solve_dcns_picard(init, cfg);
    const auto resc = system == SystemKind::cns ? solve_cns_picard(scaled, cfg2) : solve_dcns_picard(scaled, cfg2);

    ScalingReport r;
    r.delta = delta;
    r.base_converged = base.trace.converged;
    r.rescaled_converged = resc.trace.converged;
    auto compare = [&](auto get, double factor) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < base.trajectory.size(); ++k) {
            const auto pairs = get(k);
            for (const auto& [b, f] : pairs) {
                const ScalarField sub = subsample(*f, g, 2);
                num = std::max(num, (sub - *b * factor).sup_norm());
                den = std::max(den, b->sup_norm() * std::abs(factor));
            }
        }
        return den > 0.0 ? num / den : num;
    };
    using Pair = std::pair<const ScalarField*, const ScalarField*>;
    r.discrepancy_c = compare([&](std::size_t k) { return std::vector<Pair>{{&base.trajectory.c[k], &resc.trajectory.c[k]}}; }, 1.0);
    r.discrepancy_n = compare([&](std::size_t k) { return std::vector<Pair>{{&base.trajectory.n[k], &resc.trajectory.n[k]}}; },
                              delta * delta);
    r.discrepancy_u = compare(
        [&](std::size_t k) {
            std::vector<Pair> p;
            for (int j = 0; j < g.dim(); ++j)
                p.push_back({&base.trajectory.u[k][j], &resc.trajectory.u[k][j]});
            return p;
        },
        delta);
    if (base.trajectory.v)
        r.discrepancy_v = compare(
            [&](std::size_t k) { return std::vector<Pair>{{&(*base.trajectory.v)[k], &(*resc.trajectory.v)[k]}}; }, 1.0);
    r.max_discrepancy = std::max({r.discrepancy_c, r.discrepancy_n, r.discrepancy_u, r.discrepancy_v});
    return r;
}

// ---------------- regularised data ----------------

struct MollificationReport {
    std::vector<double> eps;
    std::vector<double> drift;  // max sup-norm distance to the unmollified run over nodes and components
    std::vector<bool> converged;
};

/// Runs with data e^{eps Lap}(c0, n0, u0) and reports the sup-norm drift from the
/// unmollified run.
inline MollificationReport mollification_study(SystemKind system, const SolutionState& init, const SolverConfig& cfg,
                                               const std::vector<double>& eps_values = {0.01, 0.005})
{
    auto solve = [&](const SolutionState& s) {
        return system == SystemKind::cns ? solve_cns_picard(s, cfg) : solve_dcns_picard(s, cfg);
    };
    const auto ref = solve(init);
    MollificationReport r;
    for (double eps : eps_values) {
        SolutionState m{propagate(init.c, PropagatorSpec::heat(), eps), propagate(init.n, PropagatorSpec::heat(), eps),
                        propagate(init.u, PropagatorSpec::heat(), eps), {}};
        if (init.v)
            m.v = propagate(*init.v, PropagatorSpec::heat(), eps);
        const auto run = solve(m);
        double d = 0.0;
        for (std::size_t k = 0; k < ref.trajectory.size(); ++k) {
            d = std::max(d, (run.trajectory.c[k] - ref.trajectory.c[k]).sup_norm());
            d = std::max(d, (run.trajectory.n[k] - ref.trajectory.n[k]).sup_norm());
            d = std::max(d, (run.trajectory.u[k] - ref.trajectory.u[k]).sup_norm());
        }
        r.eps.push_back(eps);
        r.drift.push_back(d);
        r.converged.push_back(run.trace.converged);
    }
    return r;
}

// ---------------- embeddings ----------------

/// Ratios for the three embeddings checked on random band-limited fields (N = 3):
///   L^{-1}_{2,1}      <= C1 N^{-1/2}_{2,0,inf}
///   B^{-2}_{inf,inf}  <= C2 L^{-1}_{2,1}
///   BMO^{-1}          <= C3 N^{-1/4}_{4,0,inf}
struct EmbeddingSample {
    double carleson_n = 0.0;   // L^{-1}_{2,N-2}
    double besov_morrey_2 = 0.0;
    double besov_m2 = 0.0;     // B^{-2}_{inf,inf}
    double bmo_minus_one = 0.0;
    double besov_morrey_4 = 0.0;
    double ratio_chain_lower = 0.0;  // carleson_n / besov_morrey_2
    double ratio_chain_upper = 0.0;  // besov_m2 / carleson_n
    double ratio_bmo = 0.0;          // bmo_minus_one / besov_morrey_4
};

struct EmbeddingReport {
    int points_per_axis = 0;
    std::vector<EmbeddingSample> samples;
    double max_ratio_chain_lower = 0.0;
    double max_ratio_chain_upper = 0.0;
    double max_ratio_bmo = 0.0;
    bool all_finite = true;
};

inline EmbeddingSample embedding_ratios(const ScalarField& f, const BallFamily& balls, const LPBank& bank)
{
    EmbeddingSample s;
    const CaloricScan scan = caloric_scan(f, balls);
    s.carleson_n = carleson_from_scan(scan, 2.0).value;
    s.bmo_minus_one = carleson_from_scan(scan, 0.0).value;
    s.besov_m2 = besov_from_scan(scan, -2.0).value;
    const double inf = std::numeric_limits<double>::infinity();
    s.besov_morrey_2 = besov_morrey_norm(f, -0.5, 2.0, 0.0, inf, bank, balls).value;
    s.besov_morrey_4 = besov_morrey_norm(f, -0.25, 4.0, 0.0, inf, bank, balls).value;
    auto ratio = [inf](double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? inf : 0.0); };
    s.ratio_chain_lower = ratio(s.carleson_n, s.besov_morrey_2);
    s.ratio_chain_upper = ratio(s.besov_m2, s.carleson_n);
    s.ratio_bmo = ratio(s.bmo_minus_one, s.besov_morrey_4);
    return s;
}

/// Random fields use lattice band 4 and seeds seed, seed+1, ..., so the same
/// functions are sampled at every resolution. Ball centres sit on an 8^3
/// sub-lattice independent of M.
inline EmbeddingReport embedding_suite(int sample_count, std::uint64_t seed, const Grid& grid)
{
    if (sample_count < 30)
        throw std::invalid_argument("embedding suite needs at least 30 samples");
    if (grid.dim() != 3)
        throw ConfigError("the embeddings are stated for N >= 3; run the suite on a 3D grid");
    if (grid.points_per_axis() < 16)
        throw ConfigError("embedding suite needs M >= 16");
    const BallFamily balls = BallFamily::dyadic(grid, grid.points_per_axis() / 8);
    const LPBank bank(grid);
    EmbeddingReport r;
    r.points_per_axis = grid.points_per_axis();
    for (int i = 0; i < sample_count; ++i) {
        DataPreset p{PresetKind::random_bandlimited, 1.0, seed + static_cast<std::uint64_t>(i)};
        const ScalarField f = generate_scalar(p, grid);
        const auto s = embedding_ratios(f, balls, bank);
        r.all_finite = r.all_finite && std::isfinite(s.ratio_chain_lower) && std::isfinite(s.ratio_chain_upper) &&
                       std::isfinite(s.ratio_bmo);
        r.max_ratio_chain_lower = std::max(r.max_ratio_chain_lower, s.ratio_chain_lower);
        r.max_ratio_chain_upper = std::max(r.max_ratio_chain_upper, s.ratio_chain_upper);
        r.max_ratio_bmo = std::max(r.max_ratio_bmo, s.ratio_bmo);
        r.samples.push_back(s);
    }
    return r;
}

// ---------------- operator norms ----------------

/// Largest observed ||Op(a, b)|| / (||a|| ||b||) in the solution-space norms for the
/// six Duhamel operators, over random caloric trajectories.
struct OperatorNormSurvey {
    int points_per_axis = 0;
    int samples = 0;
    // L_Phi: X2 -> X3 (times the Morrey norm of grad Phi), B1: X1 x X2 -> X1,
    // B1: X3 x X3 -> X1, B2: X2 x X3 -> X2, B3: X3 x X3 -> X3, B4: X3 x X1 -> X1
    std::array<double, 6> constants{};
    static constexpr std::array<const char*, 6> names{"L_phi", "B1_X1xX2", "B1_X3xX3", "B2", "B3", "B4"};
};

inline OperatorNormSurvey operator_norm_survey(const Grid& grid, const TimeGrid& times, int samples,
                                               std::uint64_t seed, double kappa = 1.0, int band = 3)
{
    if (samples < 1)
        throw std::invalid_argument("operator survey needs at least one sample");
    const BallFamily balls = BallFamily::dyadic(grid, std::max(1, grid.points_per_axis() / 8));
    const double T = times.horizon();
    OperatorNormSurvey out;
    out.points_per_axis = grid.points_per_axis();
    out.samples = samples;
    std::uint64_t s = seed;
    auto scalar = [&](double amp) {
        return caloric_extension(generate_scalar({PresetKind::random_bandlimited, amp, s++, {1, 0, 0}, 0.0, band}, grid),
                                 times);
    };
    auto vector = [&](double amp) {
        return caloric_extension(generate_vector({PresetKind::random_bandlimited, amp, s++, {1, 0, 0}, 0.0, band}, grid, false),
                                 times);
    };
    auto x1 = [&](const ScalarTrajectory& a) { return path_norm_X1(a, T, balls).total; };
    auto x2 = [&](const ScalarTrajectory& a) { return path_norm_X2(a, T, balls).total; };
    auto x3 = [&](const VectorTrajectory& a) { return path_norm_X3(a, T, balls).total; };
    for (int i = 0; i < samples; ++i) {
        const auto w = scalar(1.0), n = scalar(1.0), v = scalar(1.0);
        const auto u = vector(1.0), z = vector(1.0);
        const VectorField force =
            generate_vector({PresetKind::random_bandlimited, 1.0, s++, {1, 0, 0}, 0.0, band}, grid, false);
        const double morrey_force = morrey_norm(force.magnitude(), 2.0, grid.dim() - 2.0, balls).value;
        const std::array<double, 6> ratios{
            x3(linear_L_phi(n, force, times)) / (x2(n) * morrey_force),
            x1(duhamel_B1(w, n, times)) / (x1(w) * x2(n)),
            x1(duhamel_B1(u, z, times)) / (x3(u) * x3(z)),
            x2(duhamel_B2(n, u, times)) / (x2(n) * x3(u)),
            x3(duhamel_B3(u, z, times)) / (x3(u) * x3(z)),
            x1(duhamel_B4(u, v, times, kappa)) / (x3(u) * x1(v)),
        };
        for (std::size_t j = 0; j < ratios.size(); ++j)
            out.constants[j] = std::max(out.constants[j], ratios[j]);
    }
    return out;
}

} // namespace cnslab

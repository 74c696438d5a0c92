#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cnslab/duhamel.hpp"
#include "cnslab/errors.hpp"
#include "cnslab/path_norms.hpp"
#include "cnslab/presets.hpp"
#include "cnslab/state.hpp"

namespace cnslab {

enum class SystemKind { cns, dcns };
// perturbed: the caloric iterate plus the heat flow of a fixed random band-limited
// field at the data scale. The zero guess maps onto the caloric one in a single
// step, so uniqueness checks should pair caloric with perturbed.
enum class InitialGuess { caloric, zero, perturbed };

struct SolverConfig {
    double kappa = 0.0;
    std::optional<VectorField> grad_phi;  // forcing n grad(Phi) of the single-chemotaxis system
    std::optional<VectorField> psi;       // forcing n Psi of the double-chemotaxis system
    std::optional<ScalarField> d0;        // enables the shift c = cbar + e^{delta0^2 Lap} d0
    double delta0 = 0.0;
    TimeGrid times = TimeGrid::geometric_uniform(1.0, 32);
    double picard_tol = 1e-12;
    int picard_max_iter = 60;
    double epsilon = 1.0;  // smallness reference for smallness_report
    int ball_stride = 4;
    InitialGuess guess = InitialGuess::caloric;
    bool couple_v = true;        // double system: feed grad v back into the n equation
    double v_sensitivity = 1.0;  // n_t carries -v_sensitivity div(n grad v)

    void validate() const
    {
        if (!(kappa >= 0.0))
            throw std::invalid_argument("kappa must be non-negative");
        if (!(picard_tol > 0.0))
            throw std::invalid_argument("picard tolerance must be positive");
        if (picard_max_iter < 1)
            throw std::invalid_argument("picard_max_iter must be >= 1");
        if (d0 && !(delta0 > 0.0))
            throw std::invalid_argument("delta0 must be positive when d0 is given");
        if (ball_stride < 1)
            throw std::invalid_argument("ball stride must be >= 1");
    }
};

/// Per-iteration X_T (or Z_T) distances between consecutive Picard iterates.
struct PicardTrace {
    std::vector<double> diffs;   // diffs[m-1] = ||U^{(m)} - U^{(m-1)}||
    std::vector<double> ratios;  // ratios[m-2] = diffs[m-1] / diffs[m-2]
    bool converged = false;
    std::string note;

    int iterations() const { return static_cast<int>(diffs.size()); }
};

struct Trajectory {
    TimeGrid times;
    ScalarTrajectory c;
    ScalarTrajectory n;
    VectorTrajectory u;
    std::optional<ScalarTrajectory> v;

    std::size_t size() const { return c.size(); }
    const Grid& grid() const { return c.grid(); }
    SolutionState at(std::size_t k) const
    {
        SolutionState s{c[k], n[k], u[k], {}};
        if (v)
            s.v = (*v)[k];
        return s;
    }
};

struct SolveResult {
    Trajectory trajectory;
    PicardTrace trace;
};

/// Shifted oxygen datum: Gamma = e^{delta0^2 Lap} d0, cbar0 = c0 - Gamma, and the
/// three size measures of Gamma used to show the shifted problem is small.
struct UcAnsatz {
    ScalarField gamma;
    ScalarField cbar0;
    double deviation = 0.0;       // ||Gamma - d0||_inf
    double gradient_term = 0.0;   // delta0 ||grad Gamma||_inf
    double hessian_term = 0.0;    // delta0^2 max_ij ||d_i d_j Gamma||_inf
};

inline UcAnsatz uc_ansatz_prepare(const ScalarField& c0, const ScalarField& d0, double delta0)
{
    if (!(delta0 > 0.0))
        throw std::invalid_argument("delta0 must be positive");
    require_same_grid(c0.grid(), d0.grid(), "uc_ansatz_prepare");
    const Spectrum g = propagate(fourier(d0), PropagatorSpec::heat(), delta0 * delta0);
    UcAnsatz out{physical(g), ScalarField(c0.grid()), 0.0, 0.0, 0.0};
    out.cbar0 = c0 - out.gamma;
    out.deviation = (out.gamma - d0).sup_norm();
    out.gradient_term = delta0 * physical(gradient(g)).sup_norm();
    const int dim = c0.grid().dim();
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            out.hessian_term = std::max(out.hessian_term,
                                        delta0 * delta0 * physical(partial_derivative(partial_derivative(g, i), j)).sup_norm());
    return out;
}

namespace detail {

struct PicardSetup {
    SystemKind system;
    Grid grid;
    TimeGrid times;
    BallFamily balls;
    ScalarTrajectory lin_c, lin_n;
    VectorTrajectory lin_u;
    std::optional<ScalarTrajectory> lin_v;
    std::optional<ScalarField> gamma;
    const VectorField* force = nullptr;
    double kappa = 0.0;
    bool couple_v = true;
    double v_sensitivity = 1.0;
};

struct Iterate {
    ScalarTrajectory c, n;
    VectorTrajectory u;
    std::optional<ScalarTrajectory> v;
};

inline void require_divergence_free(const VectorField& u0)
{
    const ScalarField div = divergence(u0);
    double scale = 0.0;
    for (int j = 0; j < u0.dim(); ++j)
        scale = std::max(scale, physical(partial_derivative(fourier(u0[j]), j)).sup_norm());
    if (div.sup_norm() > 1e-10 * std::max(1.0, scale))
        throw std::invalid_argument("initial velocity is not divergence-free (|div u0| = " +
                                    std::to_string(div.sup_norm()) + ")");
}

inline PicardSetup make_setup(SystemKind system, const SolutionState& init, const SolverConfig& cfg)
{
    cfg.validate();
    const Grid& g = init.c.grid();
    require_same_grid(g, init.n.grid(), "solver initial data");
    require_same_grid(g, init.u.grid(), "solver initial data");
    if (init.v)
        require_same_grid(g, init.v->grid(), "solver initial data");
    require_divergence_free(init.u);

    PicardSetup s{system, g, cfg.times, BallFamily::dyadic(g, cfg.ball_stride), {}, {}, {}, {}, {}, nullptr,
                  cfg.kappa, cfg.couple_v, cfg.v_sensitivity};
    ScalarField c_start = init.c;
    if (cfg.d0) {
        require_same_grid(g, cfg.d0->grid(), "solver d0");
        const UcAnsatz uc = uc_ansatz_prepare(init.c, *cfg.d0, cfg.delta0);
        s.gamma = uc.gamma;
        c_start = uc.cbar0;
    }
    s.lin_c = caloric_extension(c_start, cfg.times);
    if (s.gamma) {
        // cbar picks up e^{t Lap} Gamma - Gamma from the shift
        const ScalarTrajectory heat_gamma = caloric_extension(*s.gamma, cfg.times);
        std::vector<ScalarField> snaps;
        for (std::size_t k = 0; k < cfg.times.size(); ++k)
            snaps.push_back(s.lin_c[k] + (heat_gamma[k] - *s.gamma));
        s.lin_c = ScalarTrajectory(cfg.times, std::move(snaps));
    }
    s.lin_n = caloric_extension(init.n, cfg.times);
    s.lin_u = caloric_extension(init.u, cfg.times);
    if (system == SystemKind::dcns)
        s.lin_v = caloric_extension(init.v ? *init.v : ScalarField(g), cfg.times, cfg.kappa);

    const auto& force = system == SystemKind::cns ? cfg.grad_phi : cfg.psi;
    if (force) {
        require_same_grid(g, force->grid(), "solver forcing");
        s.force = &*force;
    }
    return s;
}

inline Iterate initial_iterate(const PicardSetup& s, InitialGuess guess)
{
    if (guess == InitialGuess::caloric)
        return {s.lin_c, s.lin_n, s.lin_u, s.lin_v};
    if (guess == InitialGuess::perturbed) {
        double scale = std::max({s.lin_c[0].sup_norm(), s.lin_n[0].sup_norm(), s.lin_u[0].sup_norm(),
                                 s.lin_v ? (*s.lin_v)[0].sup_norm() : 0.0});
        if (scale == 0.0)
            scale = 1e-2;
        const int band = std::max(1, std::min(4, (s.grid.points_per_axis() - 1) / 3));
        auto bump = [&](const ScalarTrajectory& lin, std::uint64_t seed) {
            const ScalarTrajectory p = caloric_extension(
                generate_scalar({PresetKind::random_bandlimited, scale, seed, {1, 0, 0}, 0.0, band}, s.grid), s.times);
            std::vector<ScalarField> out;
            for (std::size_t k = 0; k < lin.size(); ++k)
                out.push_back(lin[k] + p[k]);
            return ScalarTrajectory(s.times, std::move(out));
        };
        const VectorTrajectory pu = caloric_extension(
            generate_vector({PresetKind::random_divfree, scale, 0x5eed03, {1, 0, 0}, 0.0, band}, s.grid, true), s.times);
        std::vector<VectorField> u;
        for (std::size_t k = 0; k < s.lin_u.size(); ++k)
            u.push_back(s.lin_u[k] + pu[k]);
        Iterate it{bump(s.lin_c, 0x5eed01), bump(s.lin_n, 0x5eed02), VectorTrajectory(s.times, std::move(u)), {}};
        if (s.lin_v)
            it.v = bump(*s.lin_v, 0x5eed04);
        return it;
    }
    const std::vector<ScalarField> zs(s.times.size(), ScalarField(s.grid));
    const std::vector<VectorField> zv(s.times.size(), VectorField(s.grid));
    Iterate it{ScalarTrajectory(s.times, zs), ScalarTrajectory(s.times, zs), VectorTrajectory(s.times, zv), {}};
    if (s.system == SystemKind::dcns)
        it.v = ScalarTrajectory(s.times, zs);
    return it;
}

inline ScalarTrajectory subtract_accumulated(const ScalarTrajectory& lin, const std::vector<Spectrum>& acc)
{
    std::vector<ScalarField> out;
    out.reserve(acc.size());
    for (std::size_t k = 0; k < acc.size(); ++k)
        out.push_back(k == 0 ? lin[0] : lin[k] - physical(acc[k]));
    return ScalarTrajectory(lin.times, std::move(out));
}

// One application of the Duhamel map.
inline Iterate picard_map(const PicardSetup& s, const Iterate& it)
{
    const std::size_t K = s.times.size();
    std::vector<Spectrum> src_c, src_n, src_v;
    std::vector<VectorSpectrum> src_u;
    src_c.reserve(K);
    src_n.reserve(K);
    src_u.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        const ScalarField c_full = s.gamma ? it.c[k] + *s.gamma : it.c[k];
        const VectorField grad_c = gradient(c_full);
        const ScalarField& n = it.n[k];
        const VectorField& u = it.u[k];

        Spectrum sc = product_source(c_full, n);
        sc += dot_source(u, grad_c);
        src_c.push_back(std::move(sc));

        Spectrum sn = divergence_source(n, grad_c + u);
        if (s.system == SystemKind::dcns && s.couple_v) {
            Spectrum sv = divergence_source(n, gradient((*it.v)[k]));
            sv *= s.v_sensitivity;
            sn += sv;
        }
        src_n.push_back(std::move(sn));

        VectorSpectrum su = leray_tensor_divergence_source(u, u);
        if (s.force) {
            const VectorSpectrum sf = leray_forcing_source(n, *s.force);
            for (std::size_t j = 0; j < su.size(); ++j)
                su[j] += sf[j];
        }
        src_u.push_back(std::move(su));

        if (s.system == SystemKind::dcns) {
            // v = v~ - B4(u, v) + L_kappa(n): accumulate u.grad v - n and subtract
            Spectrum sv = advection_source(u, (*it.v)[k]);
            sv -= fourier(n);
            src_v.push_back(std::move(sv));
        }
    }
    Iterate out;
    out.c = subtract_accumulated(s.lin_c, duhamel_accumulate(s.times, src_c, 0.0));
    out.n = subtract_accumulated(s.lin_n, duhamel_accumulate(s.times, src_n, 0.0));
    const auto acc_u = accumulate_vector(s.times, src_u, 0.0);
    std::vector<VectorField> u_new;
    u_new.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
        u_new.push_back(k == 0 ? s.lin_u[0] : s.lin_u[k] - physical(acc_u[k]));
    out.u = VectorTrajectory(s.times, std::move(u_new));
    if (s.system == SystemKind::dcns)
        out.v = subtract_accumulated(*s.lin_v, duhamel_accumulate(s.times, src_v, s.kappa));
    return out;
}

inline ScalarTrajectory difference(const ScalarTrajectory& a, const ScalarTrajectory& b)
{
    std::vector<ScalarField> d;
    for (std::size_t k = 0; k < a.size(); ++k)
        d.push_back(a[k] - b[k]);
    return ScalarTrajectory(a.times, std::move(d));
}

inline VectorTrajectory difference(const VectorTrajectory& a, const VectorTrajectory& b)
{
    std::vector<VectorField> d;
    for (std::size_t k = 0; k < a.size(); ++k)
        d.push_back(a[k] - b[k]);
    return VectorTrajectory(a.times, std::move(d));
}

// X_T norm of (c, n, u), plus the X_1 norm of v for the double system (Z_T).
inline double solution_norm(const Iterate& it, const BallFamily& balls, double T)
{
    double d = path_norm_X1(it.c, T, balls).total + path_norm_X2(it.n, T, balls).total +
               path_norm_X3(it.u, T, balls).total;
    if (it.v)
        d += path_norm_X1(*it.v, T, balls).total;
    return d;
}

inline double iterate_distance(const Iterate& a, const Iterate& b, const BallFamily& balls, double T)
{
    Iterate d{difference(a.c, b.c), difference(a.n, b.n), difference(a.u, b.u), {}};
    if (a.v)
        d.v = difference(*a.v, *b.v);
    return solution_norm(d, balls, T);
}

inline Trajectory to_trajectory(const PicardSetup& s, const Iterate& it)
{
    Trajectory t{s.times, it.c, it.n, it.u, it.v};
    if (s.gamma) {
        std::vector<ScalarField> c;
        for (std::size_t k = 0; k < it.c.size(); ++k)
            c.push_back(it.c[k] + *s.gamma);
        t.c = ScalarTrajectory(s.times, std::move(c));
    }
    return t;
}

inline Iterate from_trajectory(const PicardSetup& s, const Trajectory& t)
{
    Iterate it{t.c, t.n, t.u, t.v};
    if (s.gamma) {
        std::vector<ScalarField> c;
        for (std::size_t k = 0; k < t.c.size(); ++k)
            c.push_back(t.c[k] - *s.gamma);
        it.c = ScalarTrajectory(s.times, std::move(c));
    }
    return it;
}

inline SolveResult run_picard(const PicardSetup& s, const SolverConfig& cfg, InitialGuess guess)
{
    const double T = s.times.horizon();
    Iterate current = initial_iterate(s, guess);
    PicardTrace trace;
    for (int m = 1; m <= cfg.picard_max_iter; ++m) {
        Iterate next;
        double d = 0.0;
        try {
            next = picard_map(s, current);
            d = iterate_distance(next, current, s.balls, T);
        } catch (const NumericalError& e) {
            trace.note = std::string("iterate became non-finite: ") + e.what();
            break;
        }
        if (!std::isfinite(d)) {
            trace.note = "iterate distance non-finite";
            break;
        }
        trace.diffs.push_back(d);
        if (trace.diffs.size() >= 2) {
            const double prev = trace.diffs[trace.diffs.size() - 2];
            trace.ratios.push_back(prev > 0.0 ? d / prev : 0.0);
        }
        current = std::move(next);
        if (d <= cfg.picard_tol) {
            trace.converged = true;
            break;
        }
        if (trace.diffs.size() >= 3 && d > 1e6 * trace.diffs.front()) {
            trace.note = "iterates diverging";
            break;
        }
    }
    if (!trace.converged && trace.note.empty())
        trace.note = "no convergence after " + std::to_string(cfg.picard_max_iter) + " iterations";
    return {to_trajectory(s, current), trace};
}

} // namespace detail

/// Picard iteration for the single-chemotaxis Navier-Stokes system in Duhamel form.
/// Non-convergence is reported in the trace, not thrown.
inline SolveResult solve_cns_picard(const SolutionState& init, const SolverConfig& cfg)
{
    const auto setup = detail::make_setup(SystemKind::cns, init, cfg);
    return detail::run_picard(setup, cfg, cfg.guess);
}

/// Picard iteration for the double-chemotaxis system (attractant v with decay kappa).
/// Iterating on v directly is the same map as iterating on w = v - e^{-kappa t}e^{t Lap}v0.
inline SolveResult solve_dcns_picard(const SolutionState& init, const SolverConfig& cfg)
{
    const auto setup = detail::make_setup(SystemKind::dcns, init, cfg);
    return detail::run_picard(setup, cfg, cfg.guess);
}

/// ||F(U) - U|| in the solution norm, and the largest per-node sup-norm residual
/// over all components.
struct FixedPointResidual {
    double path_norm = 0.0;
    double max_sup = 0.0;
};

inline FixedPointResidual fixed_point_residual(SystemKind system, const SolutionState& init, const SolverConfig& cfg,
                                               const Trajectory& traj)
{
    const auto setup = detail::make_setup(system, init, cfg);
    const auto it = detail::from_trajectory(setup, traj);
    const auto next = detail::picard_map(setup, it);
    FixedPointResidual r;
    r.path_norm = detail::iterate_distance(next, it, setup.balls, setup.times.horizon());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        r.max_sup = std::max(r.max_sup, (next.c[k] - it.c[k]).sup_norm());
        r.max_sup = std::max(r.max_sup, (next.n[k] - it.n[k]).sup_norm());
        r.max_sup = std::max(r.max_sup, (next.u[k] - it.u[k]).sup_norm());
        if (it.v)
            r.max_sup = std::max(r.max_sup, ((*next.v)[k] - (*it.v)[k]).sup_norm());
    }
    return r;
}

/// Size of the data in the norm the smallness theorems are stated in.
struct SmallnessReport {
    double c0_sup = 0.0;
    double n0_term = 0.0;
    bool n0_mean_excluded = false;  // 2D: the mean of n0 has no finite B^{-1}_{2,2} norm
    double n0_mean = 0.0;
    double u0_term = 0.0;
    double v0_term = 0.0;           // double system: BMO seminorm of v0
    double forcing_term = 0.0;
    double total = 0.0;
    double epsilon = 0.0;
    bool below_epsilon = false;
};

/// Homogeneous B^{-1}_{2,2} norm through its caloric form
/// (int_0^inf ||e^{t Lap} f||_2^2 dt)^{1/2} = (sum_{k != 0} |Omega| |f_k|^2 / (2|k|^2))^{1/2}.
inline double besov_minus_one_caloric(const ScalarField& f)
{
    const Spectrum s = fourier(f);
    const Grid& g = f.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k2 = g.wavenumber_squared(i);
        if (k2 > 0.0)
            acc += std::norm(s.coeffs[i]) / (2.0 * k2);
    }
    return std::sqrt(acc * g.volume());
}

inline SmallnessReport smallness_report(const SolutionState& init, const SolverConfig& cfg, const BallFamily& balls,
                                        SystemKind system = SystemKind::cns)
{
    const int dim = init.c.grid().dim();
    SmallnessReport r;
    r.c0_sup = init.c.sup_norm();
    if (dim == 2) {
        r.n0_term = besov_minus_one_caloric(init.n);
        r.n0_mean = init.n.mean();
        r.n0_mean_excluded = r.n0_mean != 0.0;
    } else {
        r.n0_term = carleson_caloric_norm(init.n, 2.0, balls).value;
    }
    r.u0_term = carleson_caloric_norm(init.u, 0.0, balls).value;
    if (system == SystemKind::dcns && init.v)
        r.v0_term = bmo_caloric_seminorm(*init.v, balls).value;
    const auto& force = system == SystemKind::cns ? cfg.grad_phi : cfg.psi;
    if (force)
        r.forcing_term = morrey_norm(force->magnitude(), 2.0, dim - 2.0, balls).value;
    r.total = r.c0_sup + r.n0_term + r.u0_term + r.v0_term + r.forcing_term;
    r.epsilon = cfg.epsilon;
    r.below_epsilon = r.total < cfg.epsilon;
    return r;
}

/// Two Picard runs from different starting guesses, and the short-time trend of
/// the solution norm used in the uniqueness criterion.
struct UniquenessReport {
    PicardTrace trace_a;
    PicardTrace trace_b;
    bool both_converged = false;
    std::optional<double> distance;  // max sup-norm distance over nodes and components
    std::vector<double> short_horizons;
    std::vector<double> short_norms;  // ||U_a||_{X_{T'}} for each T'
    bool short_norms_decreasing = false;
};

inline UniquenessReport uniqueness_probe(SystemKind system, const SolutionState& init, const SolverConfig& cfg,
                                         InitialGuess guess_a, InitialGuess guess_b, int shrink_levels = 4)
{
    const auto setup = detail::make_setup(system, init, cfg);
    auto a = detail::run_picard(setup, cfg, guess_a);
    auto b = detail::run_picard(setup, cfg, guess_b);
    UniquenessReport r;
    r.trace_a = a.trace;
    r.trace_b = b.trace;
    r.both_converged = a.trace.converged && b.trace.converged;
    if (r.both_converged) {
        double d = 0.0;
        const auto& ta = a.trajectory;
        const auto& tb = b.trajectory;
        for (std::size_t k = 0; k < ta.size(); ++k) {
            d = std::max(d, (ta.c[k] - tb.c[k]).sup_norm());
            d = std::max(d, (ta.n[k] - tb.n[k]).sup_norm());
            d = std::max(d, (ta.u[k] - tb.u[k]).sup_norm());
            if (ta.v)
                d = std::max(d, ((*ta.v)[k] - (*tb.v)[k]).sup_norm());
        }
        r.distance = d;
    }
    const auto it = detail::from_trajectory(setup, a.trajectory);
    double T = setup.times.horizon();
    for (int level = 0; level < shrink_levels; ++level, T *= 0.5) {
        if (setup.times.count_up_to(T) < 2)
            break;
        r.short_horizons.push_back(T);
        r.short_norms.push_back(detail::solution_norm(it, setup.balls, T));
    }
    r.short_norms_decreasing = r.short_norms.size() >= 2;
    for (std::size_t i = 1; i < r.short_norms.size(); ++i)
        r.short_norms_decreasing = r.short_norms_decreasing && r.short_norms[i] <= r.short_norms[i - 1];
    return r;
}

} // namespace cnslab

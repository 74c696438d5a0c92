#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "cnslab/balls.hpp"
#include "cnslab/errors.hpp"
#include "cnslab/propagator.hpp"

namespace cnslab {

/// Location and value of a ball-family supremum.
struct NormValue {
    double value = 0.0;
    std::size_t argmax_center = 0;  // flat grid index of the maximising centre
    double argmax_radius = 0.0;
    bool argmax_at_cap = false;     // maximiser sits on the largest admissible radius L/4
    double argmax_time = 0.0;       // only meaningful for time-sup functionals
};

namespace detail {

inline void require_balls(const BallFamily& balls)
{
    if (balls.empty())
        throw std::invalid_argument("empty ball family");
}

inline void mark(NormValue& nv, const BallFamily& balls, std::size_t ci, std::size_t ri, double v)
{
    if (v > nv.value || (nv.value == 0.0 && v == 0.0 && nv.argmax_radius == 0.0)) {
        nv.value = v;
        nv.argmax_center = balls.centers()[ci];
        nv.argmax_radius = balls.radii()[ri];
        nv.argmax_at_cap = std::abs(balls.radii()[ri] - balls.radius_cap()) <= 1e-12 * balls.radius_cap();
    }
}

inline void require_finite(double v, const char* what)
{
    if (!std::isfinite(v))
        throw NumericalError(std::string(what) + ": non-finite value");
}

} // namespace detail

/// sup over the family of r^{-mu/p} ||f||_{L^p(B_r(x))}.
inline NormValue morrey_norm(const ScalarField& f, double p, double mu, const BallFamily& balls)
{
    detail::require_balls(balls);
    const int dim = f.grid().dim();
    if (!(p >= 1.0))
        throw std::invalid_argument("Morrey exponent p must be >= 1");
    if (!(mu >= 0.0 && mu < dim))
        throw std::invalid_argument("Morrey index mu must lie in [0, N)");
    std::vector<double> powered(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        powered[i] = std::pow(std::abs(f[i]), p);
    NormValue nv;
    for (std::size_t ri = 0; ri < balls.radii().size(); ++ri) {
        const double weight = std::pow(balls.radii()[ri], -mu / p);
        const auto sums = balls.ball_integrals(powered, ri);
        for (std::size_t ci = 0; ci < sums.size(); ++ci)
            detail::mark(nv, balls, ci, ri, weight * std::pow(std::max(0.0, sums[ci]), 1.0 / p));
    }
    detail::require_finite(nv.value, "morrey_norm");
    return nv;
}

/// sup over the family of (r^{-lambda} int_B |f - mean_B f|^p)^{1/p}.
inline NormValue campanato_seminorm(const ScalarField& f, double p, double lambda, const BallFamily& balls)
{
    detail::require_balls(balls);
    const int dim = f.grid().dim();
    if (!(p >= 1.0))
        throw std::invalid_argument("Campanato exponent p must be >= 1");
    if (!(lambda >= 0.0 && lambda < dim + p))
        throw std::invalid_argument("Campanato index lambda must lie in [0, N + p)");
    const auto vals = f.values();
    const double cell = f.grid().cell_volume();
    NormValue nv;
    for (std::size_t ri = 0; ri < balls.radii().size(); ++ri) {
        const double weight = std::pow(balls.radii()[ri], -lambda);
        const double count = static_cast<double>(balls.ball_point_count(ri));
        for (std::size_t ci = 0; ci < balls.centers().size(); ++ci) {
            double sum = 0.0;
            balls.for_each_point(ri, ci, [&](std::size_t k) { sum += vals[k]; });
            const double mean = sum / count;
            double osc = 0.0;
            balls.for_each_point(ri, ci, [&](std::size_t k) { osc += std::pow(std::abs(vals[k] - mean), p); });
            detail::mark(nv, balls, ci, ri, std::pow(weight * osc * cell, 1.0 / p));
        }
    }
    detail::require_finite(nv.value, "campanato_seminorm");
    return nv;
}

/// Time quadrature for the Carleson boxes B_r x (0, r^2].
///
/// Panels are geometric with ratio <= max_ratio between consecutive r^2
/// breakpoints, continued down to floor_fraction * r_min^2; the first panel
/// [0, floor] and every geometric panel use 4-point Gauss-Legendre, which is
/// accurate because the integrands are analytic in t for band-limited data.
struct TimeQuadrature {
    double max_ratio = 1.3;
    double floor_fraction = 1e-3;
};

struct CaloricMesh {
    std::vector<double> nodes;          // ascending
    std::vector<double> weights;
    std::vector<std::size_t> cut;       // per radius (family order): #nodes with t <= r^2
};

inline CaloricMesh caloric_mesh(const std::vector<double>& radii, const TimeQuadrature& q)
{
    if (!(q.max_ratio > 1.0) || !(q.floor_fraction > 0.0 && q.floor_fraction < 1.0))
        throw std::invalid_argument("invalid time quadrature parameters");
    static constexpr double gl_x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
    static constexpr double gl_w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

    std::vector<double> r2;
    for (double r : radii)
        r2.push_back(r * r);
    std::vector<double> breaks = r2;
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    CaloricMesh mesh;
    auto add_panel = [&](double a, double b) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int g = 0; g < 4; ++g) {
            mesh.nodes.push_back(mid + half * gl_x[g]);
            mesh.weights.push_back(half * gl_w[g]);
        }
    };
    double lo = q.floor_fraction * breaks.front();
    add_panel(0.0, lo);
    std::vector<std::pair<double, std::size_t>> ends;  // breakpoint -> node count
    for (double b : breaks) {
        const int panels = std::max(1, static_cast<int>(std::ceil(std::log(b / lo) / std::log(q.max_ratio) - 1e-9)));
        const double ratio = std::pow(b / lo, 1.0 / panels);
        double a = lo;
        for (int i = 0; i < panels; ++i) {
            const double e = (i + 1 == panels) ? b : a * ratio;
            add_panel(a, e);
            a = e;
        }
        ends.emplace_back(b, mesh.nodes.size());
        lo = b;
    }
    for (double v : r2) {
        auto it = std::find_if(ends.begin(), ends.end(), [&](const auto& e) { return e.first == v; });
        mesh.cut.push_back(it->second);
    }
    return mesh;
}

/// Result of a parabolic Carleson box scan  sup mu(B x (0, r^2]) / |B|^alpha.
struct CarlesonReport {
    double alpha = 0.0;
    NormValue sup;                         // the functional itself (not square-rooted)
    std::vector<double> radii;             // family order
    std::vector<double> per_radius_sup;
    bool finite = true;
    /// max/min of the per-radius suprema (1 means scale-uniform).
    double radius_spread = 1.0;
};

/// Box scan for a non-negative space-time density given as t -> field.
inline CarlesonReport carleson_exponent_check(const std::function<ScalarField(double)>& density, double alpha,
                                              const BallFamily& balls, const TimeQuadrature& q = {})
{
    detail::require_balls(balls);
    const Grid& g = balls.grid();
    const CaloricMesh mesh = caloric_mesh(balls.radii(), q);

    // Radii sorted ascending so cumulative time integrals can be reused.
    std::vector<std::size_t> order(balls.radii().size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mesh.cut[a] < mesh.cut[b]; });

    CarlesonReport rep;
    rep.alpha = alpha;
    rep.radii = balls.radii();
    rep.per_radius_sup.assign(order.size(), 0.0);
    std::vector<double> accumulated(g.size(), 0.0);
    std::size_t done = 0;
    for (std::size_t ri : order) {
        for (; done < mesh.cut[ri]; ++done) {
            const ScalarField d = density(mesh.nodes[done]);
            require_same_grid(d.grid(), g, "carleson_exponent_check");
            const double w = mesh.weights[done];
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (d[i] < 0.0)
                    throw std::invalid_argument("carleson_exponent_check: negative density");
                accumulated[i] += w * d[i];
            }
        }
        const double vol = std::pow(ball_volume(g.dim(), balls.radii()[ri]), alpha);
        const auto sums = balls.ball_integrals(accumulated, ri);
        for (std::size_t ci = 0; ci < sums.size(); ++ci) {
            const double v = std::max(0.0, sums[ci]) / vol;
            if (!std::isfinite(v))
                rep.finite = false;
            rep.per_radius_sup[ri] = std::max(rep.per_radius_sup[ri], v);
            detail::mark(rep.sup, balls, ci, ri, v);
        }
    }
    if (!rep.finite)
        throw NumericalError("carleson_exponent_check: quadrature produced non-finite values");
    const auto [mn, mx] = std::minmax_element(rep.per_radius_sup.begin(), rep.per_radius_sup.end());
    rep.radius_spread = *mn > 0.0 ? *mx / *mn : (*mx > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    return rep;
}

/// One pass of the heat flow over the Carleson time mesh: for every radius the
/// largest ball integral of int_0^{r^2} |e^{t Lap} f|^2, and the sup norm of
/// e^{t Lap} f at every mesh node. Every caloric norm below is read off this.
struct CaloricScan {
    const BallFamily* balls = nullptr;
    std::vector<double> radii;                 // family order
    std::vector<double> max_box_integral;      // per radius
    std::vector<std::size_t> argmax_center;    // per radius, flat grid index
    std::vector<double> times;                 // mesh nodes
    std::vector<double> sup_norms;             // ||e^{t Lap} f||_inf at each node
};

namespace detail {

// field_at(t) returns (|e^{t Lap} f|^2 pointwise, sup norm of e^{t Lap} f)
template <class FieldAt>
CaloricScan run_caloric_scan(FieldAt&& field_at, const BallFamily& balls, const TimeQuadrature& q)
{
    require_balls(balls);
    const Grid& g = balls.grid();
    const CaloricMesh mesh = caloric_mesh(balls.radii(), q);
    std::vector<std::size_t> order(balls.radii().size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mesh.cut[a] < mesh.cut[b]; });

    CaloricScan scan;
    scan.balls = &balls;
    scan.radii = balls.radii();
    scan.max_box_integral.assign(order.size(), 0.0);
    scan.argmax_center.assign(order.size(), balls.centers().front());
    scan.times = mesh.nodes;
    scan.sup_norms.assign(mesh.nodes.size(), 0.0);
    std::vector<double> accumulated(g.size(), 0.0);
    std::size_t done = 0;
    for (std::size_t ri : order) {
        for (; done < mesh.cut[ri]; ++done) {
            auto [density, sup] = field_at(mesh.nodes[done]);
            scan.sup_norms[done] = sup;
            const double w = mesh.weights[done];
            for (std::size_t i = 0; i < g.size(); ++i)
                accumulated[i] += w * density[i];
        }
        const auto sums = balls.ball_integrals(accumulated, ri);
        for (std::size_t ci = 0; ci < sums.size(); ++ci)
            if (sums[ci] > scan.max_box_integral[ri]) {
                scan.max_box_integral[ri] = sums[ci];
                scan.argmax_center[ri] = balls.centers()[ci];
            }
    }
    for (double v : scan.max_box_integral)
        require_finite(v, "caloric scan");
    return scan;
}

inline void require_carleson_lambda(double lambda)
{
    if (!(lambda > -2.0 && lambda <= 2.0))
        throw std::invalid_argument("Carleson index lambda must lie in (-2, 2]");
}

} // namespace detail

inline CaloricScan caloric_scan(const ScalarField& f, const BallFamily& balls, const TimeQuadrature& q = {})
{
    require_same_grid(f.grid(), balls.grid(), "caloric_scan");
    const Spectrum spec = fourier(f);
    return detail::run_caloric_scan(
        [&](double t) {
            const ScalarField e = physical(propagate(spec, PropagatorSpec::heat(), t));
            std::vector<double> d(e.size());
            for (std::size_t i = 0; i < d.size(); ++i)
                d[i] = e[i] * e[i];
            return std::pair{std::move(d), e.sup_norm()};
        },
        balls, q);
}

inline CaloricScan caloric_scan(const VectorField& u, const BallFamily& balls, const TimeQuadrature& q = {})
{
    require_same_grid(u.grid(), balls.grid(), "caloric_scan");
    const VectorSpectrum spec = fourier(u);
    return detail::run_caloric_scan(
        [&](double t) {
            std::vector<double> d(u.grid().size(), 0.0);
            for (const auto& c : spec) {
                const ScalarField e = physical(propagate(c, PropagatorSpec::heat(), t));
                for (std::size_t i = 0; i < d.size(); ++i)
                    d[i] += e[i] * e[i];
            }
            double sup = 0.0;
            for (double x : d)
                sup = std::max(sup, x);
            return std::pair{std::move(d), std::sqrt(sup)};
        },
        balls, q);
}

/// sup over the family of (|B|^{lambda/N - 1} int_0^{R^2} int_B |e^{t Lap} f|^2)^{1/2}.
inline NormValue carleson_from_scan(const CaloricScan& scan, double lambda)
{
    detail::require_carleson_lambda(lambda);
    const BallFamily& balls = *scan.balls;
    const int dim = balls.grid().dim();
    NormValue nv;
    for (std::size_t ri = 0; ri < scan.radii.size(); ++ri) {
        const double v = std::sqrt(scan.max_box_integral[ri] * std::pow(ball_volume(dim, scan.radii[ri]), lambda / dim - 1.0));
        if (v > nv.value || ri == 0) {
            nv.value = v;
            nv.argmax_center = scan.argmax_center[ri];
            nv.argmax_radius = scan.radii[ri];
            nv.argmax_at_cap = std::abs(scan.radii[ri] - balls.radius_cap()) <= 1e-12 * balls.radius_cap();
        }
    }
    return nv;
}

/// sup over mesh nodes of t^{-s/2} ||e^{t Lap} f||_inf (s < 0).
inline NormValue besov_from_scan(const CaloricScan& scan, double s)
{
    if (!(s < 0.0))
        throw std::invalid_argument("caloric Besov characterisation requires s < 0");
    NormValue nv;
    for (std::size_t k = 0; k < scan.times.size(); ++k) {
        const double v = std::pow(scan.times[k], -s / 2.0) * scan.sup_norms[k];
        if (v > nv.value) {
            nv.value = v;
            nv.argmax_time = scan.times[k];
        }
    }
    return nv;
}

/// lambda = 2 gives the L^{-1}_{2,N-2} norm, lambda = 0 the BMO^{-1} norm.
inline NormValue carleson_caloric_norm(const ScalarField& f, double lambda, const BallFamily& balls,
                                       const TimeQuadrature& q = {})
{
    detail::require_carleson_lambda(lambda);
    return carleson_from_scan(caloric_scan(f, balls, q), lambda);
}

inline NormValue carleson_caloric_norm(const VectorField& u, double lambda, const BallFamily& balls,
                                       const TimeQuadrature& q = {})
{
    detail::require_carleson_lambda(lambda);
    return carleson_from_scan(caloric_scan(u, balls, q), lambda);
}

/// sup (|B|^{-1} int_0^{r^2} int_B |grad e^{t Lap} f|^2)^{1/2}  (Carleson form of BMO).
inline NormValue bmo_caloric_seminorm(const ScalarField& f, const BallFamily& balls, const TimeQuadrature& q = {})
{
    require_same_grid(f.grid(), balls.grid(), "bmo_caloric_seminorm");
    // |grad e^{t Lap} f|^2 is the caloric energy density of the vector field grad f
    return carleson_from_scan(caloric_scan(gradient(f), balls, q), 0.0);
}

/// Caloric form of the homogeneous Besov norm B^{s}_{inf,inf}, s < 0:
/// sup_t t^{-s/2} ||e^{t Lap} f||_inf over the Carleson time mesh of `balls`.
inline NormValue besov_caloric_sup_norm(const ScalarField& f, double s, const BallFamily& balls,
                                        const TimeQuadrature& q = {})
{
    if (!(s < 0.0))
        throw std::invalid_argument("caloric Besov characterisation requires s < 0");
    return besov_from_scan(caloric_scan(f, balls, q), s);
}

// ---------------- Littlewood-Paley ----------------

namespace detail {

// Smooth step 0 -> 1 on [0, 1] built from the bump exp(-1/(1 - y^2)) on (-1, 1).
inline double smooth_step(double x)
{
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    auto bump = [](double y) { return std::abs(y) < 1.0 ? std::exp(-1.0 / (1.0 - y * y)) : 0.0; };
    // Composite Gauss-Legendre (8 panels x 4 points) of the bump on [-1, 2x - 1].
    auto integrate = [&](double a, double b) {
        static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
        static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
        double s = 0.0;
        const int panels = 8;
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * h;
            for (int g = 0; g < 4; ++g)
                s += 0.5 * h * gw[g] * bump(mid + 0.5 * h * gx[g]);
        }
        return s;
    };
    static const double total = integrate(-1.0, 1.0);
    return integrate(-1.0, 2.0 * x - 1.0) / total;
}

// chi = 1 on [0, 1], 0 on [2, inf).
inline double lp_low_pass(double r) { return 1.0 - smooth_step(r - 1.0); }

} // namespace detail

/// Dyadic Littlewood-Paley bank psi_j(xi) = chi(2^{-j}|xi|) - chi(2^{-j+1}|xi|),
/// supported in 2^{j-1} <= |xi| <= 2^{j+1}; the levels telescope to a partition
/// of unity on every non-zero lattice mode.
class LPBank {
public:
    explicit LPBank(const Grid& grid) : grid_(grid)
    {
        double k_min = std::numeric_limits<double>::infinity(), k_max = 0.0;
        std::vector<double> kmag(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            kmag[i] = std::sqrt(grid.wavenumber_squared(i));
            if (kmag[i] > 0.0) {
                k_min = std::min(k_min, kmag[i]);
                k_max = std::max(k_max, kmag[i]);
            }
        }
        const int j_lo = static_cast<int>(std::floor(std::log2(k_min))) - 1;
        const int j_hi = static_cast<int>(std::ceil(std::log2(k_max))) + 1;
        const double k_nyquist = std::numbers::pi * grid.points_per_axis() / grid.box_length();
        for (int j = j_lo; j <= j_hi; ++j) {
            std::vector<double> mult(grid.size(), 0.0);
            bool any = false;
            const double scale = std::ldexp(1.0, -j);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (kmag[i] == 0.0)
                    continue;
                const double r = kmag[i] * scale;
                mult[i] = detail::lp_low_pass(r) - detail::lp_low_pass(2.0 * r);
                any = any || mult[i] != 0.0;
            }
            if (!any) {
                dropped_.push_back(j);
                continue;
            }
            levels_.push_back(j);
            multipliers_.push_back(std::move(mult));
            if (std::ldexp(1.0, j + 1) > k_nyquist)
                partially_resolved_.push_back(j);
        }
    }

    const Grid& grid() const { return grid_; }
    const std::vector<int>& levels() const { return levels_; }
    /// Levels whose annulus extends past the per-axis Nyquist wavenumber.
    const std::vector<int>& partially_resolved() const { return partially_resolved_; }
    /// Candidate levels with no lattice support (reported, not used).
    const std::vector<int>& dropped() const { return dropped_; }
    const std::vector<double>& multiplier(std::size_t level_pos) const { return multipliers_[level_pos]; }

    Spectrum block(const Spectrum& s, std::size_t level_pos) const
    {
        Spectrum out(s.grid);
        const auto& m = multipliers_[level_pos];
        for (std::size_t i = 0; i < m.size(); ++i)
            out.coeffs[i] = m[i] * s.coeffs[i];
        return out;
    }

    /// max over non-zero lattice modes of |sum_j psi_j - 1|.
    double partition_of_unity_error() const
    {
        double err = 0.0;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (grid_.wavenumber_squared(i) == 0.0)
                continue;
            double s = 0.0;
            for (const auto& m : multipliers_)
                s += m[i];
            err = std::max(err, std::abs(s - 1.0));
        }
        return err;
    }

private:
    Grid grid_;
    std::vector<int> levels_;
    std::vector<int> partially_resolved_;
    std::vector<int> dropped_;
    std::vector<std::vector<double>> multipliers_;
};

/// Per-level contributions alongside the Besov-Morrey value.
struct BesovMorreyResult {
    double value = 0.0;
    std::vector<int> levels;
    std::vector<double> level_terms;  // 2^{js} ||Delta_j f||_{M_{p,lambda}}
    int argmax_level = 0;
};

/// l^q over levels of 2^{js} ||Delta_j f||_{M_{p,lambda}}; q = infinity takes the sup.
inline BesovMorreyResult besov_morrey_norm(const ScalarField& f, double s, double p, double lambda, double q,
                                           const LPBank& bank, const BallFamily& balls)
{
    require_same_grid(f.grid(), bank.grid(), "besov_morrey_norm");
    if (bank.levels().empty())
        throw std::invalid_argument("besov_morrey_norm: no admissible Littlewood-Paley levels");
    if (!(q >= 1.0))
        throw std::invalid_argument("Besov summation exponent q must be >= 1");
    const Spectrum spec = fourier(f);
    BesovMorreyResult res;
    double acc = 0.0, best = -1.0;
    for (std::size_t l = 0; l < bank.levels().size(); ++l) {
        const int j = bank.levels()[l];
        const ScalarField blk = physical(bank.block(spec, l));
        const double term = std::pow(2.0, j * s) * morrey_norm(blk, p, lambda, balls).value;
        res.levels.push_back(j);
        res.level_terms.push_back(term);
        if (term > best) {
            best = term;
            res.argmax_level = j;
        }
        if (std::isinf(q))
            acc = std::max(acc, term);
        else
            acc += std::pow(term, q);
    }
    res.value = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
    detail::require_finite(res.value, "besov_morrey_norm");
    return res;
}

/// Named norm values plus the ball-family provenance they were computed with.
struct NormReport {
    std::map<std::string, NormValue> values;
    std::map<std::string, double> params;
    int center_stride = 0;
    std::vector<double> radii;

    void set(const std::string& id, const NormValue& v) { values[id] = v; }
    void set(const std::string& id, double v)
    {
        NormValue nv;
        nv.value = v;
        values[id] = nv;
    }
    double operator[](const std::string& id) const { return values.at(id).value; }
};

} // namespace cnslab

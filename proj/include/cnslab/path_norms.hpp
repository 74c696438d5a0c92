#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cnslab/duhamel.hpp"
#include "cnslab/norms.hpp"

namespace cnslab {

/// Decomposed value of one of the solution-space norms.
struct PathNorm {
    double total = 0.0;
    double sup_term = 0.0;       // sup ||v||, or the weighted sup for X2/X3
    double weighted_term = 0.0;  // sup t^{1/2} ||grad c|| (X1 only)
    double integral_term = 0.0;  // Carleson term, or the global L^2 term for X2 in 2D
    NormValue integral_argmax;
};

namespace detail {

inline std::size_t require_horizon(const TimeGrid& tg, double T, const char* what)
{
    if (tg.size() < 2)
        throw std::invalid_argument(std::string(what) + ": empty trajectory");
    if (!(T > 0.0) || T > tg.horizon() * (1.0 + 1e-12))
        throw std::invalid_argument(std::string(what) + ": horizon outside the trajectory");
    return tg.count_up_to(T);
}

// sup over (x, R), R <= sqrt(T), of (|B|^{-alpha} int_0^{R^2} int_B density)^{1/2},
// with density sampled at the time nodes.
inline NormValue trajectory_carleson(const TimeGrid& tg, const std::vector<std::vector<double>>& density,
                                     double alpha, const BallFamily& balls, double T)
{
    NormValue nv;
    const Grid& g = balls.grid();
    for (std::size_t ri = 0; ri < balls.radii().size(); ++ri) {
        const double r = balls.radii()[ri];
        if (r * r > T * (1.0 + 1e-12))
            continue;
        const auto w = integration_weights(tg, r * r);
        std::vector<double> acc(g.size(), 0.0);
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (w[k] == 0.0)
                continue;
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc[i] += w[k] * density[k][i];
        }
        const double vol = std::pow(ball_volume(g.dim(), r), alpha);
        const auto sums = balls.ball_integrals(acc, ri);
        for (std::size_t ci = 0; ci < sums.size(); ++ci)
            mark(nv, balls, ci, ri, std::sqrt(std::max(0.0, sums[ci]) / vol));
    }
    return nv;
}

inline std::vector<double> squared(const ScalarField& f)
{
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = f[i] * f[i];
    return v;
}

inline std::vector<double> squared(const VectorField& f)
{
    std::vector<double> v(f.grid().size(), 0.0);
    for (int j = 0; j < f.dim(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] += f[j][i] * f[j][i];
    return v;
}

} // namespace detail

/// ||c||_{X_{1,T}} = sup ||c|| + sup t^{1/2} ||grad c|| + Carleson term of |grad c|^2.
inline PathNorm path_norm_X1(const ScalarTrajectory& c, double T, const BallFamily& balls)
{
    const std::size_t count = detail::require_horizon(c.times, T, "path_norm_X1");
    require_same_grid(c.grid(), balls.grid(), "path_norm_X1");
    PathNorm out;
    std::vector<std::vector<double>> density(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const VectorField grad = gradient(c[k]);
        density[k] = detail::squared(grad);
        if (k == 0 || k >= count)
            continue;
        out.sup_term = std::max(out.sup_term, c[k].sup_norm());
        out.weighted_term = std::max(out.weighted_term, std::sqrt(c.times[k]) * grad.sup_norm());
    }
    out.integral_argmax = detail::trajectory_carleson(c.times, density, 1.0, balls, T);
    out.integral_term = out.integral_argmax.value;
    out.total = out.sup_term + out.weighted_term + out.integral_term;
    return out;
}

/// ||n||_{X_{2,T}} = sup t ||n|| + Carleson term with |B|^{2/N-1}; in 2D the
/// second term is the space-time L^2 norm over the whole box.
inline PathNorm path_norm_X2(const ScalarTrajectory& n, double T, const BallFamily& balls)
{
    const std::size_t count = detail::require_horizon(n.times, T, "path_norm_X2");
    require_same_grid(n.grid(), balls.grid(), "path_norm_X2");
    const int dim = n.grid().dim();
    PathNorm out;
    for (std::size_t k = 1; k < count; ++k)
        out.sup_term = std::max(out.sup_term, n.times[k] * n[k].sup_norm());
    if (dim == 2) {
        const auto w = integration_weights(n.times, T);
        double acc = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] != 0.0)
                acc += w[k] * std::pow(n[k].l2_norm(), 2);
        out.integral_term = std::sqrt(std::max(0.0, acc));
        out.integral_argmax.value = out.integral_term;
    } else {
        std::vector<std::vector<double>> density(n.size());
        for (std::size_t k = 0; k < n.size(); ++k)
            density[k] = detail::squared(n[k]);
        out.integral_argmax = detail::trajectory_carleson(n.times, density, 1.0 - 2.0 / dim, balls, T);
        out.integral_term = out.integral_argmax.value;
    }
    out.total = out.sup_term + out.integral_term;
    return out;
}

/// ||u||_{X_{3,T}} = sup t^{1/2} ||u|| + Carleson term of |u|^2.
inline PathNorm path_norm_X3(const VectorTrajectory& u, double T, const BallFamily& balls)
{
    const std::size_t count = detail::require_horizon(u.times, T, "path_norm_X3");
    require_same_grid(u.grid(), balls.grid(), "path_norm_X3");
    PathNorm out;
    std::vector<std::vector<double>> density(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        density[k] = detail::squared(u[k]);
        if (k > 0 && k < count)
            out.sup_term = std::max(out.sup_term, std::sqrt(u.times[k]) * u[k].sup_norm());
    }
    out.integral_argmax = detail::trajectory_carleson(u.times, density, 1.0, balls, T);
    out.integral_term = out.integral_argmax.value;
    out.total = out.sup_term + out.integral_term;
    return out;
}

} // namespace cnslab

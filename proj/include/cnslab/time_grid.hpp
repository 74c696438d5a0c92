#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnslab/grid.hpp"

namespace cnslab {

/// Time nodes 0 = t_0 < t_1 < ... < t_K = T.
///
/// The standard layout is geometric-then-uniform: K uniform panels of width
/// h = T/K, with the first panel [0, h] replaced by the dyadic nodes
/// h/2^G, ..., h/2, h.
class TimeGrid {
public:
    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes))
    {
        if (nodes_.size() < 2)
            throw std::invalid_argument("time grid needs at least two nodes");
        if (nodes_.front() != 0.0)
            throw std::invalid_argument("time grid must start at t = 0");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i]))
                throw std::invalid_argument("time grid nodes must be strictly increasing and finite");
    }

    /// geometric_levels < 0 selects the smallest G with h/2^G <= h^2.
    static TimeGrid geometric_uniform(double horizon, int uniform_panels, int geometric_levels = -1)
    {
        if (!(horizon > 0.0) || !std::isfinite(horizon))
            throw std::invalid_argument("time horizon must be positive");
        if (uniform_panels < 1)
            throw std::invalid_argument("need at least one uniform panel");
        const double h = horizon / uniform_panels;
        int levels = geometric_levels;
        if (levels < 0) {
            levels = 0;
            while (h / std::ldexp(1.0, levels) > h * h && levels < 40)
                ++levels;
        }
        std::vector<double> nodes{0.0};
        for (int j = levels; j >= 1; --j)
            nodes.push_back(h / std::ldexp(1.0, j));
        for (int k = 1; k <= uniform_panels; ++k)
            nodes.push_back(k == uniform_panels ? horizon : k * h);
        return TimeGrid(std::move(nodes));
    }

    static TimeGrid uniform(double horizon, int panels) { return geometric_uniform(horizon, panels, 0); }

    const std::vector<double>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double horizon() const { return nodes_.back(); }

    /// Every panel split at its midpoint.
    TimeGrid refined() const
    {
        std::vector<double> out{nodes_.front()};
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            out.push_back(0.5 * (nodes_[i - 1] + nodes_[i]));
            out.push_back(nodes_[i]);
        }
        return TimeGrid(std::move(out));
    }

    TimeGrid scaled(double factor) const
    {
        std::vector<double> out(nodes_);
        for (double& t : out)
            t *= factor;
        return TimeGrid(std::move(out));
    }

    /// Nodes up to and including the last node <= t_max.
    std::size_t count_up_to(double t_max) const
    {
        std::size_t n = 0;
        while (n < nodes_.size() && nodes_[n] <= t_max * (1.0 + 1e-14))
            ++n;
        return n;
    }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.nodes_ == b.nodes_; }

private:
    std::vector<double> nodes_{0.0, 1.0};
};

namespace detail {

inline double lagrange_basis(const std::array<double, 3>& x, int which, double t)
{
    double v = 1.0;
    for (int m = 0; m < 3; ++m)
        if (m != which)
            v *= (t - x[m]) / (x[which] - x[m]);
    return v;
}

// Adds the integral over [a, b] of the quadratic interpolant through nodes
// (first, first+1, first+2) into w, scaled by `share`.
inline void add_quadratic_panel(const std::vector<double>& t, std::size_t first, double a, double b,
                                double share, std::vector<double>& w)
{
    const std::array<double, 3> x{t[first], t[first + 1], t[first + 2]};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double g = 1.0 / std::sqrt(3.0);
    for (int m = 0; m < 3; ++m) {
        double integral = half * (lagrange_basis(x, m, mid - g * half) + lagrange_basis(x, m, mid + g * half));
        w[first + m] += share * integral;
    }
}

} // namespace detail

/// Weights w_i with  int_0^upper g(t) dt ~= sum_i w_i g(t_i)  for node-sampled g.
///
/// Each panel averages the two neighbouring quadratic interpolants, which on a
/// uniform grid is the fourth-order (-1, 13, 13, -1)/24 rule. `upper` may fall
/// inside a panel; the same interpolants are integrated over the partial panel.
inline std::vector<double> integration_weights(const TimeGrid& grid, double upper)
{
    const auto& t = grid.nodes();
    const std::size_t n = t.size();
    if (upper < 0.0 || upper > grid.horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("integration limit outside the time grid");
    upper = std::min(upper, grid.horizon());
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = t[i];
        if (a >= upper)
            break;
        const double b = std::min(t[i + 1], upper);
        if (n == 2) {
            // Linear interpolation only.
            const double h = t[1] - t[0];
            const double la = (a - t[0]) / h, lb = (b - t[0]) / h;
            w[1] += h * 0.5 * (lb * lb - la * la);
            w[0] += (b - a) - h * 0.5 * (lb * lb - la * la);
            continue;
        }
        const bool left = i >= 1;
        const bool right = i + 2 < n;
        const double share = (left && right) ? 0.5 : 1.0;
        if (left)
            detail::add_quadratic_panel(t, i - 1, a, b, share, w);
        if (right)
            detail::add_quadratic_panel(t, i, a, b, share, w);
    }
    return w;
}

/// Time-indexed snapshots on a shared TimeGrid, piecewise linear in t between nodes.
template <class Field>
struct SourceTrajectory {
    TimeGrid times;
    std::vector<Field> snapshots;

    SourceTrajectory() = default;
    SourceTrajectory(TimeGrid tg, std::vector<Field> snaps) : times(std::move(tg)), snapshots(std::move(snaps))
    {
        if (snapshots.size() != times.size())
            throw std::invalid_argument("trajectory snapshot count " + std::to_string(snapshots.size()) +
                                        " does not match time grid size " + std::to_string(times.size()));
        for (std::size_t i = 1; i < snapshots.size(); ++i)
            if (!(snapshots[i].grid() == snapshots[0].grid()))
                throw std::invalid_argument("trajectory snapshots live on different grids");
    }

    std::size_t size() const { return snapshots.size(); }
    const Field& operator[](std::size_t i) const { return snapshots[i]; }
    const Grid& grid() const { return snapshots.front().grid(); }
};

} // namespace cnslab

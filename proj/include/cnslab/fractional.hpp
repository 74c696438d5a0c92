#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace cnslab {

/// A function of one variable sampled at increasing nodes s_0 = 0 < s_1 < ... < s_n,
/// linear between nodes.
struct Sampled1D {
    std::vector<double> nodes;
    std::vector<double> values;

    Sampled1D() = default;
    Sampled1D(std::vector<double> s, std::vector<double> v) : nodes(std::move(s)), values(std::move(v))
    {
        if (nodes.size() != values.size() || nodes.size() < 2)
            throw std::invalid_argument("sampled function needs matching nodes and values (at least two)");
        if (nodes.front() != 0.0)
            throw std::invalid_argument("sampled function must start at 0");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw std::invalid_argument("sample nodes must be strictly increasing");
        for (double x : values)
            if (!std::isfinite(x))
                throw std::invalid_argument("sampled function must be finite");
    }

    std::size_t size() const { return nodes.size(); }
};

/// E(h)(s) = int_0^s (s - sigma)^{alpha-1} sigma^{-beta} h(sigma) d sigma at every node s_i.
///
/// Product integration: with sigma = s x each panel reduces to incomplete Beta
/// integrals of (1 - x)^{alpha-1} x^{-beta} and (1 - x)^{alpha-1} x^{1-beta},
/// so both endpoint singularities are integrated exactly for linear h.
inline Sampled1D fractional_integral_E(const Sampled1D& h, double alpha, double beta)
{
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("fractional integral parameters must lie in (0, 1)");
    const auto& s = h.nodes;
    const auto& v = h.values;
    std::vector<double> out(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double si = s[i];
        auto j0 = [&](double x) { return boost::math::beta(1.0 - beta, alpha, x); };
        auto j1 = [&](double x) { return boost::math::beta(2.0 - beta, alpha, x); };
        double total = 0.0;
        double j0_lo = 0.0, j1_lo = 0.0;
        for (std::size_t p = 0; p < i; ++p) {
            const double x_hi = (p + 1 == i) ? 1.0 : s[p + 1] / si;
            const double j0_hi = j0(x_hi), j1_hi = j1(x_hi);
            // h = A + B sigma on the panel
            const double slope = (v[p + 1] - v[p]) / (s[p + 1] - s[p]);
            const double offset = v[p] - slope * s[p];
            total += offset * (j0_hi - j0_lo) + slope * si * (j1_hi - j1_lo);
            j0_lo = j0_hi;
            j1_lo = j1_hi;
        }
        out[i] = std::pow(si, alpha - beta) * total;
    }
    return Sampled1D(s, std::move(out));
}

/// Uncentred maximal function on the samples: at each node, the largest mean of
/// |h| over windows [s_i, s_j] containing it (the trapezoid rule on the window,
/// singleton windows giving |h| itself). O(n^2) scan.
inline Sampled1D maximal_function_1d(const Sampled1D& h)
{
    const std::size_t n = h.size();
    const auto& s = h.nodes;
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i)
        a[i] = std::abs(h.values[i]);
    // prefix[j] = trapezoid integral of |h| over [s_0, s_j]
    std::vector<double> prefix(n, 0.0);
    for (std::size_t j = 1; j < n; ++j)
        prefix[j] = prefix[j - 1] + 0.5 * (a[j - 1] + a[j]) * (s[j] - s[j - 1]);
    std::vector<double> best(a);
    std::vector<double> suffix(n);
    for (std::size_t i = 0; i < n; ++i) {
        // suffix[k] = max over j >= k of the mean on [s_i, s_j]
        double run = 0.0;
        for (std::size_t j = n; j-- > i;) {
            const double mean = (j == i) ? a[i] : (prefix[j] - prefix[i]) / (s[j] - s[i]);
            run = (j == n - 1) ? mean : std::max(run, mean);
            suffix[j] = run;
        }
        for (std::size_t k = i; k < n; ++k)
            best[k] = std::max(best[k], suffix[k]);
    }
    return Sampled1D(s, std::move(best));
}

} // namespace cnslab

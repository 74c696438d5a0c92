#pragma once

#include <cmath>
#include <numbers>

#include "cnslab.hpp"

namespace testing_support {

using namespace cnslab;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline ScalarField random_scalar(const Grid& g, std::uint64_t seed, int band = 4, double amp = 1.0)
{
    return generate_scalar({PresetKind::random_bandlimited, amp, seed, {1, 0, 0}, 0.0, band}, g);
}

inline VectorField random_vector(const Grid& g, std::uint64_t seed, int band = 4, double amp = 1.0)
{
    return generate_vector({PresetKind::random_bandlimited, amp, seed, {1, 0, 0}, 0.0, band}, g, false);
}

inline VectorField random_divfree(const Grid& g, std::uint64_t seed, int band = 4, double amp = 1.0)
{
    return generate_vector({PresetKind::random_divfree, amp, seed, {1, 0, 0}, 0.0, band}, g, true);
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) { return (a - b).sup_norm(); }

inline double max_abs_diff(const VectorField& a, const VectorField& b) { return (a - b).component_sup_norm(); }

/// Shift by whole grid cells along each axis.
inline ScalarField shifted(const ScalarField& f, std::array<int, 3> by)
{
    const Grid& g = f.grid();
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto idx = g.unravel(i);
        for (int d = 0; d < g.dim(); ++d)
            idx[d] += by[d];
        out[g.ravel(idx)] = f[i];
    }
    return ScalarField(g, std::move(out));
}

} // namespace testing_support

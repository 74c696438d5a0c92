#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "cnslab/field.hpp"

namespace cnslab {

// Conventions shared by every odd-order Fourier multiplier (gradient,
// divergence, Riesz, Leray): the wavevector component along an axis is taken
// as zero at that axis' Nyquist index, so odd derivatives of real fields stay
// real. Even multipliers (Laplacian, heat) use the full |k|^2.

namespace detail {

// Per-grid lookup tables for the multipliers, built once per (dim, L, M).
struct GridTables {
    std::vector<std::array<int, 3>> index;
    std::vector<double> k2;
    std::vector<std::array<double, 3>> dk;  // Nyquist-zeroed wavevector
    std::vector<char> keep;                 // two-thirds rule
};

inline const GridTables& grid_tables(const Grid& g)
{
    static std::mutex mutex;
    static std::map<std::tuple<int, double, int>, std::unique_ptr<GridTables>> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(g.dim(), g.box_length(), g.points_per_axis());
    auto& slot = cache[key];
    if (!slot) {
        auto t = std::make_unique<GridTables>();
        t->index.resize(g.size());
        t->k2.resize(g.size());
        t->dk.resize(g.size());
        t->keep.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto idx = g.unravel(i);
            t->index[i] = idx;
            t->k2[i] = g.wavenumber_squared(i);
            std::array<double, 3> k{0.0, 0.0, 0.0};
            bool keep = true;
            for (int d = 0; d < g.dim(); ++d) {
                k[d] = g.is_nyquist(idx[d]) ? 0.0 : g.wavenumber(idx[d]);
                keep = keep && 3 * std::abs(g.mode_index(idx[d])) < g.points_per_axis();
            }
            t->dk[i] = k;
            t->keep[i] = keep;
        }
        slot = std::move(t);
    }
    return *slot;
}

} // namespace detail

/// Wavevector with Nyquist components zeroed.
inline std::array<double, 3> derivative_wavevector(const Grid& g, std::size_t flat)
{
    return detail::grid_tables(g).dk[flat];
}

/// exp(-|k|^2 t) for every storage index, built from per-axis factors.
inline std::vector<double> heat_factors(const Grid& g, double t)
{
    const auto& tab = detail::grid_tables(g);
    const int M = g.points_per_axis();
    std::vector<double> axis(M);
    for (int i = 0; i < M; ++i) {
        const double k = g.wavenumber(i);
        axis[i] = std::exp(-k * k * t);
    }
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& idx = tab.index[i];
        double v = axis[idx[0]] * axis[idx[1]];
        if (g.dim() == 3)
            v *= axis[idx[2]];
        out[i] = v;
    }
    return out;
}

inline Spectrum partial_derivative(const Spectrum& s, int axis)
{
    Spectrum out(s.grid);
    const auto& dk = detail::grid_tables(s.grid).dk;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        out.coeffs[i] = Complex(0.0, dk[i][axis]) * s.coeffs[i];
    return out;
}

inline VectorSpectrum gradient(const Spectrum& s)
{
    VectorSpectrum out;
    for (int j = 0; j < s.grid.dim(); ++j)
        out.push_back(partial_derivative(s, j));
    return out;
}

inline VectorField gradient(const ScalarField& f) { return physical(gradient(fourier(f))); }

inline Spectrum divergence(const VectorSpectrum& v)
{
    Spectrum out(v.front().grid);
    for (std::size_t j = 0; j < v.size(); ++j)
        out += partial_derivative(v[j], static_cast<int>(j));
    return out;
}

inline ScalarField divergence(const VectorField& v) { return physical(divergence(fourier(v))); }

inline Spectrum laplacian(const Spectrum& s)
{
    Spectrum out(s.grid);
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        out.coeffs[i] = -detail::grid_tables(s.grid).k2[i] * s.coeffs[i];
    return out;
}

inline ScalarField laplacian(const ScalarField& f) { return physical(laplacian(fourier(f))); }

/// Projection onto divergence-free fields: v - k (k.v)/|k|^2, zero mode passed through.
inline VectorSpectrum leray_project(const VectorSpectrum& v)
{
    const Grid& g = v.front().grid;
    const int dim = g.dim();
    VectorSpectrum out = v;
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto k = derivative_wavevector(g, i);
        double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if (k2 == 0.0)
            continue;
        Complex kv(0.0, 0.0);
        for (int j = 0; j < dim; ++j)
            kv += k[j] * v[j].coeffs[i];
        for (int j = 0; j < dim; ++j)
            out[j].coeffs[i] -= k[j] * kv / k2;
    }
    return out;
}

inline VectorField leray_project(const VectorField& v) { return physical(leray_project(fourier(v))); }

/// R_j = d_j (-Laplacian)^{-1/2}; the zero mode is mapped to 0.
inline Spectrum riesz_transform(const Spectrum& s, int axis)
{
    Spectrum out(s.grid);
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        auto k = derivative_wavevector(s.grid, i);
        double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        if (kn == 0.0)
            continue;
        out.coeffs[i] = Complex(0.0, k[axis] / kn) * s.coeffs[i];
    }
    return out;
}

inline ScalarField riesz_transform(const ScalarField& f, int axis)
{
    if (axis < 0 || axis >= f.grid().dim())
        throw std::invalid_argument("riesz_transform: axis out of range");
    return physical(riesz_transform(fourier(f), axis));
}

/// (-Laplacian)^{-1} with the zero mode mapped to 0.
inline Spectrum inverse_negative_laplacian(const Spectrum& s)
{
    Spectrum out(s.grid);
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        double k2 = detail::grid_tables(s.grid).k2[i];
        if (k2 > 0.0)
            out.coeffs[i] = s.coeffs[i] / k2;
    }
    return out;
}

/// Two-thirds rule: keep modes with 3|m| < M along every axis.
inline bool dealias_keeps(const Grid& g, std::size_t flat) { return detail::grid_tables(g).keep[flat]; }

inline Spectrum dealias(Spectrum s)
{
    const auto& keep = detail::grid_tables(s.grid).keep;
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        if (!keep[i])
            s.coeffs[i] = Complex(0.0, 0.0);
    return s;
}

inline ScalarField dealias(const ScalarField& f) { return physical(dealias(fourier(f))); }

inline VectorField dealias(const VectorField& v)
{
    std::vector<ScalarField> comps;
    for (const auto& c : v.components())
        comps.push_back(dealias(c));
    return VectorField(v.grid(), std::move(comps));
}

/// Spectrum of the product a*b with both factors and the result truncated by the 2/3 rule.
inline Spectrum dealiased_product(const ScalarField& a, const ScalarField& b)
{
    return dealias(fourier(pointwise_product(dealias(a), dealias(b))));
}

} // namespace cnslab

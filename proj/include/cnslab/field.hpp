#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnslab/errors.hpp"
#include "cnslab/fft.hpp"
#include "cnslab/grid.hpp"

namespace cnslab {

/// Real scalar samples on a Grid. Values are always finite.
class ScalarField {
public:
    ScalarField() = default;

    explicit ScalarField(const Grid& grid, double fill = 0.0) : grid_(grid), values_(grid.size(), fill) {}

    ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values))
    {
        if (values_.size() != grid_.size())
            throw std::invalid_argument("ScalarField: value count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v))
                throw NumericalError("ScalarField: non-finite value");
    }

    /// Sample a function of position x (array of dim coordinates).
    static ScalarField sample(const Grid& grid, const std::function<double(const std::array<double, 3>&)>& fn)
    {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            v[i] = fn(grid.coordinate(i));
        return ScalarField(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    double sup_norm() const
    {
        double m = 0.0;
        for (double v : values_)
            m = std::max(m, std::abs(v));
        return m;
    }
    double min() const { return *std::min_element(values_.begin(), values_.end()); }
    double max() const { return *std::max_element(values_.begin(), values_.end()); }
    double mean() const
    {
        double s = 0.0;
        for (double v : values_)
            s += v;
        return s / static_cast<double>(values_.size());
    }
    /// Grid quadrature of the field over the box.
    double integral() const { return mean() * grid_.volume(); }
    double l1_norm() const
    {
        double s = 0.0;
        for (double v : values_)
            s += std::abs(v);
        return s * grid_.cell_volume();
    }
    double l2_norm() const
    {
        double s = 0.0;
        for (double v : values_)
            s += v * v;
        return std::sqrt(s * grid_.cell_volume());
    }

    ScalarField& operator+=(const ScalarField& o)
    {
        require_same_grid(grid_, o.grid_, "ScalarField +=");
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] += o.values_[i];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o)
    {
        require_same_grid(grid_, o.grid_, "ScalarField -=");
        for (std::size_t i = 0; i < values_.size(); ++i)
            values_[i] -= o.values_[i];
        return *this;
    }
    ScalarField& operator*=(double a)
    {
        for (double& v : values_)
            v *= a;
        return *this;
    }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// N-component field on a Grid (N = grid dimension).
class VectorField {
public:
    VectorField() = default;

    explicit VectorField(const Grid& grid) : grid_(grid), components_(grid.dim(), ScalarField(grid)) {}

    VectorField(const Grid& grid, std::vector<ScalarField> components)
        : grid_(grid), components_(std::move(components))
    {
        if (static_cast<int>(components_.size()) != grid_.dim())
            throw std::invalid_argument("VectorField: component count must equal grid dimension");
        for (const auto& c : components_)
            require_same_grid(grid_, c.grid(), "VectorField");
    }

    const Grid& grid() const { return grid_; }
    int dim() const { return grid_.dim(); }
    const ScalarField& operator[](int j) const { return components_[j]; }
    const std::vector<ScalarField>& components() const { return components_; }

    /// Pointwise Euclidean magnitude.
    ScalarField magnitude() const
    {
        std::vector<double> m(grid_.size(), 0.0);
        for (const auto& c : components_)
            for (std::size_t i = 0; i < m.size(); ++i)
                m[i] += c[i] * c[i];
        for (double& v : m)
            v = std::sqrt(v);
        return ScalarField(grid_, std::move(m));
    }

    double sup_norm() const { return magnitude().sup_norm(); }
    double component_sup_norm() const
    {
        double m = 0.0;
        for (const auto& c : components_)
            m = std::max(m, c.sup_norm());
        return m;
    }

    VectorField& operator+=(const VectorField& o)
    {
        require_same_grid(grid_, o.grid_, "VectorField +=");
        for (int j = 0; j < dim(); ++j)
            components_[j] += o.components_[j];
        return *this;
    }
    VectorField& operator-=(const VectorField& o)
    {
        require_same_grid(grid_, o.grid_, "VectorField -=");
        for (int j = 0; j < dim(); ++j)
            components_[j] -= o.components_[j];
        return *this;
    }
    VectorField& operator*=(double a)
    {
        for (auto& c : components_)
            c *= a;
        return *this;
    }

    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(VectorField a, double s) { return a *= s; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

private:
    Grid grid_;
    std::vector<ScalarField> components_;
};

/// Fourier coefficients c_k of a real field, f(x) = sum_k c_k exp(i k.x).
struct Spectrum {
    Grid grid;
    std::vector<Complex> coeffs;

    Spectrum() = default;
    explicit Spectrum(const Grid& g) : grid(g), coeffs(g.size(), Complex(0.0, 0.0)) {}
    Spectrum(const Grid& g, std::vector<Complex> c) : grid(g), coeffs(std::move(c)) {}

    Spectrum& operator+=(const Spectrum& o)
    {
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            coeffs[i] += o.coeffs[i];
        return *this;
    }
    Spectrum& operator-=(const Spectrum& o)
    {
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            coeffs[i] -= o.coeffs[i];
        return *this;
    }
    Spectrum& operator*=(double a)
    {
        for (auto& c : coeffs)
            c *= a;
        return *this;
    }
};

using VectorSpectrum = std::vector<Spectrum>;

inline Spectrum fourier(const ScalarField& f)
{
    return Spectrum(f.grid(), fft_forward_real(f.grid(), f.values()));
}

inline VectorSpectrum fourier(const VectorField& v)
{
    VectorSpectrum out;
    out.reserve(v.dim());
    for (const auto& c : v.components())
        out.push_back(fourier(c));
    return out;
}

/// Synthesis of the real part (the Hermitian part of the spectrum).
inline ScalarField physical(const Spectrum& s)
{
    return ScalarField(s.grid, fft_inverse_real(s.grid, s.coeffs));
}

inline VectorField physical(const VectorSpectrum& s)
{
    std::vector<ScalarField> comps;
    comps.reserve(s.size());
    for (const auto& c : s)
        comps.push_back(physical(c));
    return VectorField(s.front().grid, std::move(comps));
}

inline ScalarField pointwise_product(const ScalarField& a, const ScalarField& b)
{
    require_same_grid(a.grid(), b.grid(), "pointwise_product");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = a[i] * b[i];
    return ScalarField(a.grid(), std::move(v));
}

inline ScalarField dot(const VectorField& a, const VectorField& b)
{
    require_same_grid(a.grid(), b.grid(), "dot");
    std::vector<double> v(a.grid().size(), 0.0);
    for (int j = 0; j < a.dim(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] += a[j][i] * b[j][i];
    return ScalarField(a.grid(), std::move(v));
}

inline VectorField scale_by(const ScalarField& s, const VectorField& v)
{
    std::vector<ScalarField> comps;
    for (int j = 0; j < v.dim(); ++j)
        comps.push_back(pointwise_product(s, v[j]));
    return VectorField(v.grid(), std::move(comps));
}

/// Shift by an integer number of cells along each axis (cyclic).
inline ScalarField cyclic_shift(const ScalarField& f, const std::array<int, 3>& shift)
{
    const Grid& g = f.grid();
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto idx = g.unravel(i);
        for (int d = 0; d < g.dim(); ++d)
            idx[d] += shift[d];
        v[g.ravel(idx)] = f[i];
    }
    return ScalarField(g, std::move(v));
}

} // namespace cnslab

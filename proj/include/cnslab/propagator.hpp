#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "cnslab/spectral_ops.hpp"

namespace cnslab {

enum class PropagatorKind { heat, damped_heat, heat_gradient, oseen, oseen_gradient };

/// Fourier-multiplier description of the heat kernel and its relatives.
///
/// heat:           exp(-|k|^2 t)
/// damped_heat:    exp(-kappa t) exp(-|k|^2 t)
/// heat_gradient:  i k_axis exp(-|k|^2 t)               (kernel grad g)
/// oseen:          exp(-|k|^2 t) times the Leray projector (vector fields only)
/// oseen_gradient: i k_axis times the oseen multiplier
struct PropagatorSpec {
    PropagatorKind kind = PropagatorKind::heat;
    double kappa = 0.0;
    int axis = 0;

    static PropagatorSpec heat() { return {PropagatorKind::heat, 0.0, 0}; }
    static PropagatorSpec damped(double kappa)
    {
        if (kappa < 0.0)
            throw std::invalid_argument("damping rate kappa must be non-negative");
        return {PropagatorKind::damped_heat, kappa, 0};
    }
    static PropagatorSpec heat_gradient(int axis) { return {PropagatorKind::heat_gradient, 0.0, axis}; }
    static PropagatorSpec oseen() { return {PropagatorKind::oseen, 0.0, 0}; }
    static PropagatorSpec oseen_gradient(int axis) { return {PropagatorKind::oseen_gradient, 0.0, axis}; }

    bool is_vector_kind() const { return kind == PropagatorKind::oseen || kind == PropagatorKind::oseen_gradient; }

    /// Scalar part of the multiplier at storage index `flat` (the Leray factor is separate).
    Complex scalar_multiplier(const Grid& g, std::size_t flat, double t) const
    {
        const double decay = std::exp(-detail::grid_tables(g).k2[flat] * t);
        switch (kind) {
        case PropagatorKind::heat:
        case PropagatorKind::oseen:
            return {decay, 0.0};
        case PropagatorKind::damped_heat:
            return {std::exp(-kappa * t) * decay, 0.0};
        case PropagatorKind::heat_gradient:
        case PropagatorKind::oseen_gradient:
            return Complex(0.0, derivative_wavevector(g, flat)[axis]) * decay;
        }
        return {0.0, 0.0};
    }
};

inline void require_nonnegative_time(double t)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("propagation time must be non-negative, got " + std::to_string(t));
}

inline Spectrum propagate(const Spectrum& s, const PropagatorSpec& spec, double t)
{
    require_nonnegative_time(t);
    if (spec.is_vector_kind())
        throw std::invalid_argument("oseen propagators act on vector fields");
    Spectrum out(s.grid);
    if (spec.kind == PropagatorKind::heat || spec.kind == PropagatorKind::damped_heat) {
        const auto decay = heat_factors(s.grid, t);
        const double damp = spec.kind == PropagatorKind::damped_heat ? std::exp(-spec.kappa * t) : 1.0;
        for (std::size_t i = 0; i < s.coeffs.size(); ++i)
            out.coeffs[i] = (damp * decay[i]) * s.coeffs[i];
        return out;
    }
    for (std::size_t i = 0; i < s.coeffs.size(); ++i)
        out.coeffs[i] = spec.scalar_multiplier(s.grid, i, t) * s.coeffs[i];
    return out;
}

inline ScalarField propagate(const ScalarField& f, const PropagatorSpec& spec, double t)
{
    return physical(propagate(fourier(f), spec, t));
}

/// Componentwise scalar propagation, or the Oseen multiplier for the vector kinds.
inline VectorSpectrum propagate(const VectorSpectrum& v, const PropagatorSpec& spec, double t)
{
    require_nonnegative_time(t);
    PropagatorSpec scalar = spec;
    if (spec.kind == PropagatorKind::oseen)
        scalar.kind = PropagatorKind::heat;
    else if (spec.kind == PropagatorKind::oseen_gradient)
        scalar.kind = PropagatorKind::heat_gradient;
    VectorSpectrum base = spec.is_vector_kind() ? leray_project(v) : v;
    VectorSpectrum out;
    for (const auto& c : base)
        out.push_back(propagate(c, scalar, t));
    return out;
}

inline VectorField propagate(const VectorField& v, const PropagatorSpec& spec, double t)
{
    return physical(propagate(fourier(v), spec, t));
}

/// exp(t Laplacian) composed with the Leray projection.
inline VectorField oseen_propagate(const VectorField& v, double t)
{
    return propagate(v, PropagatorSpec::oseen(), t);
}

} // namespace cnslab

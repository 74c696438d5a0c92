#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnslab/propagator.hpp"
#include "cnslab/time_grid.hpp"

namespace cnslab {

using ScalarTrajectory = SourceTrajectory<ScalarField>;
using VectorTrajectory = SourceTrajectory<VectorField>;

/// Exact weights of  int_0^h exp(-a (h - s)) [f0 (1 - s/h) + f1 s/h] ds = w_old f0 + w_new f1.
struct PanelWeights {
    double decay;  // exp(-a h)
    double w_old;
    double w_new;
};

inline PanelWeights exponential_panel_weights(double a, double h)
{
    const double z = a * h;
    if (std::abs(z) < 0.1) {
        // w_old/h = sum_{n>=2} (-1)^n (n-1)/n! z^{n-2},  w_new/h = sum_{n>=2} (-1)^n / n! z^{n-2}
        double w_old = 0.0, w_new = 0.0;
        double zpow = 1.0, fact = 2.0;
        for (int n = 2; n < 18; ++n) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            w_old += sign * (n - 1) / fact * zpow;
            w_new += sign / fact * zpow;
            zpow *= z;
            fact *= (n + 1);
        }
        return {std::exp(-z), h * w_old, h * w_new};
    }
    const double e = std::exp(-z);
    return {e, h * (1.0 - e - z * e) / (z * z), h * (z - 1.0 + e) / (z * z)};
}

/// Exponential-integrator quadrature of  I(t_k) = int_0^{t_k} exp(-(t_k - s)(|k|^2 + kappa)) S(s) ds
/// for sources given by their spectra at every node (piecewise linear in s).
inline std::vector<Spectrum> duhamel_accumulate(const TimeGrid& tg, const std::vector<Spectrum>& sources, double kappa)
{
    if (sources.size() != tg.size())
        throw std::invalid_argument("duhamel_accumulate: one source spectrum per time node required");
    const Grid& g = sources.front().grid;
    std::vector<Spectrum> out(tg.size(), Spectrum(g));
    const auto& k2 = detail::grid_tables(g).k2;
    for (std::size_t mode = 0; mode < g.size(); ++mode) {
        const double a = k2[mode] + kappa;
        Complex acc(0.0, 0.0);
        for (std::size_t p = 0; p + 1 < tg.size(); ++p) {
            const auto w = exponential_panel_weights(a, tg[p + 1] - tg[p]);
            acc = w.decay * acc + w.w_old * sources[p].coeffs[mode] + w.w_new * sources[p + 1].coeffs[mode];
            out[p + 1].coeffs[mode] = acc;
        }
    }
    return out;
}

namespace detail {

inline void require_kappa(double kappa)
{
    if (!(kappa >= 0.0))
        throw std::invalid_argument("kappa must be non-negative, got " + std::to_string(kappa));
}

template <class A, class B>
void require_matching(const SourceTrajectory<A>& a, const SourceTrajectory<B>& b, const TimeGrid& tg, const char* op)
{
    if (!(a.times == tg) || !(b.times == tg))
        throw std::invalid_argument(std::string(op) + ": trajectories must share the time grid");
    require_same_grid(a.grid(), b.grid(), op);
}

inline ScalarTrajectory to_scalar_trajectory(const TimeGrid& tg, const std::vector<Spectrum>& spectra)
{
    std::vector<ScalarField> snaps;
    snaps.reserve(spectra.size());
    for (const auto& s : spectra)
        snaps.push_back(physical(s));
    return ScalarTrajectory(tg, std::move(snaps));
}

inline VectorTrajectory to_vector_trajectory(const TimeGrid& tg, const std::vector<VectorSpectrum>& per_node)
{
    std::vector<VectorField> snaps;
    snaps.reserve(per_node.size());
    for (const auto& s : per_node)
        snaps.push_back(physical(s));
    return VectorTrajectory(tg, std::move(snaps));
}

// Runs the accumulation componentwise for vector-valued sources.
inline std::vector<VectorSpectrum> accumulate_vector(const TimeGrid& tg, const std::vector<VectorSpectrum>& src, double kappa)
{
    const std::size_t dim = src.front().size();
    std::vector<VectorSpectrum> out(tg.size(), VectorSpectrum(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<Spectrum> comp;
        comp.reserve(src.size());
        for (const auto& s : src)
            comp.push_back(s[j]);
        auto acc = duhamel_accumulate(tg, comp, kappa);
        for (std::size_t k = 0; k < tg.size(); ++k)
            out[k][j] = std::move(acc[k]);
    }
    return out;
}

} // namespace detail

// ---- source terms (spectra of the integrands at a single node) ----

inline Spectrum product_source(const ScalarField& w, const ScalarField& n) { return dealiased_product(w, n); }

/// Spectrum of u . g  (each product dealiased).
inline Spectrum dot_source(const VectorField& u, const VectorField& g)
{
    Spectrum s = dealiased_product(u[0], g[0]);
    for (int j = 1; j < u.dim(); ++j)
        s += dealiased_product(u[j], g[j]);
    return s;
}

/// Spectrum of div(n w).
inline Spectrum divergence_source(const ScalarField& n, const VectorField& w)
{
    VectorSpectrum flux;
    for (int j = 0; j < w.dim(); ++j)
        flux.push_back(dealiased_product(n, w[j]));
    return divergence(flux);
}

/// Spectrum of P div(u (x) w), with (div(u (x) w))_a = sum_b d_b(u_b w_a).
inline VectorSpectrum leray_tensor_divergence_source(const VectorField& u, const VectorField& w)
{
    const int dim = u.dim();
    VectorSpectrum rows;
    for (int a = 0; a < dim; ++a) {
        Spectrum row(u.grid());
        for (int b = 0; b < dim; ++b)
            row += partial_derivative(dealiased_product(u[b], w[a]), b);
        rows.push_back(std::move(row));
    }
    return leray_project(rows);
}

/// Spectrum of u . grad v.
inline Spectrum advection_source(const VectorField& u, const ScalarField& v)
{
    return dot_source(u, gradient(v));
}

/// Spectrum of P(n F) for a static vector field F.
inline VectorSpectrum leray_forcing_source(const ScalarField& n, const VectorField& force)
{
    VectorSpectrum s;
    for (int j = 0; j < force.dim(); ++j)
        s.push_back(dealiased_product(n, force[j]));
    return leray_project(s);
}

// ---- the integral operators ----

/// B1(w, n)(t) = int_0^t e^{(t-s)Lap} (w n)(s) ds
inline ScalarTrajectory duhamel_B1(const ScalarTrajectory& w, const ScalarTrajectory& n, const TimeGrid& tg)
{
    detail::require_matching(w, n, tg, "duhamel_B1");
    std::vector<Spectrum> src;
    for (std::size_t k = 0; k < tg.size(); ++k)
        src.push_back(product_source(w[k], n[k]));
    return detail::to_scalar_trajectory(tg, duhamel_accumulate(tg, src, 0.0));
}

/// B1 with vector slots: int_0^t e^{(t-s)Lap} (u . g)(s) ds  (the u . grad c term).
inline ScalarTrajectory duhamel_B1(const VectorTrajectory& u, const VectorTrajectory& g, const TimeGrid& tg)
{
    detail::require_matching(u, g, tg, "duhamel_B1");
    std::vector<Spectrum> src;
    for (std::size_t k = 0; k < tg.size(); ++k)
        src.push_back(dot_source(u[k], g[k]));
    return detail::to_scalar_trajectory(tg, duhamel_accumulate(tg, src, 0.0));
}

/// B2(n, w)(t) = int_0^t e^{(t-s)Lap} div(n w)(s) ds
inline ScalarTrajectory duhamel_B2(const ScalarTrajectory& n, const VectorTrajectory& w, const TimeGrid& tg)
{
    detail::require_matching(n, w, tg, "duhamel_B2");
    std::vector<Spectrum> src;
    for (std::size_t k = 0; k < tg.size(); ++k)
        src.push_back(divergence_source(n[k], w[k]));
    return detail::to_scalar_trajectory(tg, duhamel_accumulate(tg, src, 0.0));
}

/// B3(u, w)(t) = int_0^t e^{(t-s)Lap} P div(u (x) w)(s) ds
inline VectorTrajectory duhamel_B3(const VectorTrajectory& u, const VectorTrajectory& w, const TimeGrid& tg)
{
    detail::require_matching(u, w, tg, "duhamel_B3");
    std::vector<VectorSpectrum> src;
    for (std::size_t k = 0; k < tg.size(); ++k)
        src.push_back(leray_tensor_divergence_source(u[k], w[k]));
    return detail::to_vector_trajectory(tg, detail::accumulate_vector(tg, src, 0.0));
}

/// B4(u, v)(t) = int_0^t e^{-kappa(t-s)} e^{(t-s)Lap} (u . grad v)(s) ds
inline ScalarTrajectory duhamel_B4(const VectorTrajectory& u, const ScalarTrajectory& v, const TimeGrid& tg, double kappa)
{
    detail::require_kappa(kappa);
    detail::require_matching(u, v, tg, "duhamel_B4");
    std::vector<Spectrum> src;
    for (std::size_t k = 0; k < tg.size(); ++k)
        src.push_back(advection_source(u[k], v[k]));
    return detail::to_scalar_trajectory(tg, duhamel_accumulate(tg, src, kappa));
}

/// L_Phi(n)(t) = int_0^t e^{(t-s)Lap} P(n grad Phi)(s) ds
inline VectorTrajectory linear_L_phi(const ScalarTrajectory& n, const VectorField& grad_phi, const TimeGrid& tg)
{
    if (!(n.times == tg))
        throw std::invalid_argument("linear_L_phi: trajectory must share the time grid");
    require_same_grid(n.grid(), grad_phi.grid(), "linear_L_phi");
    std::vector<VectorSpectrum> src;
    for (std::size_t k = 0; k < tg.size(); ++k)
        src.push_back(leray_forcing_source(n[k], grad_phi));
    return detail::to_vector_trajectory(tg, detail::accumulate_vector(tg, src, 0.0));
}

/// L_kappa(n)(t) = int_0^t e^{-kappa(t-s)} e^{(t-s)Lap} n(s) ds
inline ScalarTrajectory linear_L_kappa(const ScalarTrajectory& n, const TimeGrid& tg, double kappa)
{
    detail::require_kappa(kappa);
    if (!(n.times == tg))
        throw std::invalid_argument("linear_L_kappa: trajectory must share the time grid");
    std::vector<Spectrum> src;
    for (std::size_t k = 0; k < tg.size(); ++k)
        src.push_back(fourier(n[k]));
    return detail::to_scalar_trajectory(tg, duhamel_accumulate(tg, src, kappa));
}

/// Caloric (or damped caloric) extension e^{-kappa t} e^{t Lap} f sampled on the time grid.
inline ScalarTrajectory caloric_extension(const ScalarField& f, const TimeGrid& tg, double kappa = 0.0)
{
    detail::require_kappa(kappa);
    const Spectrum s = fourier(f);
    const auto spec = kappa > 0.0 ? PropagatorSpec::damped(kappa) : PropagatorSpec::heat();
    std::vector<ScalarField> snaps;
    for (double t : tg.nodes())
        snaps.push_back(t == 0.0 ? f : physical(propagate(s, spec, t)));
    return ScalarTrajectory(tg, std::move(snaps));
}

inline VectorTrajectory caloric_extension(const VectorField& u, const TimeGrid& tg)
{
    const VectorSpectrum s = fourier(u);
    std::vector<VectorField> snaps;
    for (double t : tg.nodes())
        snaps.push_back(t == 0.0 ? u : physical(propagate(s, PropagatorSpec::heat(), t)));
    return VectorTrajectory(tg, std::move(snaps));
}

} // namespace cnslab

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cnslab/errors.hpp"
#include "cnslab/rng.hpp"
#include "cnslab/spectral_ops.hpp"
#include "cnslab/state.hpp"

namespace cnslab {

enum class PresetKind {
    zero,
    constant,
    gaussian_blob,
    single_mode,
    taylor_green,
    random_divfree,
    random_bandlimited,
    windowed_homogeneous,
};

inline PresetKind parse_preset_kind(const std::string& s)
{
    if (s == "zero") return PresetKind::zero;
    if (s == "constant") return PresetKind::constant;
    if (s == "gaussian_blob") return PresetKind::gaussian_blob;
    if (s == "single_mode") return PresetKind::single_mode;
    if (s == "taylor_green") return PresetKind::taylor_green;
    if (s == "random_divfree") return PresetKind::random_divfree;
    if (s == "random_bandlimited") return PresetKind::random_bandlimited;
    if (s == "windowed_homogeneous") return PresetKind::windowed_homogeneous;
    throw ConfigError("unknown preset kind '" + s + "'");
}

inline std::string to_string(PresetKind k)
{
    switch (k) {
    case PresetKind::zero: return "zero";
    case PresetKind::constant: return "constant";
    case PresetKind::gaussian_blob: return "gaussian_blob";
    case PresetKind::single_mode: return "single_mode";
    case PresetKind::taylor_green: return "taylor_green";
    case PresetKind::random_divfree: return "random_divfree";
    case PresetKind::random_bandlimited: return "random_bandlimited";
    case PresetKind::windowed_homogeneous: return "windowed_homogeneous";
    }
    return "zero";
}

/// Parameters of one generated field.
///
/// amplitude: peak value for the deterministic kinds, root-mean-square value
///            (over the box) for the random kinds
/// mode:      lattice mode for single_mode; mode[0] is the wavenumber multiple for taylor_green
/// width:     Gaussian standard deviation (0 selects L/10)
/// band:      random kinds use lattice modes with max |m_i| <= band
/// degree:    windowed_homogeneous profile is homogeneous of degree -degree
struct DataPreset {
    PresetKind kind = PresetKind::zero;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
    std::array<int, 3> mode{1, 0, 0};
    double width = 0.0;
    int band = 4;
    int degree = 0;
};

namespace detail {

inline double wrapped_offset(double x, double centre, double L)
{
    double d = x - centre;
    d -= L * std::round(d / L);
    return d;
}

inline std::array<double, 3> minimum_image(const Grid& g, std::size_t flat)
{
    const auto x = g.coordinate(flat);
    const double centre = 0.5 * g.box_length();
    std::array<double, 3> d{0.0, 0.0, 0.0};
    for (int j = 0; j < g.dim(); ++j)
        d[j] = wrapped_offset(x[j], centre, g.box_length());
    return d;
}

inline double norm3(const std::array<double, 3>& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

// 1 for r < 0.25 L, 0 for r > 0.45 L, smooth in between.
inline double homogeneous_window(double r, double L)
{
    const double x = (r - 0.25 * L) / (0.2 * L);
    if (x <= 0.0)
        return 1.0;
    if (x >= 1.0)
        return 0.0;
    const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return b / (a + b);
}

inline void require_band(const Grid& g, int band)
{
    if (band < 1 || 2 * band >= g.points_per_axis())
        throw ConfigError("random preset band " + std::to_string(band) + " not resolved below Nyquist on M = " +
                          std::to_string(g.points_per_axis()));
}

// Random real band-limited field; coefficients are drawn in a fixed lattice order,
// so the same seed gives the same continuum function on every resolution.
inline Spectrum random_band_spectrum(const Grid& g, int band, Rng& rng)
{
    require_band(g, band);
    Spectrum s(g);
    const int dim = g.dim();
    const int m3_lo = dim == 3 ? -band : 0, m3_hi = dim == 3 ? band : 0;
    for (int a = -band; a <= band; ++a)
        for (int b = -band; b <= band; ++b)
            for (int c = m3_lo; c <= m3_hi; ++c) {
                const std::array<int, 3> m{a, b, c};
                // one representative of each +-m pair: first non-zero index positive
                int first = 0;
                for (int d = 0; d < dim && first == 0; ++d)
                    first = m[d];
                if (first <= 0)
                    continue;
                const double re = rng.normal(), im = rng.normal();
                const Complex coeff(0.5 * re, -0.5 * im);
                s.coeffs[g.ravel(m)] = coeff;
                s.coeffs[g.ravel({-a, -b, -c})] = std::conj(coeff);
            }
    return s;
}

inline double spectrum_rms(const Spectrum& s)
{
    double e = 0.0;
    for (const auto& c : s.coeffs)
        e += std::norm(c);
    return std::sqrt(e);
}

inline std::array<double, 3> mode_wavevector(const Grid& g, const std::array<int, 3>& m)
{
    std::array<double, 3> k{0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim(); ++d)
        k[d] = 2.0 * std::numbers::pi * m[d] / g.box_length();
    return k;
}

} // namespace detail

/// Scalar field for a preset. taylor_green and random_divfree are vector-only.
inline ScalarField generate_scalar(const DataPreset& p, const Grid& g)
{
    if (!std::isfinite(p.amplitude))
        throw ConfigError("preset amplitude must be finite");
    const double L = g.box_length();
    switch (p.kind) {
    case PresetKind::zero:
        return ScalarField(g, 0.0);
    case PresetKind::constant:
        return ScalarField(g, p.amplitude);
    case PresetKind::gaussian_blob: {
        const double w = p.width > 0.0 ? p.width : L / 10.0;
        if (p.amplitude == 0.0)
            return ScalarField(g, 0.0);
        std::vector<double> v(g.size(), 0.0);
        const int dim = g.dim();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.coordinate(i);
            // periodic image sum; images beyond +-2 boxes are below double precision for w <= L/4
            double sum = 0.0;
            for (int a = -2; a <= 2; ++a)
                for (int b = -2; b <= 2; ++b)
                    for (int c = (dim == 3 ? -2 : 0); c <= (dim == 3 ? 2 : 0); ++c) {
                        const double dx = x[0] - 0.5 * L + a * L;
                        const double dy = x[1] - 0.5 * L + b * L;
                        const double dz = dim == 3 ? x[2] - 0.5 * L + c * L : 0.0;
                        sum += std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * w * w));
                    }
            v[i] = p.amplitude * sum;
        }
        return ScalarField(g, std::move(v));
    }
    case PresetKind::single_mode: {
        const auto k = detail::mode_wavevector(g, p.mode);
        return ScalarField::sample(g, [&](const std::array<double, 3>& x) {
            return p.amplitude * std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
        });
    }
    case PresetKind::random_bandlimited: {
        Rng rng(p.seed);
        Spectrum s = detail::random_band_spectrum(g, p.band, rng);
        const double rms = detail::spectrum_rms(s);
        s *= (rms > 0.0 ? p.amplitude / rms : 0.0);
        return physical(s);
    }
    case PresetKind::windowed_homogeneous: {
        if (p.degree < 0 || p.degree > 2)
            throw ConfigError("windowed_homogeneous degree must be 0, 1 or 2");
        const double eps = 2.0 * g.spacing();
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto d = detail::minimum_image(g, i);
            const double r = detail::norm3(d);
            const double re = std::sqrt(r * r + eps * eps);
            // degree 0 uses the angular profile x_1/|x|, otherwise the radial power
            const double prof = p.degree == 0 ? d[0] / re : std::pow(re, -p.degree);
            v[i] = p.amplitude * prof * detail::homogeneous_window(r, L);
        }
        return ScalarField(g, std::move(v));
    }
    case PresetKind::taylor_green:
    case PresetKind::random_divfree:
        throw ConfigError("preset '" + to_string(p.kind) + "' is vector-valued");
    }
    throw ConfigError("unhandled preset");
}

/// Vector field for a preset. With `divergence_free`, kinds that are not
/// solenoidal by construction are Leray-projected; gaussian_blob is rejected.
inline VectorField generate_vector(const DataPreset& p, const Grid& g, bool divergence_free)
{
    if (!std::isfinite(p.amplitude))
        throw ConfigError("preset amplitude must be finite");
    const int dim = g.dim();
    std::vector<ScalarField> comp;
    switch (p.kind) {
    case PresetKind::zero:
        return VectorField(g);
    case PresetKind::constant:
        comp.push_back(ScalarField(g, p.amplitude));
        for (int j = 1; j < dim; ++j)
            comp.push_back(ScalarField(g, 0.0));
        return VectorField(g, std::move(comp));
    case PresetKind::gaussian_blob: {
        if (divergence_free)
            throw ConfigError("gaussian_blob is not divergence-free; use it for scalar data or forcing");
        // gradient of the blob: a potential force
        return gradient(generate_scalar(p, g));
    }
    case PresetKind::single_mode: {
        const auto k = detail::mode_wavevector(g, p.mode);
        std::array<double, 3> a{0.0, 0.0, 0.0};
        const double kn = detail::norm3(k);
        if (kn == 0.0)
            throw ConfigError("single_mode vector preset needs a non-zero mode");
        if (dim == 2) {
            a = {-k[1] / kn, k[0] / kn, 0.0};
        } else {
            // k x e, with e the axis least aligned with k
            std::array<double, 3> e{0.0, 0.0, 0.0};
            int axis = 0;
            for (int d = 1; d < 3; ++d)
                if (std::abs(k[d]) < std::abs(k[axis]))
                    axis = d;
            e[axis] = 1.0;
            a = {k[1] * e[2] - k[2] * e[1], k[2] * e[0] - k[0] * e[2], k[0] * e[1] - k[1] * e[0]};
            const double an = detail::norm3(a);
            for (double& x : a)
                x /= an;
        }
        for (int j = 0; j < dim; ++j)
            comp.push_back(ScalarField::sample(g, [&](const std::array<double, 3>& x) {
                return p.amplitude * a[j] * std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            }));
        return VectorField(g, std::move(comp));
    }
    case PresetKind::taylor_green: {
        const double k = 2.0 * std::numbers::pi * std::max(1, p.mode[0]) / g.box_length();
        const double A = p.amplitude;
        comp.push_back(ScalarField::sample(g, [&](const std::array<double, 3>& x) {
            return A * std::sin(k * x[0]) * std::cos(k * x[1]) * (dim == 3 ? std::cos(k * x[2]) : 1.0);
        }));
        comp.push_back(ScalarField::sample(g, [&](const std::array<double, 3>& x) {
            return -A * std::cos(k * x[0]) * std::sin(k * x[1]) * (dim == 3 ? std::cos(k * x[2]) : 1.0);
        }));
        if (dim == 3)
            comp.push_back(ScalarField(g, 0.0));
        return VectorField(g, std::move(comp));
    }
    case PresetKind::random_bandlimited:
    case PresetKind::random_divfree: {
        Rng rng(p.seed);
        VectorSpectrum s;
        for (int j = 0; j < dim; ++j)
            s.push_back(detail::random_band_spectrum(g, p.band, rng));
        if (p.kind == PresetKind::random_divfree || divergence_free)
            s = leray_project(s);
        double e = 0.0;
        for (const auto& c : s)
            e += std::pow(detail::spectrum_rms(c), 2);
        const double scale = e > 0.0 ? p.amplitude / std::sqrt(e) : 0.0;
        for (auto& c : s)
            c *= scale;
        return physical(s);
    }
    case PresetKind::windowed_homogeneous: {
        if (p.degree < 0 || p.degree > 2)
            throw ConfigError("windowed_homogeneous degree must be 0, 1 or 2");
        const double eps = 2.0 * g.spacing();
        const double L = g.box_length();
        std::vector<std::vector<double>> v(dim, std::vector<double>(g.size()));
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto d = detail::minimum_image(g, i);
            const double r = detail::norm3(d);
            const double re = std::sqrt(r * r + eps * eps);
            const double w = p.amplitude * std::pow(re, -p.degree - 1) * detail::homogeneous_window(r, L);
            for (int j = 0; j < dim; ++j)
                v[j][i] = w * d[j];
        }
        for (int j = 0; j < dim; ++j)
            comp.emplace_back(g, std::move(v[j]));
        VectorField out(g, std::move(comp));
        return divergence_free ? leray_project(out) : out;
    }
    }
    throw ConfigError("unhandled preset");
}

/// Presets for every component of a run; v is present only for the double-chemotaxis system.
struct InitialDataSpec {
    DataPreset c;
    DataPreset n;
    DataPreset u;
    std::optional<DataPreset> v;
};

inline SolutionState generate_initial_data(const InitialDataSpec& spec, const Grid& g)
{
    SolutionState s{generate_scalar(spec.c, g), generate_scalar(spec.n, g), generate_vector(spec.u, g, true), {}};
    if (spec.v)
        s.v = generate_scalar(*spec.v, g);
    return s;
}

} // namespace cnslab

#include <gtest/gtest.h>

#include "support.hpp"

using namespace cnslab;
using namespace testing_support;

namespace {

ScalarField sample(const Grid& g, auto fn) { return ScalarField::sample(g, fn); }

} // namespace

TEST(Grid, BasicArithmetic)
{
    const Grid g = make_grid(2, two_pi, 64);
    EXPECT_DOUBLE_EQ(g.spacing(), two_pi / 64);
    EXPECT_EQ(make_grid(3, 1.0, 16).size(), 4096u);
    EXPECT_EQ(g.mode_index(31), 31);
    EXPECT_EQ(g.mode_index(32), -32);
}

TEST(Grid, RejectsBadShapes)
{
    try {
        make_grid(2, two_pi, 7);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("odd resolution"), std::string::npos);
    }
    EXPECT_THROW(make_grid(2, two_pi, 6), std::invalid_argument);
    EXPECT_THROW(make_grid(4, two_pi, 16), std::invalid_argument);
    EXPECT_THROW(make_grid(2, -1.0, 16), std::invalid_argument);
}

TEST(Grid, RavelRoundTrip)
{
    const Grid g = make_grid(3, 1.0, 8);
    for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_EQ(g.ravel(g.unravel(i)), i);
}

TEST(Fields, RejectNonFinite)
{
    const Grid g = make_grid(2, two_pi, 8);
    std::vector<double> v(g.size(), 0.0);
    v[3] = std::nan("");
    EXPECT_THROW(ScalarField(g, v), NumericalError);
}

TEST(Fft, RoundTripAndRealPathAgree)
{
    for (int dim : {2, 3}) {
        const Grid g = make_grid(dim, two_pi, dim == 2 ? 32 : 16);
        const ScalarField f = random_scalar(g, 11, 5);
        const ScalarField back = physical(fourier(f));
        EXPECT_LE((back - f).l2_norm(), 1e-12 * f.l2_norm());

        std::vector<Complex> cf(f.values().begin(), f.values().end());
        const auto full = fft_forward(g, cf);
        const auto real = fft_forward_real(g, f.values());
        double d = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            d = std::max(d, std::abs(full[i] - real[i]));
        EXPECT_LE(d, 1e-14);
    }
}

TEST(Fft, NyquistModeSurvivesRoundTrip)
{
    const Grid g = make_grid(2, two_pi, 8);
    const ScalarField f = sample(g, [](const auto& x) { return std::cos(4.0 * x[0]); });
    EXPECT_LE(max_abs_diff(physical(fourier(f)), f), 1e-14);
}

TEST(SpectralOps, GradientOfSine)
{
    const Grid g = make_grid(2, two_pi, 64);
    const ScalarField f = sample(g, [](const auto& x) { return std::sin(x[0]); });
    const VectorField gf = gradient(f);
    EXPECT_LE(max_abs_diff(gf[0], sample(g, [](const auto& x) { return std::cos(x[0]); })), 1e-12);
    EXPECT_LE(gf[1].sup_norm(), 1e-12);
    EXPECT_LE(gradient(ScalarField(g, 3.0)).component_sup_norm(), 1e-14);
}

TEST(SpectralOps, GradientMatchesFiniteDifferences)
{
    // centred differences on the band-limited field: error O(h^2), so doubling M cuts it ~4x
    std::vector<double> err;
    for (int M : {32, 64}) {
        const Grid g = make_grid(2, two_pi, M);
        const ScalarField f = random_scalar(g, 5, 4);
        const VectorField gf = gradient(f);
        double e = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto idx = g.unravel(i);
            auto ip = idx, im = idx;
            ip[0] += 1;
            im[0] -= 1;
            const double fd = (f[g.ravel(ip)] - f[g.ravel(im)]) / (2.0 * g.spacing());
            e = std::max(e, std::abs(fd - gf[0][i]));
        }
        err.push_back(e);
    }
    EXPECT_GT(err[0] / err[1], 3.5);
}

TEST(SpectralOps, DivergenceIdentities)
{
    const Grid g = make_grid(2, two_pi, 32);
    const ScalarField f = random_scalar(g, 3, 5);
    EXPECT_LE(max_abs_diff(divergence(gradient(f)), laplacian(f)), 1e-11);
    const ScalarField psi = random_scalar(g, 4, 5);
    const VectorField gp = gradient(psi);
    const VectorField stream(g, {gp[1] * -1.0, gp[0]});
    EXPECT_LE(divergence(stream).sup_norm(), 1e-12);
}

TEST(SpectralOps, GradientDivergenceAdjoint)
{
    const Grid g = make_grid(2, two_pi, 32);
    const ScalarField f = random_scalar(g, 21, 6);
    const VectorField v = random_vector(g, 22, 6);
    const VectorField gf = gradient(f);
    const ScalarField dv = divergence(v);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        lhs += gf[0][i] * v[0][i] + gf[1][i] * v[1][i];
        rhs -= f[i] * dv[i];
    }
    EXPECT_NEAR(lhs * g.cell_volume(), rhs * g.cell_volume(), 1e-10);
}

TEST(Leray, ProjectionProperties)
{
    for (int dim : {2, 3}) {
        const Grid g = make_grid(dim, two_pi, dim == 2 ? 32 : 16);
        const VectorField v = random_vector(g, 7, 4);
        const VectorField pv = leray_project(v);
        EXPECT_LE(divergence(pv).sup_norm(), 1e-12 * v.sup_norm());
        EXPECT_LE(max_abs_diff(leray_project(pv), pv), 1e-12 * v.sup_norm());
        const ScalarField p = random_scalar(g, 8, 4);
        EXPECT_LE(leray_project(gradient(p)).component_sup_norm(), 1e-12 * gradient(p).sup_norm());
    }
    const Grid g = make_grid(2, two_pi, 32);
    const VectorField shear(g, {sample(g, [](const auto& x) { return std::sin(x[1]); }), ScalarField(g)});
    EXPECT_LE(max_abs_diff(leray_project(shear), shear), 1e-14);
    EXPECT_LE(divergence(shear).sup_norm(), 1e-14);
}

TEST(Leray, ZeroModePassesThrough)
{
    const Grid g = make_grid(2, two_pi, 16);
    const VectorField c(g, {ScalarField(g, 1.5), ScalarField(g, -0.5)});
    EXPECT_LE(max_abs_diff(leray_project(c), c), 1e-15);
}

TEST(Riesz, SingleModeAndSumOfSquares)
{
    const Grid g = make_grid(2, two_pi, 32);
    const ScalarField f = sample(g, [](const auto& x) { return std::cos(x[0]); });
    EXPECT_LE(max_abs_diff(riesz_transform(f, 0), sample(g, [](const auto& x) { return -std::sin(x[0]); })), 1e-13);

    ScalarField h = random_scalar(g, 9, 5);
    h -= ScalarField(g, h.mean());
    const ScalarField rr = riesz_transform(riesz_transform(h, 0), 0) + riesz_transform(riesz_transform(h, 1), 1);
    EXPECT_LE(max_abs_diff(rr, h * -1.0), 1e-12);
    for (int j = 0; j < 2; ++j)
        EXPECT_LE(riesz_transform(h, j).l2_norm(), h.l2_norm() * (1.0 + 1e-12));
}

TEST(Propagator, SingleModeDecay)
{
    const Grid g = make_grid(2, two_pi, 64);
    const ScalarField f = sample(g, [](const auto& x) { return std::cos(3.0 * x[0] + 2.0 * x[1]); });
    for (double t : {0.0, 0.01, 0.3, 1.0})
        EXPECT_LE(max_abs_diff(propagate(f, PropagatorSpec::heat(), t), f * std::exp(-13.0 * t)), 1e-12);
    const ScalarField c(g, 2.5);
    EXPECT_LE(max_abs_diff(propagate(c, PropagatorSpec::heat(), 5.0), c), 1e-15);
    EXPECT_THROW(propagate(f, PropagatorSpec::heat(), -1.0), std::invalid_argument);
    EXPECT_THROW(PropagatorSpec::damped(-1.0), std::invalid_argument);
}

TEST(Propagator, DampedAndGradientKinds)
{
    const Grid g = make_grid(2, two_pi, 32);
    const ScalarField f = random_scalar(g, 13, 4);
    const double t = 0.2, kappa = 0.7;
    EXPECT_LE(max_abs_diff(propagate(f, PropagatorSpec::damped(kappa), t),
                           propagate(f, PropagatorSpec::heat(), t) * std::exp(-kappa * t)),
              1e-13);
    EXPECT_LE(max_abs_diff(propagate(f, PropagatorSpec::heat_gradient(1), t),
                           gradient(propagate(f, PropagatorSpec::heat(), t))[1]),
              1e-12);
}

TEST(Propagator, SemigroupLaw)
{
    const Grid g = make_grid(3, two_pi, 16);
    const ScalarField f = random_scalar(g, 17, 5);
    for (auto [s, t] : std::vector<std::pair<double, double>>{{0.1, 0.2}, {0.5, 0.5}, {1.0, 0.0}, {0.03, 0.9}}) {
        const ScalarField one = propagate(f, PropagatorSpec::heat(), s + t);
        const ScalarField two = propagate(propagate(f, PropagatorSpec::heat(), s), PropagatorSpec::heat(), t);
        EXPECT_LE(max_abs_diff(one, two), 1e-12 * f.sup_norm());
    }
}

TEST(Propagator, MeanPreservedAndMaximumPrinciple)
{
    const Grid g = make_grid(2, two_pi, 32);
    const ScalarField f = sample(g, [](const auto& x) { return (1.0 + std::cos(x[0])) * (1.0 + std::sin(2.0 * x[1])); });
    for (double t : {0.01, 0.1, 1.0}) {
        const ScalarField p = propagate(f, PropagatorSpec::heat(), t);
        EXPECT_NEAR(p.mean(), f.mean(), 1e-14);
        EXPECT_GE(p.min(), -1e-9 * f.sup_norm());
    }
}

TEST(Propagator, PeriodizedGaussianMatchesImageSum)
{
    // e^{t Lap} of a narrow periodized Gaussian is the periodized Gaussian of variance s^2 + 2t
    const Grid g = make_grid(2, two_pi, 64);
    const double s2 = 0.2, t = 0.1;
    auto periodized = [&](double var) {
        return sample(g, [&, var](const auto& x) {
            double acc = 0.0;
            for (int a = -4; a <= 4; ++a)
                for (int b = -4; b <= 4; ++b) {
                    const double dx = x[0] - std::numbers::pi + a * two_pi, dy = x[1] - std::numbers::pi + b * two_pi;
                    acc += std::exp(-(dx * dx + dy * dy) / (2.0 * var)) / (2.0 * std::numbers::pi * var);
                }
            return acc;
        });
    };
    const ScalarField out = propagate(periodized(s2), PropagatorSpec::heat(), t);
    EXPECT_LE(max_abs_diff(out, periodized(s2 + 2.0 * t)), 1e-8);
}

TEST(Propagator, OseenCommutesWithLeray)
{
    const Grid g = make_grid(2, two_pi, 32);
    const VectorField v = random_vector(g, 23, 4);
    const double t = 0.15;
    const VectorField a = oseen_propagate(v, t);
    EXPECT_LE(max_abs_diff(a, leray_project(propagate(v, PropagatorSpec::heat(), t))), 1e-12);
    EXPECT_LE(max_abs_diff(a, propagate(leray_project(v), PropagatorSpec::heat(), t)), 1e-12);
    EXPECT_LE(oseen_propagate(gradient(random_scalar(g, 24)), 0.3).component_sup_norm(), 1e-12);
    EXPECT_LE(max_abs_diff(oseen_propagate(v, 0.0), leray_project(v)), 1e-14);
}

TEST(Dealias, TwoThirdsRule)
{
    const Grid g = make_grid(2, two_pi, 12);
    EXPECT_TRUE(dealias_keeps(g, g.ravel({3, 3, 0})));
    EXPECT_FALSE(dealias_keeps(g, g.ravel({4, 0, 0})));
    EXPECT_FALSE(dealias_keeps(g, g.ravel({-4, 0, 0})));
    const ScalarField low = sample(g, [](const auto& x) { return std::cos(x[0]) * std::sin(x[1]); });
    const ScalarField prod = physical(dealiased_product(low, low));
    EXPECT_LE(max_abs_diff(prod, pointwise_product(low, low)), 1e-14);
}

TEST(TimeGrid, GeometricUniformLayout)
{
    const TimeGrid tg = TimeGrid::geometric_uniform(1.0, 10);
    EXPECT_EQ(tg[0], 0.0);
    EXPECT_DOUBLE_EQ(tg.horizon(), 1.0);
    EXPECT_LE(tg[1], 0.01 + 1e-15);
    for (std::size_t i = 1; i < tg.size(); ++i)
        EXPECT_GT(tg[i], tg[i - 1]);
    EXPECT_THROW(TimeGrid({0.0, 0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(TimeGrid({0.1, 0.5}), std::invalid_argument);
}

TEST(TimeGrid, IntegrationWeightsExactForCubics)
{
    const TimeGrid tg = TimeGrid::geometric_uniform(2.0, 16);
    for (double upper : {2.0, 1.3, 0.05}) {
        const auto w = integration_weights(tg, upper);
        double q = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            q += w[i] * (1.0 + tg[i] - 2.0 * tg[i] * tg[i]);
        EXPECT_NEAR(q, upper + upper * upper / 2.0 - 2.0 * upper * upper * upper / 3.0, 1e-12);
    }
}

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "frozen_constants.hpp"
#include "support.hpp"

using namespace cnslab;
using namespace testing_support;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double min_image_dist2(const Grid& g, std::size_t a, std::size_t b)
{
    const auto ia = g.unravel(a), ib = g.unravel(b);
    const int m = g.points_per_axis();
    double d2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
        int k = std::abs(ia[d] - ib[d]);
        k = std::min(k, m - k);
        d2 += double(k) * k * g.spacing() * g.spacing();
    }
    return d2;
}

// Brute-force sum over every grid point within distance r of the centre.
template <class Fn>
double ball_sum(const Grid& g, std::size_t center, double r, Fn&& value)
{
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (min_image_dist2(g, center, i) < r * r * (1.0 - 1e-12))
            s += value(i);
    return s * g.cell_volume();
}

ScalarField sin_x1(const Grid& g)
{
    return ScalarField::sample(g, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

// ---- Morrey ----

TEST(Morrey, ZeroField)
{
    Grid g(2, two_pi, 32);
    EXPECT_EQ(morrey_norm(ScalarField(g), 2.0, 0.0, BallFamily::dyadic(g)).value, 0.0);
}

TEST(Morrey, ConstantAgainstBallVolume)
{
    Grid g(2, two_pi, 64);
    const auto balls = BallFamily::dyadic(g);
    const double c = -2.5;
    for (double p : {1.0, 2.0, 3.0}) {
        const double v = morrey_norm(ScalarField(g, c), p, 0.0, balls).value;
        EXPECT_NEAR(v, std::abs(c) * std::pow(balls.ball_quadrature_volume(0), 1.0 / p), 1e-12);
        EXPECT_LT(rel(v, std::abs(c) * std::pow(ball_volume(2, two_pi / 4), 1.0 / p)), 0.02) << p;
    }
}

TEST(Morrey, HalfBoxIndicatorMatchesExhaustiveScan)
{
    Grid g(2, two_pi, 16);
    const auto f = ScalarField::sample(g, [](const std::array<double, 3>& x) { return x[0] < std::numbers::pi ? 1.0 : 0.0; });
    const auto balls = BallFamily::dyadic(g, 1);
    for (double mu : {0.0, 1.0}) {
        double best = 0.0;
        for (double r : balls.radii())
            for (std::size_t c = 0; c < g.size(); ++c)
                best = std::max(best, std::pow(r, -mu / 2.0) * std::sqrt(ball_sum(g, c, r, [&](std::size_t i) { return f[i] * f[i]; })));
        EXPECT_NEAR(morrey_norm(f, 2.0, mu, balls).value, best, 1e-12 * best) << mu;
    }
}

TEST(Morrey, RejectsBadInput)
{
    Grid g(2, two_pi, 16);
    const ScalarField f(g, 1.0);
    EXPECT_THROW(morrey_norm(f, 2.0, 0.0, BallFamily{}), std::invalid_argument);
    EXPECT_THROW(morrey_norm(f, 0.5, 0.0, BallFamily::dyadic(g)), std::invalid_argument);
    EXPECT_THROW(morrey_norm(f, 2.0, 2.0, BallFamily::dyadic(g)), std::invalid_argument);
    EXPECT_THROW(BallFamily::dyadic(g, 0), std::invalid_argument);
}

TEST(BallFamily, RadiiResolveFourCellsAndCentresCover)
{
    Grid g(3, two_pi, 32);
    const auto balls = BallFamily::dyadic(g);
    ASSERT_FALSE(balls.empty());
    EXPECT_DOUBLE_EQ(balls.radii().front(), two_pi / 4);
    for (double r : balls.radii())
        EXPECT_GE(r, 4.0 * g.spacing() * (1 - 1e-12));
    // centre spacing 4h never exceeds the smallest radius
    EXPECT_LE(balls.center_stride() * g.spacing(), balls.radii().back() * (1 + 1e-12));
    EXPECT_EQ(balls.centers().size(), 8u * 8u * 8u);
}

// ---- Campanato ----

TEST(Campanato, ConstantHasNoOscillation)
{
    Grid g(2, two_pi, 32);
    EXPECT_LT(campanato_seminorm(ScalarField(g, 3.7), 2.0, 1.0, BallFamily::dyadic(g)).value, 1e-12);
}

TEST(Campanato, ShiftByConstant)
{
    Grid g(2, two_pi, 32);
    const auto balls = BallFamily::dyadic(g);
    const auto f = random_scalar(g, 11);
    for (double p : {1.0, 2.0})
        for (double lambda : {0.0, 1.5, 2.5}) {
            const double a = campanato_seminorm(f, p, lambda, balls).value;
            const double b = campanato_seminorm(f + ScalarField(g, 5.0), p, lambda, balls).value;
            EXPECT_LT(rel(b, a), 1e-12) << p << " " << lambda;
        }
}

TEST(Campanato, SelfConvergenceOfSine)
{
    const auto at = [](int M) {
        Grid g(2, two_pi, M);
        return campanato_seminorm(sin_x1(g), 2.0, 2.0, BallFamily::dyadic(g)).value;
    };
    EXPECT_LT(rel(at(32), at(64)), 0.05);
}

TEST(Campanato, RejectsBadIndex)
{
    Grid g(2, two_pi, 16);
    EXPECT_THROW(campanato_seminorm(ScalarField(g), 2.0, 4.0, BallFamily::dyadic(g)), std::invalid_argument);
    EXPECT_THROW(campanato_seminorm(ScalarField(g), 2.0, 1.0, BallFamily{}), std::invalid_argument);
}

// ---- caloric Carleson functionals ----

TEST(Carleson, ZeroField)
{
    Grid g(2, two_pi, 16);
    EXPECT_EQ(carleson_caloric_norm(ScalarField(g), 2.0, BallFamily::dyadic(g)).value, 0.0);
    EXPECT_EQ(carleson_caloric_norm(ScalarField(g), 0.0, BallFamily::dyadic(g)).value, 0.0);
}

TEST(Carleson, DerivativeOfSineMatchesDenseScan)
{
    Grid g(2, two_pi, 16);
    const ScalarField f = physical(partial_derivative(fourier(sin_x1(g)), 0));  // cos(x1)
    const auto balls = BallFamily::dyadic(g, 1);
    // e^{t Lap} f = e^{-t} cos(x1); time integral by a dense trapezoid sum
    auto time_integral = [](double R2) {
        const int n = 20000;
        const double h = R2 / n;
        double s = 0.5 * (1.0 + std::exp(-2.0 * R2));
        for (int i = 1; i < n; ++i)
            s += std::exp(-2.0 * i * h);
        return s * h;
    };
    for (double lambda : {2.0, 1.0, 0.0}) {
        double best = 0.0;
        for (double r : balls.radii())
            for (std::size_t c = 0; c < g.size(); ++c) {
                const double space = ball_sum(g, c, r, [&](std::size_t i) { return f[i] * f[i]; });
                best = std::max(best, std::sqrt(std::pow(ball_volume(2, r), lambda / 2 - 1) * space * time_integral(r * r)));
            }
        const double v = carleson_caloric_norm(f, lambda, balls).value;
        EXPECT_GT(v, 0.0);
        EXPECT_LT(rel(v, best), 0.02) << lambda;
    }
}

TEST(Carleson, TwoBoxRescaling)
{
    // f on [0, 2L)^2 and f_2(x) = 2^{lambda/2 + 1} f(2x) on [0, L)^2 share their samples.
    const int M = 32;
    Grid big(2, 2 * two_pi, M), small(2, two_pi, M);
    const auto f = random_scalar(big, 5);
    for (double lambda : {2.0, 1.0, -1.0}) {
        const double factor = std::pow(2.0, lambda / 2 + 1);
        const auto vals = (f * factor).values();
        const ScalarField f2(small, std::vector<double>(vals.begin(), vals.end()));
        const double a = carleson_caloric_norm(f, lambda, BallFamily::dyadic(big)).value;
        const double b = carleson_caloric_norm(f2, lambda, BallFamily::dyadic(small)).value;
        EXPECT_LT(rel(b, a), 0.05) << lambda;
    }
}

TEST(Carleson, LambdaRange)
{
    Grid g(2, two_pi, 16);
    EXPECT_THROW(carleson_caloric_norm(ScalarField(g), 2.5, BallFamily::dyadic(g)), std::invalid_argument);
    EXPECT_THROW(carleson_caloric_norm(ScalarField(g), -2.0, BallFamily::dyadic(g)), std::invalid_argument);
}

TEST(Carleson, AgreesWithBoxCheckInTwoAndThreeDimensions)
{
    for (auto [dim, M] : {std::pair{2, 32}, std::pair{3, 16}}) {
        Grid g(dim, two_pi, M);
        const auto balls = BallFamily::dyadic(g);
        const auto f = random_scalar(g, 21, 3);
        const double lambda = dim - 2.0;
        const double norm = carleson_caloric_norm(f, lambda, balls).value;
        const Spectrum spec = fourier(f);
        const auto rep = carleson_exponent_check(
            [&](double t) {
                const ScalarField e = physical(propagate(spec, PropagatorSpec::heat(), t));
                return pointwise_product(e, e);
            },
            1.0 - lambda / dim, balls);
        EXPECT_LT(rel(norm * norm, rep.sup.value), 1e-10) << dim;
    }
}

TEST(CarlesonCheck, UnitDensityBoxVolume)
{
    Grid g(2, two_pi, 64);
    const auto balls = BallFamily::dyadic(g);
    const double alpha = 0.5;
    const auto rep = carleson_exponent_check([&](double) { return ScalarField(g, 1.0); }, alpha, balls);
    for (std::size_t ri = 0; ri < balls.radii().size(); ++ri) {
        const double r = balls.radii()[ri];
        const double exact = r * r * balls.ball_quadrature_volume(ri) / std::pow(ball_volume(2, r), alpha);
        EXPECT_LT(rel(rep.per_radius_sup[ri], exact), 1e-10);
    }
    // growth like r^{2 + N(1 - alpha)}; the two largest radii have the best-resolved balls
    const double slope = std::log2(rep.per_radius_sup[0] / rep.per_radius_sup[1]);
    EXPECT_NEAR(slope, 2.0 + 2.0 * (1 - alpha), 0.05);
    EXPECT_GT(rep.radius_spread, 1.0);
}

TEST(CarlesonCheck, ZeroAndNegativeDensity)
{
    Grid g(2, two_pi, 16);
    const auto balls = BallFamily::dyadic(g);
    EXPECT_EQ(carleson_exponent_check([&](double) { return ScalarField(g); }, 1.0, balls).sup.value, 0.0);
    EXPECT_THROW(carleson_exponent_check([&](double) { return ScalarField(g, -1.0); }, 1.0, balls),
                 std::invalid_argument);
}

TEST(Carleson, ArgmaxCapFlag)
{
    Grid g(2, two_pi, 32);
    // a constant-in-x1 oscillation grows with the ball, so the sup sits on the cap
    const auto v = carleson_caloric_norm(physical(partial_derivative(fourier(sin_x1(g)), 0)), 2.0, BallFamily::dyadic(g));
    EXPECT_TRUE(v.argmax_at_cap);
    EXPECT_DOUBLE_EQ(v.argmax_radius, two_pi / 4);
}

// ---- BMO ----

TEST(Bmo, ConstantVanishes)
{
    Grid g(2, two_pi, 32);
    EXPECT_LT(bmo_caloric_seminorm(ScalarField(g, 2.0), BallFamily::dyadic(g)).value, 1e-12);
}

TEST(Bmo, SineIsResolutionStable)
{
    const auto at = [](int M) {
        Grid g(2, two_pi, M);
        return bmo_caloric_seminorm(sin_x1(g), BallFamily::dyadic(g)).value;
    };
    const double a = at(32), b = at(64);
    EXPECT_GT(a, 0.0);
    EXPECT_TRUE(std::isfinite(a));
    EXPECT_LT(rel(a, b), 0.05);
}

TEST(Bmo, BoundedBySupNormOnFreshSamples)
{
    Grid g(2, two_pi, 32);
    const auto balls = BallFamily::dyadic(g);
    for (std::uint64_t s = 1000; s < 1050; ++s) {
        const auto f = random_scalar(g, s);
        EXPECT_LE(bmo_caloric_seminorm(f, balls).value, frozen::bmo_over_sup * f.sup_norm()) << s;
    }
}

// ---- Littlewood-Paley and Besov-Morrey ----

TEST(LPBank, PartitionOfUnity)
{
    for (auto [dim, M] : {std::pair{2, 32}, std::pair{2, 64}, std::pair{3, 16}}) {
        LPBank bank(Grid(dim, two_pi, M));
        EXPECT_LT(bank.partition_of_unity_error(), 1e-10);
        EXPECT_FALSE(bank.levels().empty());
    }
}

TEST(LPBank, ProfileSupportedInAnnulus)
{
    Grid g(2, two_pi, 32);
    LPBank bank(g);
    for (std::size_t l = 0; l < bank.levels().size(); ++l) {
        const double lo = std::ldexp(1.0, bank.levels()[l] - 1), hi = std::ldexp(1.0, bank.levels()[l] + 1);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double k = std::sqrt(g.wavenumber_squared(i));
            if (k < lo || k > hi)
                EXPECT_EQ(bank.multiplier(l)[i], 0.0);
        }
    }
}

TEST(BesovMorrey, SingleModeTouchesNeighbouringLevelsOnly)
{
    Grid g(2, two_pi, 32);
    LPBank bank(g);
    const auto balls = BallFamily::dyadic(g);
    const int j0 = 2;  // |k| = 4
    const auto f = generate_scalar({PresetKind::single_mode, 1.0, 0, {4, 0, 0}}, g);
    const auto res = besov_morrey_norm(f, 0.0, 2.0, 0.0, inf, bank, balls);
    double on = 0.0;
    for (std::size_t l = 0; l < res.levels.size(); ++l) {
        if (std::abs(res.levels[l] - j0) <= 1)
            on = std::max(on, res.level_terms[l]);
        else
            EXPECT_LT(res.level_terms[l], 1e-12) << res.levels[l];
    }
    EXPECT_GT(on, 0.1);
    EXPECT_EQ(res.argmax_level, j0);
}

TEST(BesovMorrey, ZeroField)
{
    Grid g(2, two_pi, 32);
    EXPECT_EQ(besov_morrey_norm(ScalarField(g), -0.5, 2.0, 0.0, inf, LPBank(g), BallFamily::dyadic(g)).value, 0.0);
}

TEST(BesovMorrey, SquareFunctionMatchesLocalL2)
{
    // N^0_{2,0,2} against the same ball-local L^2 sup it is built from
    Grid g(2, two_pi, 32);
    LPBank bank(g);
    const auto balls = BallFamily::dyadic(g);
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const auto f = random_scalar(g, s);
        const double bm = besov_morrey_norm(f, 0.0, 2.0, 0.0, 2.0, bank, balls).value;
        const double local = morrey_norm(f, 2.0, 0.0, balls).value;
        EXPECT_GT(bm, local / 2) << s;
        EXPECT_LT(bm, local * 2) << s;
    }
}

TEST(BesovMorrey, RejectsBadSummationExponent)
{
    Grid g(2, two_pi, 16);
    EXPECT_THROW(besov_morrey_norm(ScalarField(g), 0.0, 2.0, 0.0, 0.5, LPBank(g), BallFamily::dyadic(g)),
                 std::invalid_argument);
}

// ---- symmetries shared by every ball-sup norm ----

namespace {

std::vector<double> all_norms(const ScalarField& f, const BallFamily& balls, const LPBank& bank)
{
    const auto scan = caloric_scan(f, balls);
    return {
        morrey_norm(f, 2.0, 1.0, balls).value,
        campanato_seminorm(f, 2.0, 2.0, balls).value,
        carleson_from_scan(scan, 2.0).value,
        carleson_from_scan(scan, 0.0).value,
        besov_from_scan(scan, -2.0).value,
        bmo_caloric_seminorm(f, balls).value,
        besov_morrey_norm(f, -0.5, 2.0, 0.0, inf, bank, balls).value,
    };
}

} // namespace

TEST(NormSymmetry, CyclicShiftsCommensurateWithCentres)
{
    Grid g(2, two_pi, 32);
    LPBank bank(g);
    const auto f = random_scalar(g, 3);
    for (int stride : {1, 4}) {
        const auto balls = BallFamily::dyadic(g, stride);
        const auto a = all_norms(f, balls, bank);
        const auto b = all_norms(shifted(f, {3 * stride, 5 * stride, 0}), balls, bank);
        for (std::size_t i = 0; i < a.size(); ++i)
            EXPECT_LT(rel(b[i], a[i]), 1e-10) << "stride " << stride << " norm " << i;
    }
}

TEST(NormSymmetry, ZeroIffZero)
{
    Grid g(2, two_pi, 32);
    LPBank bank(g);
    const auto balls = BallFamily::dyadic(g);
    for (double v : all_norms(ScalarField(g), balls, bank))
        EXPECT_EQ(v, 0.0);
    for (double v : all_norms(random_scalar(g, 9), balls, bank))
        EXPECT_GT(v, 0.0);
}

// ---- path norms ----

TEST(PathNorms, ConstantTrajectoryX1)
{
    Grid g(2, two_pi, 32);
    const TimeGrid tg = TimeGrid::uniform(1.0, 8);
    const ScalarTrajectory c(tg, std::vector<ScalarField>(tg.size(), ScalarField(g, -3.0)));
    const auto x = path_norm_X1(c, 1.0, BallFamily::dyadic(g));
    EXPECT_NEAR(x.total, 3.0, 1e-12);
    EXPECT_LT(x.weighted_term + x.integral_term, 1e-12);
}

TEST(PathNorms, SmoothingWeightOfHeatFlow)
{
    Grid g(2, two_pi, 32);
    const TimeGrid tg = TimeGrid::uniform(1.0, 16);
    const auto c = caloric_extension(sin_x1(g), tg);
    const auto x = path_norm_X1(c, 1.0, BallFamily::dyadic(g));
    // sup_t t^{1/2} e^{-t} = (2e)^{-1/2}, attained at the node t = 1/2
    const double peak = 1.0 / std::sqrt(2.0 * std::numbers::e);
    EXPECT_NEAR(x.weighted_term, peak, 1e-10);
    EXPECT_LE(x.sup_term, 1.0 + 1e-12);
    EXPECT_TRUE(std::isfinite(x.total));
}

TEST(PathNorms, MonotoneInHorizon)
{
    Grid g(2, two_pi, 32);
    const auto balls = BallFamily::dyadic(g);
    const TimeGrid tg = TimeGrid::geometric_uniform(2.0, 16);
    const auto c = caloric_extension(random_scalar(g, 4), tg);
    const auto u = caloric_extension(random_divfree(g, 5), tg);
    EXPECT_LE(path_norm_X1(c, 1.0, balls).total, path_norm_X1(c, 2.0, balls).total);
    EXPECT_LE(path_norm_X2(c, 1.0, balls).total, path_norm_X2(c, 2.0, balls).total);
    EXPECT_LE(path_norm_X3(u, 1.0, balls).total, path_norm_X3(u, 2.0, balls).total);
    Grid g3(3, two_pi, 16);
    const auto c3 = caloric_extension(random_scalar(g3, 4, 3), tg);
    const auto b3 = BallFamily::dyadic(g3);
    EXPECT_LE(path_norm_X2(c3, 1.0, b3).total, path_norm_X2(c3, 2.0, b3).total);
}

TEST(PathNorms, ZeroTrajectories)
{
    Grid g(2, two_pi, 16);
    const auto balls = BallFamily::dyadic(g);
    const TimeGrid tg = TimeGrid::uniform(1.0, 4);
    EXPECT_EQ(path_norm_X2(caloric_extension(ScalarField(g), tg), 1.0, balls).total, 0.0);
    EXPECT_EQ(path_norm_X3(caloric_extension(VectorField(g), tg), 1.0, balls).total, 0.0);
}

TEST(PathNorms, HighModeDecayEnvelope)
{
    Grid g(2, two_pi, 32);
    const TimeGrid tg = TimeGrid::geometric_uniform(1.0, 64);
    const auto n = caloric_extension(generate_scalar({PresetKind::single_mode, 1.0, 0, {8, 0, 0}}, g), tg);
    const auto x = path_norm_X2(n, 1.0, BallFamily::dyadic(g));
    // sup_t t e^{-64 t} = 1 / (64 e)
    EXPECT_LE(x.sup_term, 1.0 / (64.0 * std::numbers::e) * (1 + 1e-12));
    EXPECT_GT(x.sup_term, 0.5 / (64.0 * std::numbers::e));
}

TEST(PathNorms, TwoDimensionalL2TermParseval)
{
    Grid g(2, two_pi, 32);
    const double T = 1.0;
    const TimeGrid tg = TimeGrid::geometric_uniform(T, 256);
    // n0 = sum a_m cos(m.x) over distinct, non-opposite modes
    const std::vector<std::pair<std::array<int, 3>, double>> modes{{{1, 0, 0}, 0.7}, {{1, 2, 0}, -0.4}, {{0, 3, 0}, 0.25}};
    ScalarField n0(g);
    double expected = 0.0;
    for (const auto& [m, a] : modes) {
        n0 += generate_scalar({PresetKind::single_mode, a, 0, m}, g);
        const double k2 = double(m[0] * m[0] + m[1] * m[1]);
        expected += a * a * g.volume() / 2.0 * (1.0 - std::exp(-2.0 * k2 * T)) / (2.0 * k2);
    }
    const auto x = path_norm_X2(caloric_extension(n0, tg), T, BallFamily::dyadic(g));
    EXPECT_LT(rel(x.integral_term * x.integral_term, expected), 1e-8);
}

TEST(PathNorms, X3CarlesonTermMatchesDirectScan)
{
    Grid g(2, two_pi, 32);
    const double T = 2.5;  // covers (L/4)^2
    const TimeGrid tg = TimeGrid::geometric_uniform(T, 128);
    const auto u0 = generate_vector({PresetKind::single_mode, 1.0, 0, {0, 1, 0}}, g, true);
    const auto balls = BallFamily::dyadic(g);
    const auto x = path_norm_X3(caloric_extension(u0, tg), T, balls);
    // |u(t)|^2 = |u0|^2 e^{-2t}
    const ScalarField m2 = dot(u0, u0);
    double best = 0.0;
    for (double r : balls.radii())
        for (std::size_t c : balls.centers()) {
            const double space = ball_sum(g, c, r, [&](std::size_t i) { return m2[i]; });
            best = std::max(best, std::sqrt(space * (1 - std::exp(-2 * r * r)) / 2 / ball_volume(2, r)));
        }
    EXPECT_LT(rel(x.integral_term, best), 1e-6);
    EXPECT_LE(x.sup_term, 1.0 / std::sqrt(2.0 * std::numbers::e) * (1 + 1e-12));
}

TEST(PathNorms, HorizonOutsideTrajectory)
{
    Grid g(2, two_pi, 16);
    const auto c = caloric_extension(ScalarField(g), TimeGrid::uniform(1.0, 4));
    EXPECT_THROW(path_norm_X1(c, 2.0, BallFamily::dyadic(g)), std::invalid_argument);
    EXPECT_THROW(path_norm_X1(c, 0.0, BallFamily::dyadic(g)), std::invalid_argument);
}

// ---- fractional integral and maximal function ----

namespace {

Sampled1D uniform_samples(int K, double S, const std::function<double(double)>& h)
{
    std::vector<double> s(K + 1), v(K + 1);
    for (int k = 0; k <= K; ++k) {
        s[k] = S * k / K;
        v[k] = h(s[k]);
    }
    return Sampled1D(s, v);
}

} // namespace

TEST(FractionalE, ConstantGivesBetaFunction)
{
    const auto E = fractional_integral_E(uniform_samples(50, 3.0, [](double) { return 1.0; }), 0.5, 0.5);
    for (std::size_t i = 1; i < E.size(); ++i)
        EXPECT_NEAR(E.values[i], std::numbers::pi, 1e-12);
    EXPECT_EQ(E.values[0], 0.0);
}

TEST(FractionalE, GeneralExponentsAndLinearData)
{
    const double a = 0.3, b = 0.7;
    const auto one = fractional_integral_E(uniform_samples(20, 2.0, [](double) { return 1.0; }), a, b);
    const auto lin = fractional_integral_E(uniform_samples(20, 2.0, [](double s) { return s; }), a, b);
    for (std::size_t i = 1; i < one.size(); ++i) {
        const double s = one.nodes[i];
        EXPECT_LT(rel(one.values[i], std::pow(s, a - b) * std::beta(1 - b, a)), 1e-12);
        EXPECT_LT(rel(lin.values[i], std::pow(s, a - b + 1) * std::beta(2 - b, a)), 1e-12);
    }
}

TEST(FractionalE, ZeroData)
{
    const auto E = fractional_integral_E(uniform_samples(10, 1.0, [](double) { return 0.0; }), 0.5, 0.5);
    for (double v : E.values)
        EXPECT_EQ(v, 0.0);
}

TEST(FractionalE, RejectsParameters)
{
    const auto h = uniform_samples(4, 1.0, [](double) { return 1.0; });
    EXPECT_THROW(fractional_integral_E(h, 1.0, 0.5), std::invalid_argument);
    EXPECT_THROW(fractional_integral_E(h, 0.5, 0.0), std::invalid_argument);
}

TEST(FractionalE, PointwiseBoundWithFrozenConstant)
{
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto h = uniform_samples(40, 1.0, [&](double) { return U(rng); });
        const auto E = fractional_integral_E(h, 0.5, 0.5);
        const auto M = maximal_function_1d(h);
        for (std::size_t k = 1; k < h.size(); ++k)
            EXPECT_LE(E.values[k], frozen::fractional_bound * M.values[k]) << trial << " " << k;
    }
}

TEST(Maximal, Constant)
{
    const auto M = maximal_function_1d(uniform_samples(30, 1.0, [](double) { return -0.8; }));
    for (double v : M.values)
        EXPECT_NEAR(v, 0.8, 1e-14);
}

TEST(Maximal, IndicatorAtRightEnd)
{
    const Sampled1D h({0.0, 0.5, 0.5 + 1e-9, 1.0}, {1.0, 1.0, 0.0, 0.0});
    EXPECT_NEAR(maximal_function_1d(h).values.back(), 0.5, 1e-8);
}

TEST(Maximal, DominatesModulus)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N01;
    const auto h = uniform_samples(60, 2.0, [&](double) { return N01(rng); });
    const auto M = maximal_function_1d(h);
    for (std::size_t i = 0; i < h.size(); ++i)
        EXPECT_GE(M.values[i], std::abs(h.values[i]));
}

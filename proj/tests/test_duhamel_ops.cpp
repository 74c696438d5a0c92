#include <gtest/gtest.h>

#include <cmath>

#include "oracles/duhamel_cases.hpp"
#include "support.hpp"

using namespace cnslab;
using namespace testing_support;

namespace {

double sup(const ScalarTrajectory& t)
{
    double s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
        s = std::max(s, t[k].sup_norm());
    return s;
}

double sup(const VectorTrajectory& t)
{
    double s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
        s = std::max(s, t[k].component_sup_norm());
    return s;
}

template <class Traj>
double max_diff(const Traj& a, const Traj& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s = std::max(s, max_abs_diff(a[k], b[k]));
    return s;
}

ScalarTrajectory scaled(const ScalarTrajectory& t, double a)
{
    std::vector<ScalarField> s;
    for (std::size_t k = 0; k < t.size(); ++k)
        s.push_back(t[k] * a);
    return {t.times, s};
}

VectorTrajectory scaled(const VectorTrajectory& t, double a)
{
    std::vector<VectorField> s;
    for (std::size_t k = 0; k < t.size(); ++k)
        s.push_back(t[k] * a);
    return {t.times, s};
}

template <class Traj>
Traj sum(const Traj& a, const Traj& b)
{
    std::vector<std::decay_t<decltype(a[0])>> s;
    for (std::size_t k = 0; k < a.size(); ++k)
        s.push_back(a[k] + b[k]);
    return {a.times, s};
}

struct Inputs {
    Grid g{2, two_pi, 32};
    TimeGrid tg = TimeGrid::geometric_uniform(0.5, 32);
    ScalarTrajectory w = caloric_extension(random_scalar(g, 1), tg);
    ScalarTrajectory n = caloric_extension(random_scalar(g, 2), tg);
    ScalarTrajectory v = caloric_extension(random_scalar(g, 3), tg);
    VectorTrajectory u = caloric_extension(random_divfree(g, 4), tg);
    VectorTrajectory z = caloric_extension(random_divfree(g, 5), tg);
    VectorField force = random_vector(g, 6);
};

} // namespace

TEST(DenseOracle, AllOperatorsAndRefinement)
{
    const oracle::DuhamelCases cases;
    const auto coarse = cases.compare(512);
    const auto fine = cases.compare(1024);
    for (std::size_t op = 0; op < fine.error.size(); ++op) {
        EXPECT_LT(fine.error[op], 1e-6) << oracle::DuhamelComparison::names[op];
        EXPECT_GE(coarse.error[op] / fine.error[op], 3.0) << oracle::DuhamelComparison::names[op];
    }
}

TEST(PanelWeights, SeriesBranchMatchesClosedForm)
{
    for (double z : {0.0999, 0.1001, 1e-6}) {
        const auto a = exponential_panel_weights(z, 1.0);
        const double e = std::exp(-z);
        if (z > 1e-3) {
            EXPECT_NEAR(a.w_old, (1 - e - z * e) / (z * z), 1e-12);
            EXPECT_NEAR(a.w_new, (z - 1 + e) / (z * z), 1e-12);
        }
        EXPECT_NEAR(a.w_old + a.w_new, -std::expm1(-z) / z, 1e-12);
    }
    const auto zero = exponential_panel_weights(0.0, 0.25);
    EXPECT_DOUBLE_EQ(zero.w_old, 0.125);
    EXPECT_DOUBLE_EQ(zero.w_new, 0.125);
}

TEST(B1, ConstantsGrowLinearly)
{
    Grid g(2, two_pi, 16);
    const TimeGrid tg = TimeGrid::geometric_uniform(1.0, 16);
    const double c = 0.37;
    const auto out = duhamel_B1(caloric_extension(ScalarField(g, 1.0), tg), caloric_extension(ScalarField(g, c), tg), tg);
    for (std::size_t k = 0; k < tg.size(); ++k)
        EXPECT_NEAR(out[k].max(), c * tg[k], 1e-8);
}

TEST(B1, ZeroSlot)
{
    Inputs in;
    const auto zero = caloric_extension(ScalarField(in.g), in.tg);
    EXPECT_EQ(sup(duhamel_B1(zero, in.n, in.tg)), 0.0);
    EXPECT_EQ(sup(duhamel_B1(in.w, zero, in.tg)), 0.0);
}

TEST(B2, ConstantsAndMean)
{
    Inputs in;
    const VectorField cvec(in.g, {ScalarField(in.g, 0.3), ScalarField(in.g, -1.2)});
    const auto c = duhamel_B2(caloric_extension(ScalarField(in.g, 2.0), in.tg), caloric_extension(cvec, in.tg), in.tg);
    EXPECT_LT(sup(c), 1e-14);
    const auto out = duhamel_B2(in.n, in.u, in.tg);
    EXPECT_GT(sup(out), 1e-3);
    for (std::size_t k = 0; k < out.size(); ++k)
        EXPECT_LT(std::abs(out[k].mean()), 1e-15);
}

TEST(B3, DivergenceFreeAndMeanFree)
{
    Inputs in;
    const auto out = duhamel_B3(in.u, in.z, in.tg);
    EXPECT_GT(sup(out), 1e-3);
    for (std::size_t k = 0; k < out.size(); ++k) {
        EXPECT_LT(physical(divergence(fourier(out[k]))).sup_norm(), 1e-12);
        EXPECT_LT(std::abs(out[k][0].mean()) + std::abs(out[k][1].mean()), 1e-15);
    }
    const auto zero = caloric_extension(VectorField(in.g), in.tg);
    EXPECT_EQ(sup(duhamel_B3(zero, zero, in.tg)), 0.0);
}

TEST(B3, TaylorGreenSelfInteractionIsAGradient)
{
    Grid g(2, two_pi, 32);
    const TimeGrid tg = TimeGrid::uniform(0.5, 8);
    const auto u = caloric_extension(generate_vector({PresetKind::taylor_green, 1.0}, g, true), tg);
    EXPECT_LT(sup(duhamel_B3(u, u, tg)), 1e-14);
}

TEST(B4, ConstantScalarAndUndampedForm)
{
    Inputs in;
    EXPECT_LT(sup(duhamel_B4(in.u, caloric_extension(ScalarField(in.g, 4.0), in.tg), in.tg, 1.0)), 1e-14);
    // kappa = 0: B4(u, v) = B1(u, grad v)
    std::vector<VectorField> grads;
    for (std::size_t k = 0; k < in.v.size(); ++k)
        grads.push_back(gradient(in.v[k]));
    const VectorTrajectory gv(in.tg, grads);
    EXPECT_LT(max_diff(duhamel_B4(in.u, in.v, in.tg, 0.0), duhamel_B1(in.u, gv, in.tg)), 1e-10);
    EXPECT_THROW(duhamel_B4(in.u, in.v, in.tg, -0.1), std::invalid_argument);
}

TEST(LinearOps, ClosedFormsForConstantInput)
{
    Grid g(2, two_pi, 16);
    const TimeGrid tg = TimeGrid::geometric_uniform(2.0, 16);
    const double c = 1.7;
    const auto n = caloric_extension(ScalarField(g, c), tg);
    const auto undamped = linear_L_kappa(n, tg, 0.0);
    for (double kappa : {0.5, 1.0, 3.0}) {
        const auto out = linear_L_kappa(n, tg, kappa);
        for (std::size_t k = 0; k < tg.size(); ++k)
            EXPECT_NEAR(out[k].max(), c * (1 - std::exp(-kappa * tg[k])) / kappa, 1e-10);
    }
    for (std::size_t k = 0; k < tg.size(); ++k)
        EXPECT_NEAR(undamped[k].max(), c * tg[k], 1e-10);
    EXPECT_THROW(linear_L_kappa(n, tg, -1.0), std::invalid_argument);
}

TEST(LinearOps, Linearity)
{
    Inputs in;
    EXPECT_EQ(sup(linear_L_phi(caloric_extension(ScalarField(in.g), in.tg), in.force, in.tg)), 0.0);
    const auto both = sum(in.n, in.w);
    EXPECT_LT(max_diff(linear_L_phi(both, in.force, in.tg),
                       sum(linear_L_phi(in.n, in.force, in.tg), linear_L_phi(in.w, in.force, in.tg))),
              1e-12);
    EXPECT_LT(max_diff(linear_L_kappa(both, in.tg, 1.0), sum(linear_L_kappa(in.n, in.tg, 1.0), linear_L_kappa(in.w, in.tg, 1.0))),
              1e-12);
    EXPECT_LT(max_diff(linear_L_kappa(scaled(in.n, -2.5), in.tg, 1.0), scaled(linear_L_kappa(in.n, in.tg, 1.0), -2.5)), 1e-12);
}

TEST(Bilinear, HomogeneityAndAdditivity)
{
    Inputs in;
    const double a = -1.75;
    EXPECT_LT(max_diff(duhamel_B1(scaled(in.w, a), in.n, in.tg), scaled(duhamel_B1(in.w, in.n, in.tg), a)), 1e-12);
    EXPECT_LT(max_diff(duhamel_B2(in.n, scaled(in.u, a), in.tg), scaled(duhamel_B2(in.n, in.u, in.tg), a)), 1e-12);
    EXPECT_LT(max_diff(duhamel_B3(scaled(in.u, a), in.z, in.tg), scaled(duhamel_B3(in.u, in.z, in.tg), a)), 1e-12);
    EXPECT_LT(max_diff(duhamel_B4(in.u, scaled(in.v, a), in.tg, 1.0), scaled(duhamel_B4(in.u, in.v, in.tg, 1.0), a)), 1e-12);
    EXPECT_LT(max_diff(duhamel_B1(sum(in.w, in.v), in.n, in.tg),
                       sum(duhamel_B1(in.w, in.n, in.tg), duhamel_B1(in.v, in.n, in.tg))),
              1e-12);
    EXPECT_LT(max_diff(duhamel_B3(in.u, sum(in.z, in.u), in.tg),
                       sum(duhamel_B3(in.u, in.z, in.tg), duhamel_B3(in.u, in.u, in.tg))),
              1e-12);
}

TEST(AllOperators, VanishAtTimeZero)
{
    Inputs in;
    EXPECT_EQ(duhamel_B1(in.w, in.n, in.tg)[0].sup_norm(), 0.0);
    EXPECT_EQ(duhamel_B2(in.n, in.u, in.tg)[0].sup_norm(), 0.0);
    EXPECT_EQ(duhamel_B3(in.u, in.z, in.tg)[0].component_sup_norm(), 0.0);
    EXPECT_EQ(duhamel_B4(in.u, in.v, in.tg, 1.0)[0].sup_norm(), 0.0);
    EXPECT_EQ(linear_L_phi(in.n, in.force, in.tg)[0].component_sup_norm(), 0.0);
    EXPECT_EQ(linear_L_kappa(in.n, in.tg, 2.0)[0].sup_norm(), 0.0);
}

TEST(AllOperators, RejectMismatchedInputs)
{
    Inputs in;
    Grid other(2, two_pi, 16);
    const auto foreign = caloric_extension(random_scalar(other, 1), in.tg);
    EXPECT_THROW(duhamel_B1(in.w, foreign, in.tg), std::invalid_argument);
    const TimeGrid tg2 = TimeGrid::uniform(0.5, 4);
    EXPECT_THROW(duhamel_B2(in.n, in.u, tg2), std::invalid_argument);
    EXPECT_THROW(linear_L_phi(in.n, random_vector(other, 2), in.tg), std::invalid_argument);
    EXPECT_THROW(linear_L_kappa(in.n, tg2, 0.0), std::invalid_argument);
}

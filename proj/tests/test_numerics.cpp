#include <gtest/gtest.h>

#include <islm/ode.hpp>
#include <islm/roots.hpp>

#include <cmath>
#include <numbers>

using namespace islm;

TEST(Bisect, ConvergesToAdjacentDoubles) {
    const auto f = [](double x) { return x * x - 2.0; };
    const double r = roots::bisect(f, 0.0, 2.0);
    EXPECT_NEAR(r, std::numbers::sqrt2, 4e-16);
}

TEST(Bisect, ReturnsAnExactEndpointRoot) {
    const auto f = [](double x) { return x - 1.0; };
    EXPECT_EQ(roots::bisect(f, 1.0, 3.0), 1.0);
    EXPECT_EQ(roots::bisect(f, -1.0, 1.0), 1.0);
}

TEST(ScanSignChanges, FindsEveryCrossing) {
    const auto f = [](double x) { return std::sin(x); };
    const auto r = roots::all_roots(f, 0.5, 10.0, 200);
    ASSERT_EQ(r.size(), 3u);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(r[k], (k + 1) * std::numbers::pi, 1e-14);
}

TEST(ScanSignChanges, ExactZeroSampleIsReportedOnce) {
    const auto f = [](double x) { return x; };
    const auto br = roots::scan_sign_changes(f, -1.0, 1.0, 4);
    ASSERT_EQ(br.size(), 1u);
    EXPECT_EQ(br[0].lo, 0.0);
    EXPECT_EQ(br[0].hi, 0.0);
}

TEST(ScanSignChanges, MissesATouchingRoot) {
    const auto f = [](double x) { return (x - 0.3) * (x - 0.3); };
    EXPECT_TRUE(roots::scan_sign_changes(f, 0.0, 1.0, 7).empty());
}

TEST(GoldenMin, FindsTheMinimum) {
    const auto [x, fx] = roots::golden_min([](double x) { return (x - 0.7) * (x - 0.7) + 1.0; }, 0.0, 2.0);
    EXPECT_NEAR(x, 0.7, 1e-7);
    EXPECT_NEAR(fx, 1.0, 1e-14);
}

TEST(BisectPredicate, NarrowsToWidth) {
    const auto [lo, hi] = roots::bisect_predicate([](double x) { return x >= 0.3; }, 0.0, 1.0, 1e-9);
    EXPECT_LE(hi - lo, 1e-9);
    EXPECT_LT(lo, 0.3);
    EXPECT_GE(hi, 0.3);
}

TEST(ExpandBracket, GrowsUntilASignChange) {
    const auto f = [](double x) { return x - 10.0; };
    const auto br = roots::expand_bracket(f, 0.0, 1.0);
    ASSERT_TRUE(br.has_value());
    EXPECT_LE(br->lo, 10.0);
    EXPECT_GE(br->hi, 10.0);
    EXPECT_FALSE(roots::expand_bracket([](double) { return 1.0; }, 0.0, 1.0, 10).has_value());
}

TEST(Ode, ExponentialDecay) {
    ode::State<1> y{1.0};
    ode::Tolerances tol;
    tol.rtol = 1e-10;
    tol.atol = 1e-12;
    std::size_t steps = 0;
    const double t = ode::integrate<1>([](double, const ode::State<1>& s) { return ode::State<1>{-2.0 * s[0]}; }, 0.0,
                                       3.0, y, tol, [&](auto&&...) { return ++steps, true; });
    EXPECT_EQ(t, 3.0);
    EXPECT_NEAR(y[0], std::exp(-6.0), 1e-10);
    EXPECT_GT(steps, 0u);
}

TEST(Ode, HarmonicOscillatorKeepsItsPhase) {
    ode::State<2> y{1.0, 0.0};
    ode::Tolerances tol;
    tol.rtol = 1e-11;
    tol.atol = 1e-13;
    ode::integrate<2>([](double, const ode::State<2>& s) { return ode::State<2>{s[1], -s[0]}; }, 0.0,
                      2.0 * std::numbers::pi, y, tol, [](auto&&...) { return true; });
    EXPECT_NEAR(y[0], 1.0, 1e-9);
    EXPECT_NEAR(y[1], 0.0, 1e-9);
}

TEST(Ode, CallbackCanStopEarly) {
    ode::State<1> y{0.0};
    const double t = ode::integrate<1>([](double, const ode::State<1>&) { return ode::State<1>{1.0}; }, 0.0, 10.0, y,
                                       ode::Tolerances{}, [](double, auto&&, auto&&, double tb, auto&&, auto&&) {
                                           return tb < 1.0;
                                       });
    EXPECT_LT(t, 10.0);
    EXPECT_NEAR(y[0], t, 1e-12);
}

TEST(Ode, NonFiniteInitialStateIsANumericalError) {
    ode::State<1> y{std::nan("")};
    EXPECT_THROW(ode::integrate<1>([](double, const ode::State<1>& s) { return s; }, 0.0, 1.0, y, ode::Tolerances{},
                                   [](auto&&...) { return true; }),
                 NumericalError);
}

TEST(Ode, BlowUpUnderflowsTheStep) {
    // y' = y^2 from y(0) = 1 blows up at t = 1.
    ode::State<1> y{1.0};
    EXPECT_THROW(ode::integrate<1>([](double, const ode::State<1>& s) { return ode::State<1>{s[0] * s[0]}; }, 0.0, 2.0,
                                   y, ode::Tolerances{}, [](auto&&...) { return true; }),
                 NumericalError);
}

TEST(Hermite, ReproducesACubic) {
    const auto p = [](double t) { return t * t * t - t; };
    const auto dp = [](double t) { return 3 * t * t - 1; };
    const auto v = ode::hermite<1>(0.5, {p(0.5)}, {dp(0.5)}, 2.0, {p(2.0)}, {dp(2.0)}, 1.3);
    EXPECT_NEAR(v[0], p(1.3), 1e-14);
}

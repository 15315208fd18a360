#include <gtest/gtest.h>

#include <islm/presets.hpp>
#include <islm/simulate.hpp>
#include <islm/trajectory.hpp>

#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace islm;

namespace {

// Closed ellipse around (5, 0.05), `turns` times, counterclockwise when ccw.
Trajectory ellipse(double turns, bool ccw, std::size_t per_turn = 400) {
    Trajectory tr;
    const auto n = static_cast<std::size_t>(turns * static_cast<double>(per_turn));
    for (std::size_t k = 0; k <= n; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(per_turn);
        const double t = static_cast<double>(k) * 0.01;
        tr.samples.push_back({t, 5.0 + std::cos(th), 0.05 + 0.02 * (ccw ? std::sin(th) : -std::sin(th))});
    }
    return tr;
}

// Slow drift with one instantaneous rise of `dr` at y = 6.
Trajectory one_jump(double dr, double slip = 0.0) {
    Trajectory tr;
    tr.mode = Mode::singular_limit;
    for (int k = 0; k <= 100; ++k) tr.samples.push_back({k * 0.01, 5.0 + k * 0.01, 0.001 * k});
    const double t = 1.0;
    tr.samples.push_back({t, 6.0 + slip, 0.1 + dr});
    for (int k = 1; k <= 100; ++k) tr.samples.push_back({t + k * 0.01, 6.0 + slip - k * 0.01, 0.1 + dr + 0.001 * k});
    return tr;
}

}  // namespace

TEST(DetectJumps, FindsAnInstantaneousJump) {
    const auto j = detect_jumps(one_jump(0.2));
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0].direction, Direction::up);
    EXPECT_NEAR(j[0].y_at_jump, 6.0, 1e-12);
    EXPECT_NEAR(j[0].r_to - j[0].r_from, 0.2, 1e-12);
    EXPECT_EQ(j[0].t_start, j[0].t_end);
}

TEST(DetectJumps, IgnoresSmallMovesAndIncomeSlips) {
    EXPECT_TRUE(detect_jumps(one_jump(0.005)).empty());
    EXPECT_TRUE(detect_jumps(one_jump(0.2, 0.5)).empty());
    JumpOptions o;
    o.jump_min = 0.5;
    EXPECT_TRUE(detect_jumps(one_jump(0.2), o).empty());
}

TEST(DetectJumps, DegenerateInputs) {
    EXPECT_TRUE(detect_jumps(Trajectory{}).empty());
    Trajectory one;
    one.samples.push_back({0, 1, 1});
    EXPECT_TRUE(detect_jumps(one).empty());
}

TEST(AnnotateRegimes, MarksOnlyTheJump) {
    auto tr = one_jump(0.2);
    annotate_regimes(tr, detect_jumps(tr));
    std::size_t n = 0;
    for (const auto& s : tr.samples) n += s.regime == Regime::jump;
    EXPECT_EQ(n, 1u);
    EXPECT_EQ(tr.samples[101].regime, Regime::jump);
}

TEST(DetectCycle, PeriodAndOrientation) {
    const auto c = detect_cycle(ellipse(5, true));
    ASSERT_TRUE(c.has_value());
    EXPECT_NEAR(c->period, 4.0, 1e-3);
    EXPECT_EQ(c->orientation, Orientation::counterclockwise);
    EXPECT_NEAR(c->signed_area, std::numbers::pi * 0.02, 1e-4);
    EXPECT_NEAR(c->y_extent.hi - c->y_extent.lo, 2.0, 1e-3);
    EXPECT_FALSE(c->relaxation());

    const auto cw = detect_cycle(ellipse(5, false));
    ASSERT_TRUE(cw.has_value());
    EXPECT_EQ(cw->orientation, Orientation::clockwise);
}

TEST(DetectCycle, NoCycleOnAnOpenPath) {
    Trajectory tr;
    for (int k = 0; k < 500; ++k) tr.samples.push_back({k * 0.1, k * 0.1, 0.0});
    EXPECT_FALSE(detect_cycle(tr).has_value());
}

TEST(ReverseTime, FlipsOrientationAndRestartsTheClock) {
    const auto fwd = ellipse(5, true);
    const auto rev = reverse_time(fwd);
    ASSERT_EQ(rev.samples.size(), fwd.samples.size());
    EXPECT_EQ(rev.samples.front().t, 0.0);
    for (std::size_t k = 1; k < rev.samples.size(); ++k) EXPECT_GE(rev.samples[k].t, rev.samples[k - 1].t);
    EXPECT_EQ(rev.samples.front().y, fwd.samples.back().y);
    const auto c = detect_cycle(rev);
    ASSERT_TRUE(c.has_value());
    EXPECT_EQ(c->orientation, Orientation::clockwise);
}

TEST(Hausdorff, ParallelSegments) {
    const std::vector<Point> a{{0, 0}, {1, 0}}, b{{0, 0.3}, {1, 0.3}};
    EXPECT_NEAR(hausdorff(a, b), 0.3, 1e-15);
    EXPECT_EQ(hausdorff(a, a), 0.0);
}

TEST(Hausdorff, NeverExceedsTheVertexOracle) {
    std::vector<Point> a, b;
    std::vector<std::array<double, 2>> va, vb;
    for (int k = 0; k <= 60; ++k) {
        const double t = k / 60.0;
        a.push_back({t, std::sin(3 * t)});
        b.push_back({t + 0.01, std::sin(3 * t) + 0.05 * t});
        va.push_back({a.back().y, a.back().r});
        vb.push_back({b.back().y, b.back().r});
    }
    const double lib = hausdorff(a, b), brute = oracle::hausdorff_vertices(va, vb);
    EXPECT_LE(lib, brute + 1e-15);
    EXPECT_GT(lib, 0.5 * brute);
}

TEST(Ramp, InterpolatesAndClamps) {
    Ramp r{{{0, 5}, {10, 7}}};
    EXPECT_DOUBLE_EQ(r.at(-1), 5.0);
    EXPECT_DOUBLE_EQ(r.at(5), 6.0);
    EXPECT_DOUBLE_EQ(r.at(11), 7.0);
    EXPECT_EQ(r.breaks(-1, 20).size(), 2u);
    EXPECT_THROW((Ramp{{{1, 5}, {1, 6}}}.validate()), ModelError);
    EXPECT_THROW((Ramp{{{0, -1}}}.validate()), ModelError);
    EXPECT_THROW(Ramp{}.validate(), ModelError);
}

TEST(Reduced, ReferenceCycleJumpsAtTheFolds) {
    const auto s = presets::reference();
    ReducedOptions o;
    o.stride = 0.002;
    const auto run = reduced_simulate(s, 5.5, 0, 40.0, o);
    EXPECT_FALSE(run.at_rest);
    ASSERT_GE(run.jumps.size(), 4u);
    const auto folds = oracle::folds(s, -0.2, 0.4);
    ASSERT_EQ(folds.size(), 2u);
    for (const auto& j : run.jumps) {
        const double want = j.direction == Direction::up ? folds[0].y : folds[1].y;
        EXPECT_NEAR(j.y_at_jump, want, 1e-6);
    }
    // Slow samples lie on the isocline.
    for (const auto& p : run.trajectory.samples) EXPECT_NEAR(excess_money(p.y, p.r, s), 0.0, 1e-9);
}

TEST(Reduced, PeriodMatchesQuadrature) {
    const auto s = presets::reference();
    ReducedOptions o;
    o.stride = 0.002;
    const auto run = reduced_simulate(s, 5.5, 0, 40.0, o);
    const auto c = detect_cycle(run.trajectory);
    ASSERT_TRUE(c.has_value());
    const auto folds = oracle::folds(s, -0.2, 0.4);
    const auto lower = folds[0], upper = folds[1];
    // Landing rates: the other stable root at each fold income.
    const auto land_low = oracle::roots_at(s, upper.y, -0.2, 0.4).front();
    const auto land_high = oracle::roots_at(s, lower.y, -0.2, 0.4).back();
    const double period = oracle::passage_time(s, land_low, lower.r) + oracle::passage_time(s, land_high, upper.r);
    EXPECT_NEAR(c->period, period, 1e-3 * period);
    EXPECT_EQ(c->orientation, Orientation::counterclockwise);
}

TEST(Reduced, SettlesOnAStableEquilibrium) {
    const auto s = presets::steep();
    // The approach is exponential with rate about 0.27 per unit slow time.
    const auto run = reduced_simulate(s, 4.0, 0, 150.0);
    EXPECT_TRUE(run.at_rest);
    EXPECT_TRUE(run.jumps.empty());
    const auto eq = oracle::equilibria(s, -0.2, 0.4);
    ASSERT_FALSE(eq.empty());
    const auto& last = run.trajectory.samples.back();
    EXPECT_NEAR(last.y, eq.front().first, 1e-7);
    EXPECT_NEAR(last.r, eq.front().second, 1e-8);
}

TEST(Reduced, ZeroHorizonIsEmpty) {
    const auto run = reduced_simulate(presets::reference(), 5.5, 0, 0.0);
    EXPECT_TRUE(run.trajectory.samples.empty());
    EXPECT_THROW((void)reduced_simulate(presets::reference(), 5.5, 0, -1.0), std::invalid_argument);
}

TEST(Full, ConvergesToTheLowerStableEquilibrium) {
    auto s = presets::steep();
    s.params.epsilon = 0.05;
    const double r0 = oracle::roots_at(s, 4.0, -0.2, 0.4).front();
    const auto tr = integrate(s, 4.0, r0, 2000.0);
    ASSERT_FALSE(tr.samples.empty());
    const auto eq = oracle::equilibria(s, -0.2, 0.4);
    ASSERT_EQ(eq.size(), 3u);
    EXPECT_NEAR(tr.samples.back().y, eq[0].first, 1e-5);
    EXPECT_NEAR(tr.samples.back().r, eq[0].second, 1e-6);
    EXPECT_EQ(tr.mode, Mode::full_epsilon);
    EXPECT_EQ(tr.spec_id, spec_fingerprint(s));
}

TEST(Full, RelaxationCycleAtSmallEpsilon) {
    const auto s = presets::reference();
    IntegrateOptions o;
    o.stride = 2.0;
    const auto tr = integrate(s, 5.5, 0.0, 40.0 / s.params.epsilon, o);
    const auto c = detect_cycle(tr);
    ASSERT_TRUE(c.has_value());
    EXPECT_TRUE(c->relaxation());
    EXPECT_EQ(c->orientation, Orientation::counterclockwise);
}

TEST(Full, ArgumentErrors) {
    const auto s = presets::reference();
    EXPECT_THROW((void)integrate(s, -1.0, 0.0, 1.0), DomainError);
    EXPECT_THROW((void)integrate(s, 1.0, 0.0, -1.0), std::invalid_argument);
    EXPECT_TRUE(integrate(s, 1.0, 0.0, 0.0).samples.empty());
}

TEST(Fingerprint, StableAndSensitive) {
    const auto a = presets::reference();
    auto b = a;
    EXPECT_EQ(spec_fingerprint(a), spec_fingerprint(b));
    EXPECT_EQ(spec_fingerprint(a).size(), 16u);
    b.params.m_stock += 1e-12;
    EXPECT_NE(spec_fingerprint(a), spec_fingerprint(b));
}

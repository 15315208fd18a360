#include <gtest/gtest.h>

#include <islm/policy.hpp>
#include <islm/presets.hpp>

#include "oracles.hpp"

#include <limits>

using namespace islm;

namespace {

const Ramp kRamp{{{0, 5}, {10, 7}}};  // crosses the lower knee at Y = 6.1 (t = 5.5)

Scenario drive_with_step(double t_step, double d_pi, double d_ms = 0.0) {
    Scenario sc;
    sc.horizon = 12.0;
    sc.steps.push_back(FiscalDrive{0.0, kRamp});
    sc.steps.push_back(MonetaryStep{t_step, d_pi, d_ms});
    return sc;
}

ScenarioOptions options() {
    ScenarioOptions o;
    o.reduced.stride = 0.01;
    return o;
}

std::size_t up_jumps(const ScenarioResult& r) {
    std::size_t n = 0;
    for (const auto& j : r.jumps) n += j.direction == Direction::up;
    return n;
}

FoldPoint lower_knee(const LMIsocline& iso) {
    for (const auto& f : iso.folds)
        if (f.kind == FoldKind::lower_knee) return f;
    throw std::logic_error("no lower knee");
}

}  // namespace

TEST(Scenario, ValidationNamesTheStep) {
    Scenario sc = drive_with_step(4.0, 0.01);
    EXPECT_NO_THROW(sc.validate());

    sc.steps.push_back(MonetaryStep{3.0, 0.01, 0.0});
    try {
        sc.validate();
        FAIL() << "expected a ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.step(), 2);
        EXPECT_EQ(e.field(), "steps[2]");
    }

    sc = drive_with_step(20.0, 0.01);
    EXPECT_THROW(sc.validate(), ScenarioError);

    sc = drive_with_step(4.0, std::numeric_limits<double>::infinity());
    EXPECT_THROW(sc.validate(), ScenarioError);

    sc = Scenario{{FiscalDrive{0.0, Ramp{{{0, 5}, {0, 6}}}}}, 5.0};
    EXPECT_THROW(sc.validate(), ScenarioError);

    sc.steps.clear();
    sc.horizon = -1.0;
    EXPECT_THROW(sc.validate(), ModelError);
}

TEST(Scenario, StepKindsAndTimes) {
    const ScenarioStep a = FiscalShift{2.0, 0.1}, b = MonetaryStep{3.0, 0.0, 1.0};
    EXPECT_STREQ(step_kind(a), "fiscal-shift");
    EXPECT_STREQ(step_kind(b), "monetary-step");
    EXPECT_EQ(step_time(b), 3.0);
}

TEST(Scenario, MonetaryStepTimingDecidesTheJump) {
    const auto s = presets::reference();
    const InitialState init{5.0, 0.0, 0};
    // A large enough inflation step before the fold keeps the state on the lower arc;
    // the same step after the fold comes too late.
    const auto early = apply_scenario(s, drive_with_step(4.0, 0.08), init, Mode::singular_limit, options());
    const auto late = apply_scenario(s, drive_with_step(8.0, 0.08), init, Mode::singular_limit, options());
    EXPECT_EQ(up_jumps(early), 0u);
    EXPECT_EQ(up_jumps(late), 1u);
    EXPECT_NEAR(early.final_spec.params.expected_inflation, 0.10, 1e-15);
    EXPECT_EQ(early.final_spec, late.final_spec);
}

TEST(Scenario, EventsAreTimeOrdered) {
    const auto r = apply_scenario(presets::reference(), drive_with_step(8.0, 0.01), InitialState{5.0, 0.0, 0},
                                  Mode::singular_limit, options());
    ASSERT_GE(r.events.size(), 3u);
    for (std::size_t k = 1; k < r.events.size(); ++k) EXPECT_LE(r.events[k - 1].t, r.events[k].t);
    EXPECT_TRUE(std::any_of(r.events.begin(), r.events.end(), [](const ScenarioEvent& e) { return e.kind == "jump"; }));
}

TEST(Scenario, ZeroHorizonGivesNoSamples) {
    Scenario sc;
    const auto r = apply_scenario(presets::reference(), sc, InitialState{5.0, 0.0, 0}, Mode::singular_limit, options());
    EXPECT_TRUE(r.trajectory.samples.empty());
    EXPECT_TRUE(r.jumps.empty());
}

TEST(Scenario, InvalidStepSpecIsRejected) {
    // Removing most of the money stock is fine; removing all of it is not.
    const auto s = presets::reference();
    EXPECT_THROW((void)apply_scenario(s, drive_with_step(4.0, 0.0, -5.0), InitialState{5.0, 0.0, 0},
                                      Mode::singular_limit, options()),
                 ModelError);
}

TEST(FiscalShift, EquivalentToAnInterceptMove) {
    const auto rep = is_shift_equivalence_check(presets::steep(), 0.15);
    EXPECT_TRUE(rep.passed);
    EXPECT_NEAR(rep.expected_shift, 0.15 / 4.0, 1e-15);
    EXPECT_LE(rep.max_error, 1e-12);
}

TEST(Stabilization, InflationPlanHasTheClosedForm) {
    const auto s = presets::reference();
    const auto iso = trace_lm_isocline(s, {0.0, 20.0});
    const auto fold = lower_knee(iso);
    const auto plan = plan_stabilization(s, iso, fold, Instrument::inflation);
    ASSERT_TRUE(plan.solvable) << plan.diagnosis;
    const double landing = oracle::roots_at(s, fold.y_fold + 1e-9, -0.2, 0.4).back();
    EXPECT_NEAR(plan.delta, landing - fold.r_fold, 1e-8);
    EXPECT_NEAR(plan.target_rate, landing, 1e-8);
    EXPECT_LT(std::abs(plan.residual), 1e-8);
    EXPECT_EQ(plan.target_branch, 2);
}

TEST(Stabilization, MoneyStockCannotMoveTheUpperArcOntoTheKnee) {
    const auto s = presets::reference();
    const auto iso = trace_lm_isocline(s, {0.0, 20.0});
    auto plan = plan_stabilization(s, iso, lower_knee(iso), Instrument::money_stock);
    EXPECT_FALSE(plan.solvable);
    EXPECT_FALSE(plan.diagnosis.empty());
    EXPECT_THROW((void)run_with_controller(s, kRamp, plan), ModelError);
}

TEST(Stabilization, MarginOutOfRange) {
    const auto s = presets::reference();
    const auto iso = trace_lm_isocline(s, {0.0, 20.0});
    EXPECT_THROW((void)plan_stabilization(s, iso, lower_knee(iso), Instrument::inflation, 1.0), ModelError);
    EXPECT_THROW((void)plan_stabilization(s, iso, lower_knee(iso), Instrument::inflation, -0.1), ModelError);
}

TEST(Controller, CatchesTheJumpWithAMargin) {
    const auto s = presets::reference();
    const auto iso = trace_lm_isocline(s, {0.0, 20.0});
    auto plan = plan_stabilization(s, iso, lower_knee(iso), Instrument::inflation, 0.05);
    ControllerOptions o;
    o.scenario = options();
    o.init = InitialState{5.0, 0.0, 0};
    o.tail = 2.0;
    const auto rep = run_with_controller(s, kRamp, plan, o);
    EXPECT_EQ(rep.uncontrolled.watched_jumps, 1u);
    EXPECT_EQ(rep.controlled.watched_jumps, 0u);
    EXPECT_TRUE(rep.fired);
    EXPECT_FALSE(rep.late) << rep.late_reason;
    EXPECT_NEAR(rep.y_trigger, 0.95 * 6.1, 1e-9);
    EXPECT_TRUE(rep.within_band);
    ASSERT_EQ(plan.fired.size(), 1u);
}

TEST(Controller, ZeroMarginIsLate) {
    const auto s = presets::reference();
    const auto iso = trace_lm_isocline(s, {0.0, 20.0});
    auto plan = plan_stabilization(s, iso, lower_knee(iso), Instrument::inflation, 0.0);
    ControllerOptions o;
    o.scenario = options();
    o.init = InitialState{5.0, 0.0, 0};
    o.tail = 2.0;
    const auto rep = run_with_controller(s, kRamp, plan, o);
    EXPECT_TRUE(rep.late);
    EXPECT_FALSE(rep.late_reason.empty());
}

TEST(NegativeRate, SlowAndJumpCrossings) {
    Trajectory tr;
    tr.mode = Mode::singular_limit;
    for (int k = 0; k <= 10; ++k) tr.samples.push_back({k * 0.1, 5.0 + 0.1 * k, 0.05 - 0.01 * k});  // drift through 0
    tr.samples.push_back({1.0, 6.0, 0.2});                                                           // jump back above
    const auto jumps = detect_jumps(tr);
    ASSERT_EQ(jumps.size(), 1u);
    const auto rep = rate_sign_report(tr, jumps);
    ASSERT_EQ(rep.crossings.size(), 2u);
    EXPECT_FALSE(rep.crossings[0].jump);
    EXPECT_NEAR(rep.crossings[0].t, 0.5, 1e-12);
    EXPECT_EQ(rep.crossings[0].direction, Direction::down);
    EXPECT_TRUE(rep.crossings[1].jump);
    EXPECT_EQ(rep.crossings[1].direction, Direction::up);
    EXPECT_TRUE(rep.jump_crossing());
    EXPECT_FALSE(rep.cycle_found);
    EXPECT_NEAR(rep.r_min, -0.05, 1e-15);
}

TEST(NegativeRate, TouchingInflationNeedsAStraddlingBracket) {
    const auto s = presets::reference();
    Scenario sc;
    sc.horizon = 20.0;
    EXPECT_THROW((void)touching_inflation(s, sc, InitialState{5.5, 0.0, 0}, Mode::singular_limit, 0.0, 0.001, 1e-6,
                                          options()),
                 NumericalError);
}

#pragma once

// Timed fiscal and monetary interventions, the fold-catching stabilization
// controller and the negative-rate probe.

#include <islm/errors.hpp>
#include <islm/geometry.hpp>
#include <islm/model.hpp>
#include <islm/simulate.hpp>
#include <islm/trajectory.hpp>
#include <islm/validation.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace islm {

// ---------------------------------------------------------------------------
// Scenarios

/// From `time` on, income follows `ramp` (knot times are absolute).
struct FiscalDrive {
    double time = 0.0;
    Ramp ramp;
    friend bool operator==(const FiscalDrive&, const FiscalDrive&) = default;
};

/// From `time` on, the goods market runs freely with I - S + g.
struct FiscalShift {
    double time = 0.0;
    double g = 0.0;
    friend bool operator==(const FiscalShift&, const FiscalShift&) = default;
};

/// At `time`, expected inflation rises by d_pi and the money stock by d_ms.
struct MonetaryStep {
    double time = 0.0;
    double d_pi = 0.0;
    double d_ms = 0.0;
    friend bool operator==(const MonetaryStep&, const MonetaryStep&) = default;
};

using ScenarioStep = std::variant<FiscalDrive, FiscalShift, MonetaryStep>;

[[nodiscard]] inline double step_time(const ScenarioStep& s) {
    return std::visit([](const auto& v) { return v.time; }, s);
}

[[nodiscard]] inline const char* step_kind(const ScenarioStep& s) {
    switch (s.index()) {
        case 0: return "fiscal-drive";
        case 1: return "fiscal-shift";
        default: return "monetary-step";
    }
}

/// A failure tied to one scenario step (-1: the initial spec).
class ScenarioError : public ModelError {
public:
    ScenarioError(int step, const std::string& what)
        : ModelError(step < 0 ? std::string("initial spec") : "steps[" + std::to_string(step) + "]", what),
          step_(step) {}
    [[nodiscard]] int step() const noexcept { return step_; }

private:
    int step_;
};

struct Scenario {
    std::vector<ScenarioStep> steps;
    double horizon = 0.0;

    void validate() const {
        if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ModelError("horizon", "must be finite and >= 0");
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const double t = step_time(steps[k]);
            const int idx = static_cast<int>(k);
            if (!(t > prev)) throw ScenarioError(idx, "step times must be strictly increasing");
            if (t < 0.0 || t > horizon) throw ScenarioError(idx, "step time outside [0, horizon]");
            prev = t;
            if (const auto* d = std::get_if<FiscalDrive>(&steps[k])) {
                try {
                    d->ramp.validate();
                } catch (const ModelError& e) {
                    throw ScenarioError(idx, e.field() + ": " + e.reason());
                }
            }
            if (const auto* f = std::get_if<FiscalShift>(&steps[k]); f && !std::isfinite(f->g))
                throw ScenarioError(idx, "g must be finite");
            if (const auto* m = std::get_if<MonetaryStep>(&steps[k]); m && (!std::isfinite(m->d_pi) || !std::isfinite(m->d_ms)))
                throw ScenarioError(idx, "d_pi and d_ms must be finite");
        }
    }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct InitialState {
    double y = 0.0;
    double r = 0.0;
    std::optional<int> branch;  ///< singular-limit mode only; otherwise picked by the fast flow from r
};

struct ScenarioOptions {
    Interval validation_y{0.0, 20.0};
    Interval validation_r{-0.2, 0.4};
    std::size_t validation_grid = 100;
    bool validate_specs = true;
    FullOptions solver;
    double stride = 0.0;  ///< full mode output stride; 0 selects horizon / 10000
    ReducedOptions reduced;
    JumpOptions jumps;
};

struct ScenarioEvent {
    double t = 0.0;
    std::string kind;
    int step = -1;
    std::string detail;
    friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

struct ScenarioResult {
    Trajectory trajectory;
    std::vector<JumpEvent> jumps;
    std::vector<ScenarioEvent> events;
    ModelSpec final_spec;
};

namespace detail {

inline void check_spec(const ModelSpec& spec, int step, const ScenarioOptions& opts) {
    try {
        validate_spec(spec);
    } catch (const ModelError& e) {
        throw ScenarioError(step, e.what());
    }
    if (!opts.validate_specs) return;
    const auto rep = validate_properties(spec, opts.validation_y, opts.validation_r, opts.validation_grid);
    if (!rep.error.empty()) throw ScenarioError(step, "validation failed: " + rep.error);
    for (const auto& c : rep.checks)
        if (!c.passed) throw ScenarioError(step, "validation failed: " + c.name);
}

template <class Engine>
void run_scenario(Engine& eng, ModelSpec& spec, const Scenario& sc, const ScenarioOptions& opts,
                  std::vector<ScenarioEvent>& events) {
    std::optional<Ramp> drive;
    const auto advance_to = [&](double t) {
        if (drive)
            eng.advance_driven(*drive, t);
        else
            eng.advance(t);
    };
    for (std::size_t k = 0; k < sc.steps.size(); ++k) {
        const auto& st = sc.steps[k];
        const int idx = static_cast<int>(k);
        advance_to(step_time(st));
        ScenarioEvent ev{step_time(st), step_kind(st), idx, {}};
        if (const auto* d = std::get_if<FiscalDrive>(&st)) {
            drive = d->ramp;
            ev.detail = "income follows a ramp with " + std::to_string(d->ramp.knots.size()) + " knots";
        } else if (const auto* f = std::get_if<FiscalShift>(&st)) {
            drive.reset();
            eng.set_fiscal_shift(f->g);
            ev.detail = "g=" + std::to_string(f->g);
        } else {
            const auto& m = std::get<MonetaryStep>(st);
            ModelSpec next;
            try {
                next = shift_lm(spec, m.d_pi, m.d_ms);
            } catch (const ModelError& e) {
                throw ScenarioError(idx, e.what());
            }
            check_spec(next, idx, opts);
            spec = next;
            eng.set_spec(spec);
            ev.detail = "d_pi=" + std::to_string(m.d_pi) + " d_ms=" + std::to_string(m.d_ms);
        }
        events.push_back(std::move(ev));
    }
    advance_to(sc.horizon);
}

}  // namespace detail

/// Piecewise simulation of a scenario. Times are in the mode's native unit:
/// t in full-epsilon mode, slow time tau = eps*t in singular-limit mode.
[[nodiscard]] inline ScenarioResult apply_scenario(const ModelSpec& spec, const Scenario& sc, const InitialState& init,
                                                   Mode mode, const ScenarioOptions& opts = {}) {
    sc.validate();
    detail::check_spec(spec, -1, opts);
    ScenarioResult out;
    ModelSpec cur = spec;
    if (mode == Mode::full_epsilon) {
        const double stride = opts.stride > 0.0 ? opts.stride : std::max(sc.horizon, 1e-12) / 10000.0;
        FullEngine eng(cur, 0.0, init.y, init.r, stride, opts.solver);
        if (sc.horizon > 0.0) detail::run_scenario(eng, cur, sc, opts, out.events);
        out.trajectory = eng.finish();
        if (sc.horizon == 0.0) out.trajectory.samples.clear();
        out.jumps = detect_jumps(out.trajectory, opts.jumps);
        annotate_regimes(out.trajectory, out.jumps);
    } else {
        ReducedEngine eng(cur, 0.0, init.y, init.branch, init.r, opts.reduced);
        if (sc.horizon > 0.0) detail::run_scenario(eng, cur, sc, opts, out.events);
        out.trajectory = eng.finish();
        if (sc.horizon == 0.0) out.trajectory.samples.clear();
        out.jumps = eng.jumps();
    }
    for (const auto& j : out.jumps) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s at Y=%.6g: R %.6g -> %.6g", to_string(j.direction), j.y_at_jump, j.r_from,
                      j.r_to);
        out.events.push_back(ScenarioEvent{j.t_start, "jump", -1, buf});
    }
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.t < b.t; });
    out.final_spec = cur;
    return out;
}

// ---------------------------------------------------------------------------
// Fiscal shift equivalence

struct ShiftEquivalence {
    double g = 0.0;
    double expected_shift = 0.0;  ///< g / (i_r + s_r)
    double measured_shift = 0.0;  ///< largest deviation of R_IS over a probe grid
    double max_error = 0.0;
    bool passed = false;
};

[[nodiscard]] inline ShiftEquivalence is_shift_equivalence_check(const ModelSpec& spec, double g,
                                                                 Interval y_range = {0.0, 20.0}) {
    ShiftEquivalence rep;
    rep.g = g;
    rep.expected_shift = g / (spec.is_block.i_r + spec.is_block.s_r);
    const ISCurve base = is_curve(spec), moved = is_curve(spec, g);
    for (int k = 0; k <= 100; ++k) {
        const double y = y_range.lo + y_range.width() * k / 100.0;
        // Independent route: solve I - S + g = 0 for R at fixed y.
        const auto& b = spec.is_block;
        const double r_direct = (b.i0 + b.i_y * y - b.s0 - b.s_y * y + g) / (b.i_r + b.s_r);
        const double d = moved.rate(y) - base.rate(y);
        rep.measured_shift = d;
        rep.max_error = std::max({rep.max_error, std::abs(d - rep.expected_shift), std::abs(r_direct - moved.rate(y))});
    }
    rep.passed = rep.max_error <= 1e-12 * std::max(1.0, std::abs(rep.expected_shift));
    return rep;
}

// ---------------------------------------------------------------------------
// Stabilization

enum class Instrument { inflation, money_stock };

[[nodiscard]] inline const char* to_string(Instrument i) {
    return i == Instrument::inflation ? "inflation" : "money-stock";
}

struct FiredEvent {
    double t = 0.0;
    double y = 0.0;
    double d_pi = 0.0;
    double d_ms = 0.0;
    friend bool operator==(const FiredEvent&, const FiredEvent&) = default;
};

struct StabilizationPlan {
    FoldPoint fold;
    double margin = 0.05;
    Instrument instrument = Instrument::inflation;
    int target_branch = -1;    ///< stable branch the state would jump onto
    double target_rate = 0.0;  ///< its rate at y_fold before the shift
    double delta = 0.0;        ///< d_pi or d_ms
    double residual = 0.0;     ///< shifted target rate at y_fold minus r_fold
    bool solvable = true;
    std::string diagnosis;
    std::vector<FiredEvent> fired;

    friend bool operator==(const StabilizationPlan&, const StabilizationPlan&) = default;
};

struct PlanOptions {
    double ms_range_factor = 10.0;  ///< money-stock search covers [0, factor * M_S]
    std::size_t ms_scan = 400;
    double tolerance = 1e-8;
};

namespace detail {

inline bool is_pre_jump_branch(const Branch& b, const FoldPoint& f) {
    const double y_end = f.kind == FoldKind::lower_knee ? b.y_range.hi : b.y_range.lo;
    const auto& end = f.kind == FoldKind::lower_knee ? b.high_y_end : b.low_y_end;
    if (end.kind != BranchEnd::Kind::fold) return false;
    const Point& p = f.kind == FoldKind::lower_knee ? b.samples.back() : b.samples.front();
    return std::abs(y_end - f.y_fold) < 1e-9 && std::abs(p.r - f.r_fold) < 1e-6;
}

// Rate of the branch of `spec` lying in `window` at income y, if that branch reaches y.
inline std::optional<double> rate_in(const ModelSpec& spec, double y, Interval window) {
    const auto f = [&](double r) { return excess_money(y, r, spec); };
    const auto roots = roots::all_roots(f, window.lo, window.hi, 2000);
    for (double r : roots)
        if (excess_money_dr(r, spec) < 0.0) return r;
    return std::nullopt;
}

}  // namespace detail

/// Finds the shift that moves the post-jump stable branch through the
/// pre-jump point (y_fold, r_fold). Inflation has the closed form
/// d_pi = R_target(y_fold) - r_fold; the money stock is bisected.
[[nodiscard]] inline StabilizationPlan plan_stabilization(const ModelSpec& spec, const LMIsocline& iso,
                                                          const FoldPoint& fold, Instrument instrument,
                                                          double margin = 0.05, const PlanOptions& opts = {}) {
    if (!(margin >= 0.0 && margin < 1.0)) throw ModelError("margin", "trigger margin must lie in [0, 1)");
    StabilizationPlan plan;
    plan.fold = fold;
    plan.margin = margin;
    plan.instrument = instrument;
    const bool up = fold.kind == FoldKind::lower_knee;

    for (const auto& b : iso.branches) {
        if (!b.stable() || detail::is_pre_jump_branch(b, fold)) continue;
        if (fold.y_fold < b.y_range.lo - 1e-9 || fold.y_fold > b.y_range.hi + 1e-9) continue;
        const double rb = slaved_rate(spec, b, std::clamp(fold.y_fold, b.y_range.lo, b.y_range.hi), fold.r_fold);
        const bool ahead = up ? rb >= fold.r_fold - 1e-12 : rb <= fold.r_fold + 1e-12;
        if (!ahead) continue;
        if (plan.target_branch < 0 || std::abs(rb - fold.r_fold) < std::abs(plan.target_rate - fold.r_fold)) {
            plan.target_branch = b.id;
            plan.target_rate = rb;
        }
    }
    if (plan.target_branch < 0) {
        plan.solvable = false;
        plan.diagnosis = "no stable branch lies beyond the fold in the jump direction";
        return plan;
    }
    const double gap = plan.target_rate - fold.r_fold;
    if (std::abs(gap) <= 1e-12) {
        plan.delta = 0.0;
        plan.diagnosis = "the pre-jump point already lies on the target branch";
        return plan;
    }

    if (instrument == Instrument::inflation) {
        plan.delta = gap;
        const ModelSpec shifted = shift_lm(spec, plan.delta, 0.0);
        const auto& tb = iso.branches[static_cast<std::size_t>(plan.target_branch)];
        const Interval win{tb.r_range.lo - plan.delta - 1e-6, tb.r_range.hi - plan.delta + 1e-6};
        const auto r = detail::rate_in(shifted, fold.y_fold, win);
        plan.residual = r ? *r - fold.r_fold : std::numeric_limits<double>::quiet_NaN();
        return plan;
    }

    // Money stock: phi(d) = shifted target rate at y_fold - r_fold, on the
    // target branch's side of the fold rate.
    const auto& tb = iso.branches[static_cast<std::size_t>(plan.target_branch)];
    const Interval win = up ? Interval{tb.r_range.lo, iso.r_range.hi} : Interval{iso.r_range.lo, tb.r_range.hi};
    const double ms = spec.params.m_stock;
    const double d_lo = up ? 0.0 : -0.999 * ms;
    const double d_hi = up ? opts.ms_range_factor * ms : 0.0;
    const auto phi = [&](double d) -> std::optional<double> {
        const auto r = detail::rate_in(shift_lm(spec, 0.0, d), fold.y_fold, win);
        if (!r) return std::nullopt;
        return *r - fold.r_fold;
    };
    std::optional<double> prev;
    double prev_d = d_lo;
    double best_abs = std::numeric_limits<double>::infinity(), best_d = 0.0;
    std::optional<std::pair<double, double>> bracket;
    for (std::size_t k = 0; k <= opts.ms_scan; ++k) {
        const double d = d_lo + (d_hi - d_lo) * static_cast<double>(k) / static_cast<double>(opts.ms_scan);
        const auto v = phi(d);
        if (v && std::abs(*v) < best_abs) {
            best_abs = std::abs(*v);
            best_d = d;
        }
        if (v && prev && ((*v <= 0.0) != (*prev <= 0.0))) {
            bracket = std::make_pair(prev_d, d);
            break;
        }
        prev = v;
        prev_d = d;
    }
    if (!bracket) {
        plan.solvable = false;
        plan.delta = best_d;
        plan.residual = best_abs;
        char buf[400];
        std::snprintf(buf, sizeof buf,
                      "no d_ms in [%.6g, %.6g] puts the shifted %s through (%.6g, %.6g); closest approach %.3g at "
                      "d_ms=%.6g. The money stock enters the excess additively, so d(excess)/dR at the pre-jump point "
                      "stays zero for every d_ms: the point can only be a fold of the shifted curve, never a point of "
                      "a stable branch",
                      d_lo, d_hi, branch_label(plan.target_branch).c_str(), fold.y_fold, fold.r_fold, best_abs, best_d);
        plan.diagnosis = buf;
        return plan;
    }
    double a = bracket->first, b = bracket->second;
    double fa = *phi(a);
    while (b - a > opts.tolerance) {
        const double mid = 0.5 * (a + b);
        const auto fm = phi(mid);
        if (!fm) break;
        if ((*fm <= 0.0) == (fa <= 0.0)) {
            a = mid;
            fa = *fm;
        } else {
            b = mid;
        }
    }
    plan.delta = 0.5 * (a + b);
    const auto res = phi(plan.delta);
    plan.residual = res ? *res : std::numeric_limits<double>::quiet_NaN();
    if (!res || std::abs(*res) > opts.tolerance) {
        plan.solvable = false;
        plan.diagnosis = "bisection on d_ms did not reach the branch-match tolerance";
    }
    return plan;
}

struct ControllerOptions {
    Mode mode = Mode::singular_limit;
    ScenarioOptions scenario;
    InitialState init;      ///< y is overridden by the ramp start
    double tail = 0.0;      ///< simulated time after the last ramp knot
};

struct RunSummary {
    Trajectory trajectory;
    std::vector<JumpEvent> jumps;
    std::size_t watched_jumps = 0;  ///< jumps at the watched fold
    double max_rate = 0.0;          ///< largest finite |dR/dt| between samples
};

struct ControllerReport {
    RunSummary uncontrolled;
    RunSummary controlled;
    bool fired = false;
    double t_fire = 0.0;
    double y_trigger = 0.0;
    bool late = false;
    std::string late_reason;
    double pre_trigger_r = 0.0;
    double band = 0.0;           ///< allowed |R - pre_trigger_r|: the jump height
    double max_deviation = 0.0;  ///< largest |R - pre_trigger_r| after firing (controlled run)
    bool within_band = false;
};

namespace detail {

inline double max_finite_rate(const Trajectory& tr) {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < tr.samples.size(); ++k) {
        const double dt = tr.samples[k + 1].t - tr.samples[k].t;
        if (dt > 0.0) m = std::max(m, std::abs(tr.samples[k + 1].r - tr.samples[k].r) / dt);
    }
    return m;
}

inline std::size_t count_watched(const std::vector<JumpEvent>& jumps, const FoldPoint& f) {
    const Direction dir = f.kind == FoldKind::lower_knee ? Direction::up : Direction::down;
    std::size_t n = 0;
    for (const auto& j : jumps)
        if (j.direction == dir && std::abs(j.y_at_jump - f.y_fold) <= 0.02 * std::abs(f.y_fold)) ++n;
    return n;
}

// First time the ramp reaches `level` moving toward the fold.
inline std::optional<double> first_crossing(const Ramp& ramp, double level, bool rising) {
    const auto past = [&](double y) { return rising ? y >= level : y <= level; };
    if (past(ramp.knots.front().second)) return ramp.knots.front().first;
    for (std::size_t k = 1; k < ramp.knots.size(); ++k) {
        const auto [t0, y0] = ramp.knots[k - 1];
        const auto [t1, y1] = ramp.knots[k];
        if (past(y1)) return t0 + (level - y0) / (y1 - y0) * (t1 - t0);
    }
    return std::nullopt;
}

}  // namespace detail

/// Runs the ramp with and without the planned monetary step. The step fires
/// the moment income comes within the trigger margin of the fold. The report
/// is late when the trigger never fires, when the uncontrolled jump starts no
/// later than the firing time, or when the controlled run still jumps there.
[[nodiscard]] inline ControllerReport run_with_controller(const ModelSpec& spec, const Ramp& ramp,
                                                          StabilizationPlan& plan, const ControllerOptions& opts = {}) {
    ramp.validate();
    if (!plan.solvable) throw ModelError("plan", "stabilization plan has no solution: " + plan.diagnosis);
    ControllerReport rep;
    const bool rising = plan.fold.kind == FoldKind::lower_knee;
    rep.y_trigger = plan.fold.y_fold * (rising ? 1.0 - plan.margin : 1.0 + plan.margin);
    const double t0 = ramp.knots.front().first;
    const double horizon = ramp.knots.back().first + opts.tail;

    Scenario base;
    base.horizon = horizon;
    base.steps.push_back(FiscalDrive{t0, ramp});
    InitialState init = opts.init;
    init.y = ramp.knots.front().second;

    Scenario ctl = base;
    const auto tf = detail::first_crossing(ramp, rep.y_trigger, rising);
    if (tf) {
        rep.fired = true;
        rep.t_fire = *tf;
        MonetaryStep m{*tf, 0.0, 0.0};
        (plan.instrument == Instrument::inflation ? m.d_pi : m.d_ms) = plan.delta;
        if (m.time <= t0) m.time = std::nextafter(t0, std::numeric_limits<double>::infinity());
        rep.t_fire = m.time;
        ctl.steps.push_back(m);
        plan.fired.push_back(FiredEvent{m.time, ramp.at(m.time), m.d_pi, m.d_ms});
    }

    auto f_off = std::async(std::launch::async, [&] { return apply_scenario(spec, base, init, opts.mode, opts.scenario); });
    auto f_on = std::async(std::launch::async, [&] { return apply_scenario(spec, ctl, init, opts.mode, opts.scenario); });
    auto off = f_off.get();
    auto on = f_on.get();

    const auto summarize = [&](ScenarioResult& r) {
        RunSummary s;
        s.max_rate = detail::max_finite_rate(r.trajectory);
        s.watched_jumps = detail::count_watched(r.jumps, plan.fold);
        s.jumps = std::move(r.jumps);
        s.trajectory = std::move(r.trajectory);
        return s;
    };
    rep.uncontrolled = summarize(off);
    rep.controlled = summarize(on);

    rep.band = std::abs(plan.target_rate - plan.fold.r_fold);
    if (rep.fired) {
        // Rate just before firing, then the largest excursion afterwards.
        const auto& s = rep.controlled.trajectory.samples;
        std::size_t k = 0;
        while (k + 1 < s.size() && s[k + 1].t < rep.t_fire) ++k;
        rep.pre_trigger_r = s.empty() ? 0.0 : s[k].r;
        for (const auto& x : s)
            if (x.t >= rep.t_fire) rep.max_deviation = std::max(rep.max_deviation, std::abs(x.r - rep.pre_trigger_r));
        rep.within_band = rep.max_deviation < rep.band;
    }

    if (!rep.fired) {
        rep.late = true;
        rep.late_reason = "the ramp never reaches the trigger level";
    } else {
        const Direction dir = rising ? Direction::up : Direction::down;
        // Ties count as late; the reduced engine locates fold crossings by bisection.
        const double tie = 1e-9 * std::max(1.0, horizon);
        for (const auto& j : rep.uncontrolled.jumps) {
            if (j.direction == dir && std::abs(j.y_at_jump - plan.fold.y_fold) <= 0.02 * std::abs(plan.fold.y_fold) &&
                j.t_start <= rep.t_fire + tie) {
                rep.late = true;
                rep.late_reason = "the uncontrolled jump starts at t=" + std::to_string(j.t_start) +
                                  ", not after the trigger at t=" + std::to_string(rep.t_fire);
                break;
            }
        }
        if (!rep.late && rep.controlled.watched_jumps > 0) {
            rep.late = true;
            rep.late_reason = "the controlled run still jumps at the watched fold";
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Negative rates

struct RateCrossing {
    double t = 0.0;
    double r_from = 0.0;
    double r_to = 0.0;
    bool jump = false;
    Direction direction = Direction::up;
    friend bool operator==(const RateCrossing&, const RateCrossing&) = default;
};

struct NegativeRateReport {
    std::vector<RateCrossing> crossings;
    double r_min = 0.0;  ///< cycle minimum when a cycle is found, else trajectory minimum
    bool cycle_found = false;
    bool touching = false;  ///< |r_min| within the touch tolerance

    [[nodiscard]] bool jump_crossing() const {
        return std::any_of(crossings.begin(), crossings.end(), [](const RateCrossing& c) { return c.jump; });
    }

    friend bool operator==(const NegativeRateReport&, const NegativeRateReport&) = default;
};

[[nodiscard]] inline NegativeRateReport rate_sign_report(const Trajectory& tr, const std::vector<JumpEvent>& jumps,
                                                         double touch_tol = 1e-6, const CycleOptions& copts = {}) {
    NegativeRateReport rep;
    const auto& s = tr.samples;
    std::vector<char> covered(s.size() > 0 ? s.size() - 1 : 0, 0);
    for (const auto& j : jumps) {
        for (std::size_t k = j.i_from; k < j.i_to && k < covered.size(); ++k) covered[k] = 1;
        if ((j.r_from < 0.0) != (j.r_to < 0.0))
            rep.crossings.push_back({j.t_start, j.r_from, j.r_to, true, j.r_to > j.r_from ? Direction::up : Direction::down});
    }
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        if (covered[k]) continue;
        const double a = s[k].r, b = s[k + 1].r;
        if ((a < 0.0) != (b < 0.0)) {
            const double t = s[k].t + (0.0 - a) / (b - a) * (s[k + 1].t - s[k].t);
            rep.crossings.push_back({t, a, b, false, b > a ? Direction::up : Direction::down});
        }
    }
    std::sort(rep.crossings.begin(), rep.crossings.end(), [](const RateCrossing& a, const RateCrossing& b) { return a.t < b.t; });
    const auto cyc = detect_cycle(tr, copts);
    if (cyc) {
        rep.cycle_found = true;
        rep.r_min = cyc->r_extent.lo;
    } else {
        rep.r_min = std::numeric_limits<double>::infinity();
        for (const auto& x : s) rep.r_min = std::min(rep.r_min, x.r);
        if (s.empty()) rep.r_min = 0.0;
    }
    rep.touching = std::abs(rep.r_min) <= touch_tol;
    return rep;
}

/// Runs the scenario and reports every sign change of R, by jump or slow drift.
[[nodiscard]] inline NegativeRateReport negative_rate_probe(const ModelSpec& spec, const Scenario& sc,
                                                            const InitialState& init, Mode mode,
                                                            const ScenarioOptions& opts = {}, double touch_tol = 1e-6) {
    const auto res = apply_scenario(spec, sc, init, mode, opts);
    CycleOptions c;
    c.jumps = opts.jumps;
    return rate_sign_report(res.trajectory, res.jumps, touch_tol, c);
}

/// Bisection on expected inflation for the level at which the probe's
/// minimum rate is exactly zero. `pi_lo` must leave the minimum positive and
/// `pi_hi` negative.
[[nodiscard]] inline double touching_inflation(const ModelSpec& spec, const Scenario& sc, const InitialState& init,
                                               Mode mode, double pi_lo, double pi_hi, double tol = 1e-8,
                                               const ScenarioOptions& opts = {}) {
    const auto r_min = [&](double pi) {
        ModelSpec s = spec;
        s.params.expected_inflation = pi;
        InitialState st = init;
        st.r = init.r - (pi - spec.params.expected_inflation);
        return negative_rate_probe(s, sc, st, mode, opts).r_min;
    };
    double flo = r_min(pi_lo), fhi = r_min(pi_hi);
    if (!(flo > 0.0 && fhi < 0.0))
        throw NumericalError("touching_inflation: the bracket does not straddle a zero cycle minimum");
    while (pi_hi - pi_lo > tol) {
        const double mid = 0.5 * (pi_lo + pi_hi);
        if (r_min(mid) > 0.0)
            pi_lo = mid;
        else
            pi_hi = mid;
    }
    return 0.5 * (pi_lo + pi_hi);
}

}  // namespace islm

#pragma once

// Time integration in both modes.
//
// FullEngine integrates dY/dt = eps*alpha*(I - S + g), dR/dt = beta*(L - M - M_S)
// with the adaptive Dormand-Prince pair. ReducedEngine implements the singular
// limit on slow time tau = eps*t: R is slaved to a stable isocline branch and
// jumps instantaneously at folds. Both engines accept spec changes between
// segments and a prescribed income path (a ramp) in place of the goods market.

#include <islm/errors.hpp>
#include <islm/geometry.hpp>
#include <islm/model.hpp>
#include <islm/ode.hpp>
#include <islm/trajectory.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace islm {

/// Piecewise-linear income path over absolute time; constant past its ends.
struct Ramp {
    std::vector<std::pair<double, double>> knots;  ///< (t, Y), t strictly increasing

    void validate() const {
        if (knots.empty()) throw ModelError("knots", "ramp needs at least one knot");
        for (std::size_t k = 0; k < knots.size(); ++k) {
            if (!(knots[k].second >= 0.0)) throw ModelError("knots[" + std::to_string(k) + "]", "income must be >= 0");
            if (k > 0 && !(knots[k].first > knots[k - 1].first))
                throw ModelError("knots[" + std::to_string(k) + "]", "knot times must be strictly increasing");
        }
    }

    [[nodiscard]] double at(double t) const {
        if (t <= knots.front().first) return knots.front().second;
        if (t >= knots.back().first) return knots.back().second;
        auto it = std::upper_bound(knots.begin(), knots.end(), t,
                                   [](double x, const std::pair<double, double>& k) { return x < k.first; });
        const auto& [t1, y1] = *it;
        const auto& [t0, y0] = *std::prev(it);
        return y0 + (y1 - y0) * (t - t0) / (t1 - t0);
    }

    /// Knot times strictly inside (a, b).
    [[nodiscard]] std::vector<double> breaks(double a, double b) const {
        std::vector<double> out;
        for (const auto& k : knots)
            if (k.first > a && k.first < b) out.push_back(k.first);
        return out;
    }

    friend bool operator==(const Ramp&, const Ramp&) = default;
};

// ---------------------------------------------------------------------------
// Full epsilon-system

struct FullOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_max = 0.0;
    std::size_t max_steps = 50'000'000;
};

class FullEngine {
public:
    FullEngine(ModelSpec spec, double t0, double y0, double r0, double stride, FullOptions opts = {})
        : spec_(std::move(spec)), t_(t0), y_(y0), r_(r0), t0_(t0), stride_(stride), opts_(opts) {
        if (!(stride > 0.0)) throw std::invalid_argument("FullEngine: stride must be > 0");
        if (y0 < 0.0) throw DomainError("initial income must be >= 0");
        traj_.mode = Mode::full_epsilon;
        traj_.spec_id = spec_fingerprint(spec_);
        emit(t_, y_, r_);
    }

    void set_spec(ModelSpec spec) { spec_ = std::move(spec); }
    void set_fiscal_shift(double g) { g_ = g; }
    [[nodiscard]] const ModelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] double t() const noexcept { return t_; }
    [[nodiscard]] double y() const noexcept { return y_; }
    [[nodiscard]] double r() const noexcept { return r_; }
    [[nodiscard]] const ode::Stats& stats() const noexcept { return stats_; }

    /// Autonomous flow up to t1.
    void advance(double t1) {
        if (t1 <= t_) return;
        const auto f = [this](double, const ode::State<2>& s) {
            const auto& p = spec_.params;
            return ode::State<2>{p.epsilon * p.alpha * (excess_goods(s[0], s[1], spec_) + g_),
                                 p.beta * excess_money(s[0], s[1], spec_)};
        };
        ode::State<2> s{y_, r_};
        guarded([&] {
            ode::integrate<2>(f, t_, t1, s, tolerances(),
                              [&](double ta, const ode::State<2>& ya, const ode::State<2>& fa, double tb,
                                  const ode::State<2>& yb, const ode::State<2>& fb) {
                                  emit_grid(ta, tb, [&](double t) { return ode::hermite<2>(ta, ya, fa, tb, yb, fb, t); });
                                  return true;
                              },
                              &stats_);
        });
        t_ = t1;
        y_ = s[0];
        r_ = s[1];
    }

    /// Income follows the ramp; only R is integrated.
    void advance_driven(const Ramp& ramp, double t1) {
        if (t1 <= t_) return;
        auto cuts = ramp.breaks(t_, t1);
        cuts.push_back(t1);
        for (double tb : cuts) advance_driven_piece(ramp, tb);
    }

    /// Closes the trajectory with a sample at the current time.
    Trajectory finish() {
        if (traj_.samples.empty() || traj_.samples.back().t < t_) traj_.samples.push_back({t_, y_, r_, Regime::slow});
        return traj_;
    }

private:
    ode::Tolerances tolerances() const {
        ode::Tolerances tol;
        tol.rtol = opts_.rtol;
        tol.atol = opts_.atol;
        tol.h_max = opts_.h_max;
        tol.max_steps = opts_.max_steps;
        return tol;
    }

    template <class F>
    void guarded(F&& body) {
        try {
            body();
        } catch (const DomainError& e) {
            throw NumericalError(std::string("state left the domain Y >= 0 near t=") + std::to_string(t_) + ": " +
                                 e.what());
        }
    }

    void advance_driven_piece(const Ramp& ramp, double t1) {
        const auto f = [&](double t, const ode::State<1>& s) {
            return ode::State<1>{spec_.params.beta * excess_money(ramp.at(t), s[0], spec_)};
        };
        ode::State<1> s{r_};
        guarded([&] {
            ode::integrate<1>(f, t_, t1, s, tolerances(),
                              [&](double ta, const ode::State<1>& ya, const ode::State<1>& fa, double tb,
                                  const ode::State<1>& yb, const ode::State<1>& fb) {
                                  emit_grid(ta, tb, [&](double t) {
                                      return ode::State<2>{ramp.at(t), ode::hermite<1>(ta, ya, fa, tb, yb, fb, t)[0]};
                                  });
                                  return true;
                              },
                              &stats_);
        });
        t_ = t1;
        y_ = ramp.at(t1);
        r_ = s[0];
    }

    template <class Interp>
    void emit_grid(double ta, double tb, const Interp& interp) {
        for (;;) {
            const double tg = t0_ + stride_ * static_cast<double>(next_k_);
            if (tg > tb) break;
            if (tg > ta || (tg == ta && traj_.samples.back().t < tg)) {
                const auto s = interp(tg);
                emit(tg, s[0], s[1]);
            }
            ++next_k_;
        }
    }

    void emit(double t, double y, double r) {
        if (!traj_.samples.empty() && traj_.samples.back().t >= t) return;
        traj_.samples.push_back({t, y, r, Regime::slow});
    }

    ModelSpec spec_;
    double g_ = 0.0;
    double t_, y_, r_;
    double t0_;
    double stride_;
    FullOptions opts_;
    std::size_t next_k_ = 1;
    ode::Stats stats_;
    Trajectory traj_;
};

// ---------------------------------------------------------------------------
// Singular limit

struct ReducedOptions {
    double step = 1e-3;    ///< RK4 step in slow time
    double stride = 1e-2;  ///< output sampling in slow time
    Interval y_range{0.0, 20.0};
    TraceOptions trace;
    double jump_min = 0.01;  ///< re-slaving moves below this are not jumps
};

/// Root of excess_money(y, .) on a branch, by safeguarded Newton from a hint.
[[nodiscard]] inline double slaved_rate(const ModelSpec& spec, const Branch& b, double y, double hint) {
    const auto f = [&](double r) { return excess_money(y, r, spec); };
    double lo = b.r_range.lo, hi = b.r_range.hi;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) return std::abs(flo) < std::abs(fhi) ? lo : hi;
    const bool lo_negative = flo < 0.0;
    double r = std::clamp(hint, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double fr = f(r);
        if (fr == 0.0) return r;
        if ((fr < 0.0) == lo_negative)
            lo = r;
        else
            hi = r;
        const double d = excess_money_dr(r, spec);
        double next = d != 0.0 ? r - fr / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == r || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(r)))
            return next;
        if (std::abs(next - r) < 1e-15 * std::max(1.0, std::abs(r))) return next;
        r = next;
    }
    return roots::bisect(f, lo, hi);
}

class ReducedEngine {
public:
    /// Places the state on `branch0` (must be stable and contain y0) or, when
    /// absent, on the stable branch the fast flow from (y0, r_hint) reaches.
    ReducedEngine(ModelSpec spec, double t0, double y0, std::optional<int> branch0, double r_hint,
                  ReducedOptions opts = {})
        : spec_(std::move(spec)), opts_(std::move(opts)), t_(t0), y_(y0), t0_(t0) {
        if (!(opts_.step > 0.0) || !(opts_.stride > 0.0))
            throw std::invalid_argument("ReducedEngine: step and stride must be > 0");
        if (y0 < 0.0) throw DomainError("initial income must be >= 0");
        traj_.mode = Mode::singular_limit;
        traj_.spec_id = spec_fingerprint(spec_);
        iso_ = trace_lm_isocline(spec_, opts_.y_range, opts_.trace);
        if (branch0) {
            const int b = *branch0;
            if (b < 0 || b >= static_cast<int>(iso_.branches.size()))
                throw ModelError("branch0", "no branch " + std::to_string(b));
            const auto& br = iso_.branches[static_cast<std::size_t>(b)];
            if (!br.stable()) throw ModelError("branch0", branch_label(b) + " is not a stable branch");
            if (!br.y_range.contains(y0))
                throw ModelError("branch0", branch_label(b) + " does not extend to y=" + std::to_string(y0));
            branch_ = b;
            r_ = slaved_rate(spec_, br, y0, 0.5 * (br.r_range.lo + br.r_range.hi));
        } else {
            const auto [b, r] = settle(y0, r_hint);
            branch_ = b;
            r_ = r;
        }
        emit(t_, y_, r_, Regime::slow);
    }

    [[nodiscard]] const LMIsocline& isocline() const noexcept { return iso_; }
    [[nodiscard]] const ModelSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] double t() const noexcept { return t_; }
    [[nodiscard]] double y() const noexcept { return y_; }
    [[nodiscard]] double r() const noexcept { return r_; }
    [[nodiscard]] int branch() const noexcept { return branch_; }
    [[nodiscard]] const std::vector<JumpEvent>& jumps() const noexcept { return jumps_; }
    /// True when the slow flow has (numerically) stopped on a stable arc.
    [[nodiscard]] bool at_rest() const { return at_rest_ || std::abs(velocity(cur(), y_, r_)) < 1e-9; }

    void set_fiscal_shift(double g) { g_ = g; }

    /// Replaces the spec, retraces the isocline and lets the fast flow carry
    /// R to the stable branch whose basin holds the current point.
    void set_spec(ModelSpec spec) {
        spec_ = std::move(spec);
        iso_ = trace_lm_isocline(spec_, opts_.y_range, opts_.trace);
        const auto [b, r] = settle(y_, r_);
        move_rate(b, r);
    }

    /// Slow flow along the current branch up to t1.
    void advance(double t1) {
        while (t_ < t1) {
            const double tg = next_grid();
            const double h = std::min({opts_.step, tg - t_, t1 - t_});
            step_free(h);
            if (t_ >= tg) emit(t_, y_, r_, Regime::slow);
        }
    }

    /// Income follows the ramp up to t1.
    void advance_driven(const Ramp& ramp, double t1) {
        while (t_ < t1) {
            const double tg = next_grid();
            double tb = std::min(tg, t1);
            for (double k : ramp.breaks(t_, tb)) tb = std::min(tb, k);
            const double ya = y_, yb = ramp.at(tb);
            const auto& br = cur();
            if (yb > br.y_range.hi || yb < br.y_range.lo) {
                const bool up = yb > br.y_range.hi;
                const double edge = up ? br.y_range.hi : br.y_range.lo;
                double tc = t_ + (edge - ya) / (yb - ya) * (tb - t_);
                if (tc - t_ <= 1e-12 * std::max(1.0, std::abs(t_))) tc = t_;
                t_ = std::max(t_, std::min(tc, tb));
                y_ = edge;
                cross_end(up);
                continue;
            }
            t_ = tb;
            y_ = yb;
            r_ = slaved_rate(spec_, cur(), y_, r_);
            if (t_ >= tg) emit(t_, y_, r_, Regime::slow);
        }
    }

    Trajectory finish() {
        if (traj_.samples.empty() || traj_.samples.back().t < t_) emit(t_, y_, r_, Regime::slow);
        return traj_;
    }

private:
    const Branch& cur() const { return iso_.branches[static_cast<std::size_t>(branch_)]; }

    double next_grid() {
        for (;;) {
            const double tg = t0_ + opts_.stride * static_cast<double>(next_k_);
            if (tg > t_) return tg;
            ++next_k_;
        }
    }

    double velocity(const Branch& b, double y, double r_hint, double* r_out = nullptr) const {
        const double yc = std::clamp(y, b.y_range.lo, b.y_range.hi);
        const double r = slaved_rate(spec_, b, yc, r_hint);
        if (r_out) *r_out = r;
        return spec_.params.alpha * (excess_goods(yc, r, spec_) + g_);
    }

    double rk4(double y, double h) const {
        const auto& b = cur();
        const double k1 = velocity(b, y, r_);
        const double k2 = velocity(b, y + 0.5 * h * k1, r_);
        const double k3 = velocity(b, y + 0.5 * h * k2, r_);
        const double k4 = velocity(b, y + h * k3, r_);
        return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    void step_free(double h) {
        const auto& b = cur();
        const double v0 = velocity(b, y_, r_);
        if (v0 == 0.0) {
            at_rest_ = true;
            t_ += h;
            return;
        }
        const bool up = v0 > 0.0;
        const double edge = up ? b.y_range.hi : b.y_range.lo;
        if (y_ == edge) {
            cross_end(up);
            return;
        }
        const double yn = rk4(y_, h);
        const bool crossed = up ? yn >= edge : yn <= edge;
        if (!crossed) {
            t_ += h;
            y_ = yn;
            r_ = slaved_rate(spec_, b, y_, r_);
            if (near_stall(b, up, edge)) stall(edge);
            return;
        }
        const auto [lo, hi] = roots::bisect_predicate(
            [&](double th) {
                const double yy = rk4(y_, th * h);
                return up ? yy >= edge : yy <= edge;
            },
            0.0, 1.0, 1e-13);
        (void)lo;
        t_ += hi * h;
        y_ = edge;
        cross_end(up);
    }

    // Fold approach with a vanishing slow velocity never completes.
    bool near_stall(const Branch& b, bool up, double edge) const {
        const auto& end = up ? b.high_y_end : b.low_y_end;
        if (end.kind != BranchEnd::Kind::fold || std::abs(y_ - edge) > 1e-9) return false;
        return std::abs(velocity(b, edge, r_)) < 1e-13;
    }

    [[noreturn]] void stall(double edge) const {
        throw NumericalError("reduced_simulate: slow flow stalls at the fold y=" + std::to_string(edge) + " on " +
                             branch_label(branch_) + " (dY/dtau = 0 there); no jump is taken");
    }

    void cross_end(bool up) {
        const auto& b = cur();
        const auto& end = up ? b.high_y_end : b.low_y_end;
        if (end.kind != BranchEnd::Kind::fold)
            throw NumericalError("reduced_simulate: state left the traced income range at y=" + std::to_string(y_) +
                                 " on " + branch_label(branch_) + "; widen y_range");
        const auto& fold = iso_.folds[static_cast<std::size_t>(end.fold)];
        y_ = fold.y_fold;
        r_ = fold.r_fold;
        const Direction dir = fold.kind == FoldKind::lower_knee ? Direction::up : Direction::down;
        int land = -1;
        double land_r = 0.0;
        for (const auto& c : iso_.branches) {
            if (c.id == branch_ || !c.stable()) continue;
            if (y_ < c.y_range.lo - 1e-9 || y_ > c.y_range.hi + 1e-9) continue;
            const double rc = slaved_rate(spec_, c, std::clamp(y_, c.y_range.lo, c.y_range.hi),
                                          0.5 * (c.r_range.lo + c.r_range.hi));
            const bool ahead = dir == Direction::up ? rc > r_ : rc < r_;
            if (!ahead) continue;
            if (land < 0 || std::abs(rc - r_) < std::abs(land_r - r_)) {
                land = c.id;
                land_r = rc;
            }
        }
        if (land < 0)
            throw NumericalError("reduced_simulate: no stable landing branch at the fold y=" + std::to_string(y_) +
                                 " (malformed isocline)");
        record_jump(land, land_r, dir);
    }

    // Nearest stable branch reached by the fast flow from (y, r).
    std::pair<int, double> settle(double y, double r) const {
        const double e = excess_money(y, r, spec_);
        int best = -1;
        double best_r = 0.0;
        for (const auto& c : iso_.branches) {
            if (!c.stable() || !c.y_range.contains(y)) continue;
            const double rc = slaved_rate(spec_, c, y, r);
            if (std::abs(rc - r) < 1e-10) return {c.id, rc};
            const bool ok = e > 0.0 ? rc > r : (e < 0.0 ? rc < r : true);
            if (!ok) continue;
            if (best < 0 || std::abs(rc - r) < std::abs(best_r - r)) {
                best = c.id;
                best_r = rc;
            }
        }
        if (best < 0)
            throw NumericalError("reduced_simulate: no stable branch reachable from (" + std::to_string(y) + ", " +
                                 std::to_string(r) + ") inside the traced rate range");
        return {best, best_r};
    }

    void move_rate(int b, double r) {
        const double dr = r - r_;
        branch_ = b;
        if (dr == 0.0) return;
        if (std::abs(dr) > opts_.jump_min) {
            record_jump(b, r, dr > 0.0 ? Direction::up : Direction::down);
        } else {
            emit(t_, y_, r_, Regime::slow);
            traj_.samples.push_back({t_, y_, r, Regime::slow});
            r_ = r;
        }
    }

    void record_jump(int land, double land_r, Direction dir) {
        emit(t_, y_, r_, Regime::slow);
        JumpEvent e;
        e.t_start = e.t_end = t_;
        e.y_at_jump = y_;
        e.r_from = r_;
        e.r_to = land_r;
        e.direction = dir;
        e.i_from = traj_.samples.size() - 1;
        traj_.samples.push_back({t_, y_, land_r, Regime::jump});
        e.i_to = traj_.samples.size() - 1;
        jumps_.push_back(e);
        branch_ = land;
        r_ = land_r;
        at_rest_ = false;
    }

    // Appends unless the last sample already holds this exact state.
    void emit(double t, double y, double r, Regime g) {
        if (!traj_.samples.empty()) {
            const auto& b = traj_.samples.back();
            if (b.t == t && b.y == y && b.r == r) return;
        }
        traj_.samples.push_back({t, y, r, g});
    }

    ModelSpec spec_;
    ReducedOptions opts_;
    LMIsocline iso_;
    double g_ = 0.0;
    double t_, y_, r_ = 0.0;
    double t0_;
    int branch_ = -1;
    std::size_t next_k_ = 1;
    bool at_rest_ = false;
    std::vector<JumpEvent> jumps_;
    Trajectory traj_;
};

// ---------------------------------------------------------------------------
// Entry points

struct IntegrateOptions {
    FullOptions solver;
    double stride = 0.0;  ///< 0 selects t_end / 10000
    double fiscal_shift = 0.0;
    JumpOptions jumps;
};

/// Full epsilon-system from (y0, r0) over [0, t_end]. Regime flags come from
/// detect_jumps on the sampled output.
[[nodiscard]] inline Trajectory integrate(const ModelSpec& spec, double y0, double r0, double t_end,
                                          const IntegrateOptions& opts = {}) {
    if (t_end < 0.0) throw std::invalid_argument("integrate: t_end must be >= 0");
    if (y0 < 0.0) throw DomainError("integrate: y0 must be >= 0");
    if (t_end == 0.0) return Trajectory{Mode::full_epsilon, spec_fingerprint(spec), {}};
    const double stride = opts.stride > 0.0 ? opts.stride : t_end / 10000.0;
    FullEngine eng(spec, 0.0, y0, r0, stride, opts.solver);
    eng.set_fiscal_shift(opts.fiscal_shift);
    eng.advance(t_end);
    Trajectory tr = eng.finish();
    annotate_regimes(tr, detect_jumps(tr, opts.jumps));
    return tr;
}

struct ReducedRun {
    Trajectory trajectory;
    std::vector<JumpEvent> jumps;
    LMIsocline isocline;
    bool at_rest = false;  ///< the slow flow reached an equilibrium on a stable arc
};

/// Singular-limit run over slow time [0, t_end] starting on a stable branch.
[[nodiscard]] inline ReducedRun reduced_simulate(const ModelSpec& spec, double y0, int branch0, double t_end,
                                                 const ReducedOptions& opts = {}, double fiscal_shift = 0.0) {
    if (t_end < 0.0) throw std::invalid_argument("reduced_simulate: t_end must be >= 0");
    ReducedEngine eng(spec, 0.0, y0, branch0, 0.0, opts);
    eng.set_fiscal_shift(fiscal_shift);
    if (t_end == 0.0) return ReducedRun{Trajectory{Mode::singular_limit, spec_fingerprint(spec), {}}, {}, eng.isocline()};
    eng.advance(t_end);
    ReducedRun out;
    out.trajectory = eng.finish();
    out.jumps = eng.jumps();
    out.isocline = eng.isocline();
    out.at_rest = eng.at_rest();
    return out;
}

}  // namespace islm

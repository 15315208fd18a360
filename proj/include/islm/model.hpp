#pragma once

// Behavioural functions of the slow-fast IS-LM model.
//
// Goods market:  I(Y,R) = i0 + i_y*Y - i_r*R,   S(Y,R) = s0 + s_y*Y + s_r*R
// Money market:  L(Y,i) = l0 + l_y*Y + f_L(i),  M(Y,i) = m0 + m_y*Y + f_M(i)
// with i = R - MP + pi_e the short nominal rate.
//
// f_L and f_M are built derivative-first. Outside every trap window the
// slopes are the standard ones (-l_slope, +m_slope). Inside a window (P,Q)
// the slopes are reversed by a quartic bump that vanishes at P and Q, and a
// quintic-smoothstep skirt of width skirt_fraction*(Q-P) on each side blends
// the standard slope down to the exact zero at the window edge. Values are
// the exact piecewise integrals, so both functions are C^2.

#include <islm/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace islm {

/// Below this epsilon a spec is considered to be in slow-fast mode.
inline constexpr double kSlowFastThreshold = 0.01;

struct ModelParams {
    double alpha = 1.0;
    double beta = 1.0;
    double epsilon = 1e-3;
    double m_stock = 2.0;
    double maturity_premium = 0.02;
    double expected_inflation = 0.02;

    void validate() const {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ModelError("alpha", "must be > 0");
        if (!(beta > 0.0) || !std::isfinite(beta)) throw ModelError("beta", "must be > 0");
        if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ModelError("epsilon", "must lie in (0, 1]");
        if (!(m_stock > 0.0) || !std::isfinite(m_stock)) throw ModelError("m_stock", "must be > 0");
        if (!std::isfinite(maturity_premium)) throw ModelError("maturity_premium", "must be finite");
        if (!std::isfinite(expected_inflation)) throw ModelError("expected_inflation", "must be finite");
    }

    [[nodiscard]] bool slow_fast() const noexcept { return epsilon < kSlowFastThreshold; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Linear investment/saving block.
struct ISBlock {
    double i0 = 0.0, i_y = 0.0, i_r = 0.0;
    double s0 = 0.0, s_y = 0.0, s_r = 0.0;

    [[nodiscard]] double investment(double y, double r) const noexcept { return i0 + i_y * y - i_r * r; }
    [[nodiscard]] double saving(double y, double r) const noexcept { return s0 + s_y * y + s_r * r; }

    void validate() const {
        if (!(i_y > 0.0 && i_y < 1.0)) throw ModelError("i_y", "need 0 < dI/dY < 1");
        if (!(i_r > 0.0)) throw ModelError("i_r", "need dI/dR < 0 (i_r > 0)");
        if (!(s_y > 0.0 && s_y < 1.0)) throw ModelError("s_y", "need 0 < dS/dY < 1");
        if (!(s_r > 0.0)) throw ModelError("s_r", "need dS/dR > 0 (s_r > 0)");
        if (!(i_y < s_y)) throw ModelError("i_y", "need dI/dY < dS/dY for a decreasing IS curve");
    }

    friend bool operator==(const ISBlock&, const ISBlock&) = default;
};

/// Short-rate interval (p, q) on which money demand and endogenous supply
/// respond to the short rate with reversed signs.
struct TrapWindow {
    double p = 0.0;
    double q = 0.0;
    double amp_l = 0.0;  ///< peak of dL/di inside the window (> 0)
    double amp_m = 0.0;  ///< peak of -dM/di inside the window (> 0)

    friend bool operator==(const TrapWindow&, const TrapWindow&) = default;
};

namespace detail {

inline double smoothstep5(double x) noexcept { return x * x * x * (x * (6.0 * x - 15.0) + 10.0); }

// Integral of smoothstep5 over [0, x].
inline double smoothstep5_integral(double x) noexcept {
    const double x2 = x * x;
    return x2 * x2 * (x * (x - 3.0) + 2.5);
}

// Reversal bump 16 t^2 (1-t)^2: zero value and slope at both ends, peak 1.
// It equals smoothstep5'(t) / 1.875, so its integral is (8/15) smoothstep5.
inline double reversal_bump(double t) noexcept {
    const double u = t * (1.0 - t);
    return 16.0 * u * u;
}

inline constexpr double kBumpIntegral = 8.0 / 15.0;

}  // namespace detail

/// Derivative-first three-phase profile f(i) with f(0) = 0.
///
/// `outside_slope` is the signed slope away from all windows. Inside a window
/// the slope is -sign(outside_slope) * amp * bump.
class ThreePhaseProfile {
public:
    struct Segment {
        enum class Kind { linear, approach, reversed, exit };
        Kind kind;
        double lo, hi;
        double amp;         // reversed segments only
        double base_value;  // f(lo) - f(anchor), anchor = first breakpoint
    };

    ThreePhaseProfile() = default;

    ThreePhaseProfile(double outside_slope, std::span<const TrapWindow> windows,
                      std::span<const double> amps, double skirt_fraction)
        : slope_(outside_slope) {
        double acc = 0.0;
        double prev_end = 0.0;
        bool first = true;
        for (std::size_t k = 0; k < windows.size(); ++k) {
            const auto& w = windows[k];
            const double skirt = skirt_fraction * (w.q - w.p);
            const double a = w.p - skirt;
            if (!first) {
                segments_.push_back({Segment::Kind::linear, prev_end, a, 0.0, acc});
                acc += slope_ * (a - prev_end);
            }
            first = false;
            segments_.push_back({Segment::Kind::approach, a, w.p, 0.0, acc});
            acc += slope_ * skirt * 0.5;
            segments_.push_back({Segment::Kind::reversed, w.p, w.q, amps[k], acc});
            acc += reversed_sign() * amps[k] * (w.q - w.p) * detail::kBumpIntegral;
            segments_.push_back({Segment::Kind::exit, w.q, w.q + skirt, 0.0, acc});
            acc += slope_ * skirt * 0.5;
            prev_end = w.q + skirt;
        }
        offset_ = 0.0;
        offset_ = raw_value(0.0);
    }

    [[nodiscard]] double derivative(double i) const noexcept {
        const Segment* s = find(i);
        if (s == nullptr) return slope_;
        switch (s->kind) {
            case Segment::Kind::linear: return slope_;
            case Segment::Kind::approach:
                // 1 - S(u) = S(1 - u), without cancellation next to the window edge
                return slope_ * detail::smoothstep5((s->hi - i) / (s->hi - s->lo));
            case Segment::Kind::reversed:
                return reversed_sign() * s->amp * detail::reversal_bump((i - s->lo) / (s->hi - s->lo));
            case Segment::Kind::exit: return slope_ * detail::smoothstep5((i - s->lo) / (s->hi - s->lo));
        }
        return slope_;
    }

    [[nodiscard]] double value(double i) const noexcept { return raw_value(i) - offset_; }

    [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return segments_; }

private:
    [[nodiscard]] double reversed_sign() const noexcept { return slope_ < 0.0 ? 1.0 : -1.0; }

    [[nodiscard]] const Segment* find(double i) const noexcept {
        if (segments_.empty() || i < segments_.front().lo || i >= segments_.back().hi) return nullptr;
        auto it = std::upper_bound(segments_.begin(), segments_.end(), i,
                                   [](double x, const Segment& s) { return x < s.lo; });
        return &*std::prev(it);
    }

    [[nodiscard]] double raw_value(double i) const noexcept {
        if (segments_.empty()) return slope_ * i;
        if (i < segments_.front().lo) return slope_ * (i - segments_.front().lo);
        const auto& last = segments_.back();
        if (i >= last.hi) {
            const double end = last.base_value + slope_ * (last.hi - last.lo) * 0.5;
            return end + slope_ * (i - last.hi);
        }
        const Segment& s = *find(i);
        const double width = s.hi - s.lo;
        const double u = (i - s.lo) / width;
        switch (s.kind) {
            case Segment::Kind::linear: return s.base_value + slope_ * (i - s.lo);
            case Segment::Kind::approach:
                return s.base_value + slope_ * width * (u - detail::smoothstep5_integral(u));
            case Segment::Kind::reversed:
                return s.base_value + reversed_sign() * s.amp * width * detail::kBumpIntegral * detail::smoothstep5(u);
            case Segment::Kind::exit: return s.base_value + slope_ * width * detail::smoothstep5_integral(u);
        }
        return 0.0;
    }

    double slope_ = 0.0;
    double offset_ = 0.0;
    std::vector<Segment> segments_;
};

/// Money demand L and endogenous money supply M as functions of (Y, i_S).
class MoneyBlock {
public:
    MoneyBlock() = default;

    [[nodiscard]] double demand(double y, double i) const noexcept { return l0_ + l_y_ * y + f_l_.value(i); }
    [[nodiscard]] double supply(double y, double i) const noexcept { return m0_ + m_y_ * y + f_m_.value(i); }
    [[nodiscard]] double demand_di(double i) const noexcept { return f_l_.derivative(i); }
    [[nodiscard]] double supply_di(double i) const noexcept { return f_m_.derivative(i); }

    [[nodiscard]] double l_y() const noexcept { return l_y_; }
    [[nodiscard]] double m_y() const noexcept { return m_y_; }
    [[nodiscard]] double l_slope() const noexcept { return l_slope_; }
    [[nodiscard]] double m_slope() const noexcept { return m_slope_; }
    [[nodiscard]] double l0() const noexcept { return l0_; }
    [[nodiscard]] double m0() const noexcept { return m0_; }
    [[nodiscard]] double skirt_fraction() const noexcept { return skirt_fraction_; }
    [[nodiscard]] const std::vector<TrapWindow>& windows() const noexcept { return windows_; }

    void validate() const {
        if (!(l_y_ > 0.0)) throw ModelError("l_y", "need dL/dY > 0");
        if (!(m_y_ > 0.0)) throw ModelError("m_y", "need dM/dY > 0");
        if (!(m_y_ < l_y_)) throw ModelError("m_y", "need dM/dY < dL/dY");
    }

    /// Half-width of the blending skirt around window k.
    [[nodiscard]] double skirt(std::size_t k) const { return skirt_fraction_ * (windows_.at(k).q - windows_.at(k).p); }

    /// True when i lies strictly inside some trap window.
    [[nodiscard]] bool in_window(double i) const noexcept {
        return std::any_of(windows_.begin(), windows_.end(), [i](const TrapWindow& w) { return i > w.p && i < w.q; });
    }

    friend bool operator==(const MoneyBlock& a, const MoneyBlock& b) {
        return a.l_y_ == b.l_y_ && a.m_y_ == b.m_y_ && a.l_slope_ == b.l_slope_ && a.m_slope_ == b.m_slope_ &&
               a.l0_ == b.l0_ && a.m0_ == b.m0_ && a.skirt_fraction_ == b.skirt_fraction_ && a.windows_ == b.windows_;
    }

    friend MoneyBlock build_three_phase_money(double l_y, double m_y, double l_slope, double m_slope, double l0,
                                              double m0, std::vector<TrapWindow> windows, double skirt_fraction);

private:
    double l_y_ = 0.0, m_y_ = 0.0, l_slope_ = 0.0, m_slope_ = 0.0, l0_ = 0.0, m0_ = 0.0;
    double skirt_fraction_ = 0.25;
    std::vector<TrapWindow> windows_;
    ThreePhaseProfile f_l_, f_m_;
};

/// Smallest bump peak that still counts as a signed derivative.
inline constexpr double kMinWindowAmplitude = 1e-9;

/// Builds the three-phase money block. Windows must be sorted, positive and
/// separated including their skirts. The income slopes are not checked here;
/// see MoneyBlock::validate.
inline MoneyBlock build_three_phase_money(double l_y, double m_y, double l_slope, double m_slope, double l0, double m0,
                                          std::vector<TrapWindow> windows, double skirt_fraction = 0.25) {
    if (!(l_slope > 0.0)) throw ModelError("l_slope", "must be > 0");
    if (!(m_slope > 0.0)) throw ModelError("m_slope", "must be > 0");
    if (!std::isfinite(l0)) throw ModelError("l0", "must be finite");
    if (!std::isfinite(m0)) throw ModelError("m0", "must be finite");
    if (!(skirt_fraction > 0.0 && skirt_fraction <= 1.0)) throw ModelError("skirt_fraction", "must lie in (0, 1]");

    double prev_end = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < windows.size(); ++k) {
        const auto& w = windows[k];
        const std::string at = "windows[" + std::to_string(k) + "]";
        if (!(w.p > 0.0)) throw ModelError(at + ".p", "must be > 0");
        if (!(w.q > w.p)) throw ModelError(at + ".q", "must exceed p");
        if (!(w.amp_l > kMinWindowAmplitude))
            throw ModelError(at + ".amp_l", "too small to reverse the sign of dL/di inside the window");
        if (!(w.amp_m > kMinWindowAmplitude))
            throw ModelError(at + ".amp_m", "too small to reverse the sign of dM/di inside the window");
        const double skirt = skirt_fraction * (w.q - w.p);
        if (w.p - skirt < prev_end)
            throw ModelError(at, "windows must be sorted ascending and disjoint (including skirts)");
        prev_end = w.q + skirt;
    }

    MoneyBlock mb;
    mb.l_y_ = l_y;
    mb.m_y_ = m_y;
    mb.l_slope_ = l_slope;
    mb.m_slope_ = m_slope;
    mb.l0_ = l0;
    mb.m0_ = m0;
    mb.skirt_fraction_ = skirt_fraction;
    mb.windows_ = std::move(windows);

    std::vector<double> amp_l, amp_m;
    for (const auto& w : mb.windows_) {
        amp_l.push_back(w.amp_l);
        amp_m.push_back(w.amp_m);
    }
    mb.f_l_ = ThreePhaseProfile(-l_slope, mb.windows_, amp_l, skirt_fraction);
    mb.f_m_ = ThreePhaseProfile(m_slope, mb.windows_, amp_m, skirt_fraction);
    return mb;
}

struct ModelSpec {
    ModelParams params;
    ISBlock is_block;
    MoneyBlock money;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Structural invariants of all three blocks; throws ModelError naming the field.
inline void validate_spec(const ModelSpec& spec) {
    spec.params.validate();
    spec.is_block.validate();
    spec.money.validate();
}

/// i_S = R - MP + pi_e.
[[nodiscard]] inline double short_rate(double r, const ModelParams& params) noexcept {
    return r - params.maturity_premium + params.expected_inflation;
}

/// I(y,r) - S(y,r).
[[nodiscard]] inline double excess_goods(double y, double r, const ModelSpec& spec) {
    if (y < 0.0) throw DomainError("excess_goods: income must be non-negative, got " + std::to_string(y));
    return spec.is_block.investment(y, r) - spec.is_block.saving(y, r);
}

/// L(y,i_S) - M(y,i_S) - M_S.
[[nodiscard]] inline double excess_money(double y, double r, const ModelSpec& spec) {
    if (y < 0.0) throw DomainError("excess_money: income must be non-negative, got " + std::to_string(y));
    const double i = short_rate(r, spec.params);
    return spec.money.demand(y, i) - spec.money.supply(y, i) - spec.params.m_stock;
}

/// d(excess_money)/dR, exact.
[[nodiscard]] inline double excess_money_dr(double r, const ModelSpec& spec) noexcept {
    const double i = short_rate(r, spec.params);
    return spec.money.demand_di(i) - spec.money.supply_di(i);
}

/// d(excess_money)/dY, constant for this block.
[[nodiscard]] inline double excess_money_dy(const ModelSpec& spec) noexcept {
    return spec.money.l_y() - spec.money.m_y();
}

}  // namespace islm

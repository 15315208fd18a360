#pragma once

// IS curve, the branch-decomposed LM isocline, equilibria and LM shifts.

#include <islm/errors.hpp>
#include <islm/model.hpp>
#include <islm/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace islm {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Point {
    double y = 0.0;
    double r = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

// ---------------------------------------------------------------------------
// IS curve

/// R_IS(Y) = intercept + slope * Y, from I - S + g = 0.
struct ISCurve {
    double intercept = 0.0;
    double slope = 0.0;
    Interval y_range{0.0, std::numeric_limits<double>::infinity()};

    [[nodiscard]] double rate(double y) const noexcept { return intercept + slope * y; }
};

/// Closed-form IS curve; `fiscal_shift` is an additive term in I - S.
[[nodiscard]] inline ISCurve is_curve(const ModelSpec& spec, double fiscal_shift = 0.0) {
    const auto& b = spec.is_block;
    const double denom = b.i_r + b.s_r;
    return ISCurve{(b.i0 - b.s0 + fiscal_shift) / denom, -(b.s_y - b.i_y) / denom};
}

// ---------------------------------------------------------------------------
// LM roots at fixed income

struct RootScan {
    std::vector<double> roots;
    std::vector<std::string> warnings;
};

/// Real rates at which the rate `r` maps onto a window edge of the money block.
[[nodiscard]] inline std::vector<double> window_edge_rates(const ModelSpec& spec) {
    std::vector<double> out;
    const double shift = spec.params.maturity_premium - spec.params.expected_inflation;
    for (const auto& w : spec.money.windows()) {
        out.push_back(w.p + shift);
        out.push_back(w.q + shift);
    }
    return out;
}

/// All roots of excess_money(y, .) in `r_range`, ascending.
[[nodiscard]] inline RootScan lm_roots(double y, const ModelSpec& spec, Interval r_range, std::size_t scan_n) {
    if (scan_n < 200) throw std::invalid_argument("lm_roots: scan_n must be >= 200");
    if (y < 0.0) throw DomainError("lm_roots: income must be non-negative");
    RootScan out;
    const auto f = [&](double r) { return excess_money(y, r, spec); };
    const auto edges = window_edge_rates(spec);
    const double cell = r_range.width() / static_cast<double>(scan_n);
    for (const auto& br : roots::scan_sign_changes(f, r_range.lo, r_range.hi, scan_n)) {
        if (br.lo == br.hi) {
            // A sample landing exactly on a double root (a fold) is not a crossing.
            const double a = br.lo - 0.5 * cell, b = br.lo + 0.5 * cell;
            if (a >= r_range.lo && b <= r_range.hi && (f(a) < 0.0) == (f(b) < 0.0)) continue;
        }
        out.roots.push_back(br.lo == br.hi ? br.lo : roots::bisect(f, br.lo, br.hi, br.flo, br.fhi));
        for (double e : edges) {
            if (e >= br.lo && e <= br.hi) {
                out.warnings.push_back("bracket [" + std::to_string(br.lo) + ", " + std::to_string(br.hi) +
                                       "] at y=" + std::to_string(y) +
                                       " straddles a window edge where d(excess)/dR vanishes (tangency risk)");
            }
        }
    }
    return out;
}

/// Income at which excess_money(., r) vanishes; excess_money is strictly
/// increasing in income. Empty when the LM point would need negative income.
[[nodiscard]] inline std::optional<double> lm_income(double r, const ModelSpec& spec) {
    const auto f = [&](double y) { return excess_money(y, r, spec); };
    const double f0 = f(0.0);
    if (f0 > 0.0) return std::nullopt;
    if (f0 == 0.0) return 0.0;
    double hi = 1.0;
    double fhi = f(hi);
    for (int it = 0; fhi < 0.0 && it < 200; ++it) {
        hi *= 2.0;
        fhi = f(hi);
    }
    if (fhi < 0.0) return std::nullopt;
    return roots::bisect(f, 0.0, hi, f0, fhi);
}

// ---------------------------------------------------------------------------
// Isocline

enum class Stability { stable, unstable };

/// lower_knee: end of a lower stable arc, a local maximum of income along the
/// curve (the state jumps up past it). upper_knee: end of an upper stable arc,
/// a local minimum of income (the state falls past it).
enum class FoldKind { lower_knee, upper_knee };

struct FoldPoint {
    double y_fold = 0.0;
    double r_fold = 0.0;
    FoldKind kind = FoldKind::lower_knee;

    friend bool operator==(const FoldPoint&, const FoldPoint&) = default;
};

struct BranchEnd {
    enum class Kind { boundary, fold };
    Kind kind = Kind::boundary;
    int fold = -1;  ///< index into LMIsocline::folds when kind == fold

    friend bool operator==(const BranchEnd&, const BranchEnd&) = default;
};

struct Branch {
    int id = 0;  ///< 0-based, ascending in R (A1 is id 0)
    Stability stability = Stability::stable;
    std::vector<Point> samples;  ///< ascending in y
    BranchEnd low_y_end;
    BranchEnd high_y_end;
    Interval y_range;
    Interval r_range;

    [[nodiscard]] bool stable() const noexcept { return stability == Stability::stable; }

    friend bool operator==(const Branch&, const Branch&) = default;
};

struct LMIsocline {
    std::vector<Branch> branches;
    std::vector<FoldPoint> folds;
    Interval y_range;
    Interval r_range;
    std::vector<std::string> warnings;

    /// Largest number of branches present at any single income level.
    [[nodiscard]] std::size_t max_branch_count() const {
        std::vector<std::pair<double, int>> ev;
        for (const auto& b : branches) {
            ev.emplace_back(b.y_range.lo, +1);
            ev.emplace_back(b.y_range.hi, -1);
        }
        std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
            return a.first < b.first || (a.first == b.first && a.second > b.second);
        });
        int cur = 0, best = 0;
        // Branches touching at a fold share only the fold point; count open overlaps.
        for (std::size_t k = 0; k < ev.size(); ++k) {
            cur += ev[k].second;
            const bool last_at_y = k + 1 == ev.size() || ev[k + 1].first != ev[k].first;
            if (last_at_y) best = std::max(best, cur);
        }
        return static_cast<std::size_t>(best);
    }

    friend bool operator==(const LMIsocline& a, const LMIsocline& b) {
        return a.branches == b.branches && a.folds == b.folds && a.y_range == b.y_range && a.r_range == b.r_range;
    }
};

[[nodiscard]] inline std::string branch_label(int id) { return "A" + std::to_string(id + 1); }

struct TraceOptions {
    Interval r_range{-0.2, 0.4};
    std::size_t y_steps = 1000;
    std::size_t scan_n = 2000;
    double fold_width = 1e-8;
    int max_subdivision = 12;
};

namespace detail {

class IsoclineTracer {
public:
    IsoclineTracer(const ModelSpec& spec, Interval y_range, const TraceOptions& opts)
        : spec_(spec), y_range_(y_range), opts_(opts) {}

    LMIsocline run() {
        if (opts_.y_steps < 500) throw std::invalid_argument("trace_lm_isocline: y_steps must be >= 500");
        if (!(y_range_.hi > y_range_.lo) || y_range_.lo < 0.0)
            throw std::invalid_argument("trace_lm_isocline: need 0 <= y_lo < y_hi");

        const std::size_t n = opts_.y_steps;
        const double h = y_range_.width() / static_cast<double>(n);
        double ya = y_range_.lo;
        auto ra = roots_at(ya);
        for (double r : ra) active_.push_back(new_branch(ya, r, BranchEnd{}));
        for (std::size_t k = 1; k <= n; ++k) {
            const double yb = (k == n) ? y_range_.hi : y_range_.lo + h * static_cast<double>(k);
            auto rb = roots_at(yb);
            advance(ya, ra, yb, rb, 0);
            ya = yb;
            ra = std::move(rb);
        }
        for (int b : active_) branches_[static_cast<std::size_t>(b)].high = BranchEnd{};
        return finalize();
    }

private:
    struct Work {
        std::vector<Point> samples;
        BranchEnd low, high;
    };

    std::vector<double> roots_at(double y) {
        auto scan = lm_roots(y, spec_, opts_.r_range, opts_.scan_n);
        for (auto& w : scan.warnings) warnings_.emplace_back(y, std::move(w));
        return std::move(scan.roots);
    }

    int new_branch(double y, double r, BranchEnd low) {
        branches_.push_back(Work{{Point{y, r}}, low, BranchEnd{}});
        return static_cast<int>(branches_.size()) - 1;
    }

    Work& work(int b) { return branches_[static_cast<std::size_t>(b)]; }

    // Links equal-count root sets in order: roots at fixed income are distinct
    // and branches cannot cross between folds, so the k-th active branch owns
    // the k-th root. Returns false when a link jumps discontinuously, which
    // signals a fold pair vanishing and reappearing inside the step.
    bool link(double yb, const std::vector<double>& rb) {
        if (rb.size() != active_.size()) return false;
        // A link must agree with the implicit slope dR/dY = -(de/dY)/(de/dR)
        // at one of its ends; near folds that slope is unbounded.
        const double floor = 1e-6 * opts_.r_range.width();
        const double de_dy = std::abs(excess_money_dy(spec_));
        for (std::size_t a = 0; a < active_.size(); ++a) {
            const auto& s = work(active_[a]).samples;
            const double r1 = rb[a];
            const double step = std::abs(r1 - s.back().r);
            const double dy = std::abs(yb - s.back().y);
            const double g = std::min(std::abs(excess_money_dr(s.back().r, spec_)), std::abs(excess_money_dr(r1, spec_)));
            if (step > floor && g * step > 10.0 * de_dy * dy) return false;
        }
        for (std::size_t a = 0; a < active_.size(); ++a)
            work(active_[a]).samples.push_back(Point{yb, rb[a]});
        return true;
    }

    void advance(double ya, const std::vector<double>& ra, double yb, const std::vector<double>& rb, int depth) {
        const auto na = ra.size(), nb = rb.size();
        if (na == nb && link(yb, rb)) return;
        if (na != nb && (na > nb ? na - nb : nb - na) <= 2 && depth > 0) {
            // Already narrowed once; handle the count change directly.
            handle_event(ya, ra, yb, rb, depth);
            return;
        }
        if (depth >= opts_.max_subdivision) {
            if (na == nb)
                throw NumericalError("trace_lm_isocline: discontinuous branch linkage between y=" +
                                     std::to_string(ya) + " and y=" + std::to_string(yb));
            handle_event(ya, ra, yb, rb, depth);
            return;
        }
        const double ym = 0.5 * (ya + yb);
        const auto rm = roots_at(ym);
        advance(ya, ra, ym, rm, depth + 1);
        advance(ym, rm, yb, rb, depth + 1);
    }

    // Locates the first count change inside (ya, yb) to opts_.fold_width and
    // records the fold (two roots) or boundary crossing (one root).
    void handle_event(double ya, const std::vector<double>& ra, double yb, const std::vector<double>& rb,
                      int depth) {
        const std::size_t na = ra.size();
        const auto pred = [&](double y) { return roots_at(y).size() != na; };
        auto [yl, yh] = roots::bisect_predicate(pred, ya, yb, opts_.fold_width);
        const auto rl = roots_at(yl);
        const auto rh = roots_at(yh);
        if (!link(yl, rl))
            throw NumericalError("trace_lm_isocline: discontinuous branch linkage near y=" + std::to_string(yl));

        const bool vanish = rl.size() > rh.size();
        const auto& many = vanish ? rl : rh;
        const auto& few = vanish ? rh : rl;
        const std::size_t diff = many.size() - few.size();
        std::vector<std::size_t> extra;  // indices into `many` that have no partner
        if (diff == 2) {
            std::size_t best = 0;
            double gap = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j + 1 < many.size(); ++j) {
                if (many[j + 1] - many[j] < gap) {
                    gap = many[j + 1] - many[j];
                    best = j;
                }
            }
            extra = {best, best + 1};
        } else if (diff == 1) {
            // A root crossed the edge of the rate window.
            const double dlo = many.front() - opts_.r_range.lo;
            const double dhi = opts_.r_range.hi - many.back();
            extra = {dlo < dhi ? std::size_t{0} : many.size() - 1};
        } else {
            throw NumericalError("trace_lm_isocline: unresolved root-count change near y=" + std::to_string(yl));
        }

        int fold_index = -1;
        Point fold_pt{};
        if (diff == 2) {
            const double r1 = many[extra[0]], r2 = many[extra[1]];
            const auto g = [&](double r) { return excess_money_dr(r, spec_); };
            const double g1 = g(r1), g2 = g(r2);
            const double rf = ((g1 < 0.0) != (g2 < 0.0)) ? roots::bisect(g, r1, r2, g1, g2) : 0.5 * (r1 + r2);
            double yf = 0.5 * (yl + yh);
            if (auto yy = lm_income(rf, spec_)) yf = *yy;
            fold_pt = Point{yf, rf};
            folds_.push_back(FoldPoint{yf, rf, vanish ? FoldKind::lower_knee : FoldKind::upper_knee});
            fold_index = static_cast<int>(folds_.size()) - 1;
        }

        std::vector<int> next_active;
        if (vanish) {
            // active_ is aligned with rl (= many) after link().
            for (std::size_t j = 0; j < many.size(); ++j) {
                const int b = active_[j];
                if (std::find(extra.begin(), extra.end(), j) != extra.end()) {
                    if (fold_index >= 0) work(b).samples.push_back(fold_pt);
                    work(b).high = fold_index >= 0 ? BranchEnd{BranchEnd::Kind::fold, fold_index} : BranchEnd{};
                } else {
                    next_active.push_back(b);
                }
            }
            std::size_t k = 0;
            for (int b : next_active) work(b).samples.push_back(Point{yh, few[k++]});
        } else {
            std::size_t k = 0;
            for (std::size_t j = 0; j < many.size(); ++j) {
                if (std::find(extra.begin(), extra.end(), j) != extra.end()) {
                    const BranchEnd low = fold_index >= 0 ? BranchEnd{BranchEnd::Kind::fold, fold_index} : BranchEnd{};
                    int b = fold_index >= 0 ? new_branch(fold_pt.y, fold_pt.r, low) : new_branch(yh, many[j], low);
                    if (fold_index >= 0) work(b).samples.push_back(Point{yh, many[j]});
                    next_active.push_back(b);
                } else {
                    const int b = active_[k++];
                    work(b).samples.push_back(Point{yh, many[j]});
                    next_active.push_back(b);
                }
            }
        }
        active_ = std::move(next_active);
        // Keep active_ aligned with ascending roots.
        std::sort(active_.begin(), active_.end(),
                  [&](int a, int b) { return work(a).samples.back().r < work(b).samples.back().r; });
        advance(yh, rh, yb, rb, depth + 1);
    }

    LMIsocline finalize() {
        LMIsocline iso;
        iso.y_range = y_range_;
        iso.r_range = opts_.r_range;
        iso.folds = folds_;
        // Brackets next to a fold straddle the window edge by construction.
        const double near = 1e-3 * (y_range_.hi - y_range_.lo);
        for (auto& [y, w] : warnings_) {
            const bool at_fold = std::any_of(folds_.begin(), folds_.end(),
                                             [&](const FoldPoint& f) { return std::abs(f.y_fold - y) <= near; });
            if (!at_fold && std::find(iso.warnings.begin(), iso.warnings.end(), w) == iso.warnings.end())
                iso.warnings.push_back(std::move(w));
        }
        for (auto& w : branches_) {
            Branch b;
            b.samples = std::move(w.samples);
            std::sort(b.samples.begin(), b.samples.end(), [](const Point& p, const Point& q) { return p.y < q.y; });
            b.low_y_end = w.low;
            b.high_y_end = w.high;
            double rlo = std::numeric_limits<double>::infinity(), rhi = -rlo;
            for (const auto& p : b.samples) {
                rlo = std::min(rlo, p.r);
                rhi = std::max(rhi, p.r);
            }
            b.y_range = Interval{b.samples.front().y, b.samples.back().y};
            b.r_range = Interval{rlo, rhi};
            // Stability from the sign of d(excess)/dR at the sample furthest from the ends.
            const auto& mid = b.samples[b.samples.size() / 2];
            const double rmid = b.samples.size() >= 3 ? mid.r : 0.5 * (rlo + rhi);
            b.stability = excess_money_dr(rmid, spec_) < 0.0 ? Stability::stable : Stability::unstable;
            iso.branches.push_back(std::move(b));
        }
        std::sort(iso.branches.begin(), iso.branches.end(), [](const Branch& a, const Branch& b) {
            return a.r_range.lo + a.r_range.hi < b.r_range.lo + b.r_range.hi;
        });
        for (std::size_t k = 0; k < iso.branches.size(); ++k) iso.branches[k].id = static_cast<int>(k);
        return iso;
    }

    const ModelSpec& spec_;
    Interval y_range_;
    TraceOptions opts_;
    std::vector<Work> branches_;
    std::vector<int> active_;
    std::vector<FoldPoint> folds_;
    std::vector<std::pair<double, std::string>> warnings_;
};

}  // namespace detail

/// Sweeps income, links roots into branches, refines folds and labels arcs.
[[nodiscard]] inline LMIsocline trace_lm_isocline(const ModelSpec& spec, Interval y_range,
                                                  const TraceOptions& opts = {}) {
    return detail::IsoclineTracer(spec, y_range, opts).run();
}

/// Rate on `branch` at income y: the unique root of excess_money(y, .) in the
/// branch's rate interval. Empty when y is outside the branch's income range.
[[nodiscard]] inline std::optional<double> branch_rate(const ModelSpec& spec, const Branch& branch, double y) {
    if (y < branch.y_range.lo || y > branch.y_range.hi) return std::nullopt;
    const auto f = [&](double r) { return excess_money(y, r, spec); };
    const double lo = branch.r_range.lo, hi = branch.r_range.hi;
    const double flo = f(lo), fhi = f(hi);
    if ((flo < 0.0) == (fhi < 0.0) && flo != 0.0 && fhi != 0.0)
        return std::abs(flo) < std::abs(fhi) ? lo : hi;  // at a fold end the root is double
    return roots::bisect(f, lo, hi, flo, fhi);
}

/// Index of the branch whose rate interval contains r (nearest on ties).
[[nodiscard]] inline int branch_containing(const LMIsocline& iso, double r) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& b : iso.branches) {
        const double d = r < b.r_range.lo ? b.r_range.lo - r : (r > b.r_range.hi ? r - b.r_range.hi : 0.0);
        if (d < best_d) {
            best_d = d;
            best = b.id;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Equilibria

enum class EquilibriumClass { stable_node, stable_focus, unstable_node, unstable_focus, saddle, center_degenerate,
                              focus_degenerate };

[[nodiscard]] inline const char* to_string(EquilibriumClass c) {
    switch (c) {
        case EquilibriumClass::stable_node: return "stable-node";
        case EquilibriumClass::stable_focus: return "stable-focus";
        case EquilibriumClass::unstable_node: return "unstable-node";
        case EquilibriumClass::unstable_focus: return "unstable-focus";
        case EquilibriumClass::saddle: return "saddle";
        case EquilibriumClass::center_degenerate: return "center-degenerate";
        case EquilibriumClass::focus_degenerate: return "focus-degenerate";
    }
    return "?";
}

[[nodiscard]] inline bool is_stable(EquilibriumClass c) {
    return c == EquilibriumClass::stable_node || c == EquilibriumClass::stable_focus;
}

struct Jacobian {
    std::array<double, 4> a{};  // row-major

    [[nodiscard]] double trace() const noexcept { return a[0] + a[3]; }
    [[nodiscard]] double det() const noexcept { return a[0] * a[3] - a[1] * a[2]; }
    [[nodiscard]] double disc() const noexcept { return trace() * trace() - 4.0 * det(); }

    [[nodiscard]] std::array<std::complex<double>, 2> eigenvalues() const {
        const std::complex<double> s = std::sqrt(std::complex<double>(disc(), 0.0));
        return {0.5 * (trace() + s), 0.5 * (trace() - s)};
    }
};

/// Exact Jacobian of (alpha (I - S), beta (L - M - M_S)) at (y, r).
[[nodiscard]] inline Jacobian system_jacobian(const ModelSpec& spec, double r) {
    const auto& b = spec.is_block;
    const auto& p = spec.params;
    return Jacobian{{p.alpha * (b.i_y - b.s_y), -p.alpha * (b.i_r + b.s_r), p.beta * excess_money_dy(spec),
                     p.beta * excess_money_dr(r, spec)}};
}

inline constexpr double kDegenerateDet = 1e-10;
inline constexpr double kDiscBand = 1e-12;

[[nodiscard]] inline EquilibriumClass classify(const Jacobian& j) {
    const double det = j.det(), tr = j.trace(), disc = j.disc();
    if (std::abs(det) < kDegenerateDet) return EquilibriumClass::center_degenerate;
    if (det < 0.0) return EquilibriumClass::saddle;
    if (tr == 0.0) return EquilibriumClass::center_degenerate;
    if (std::abs(disc) <= kDiscBand) return EquilibriumClass::focus_degenerate;
    if (tr < 0.0) return disc > 0.0 ? EquilibriumClass::stable_node : EquilibriumClass::stable_focus;
    return disc > 0.0 ? EquilibriumClass::unstable_node : EquilibriumClass::unstable_focus;
}

struct Equilibrium {
    double y = 0.0;
    double r = 0.0;
    EquilibriumClass classification = EquilibriumClass::center_degenerate;
    std::array<std::complex<double>, 2> eigenvalues{};
    int branch = -1;
    bool tangency = false;  ///< IS touches LM here (double root)

    friend bool operator==(const Equilibrium&, const Equilibrium&) = default;
};

struct EquilibriumOptions {
    std::size_t scan_n = 400;
    double tangency_tol = 1e-10;
    double fiscal_shift = 0.0;
};

/// Intersections of the IS curve with every isocline branch, classified.
/// Double roots (tangencies) are reported once and marked degenerate.
[[nodiscard]] inline std::vector<Equilibrium> find_equilibria(const ModelSpec& spec, const LMIsocline& iso,
                                                              const EquilibriumOptions& opts = {}) {
    const ISCurve is = is_curve(spec, opts.fiscal_shift);
    std::vector<Equilibrium> out;
    const auto h = [&](double r) {
        const auto y = lm_income(r, spec);
        return y ? r - is.rate(*y) : std::numeric_limits<double>::quiet_NaN();
    };
    const auto add = [&](double r, int branch, bool tangent) {
        const auto y = lm_income(r, spec);
        if (!y || *y < iso.y_range.lo || *y > iso.y_range.hi) return;
        for (const auto& e : out)
            if (std::abs(e.r - r) < 1e-9) return;
        Equilibrium e;
        e.y = *y;
        e.r = r;
        e.branch = branch;
        e.tangency = tangent;
        const auto jac = system_jacobian(spec, r);
        e.eigenvalues = jac.eigenvalues();
        e.classification = tangent ? EquilibriumClass::center_degenerate : classify(jac);
        out.push_back(e);
    };
    for (const auto& b : iso.branches) {
        const double lo = b.r_range.lo, hi = b.r_range.hi;
        const std::size_t n = opts.scan_n;
        const double step = (hi - lo) / static_cast<double>(n);
        std::vector<double> rs(n + 1), hs(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            rs[k] = k == n ? hi : lo + step * static_cast<double>(k);
            hs[k] = h(rs[k]);
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (std::isnan(hs[k]) || std::isnan(hs[k + 1])) continue;
            if (hs[k] == 0.0) add(rs[k], b.id, false);
            if ((hs[k] < 0.0) != (hs[k + 1] < 0.0) && hs[k + 1] != 0.0)
                add(roots::bisect(h, rs[k], rs[k + 1], hs[k], hs[k + 1]), b.id, false);
        }
        if (hs[n] == 0.0) add(rs[n], b.id, false);
        // Interior extrema of h that approach zero without a resolved sign change.
        for (std::size_t k = 1; k < n; ++k) {
            const double a = std::abs(hs[k - 1]), m = std::abs(hs[k]), c = std::abs(hs[k + 1]);
            if (!(m <= a && m <= c)) continue;
            const auto [rm, hm] = roots::golden_min([&](double r) { return std::abs(h(r)); }, rs[k - 1], rs[k + 1]);
            if (hm < opts.tangency_tol) {
                bool near_existing = false;
                for (const auto& e : out)
                    if (std::abs(e.r - rm) < 2.0 * step) near_existing = true;
                if (!near_existing) add(rm, b.id, true);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Equilibrium& a, const Equilibrium& b) { return a.r < b.r; });
    return out;
}

// ---------------------------------------------------------------------------
// LM comparative statics

/// Raises expected inflation by d_pi and the money stock by d_ms. Inflation
/// moves every LM branch down by exactly d_pi.
[[nodiscard]] inline ModelSpec shift_lm(const ModelSpec& spec, double d_pi, double d_ms) {
    if (!(spec.params.m_stock + d_ms > 0.0)) throw ModelError("m_stock", "shift would make the money stock non-positive");
    ModelSpec out = spec;
    out.params.expected_inflation += d_pi;
    out.params.m_stock += d_ms;
    return out;
}

}  // namespace islm

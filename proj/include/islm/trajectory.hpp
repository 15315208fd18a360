#pragma once

// Trajectories and their post-processing: jump detection, cycle detection,
// loop extraction and the Hausdorff distance between loops.

#include <islm/geometry.hpp>
#include <islm/model.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace islm {

enum class Mode { full_epsilon, singular_limit };
enum class Regime { slow, jump };
enum class Direction { up, down };
enum class Orientation { counterclockwise, clockwise };

[[nodiscard]] inline const char* to_string(Mode m) { return m == Mode::full_epsilon ? "full-epsilon" : "singular-limit"; }
[[nodiscard]] inline const char* to_string(Regime r) { return r == Regime::slow ? "slow" : "jump"; }
[[nodiscard]] inline const char* to_string(Direction d) { return d == Direction::up ? "up" : "down"; }
[[nodiscard]] inline const char* to_string(Orientation o) {
    return o == Orientation::counterclockwise ? "counterclockwise" : "clockwise";
}

struct Sample {
    double t = 0.0;
    double y = 0.0;
    double r = 0.0;
    Regime regime = Regime::slow;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// In singular-limit mode t is slow time and a jump appears as two samples
/// with the same t (fold point, then landing point).
struct Trajectory {
    Mode mode = Mode::full_epsilon;
    std::string spec_id;
    std::vector<Sample> samples;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct JumpEvent {
    double t_start = 0.0;
    double t_end = 0.0;
    double y_at_jump = 0.0;
    double r_from = 0.0;
    double r_to = 0.0;
    Direction direction = Direction::up;
    std::size_t i_from = 0;  ///< sample index where the event starts
    std::size_t i_to = 0;    ///< sample index where it ends

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// 64-bit FNV-1a over every parameter of the spec, as 16 hex digits.
[[nodiscard]] inline std::string spec_fingerprint(const ModelSpec& spec) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    const auto& p = spec.params;
    for (double v : {p.alpha, p.beta, p.epsilon, p.m_stock, p.maturity_premium, p.expected_inflation}) mix(v);
    const auto& b = spec.is_block;
    for (double v : {b.i0, b.i_y, b.i_r, b.s0, b.s_y, b.s_r}) mix(v);
    const auto& m = spec.money;
    for (double v : {m.l_y(), m.m_y(), m.l_slope(), m.m_slope(), m.l0(), m.m0(), m.skirt_fraction()}) mix(v);
    for (const auto& w : m.windows())
        for (double v : {w.p, w.q, w.amp_l, w.amp_m}) mix(v);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Jumps

struct JumpOptions {
    double jump_min = 0.01;      ///< smallest |r_to - r_from| that counts
    double y_slip = 0.05;        ///< largest |dY| allowed during a jump
    double rate_override = 0.0;  ///< lower bound for the |dR/dt| threshold
};

/// Maximal runs of sample intervals whose |dR/dt| exceeds
/// max(10 * median |dR/dt|, rate_override). Runs separated by a single slow
/// interval are merged. Zero-length intervals count as infinitely fast.
[[nodiscard]] inline std::vector<JumpEvent> detect_jumps(const Trajectory& traj, const JumpOptions& opts = {}) {
    std::vector<JumpEvent> out;
    const auto& s = traj.samples;
    if (s.size() < 2) return out;
    const std::size_t n = s.size() - 1;
    std::vector<double> rate(n);
    std::vector<double> finite_rates;
    finite_rates.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = s[k + 1].t - s[k].t;
        const double dr = std::abs(s[k + 1].r - s[k].r);
        rate[k] = dt > 0.0 ? dr / dt : (dr > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (std::isfinite(rate[k])) finite_rates.push_back(rate[k]);
    }
    double median = 0.0;
    if (!finite_rates.empty()) {
        auto mid = finite_rates.begin() + static_cast<std::ptrdiff_t>(finite_rates.size() / 2);
        std::nth_element(finite_rates.begin(), mid, finite_rates.end());
        median = *mid;
    }
    const double threshold = std::max(10.0 * median, opts.rate_override);

    std::vector<std::pair<std::size_t, std::size_t>> runs;  // inclusive interval indices
    for (std::size_t k = 0; k < n; ++k) {
        if (!(rate[k] > threshold)) continue;
        if (!runs.empty() && k <= runs.back().second + 2)
            runs.back().second = k;
        else
            runs.emplace_back(k, k);
    }
    for (const auto& [k0, k1] : runs) {
        const std::size_t i0 = k0, i1 = k1 + 1;
        const double dr = s[i1].r - s[i0].r;
        double ylo = s[i0].y, yhi = s[i0].y;
        std::size_t fastest = k0;
        for (std::size_t k = k0; k <= k1; ++k) {
            ylo = std::min(ylo, s[k + 1].y);
            yhi = std::max(yhi, s[k + 1].y);
            if (rate[k] > rate[fastest]) fastest = k;
        }
        if (!(std::abs(dr) > opts.jump_min) || !(yhi - ylo < opts.y_slip)) continue;
        JumpEvent e;
        e.t_start = s[i0].t;
        e.t_end = s[i1].t;
        e.y_at_jump = 0.5 * (s[fastest].y + s[fastest + 1].y);
        e.r_from = s[i0].r;
        e.r_to = s[i1].r;
        e.direction = dr > 0.0 ? Direction::up : Direction::down;
        e.i_from = i0;
        e.i_to = i1;
        out.push_back(e);
    }
    return out;
}

/// Marks the samples after the start of each jump, up to its end, as jump samples.
inline void annotate_regimes(Trajectory& traj, const std::vector<JumpEvent>& jumps) {
    for (auto& s : traj.samples) s.regime = Regime::slow;
    for (const auto& j : jumps)
        for (std::size_t k = j.i_from + 1; k <= j.i_to && k < traj.samples.size(); ++k)
            traj.samples[k].regime = Regime::jump;
}

// ---------------------------------------------------------------------------
// Cycles

struct CycleOptions {
    double transient_fraction = 0.2;
    double radius = 1e-4;
    JumpOptions jumps;
};

struct CycleSummary {
    double t_start = 0.0;  ///< time of the reference point
    double period = 0.0;
    Orientation orientation = Orientation::counterclockwise;
    double signed_area = 0.0;  ///< closed-loop integral of Y dR
    std::vector<JumpEvent> jumps;
    std::vector<double> y_turning;
    Interval r_extent;
    Interval y_extent;
    std::size_t returns = 0;

    [[nodiscard]] bool relaxation() const noexcept { return jumps.size() >= 2; }

    friend bool operator==(const CycleSummary&, const CycleSummary&) = default;
};

namespace detail {

// Squared distance from p to segment [a, b] and the segment parameter of the foot point.
inline std::pair<double, double> segment_distance2(const Point& p, const Point& a, const Point& b) {
    const double dy = b.y - a.y, dr = b.r - a.r;
    const double len2 = dy * dy + dr * dr;
    double s = 0.0;
    if (len2 > 0.0) s = std::clamp(((p.y - a.y) * dy + (p.r - a.r) * dr) / len2, 0.0, 1.0);
    const double ey = a.y + s * dy - p.y, er = a.r + s * dr - p.r;
    return {ey * ey + er * er, s};
}

inline Point at(const Sample& s) { return Point{s.y, s.r}; }

}  // namespace detail

/// Signed area of a closed polyline: the integral of Y dR (trapezoid rule).
[[nodiscard]] inline double loop_signed_area(const std::vector<Point>& loop) {
    double a = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        const Point& p = loop[k];
        const Point& q = loop[(k + 1) % loop.size()];
        a += 0.5 * (p.y + q.y) * (q.r - p.r);
    }
    return a;
}

/// Recurrence-ball cycle detection. The reference point is the first slow
/// sample after the transient; a return is a pass of the trajectory within
/// `radius` of it after having left a ball of ten times that radius.
[[nodiscard]] inline std::optional<CycleSummary> detect_cycle(const Trajectory& traj, const CycleOptions& opts = {}) {
    const auto& s = traj.samples;
    if (s.size() < 3) return std::nullopt;
    const auto jumps = detect_jumps(traj, opts.jumps);
    std::vector<char> in_jump(s.size(), 0);
    for (const auto& j : jumps)
        for (std::size_t k = j.i_from; k <= j.i_to; ++k) in_jump[k] = 1;

    std::size_t k0 = static_cast<std::size_t>(opts.transient_fraction * static_cast<double>(s.size()));
    while (k0 + 1 < s.size() && in_jump[k0]) ++k0;
    if (k0 + 2 >= s.size()) return std::nullopt;
    const Point p0 = detail::at(s[k0]);
    const double r2 = opts.radius * opts.radius;
    const double away2 = 100.0 * r2;

    std::vector<double> return_times;
    std::size_t first_return_seg = 0;
    bool away = false;
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_t = 0.0;
    std::size_t best_seg = 0;
    for (std::size_t k = k0; k + 1 < s.size(); ++k) {
        const auto [d2, u] = detail::segment_distance2(p0, detail::at(s[k]), detail::at(s[k + 1]));
        if (!away) {
            if (d2 > away2) away = true;
            continue;
        }
        if (d2 < r2) {
            if (d2 < best_d2) {
                best_d2 = d2;
                best_t = s[k].t + u * (s[k + 1].t - s[k].t);
                best_seg = k;
            }
        } else if (best_d2 < r2) {
            if (return_times.empty()) first_return_seg = best_seg;
            return_times.push_back(best_t);
            best_d2 = std::numeric_limits<double>::infinity();
            away = d2 > away2;
        }
    }
    if (best_d2 < r2) {
        if (return_times.empty()) first_return_seg = best_seg;
        return_times.push_back(best_t);
    }
    if (return_times.empty()) return std::nullopt;

    CycleSummary c;
    c.t_start = s[k0].t;
    c.returns = return_times.size();
    c.period = (return_times.back() - c.t_start) / static_cast<double>(return_times.size());

    std::vector<Point> loop;
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo, rlo = ylo, rhi = -ylo;
    for (std::size_t k = k0; k <= first_return_seg; ++k) {
        loop.push_back(detail::at(s[k]));
        ylo = std::min(ylo, s[k].y);
        yhi = std::max(yhi, s[k].y);
        rlo = std::min(rlo, s[k].r);
        rhi = std::max(rhi, s[k].r);
    }
    c.signed_area = loop_signed_area(loop);
    c.orientation = c.signed_area > 0.0 ? Orientation::counterclockwise : Orientation::clockwise;
    c.y_extent = Interval{ylo, yhi};
    c.r_extent = Interval{rlo, rhi};
    const double t_end = c.t_start + c.period;
    for (const auto& j : jumps) {
        if (j.t_start >= c.t_start && j.t_start < t_end) {
            c.jumps.push_back(j);
            c.y_turning.push_back(j.y_at_jump);
        }
    }
    return c;
}

/// Samples of one period of the cycle, starting at its reference point.
[[nodiscard]] inline std::vector<Point> cycle_loop(const Trajectory& traj, const CycleSummary& c) {
    std::vector<Point> out;
    const double t_end = c.t_start + c.period;
    for (const auto& s : traj.samples)
        if (s.t >= c.t_start && s.t <= t_end) out.push_back(detail::at(s));
    return out;
}

/// Same samples traversed backwards in time.
[[nodiscard]] inline Trajectory reverse_time(const Trajectory& traj) {
    Trajectory out = traj;
    out.samples.assign(traj.samples.rbegin(), traj.samples.rend());
    if (!out.samples.empty()) {
        const double t_last = traj.samples.back().t;
        for (auto& s : out.samples) s.t = t_last - s.t;
        // Zero-length intervals keep their order; only shift the clock.
        const double t0 = out.samples.front().t;
        for (auto& s : out.samples) s.t -= t0;
    }
    return out;
}

/// Distance from p to the nearest point of a polyline.
[[nodiscard]] inline double distance_to_polyline(const Point& p, const std::vector<Point>& line) {
    if (line.empty()) return std::numeric_limits<double>::infinity();
    if (line.size() == 1) return std::hypot(p.y - line[0].y, p.r - line[0].r);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < line.size(); ++k)
        best = std::min(best, detail::segment_distance2(p, line[k], line[k + 1]).first);
    return std::sqrt(best);
}

/// Symmetric Hausdorff distance between two polylines (vertices against segments).
[[nodiscard]] inline double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b) {
    double d = 0.0;
    for (const auto& p : a) d = std::max(d, distance_to_polyline(p, b));
    for (const auto& p : b) d = std::max(d, distance_to_polyline(p, a));
    return d;
}

}  // namespace islm

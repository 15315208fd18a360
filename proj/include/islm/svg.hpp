#pragma once

// Static phase portrait: IS line, LM branches by stability, folds,
// equilibria and an optional trajectory with its jumps drawn as vertical
// segments. Output depends only on its inputs.

#include <islm/geometry.hpp>
#include <islm/trajectory.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace islm {

struct PortraitOptions {
    double width = 800.0;
    double height = 600.0;
    double margin = 60.0;
    std::optional<Interval> y_view;  ///< fitted to the content when empty
    std::optional<Interval> r_view;
    std::string title;
};

namespace detail {

struct View {
    Interval y, r;
    double x0, x1, p0, p1;  // pixel box

    [[nodiscard]] double px(double y_) const { return x0 + (y_ - y.lo) / y.width() * (x1 - x0); }
    [[nodiscard]] double py(double r_) const { return p1 - (r_ - r.lo) / r.width() * (p1 - p0); }
};

inline double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

inline std::string polyline(const View& v, const std::vector<Point>& pts, const std::string& cls) {
    if (pts.size() < 2) return {};
    std::string s = "<polyline class=\"" + cls + "\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k)
        s += fmt::format("{}{:.2f},{:.2f}", k ? " " : "", v.px(pts[k].y), v.py(pts[k].r));
    return s + "\"/>\n";
}

inline void grow(std::optional<Interval>& iv, double x) {
    if (!std::isfinite(x)) return;
    if (!iv)
        iv = Interval{x, x};
    else
        iv = Interval{std::min(iv->lo, x), std::max(iv->hi, x)};
}

inline Interval pad(std::optional<Interval> iv, Interval fallback, double frac) {
    if (!iv) return fallback;
    double w = iv->width();
    if (w <= 0.0) w = std::max(std::abs(iv->lo), 1.0) * 0.1;
    return Interval{iv->lo - frac * w, iv->hi + frac * w};
}

}  // namespace detail

[[nodiscard]] inline std::string render_portrait(const ISCurve& is, const LMIsocline& iso,
                                                 const std::vector<Equilibrium>& equilibria,
                                                 const Trajectory* traj = nullptr,
                                                 const std::vector<JumpEvent>& jumps = {},
                                                 const PortraitOptions& opts = {}) {
    using detail::View;
    std::optional<Interval> fy, fr;
    if (traj && !traj->samples.empty()) {
        for (const auto& s : traj->samples) {
            detail::grow(fy, s.y);
            detail::grow(fr, s.r);
        }
    } else {
        for (const auto& f : iso.folds) {
            detail::grow(fy, f.y_fold);
            detail::grow(fr, f.r_fold);
        }
        for (const auto& e : equilibria) {
            detail::grow(fy, e.y);
            detail::grow(fr, e.r);
        }
    }
    View v{};
    v.y = opts.y_view ? *opts.y_view : detail::pad(fy, iso.y_range, 0.35);
    v.r = opts.r_view ? *opts.r_view : detail::pad(fr, iso.r_range, 0.35);
    v.x0 = opts.margin;
    v.x1 = opts.width - opts.margin / 2;
    v.p0 = opts.margin / 2;
    v.p1 = opts.height - opts.margin;

    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
        opts.width, opts.height);
    s += "<style>\n"
         ".axis{stroke:#222;stroke-width:1;fill:none}.tick{font:11px sans-serif;fill:#222}\n"
         ".grid{stroke:#ddd;stroke-width:0.5}\n"
         ".is-curve{stroke:#2a7a2a;stroke-width:2;fill:none}\n"
         ".lm-branch.stable{stroke:#1f4e9e;stroke-width:2;fill:none}\n"
         ".lm-branch.unstable{stroke:#c0392b;stroke-width:2;stroke-dasharray:6 4;fill:none}\n"
         ".fold{fill:#fff;stroke:#000;stroke-width:1.5}\n"
         ".equilibrium.stable{fill:#000}.equilibrium.unstable{fill:#fff;stroke:#000;stroke-width:1.5}\n"
         ".trajectory{stroke:#e08e0b;stroke-width:1.5;fill:none}\n"
         ".jump{stroke:#e08e0b;stroke-width:1.5;stroke-dasharray:3 2;marker-end:url(#arrow)}\n"
         "</style>\n";
    s += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
         "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#e08e0b\"/></marker>\n";
    s += fmt::format("<clipPath id=\"plot\"><rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/></clipPath></defs>\n",
                     v.x0, v.p0, v.x1 - v.x0, v.p1 - v.p0);
    if (!opts.title.empty())
        s += fmt::format("<text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", v.x0, v.p0 - 8, opts.title);

    // Axes, grid and ticks.
    s += "<g class=\"axes\">\n";
    const double sy = detail::nice_step(v.y.width()), sr = detail::nice_step(v.r.width());
    for (double t = std::ceil(v.y.lo / sy) * sy; t <= v.y.hi + 1e-12; t += sy) {
        const double x = v.px(t);
        s += fmt::format("<line class=\"grid\" x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", x, v.p0, v.p1);
        s += fmt::format("<text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", x,
                         v.p1 + 16, std::abs(t) < 1e-12 * sy ? 0.0 : t);
    }
    for (double t = std::ceil(v.r.lo / sr) * sr; t <= v.r.hi + 1e-12; t += sr) {
        const double y = v.py(t);
        s += fmt::format("<line class=\"grid\" x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", v.x0, y, v.x1);
        s += fmt::format("<text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", v.x0 - 6,
                         y + 4, std::abs(t) < 1e-12 * sr ? 0.0 : t);
    }
    s += fmt::format("<rect class=\"axis\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/>\n", v.x0, v.p0,
                     v.x1 - v.x0, v.p1 - v.p0);
    s += fmt::format("<text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">Y</text>\n",
                     0.5 * (v.x0 + v.x1), v.p1 + 34);
    s += fmt::format("<text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">R</text>\n", v.x0 - 44,
                     0.5 * (v.p0 + v.p1));
    s += "</g>\n<g clip-path=\"url(#plot)\">\n";

    s += detail::polyline(v, {{v.y.lo, is.rate(v.y.lo)}, {v.y.hi, is.rate(v.y.hi)}}, "is-curve");
    for (const auto& b : iso.branches)
        s += detail::polyline(v, b.samples, std::string("lm-branch ") + (b.stable() ? "stable" : "unstable"));

    if (traj) {
        // Slow pieces between jumps, then each jump as its own segment.
        std::vector<char> in_jump(traj->samples.size(), 0);
        for (const auto& j : jumps)
            for (std::size_t k = j.i_from + 1; k < j.i_to && k < in_jump.size(); ++k) in_jump[k] = 1;
        std::vector<Point> piece;
        const auto flush = [&] {
            s += detail::polyline(v, piece, "trajectory");
            piece.clear();
        };
        std::size_t next_jump = 0;
        std::vector<JumpEvent> sorted = jumps;
        std::sort(sorted.begin(), sorted.end(), [](const JumpEvent& a, const JumpEvent& b) { return a.i_from < b.i_from; });
        for (std::size_t k = 0; k < traj->samples.size(); ++k) {
            if (in_jump[k]) continue;
            piece.push_back({traj->samples[k].y, traj->samples[k].r});
            if (next_jump < sorted.size() && k == sorted[next_jump].i_from) {
                flush();
                while (next_jump < sorted.size() && sorted[next_jump].i_from == k) ++next_jump;
            }
        }
        flush();
        for (const auto& j : sorted)
            s += fmt::format("<line class=\"jump\" x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n",
                             v.px(j.y_at_jump), v.py(j.r_from), v.py(j.r_to));
    }
    for (const auto& f : iso.folds)
        s += fmt::format("<circle class=\"fold\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\"/>\n", v.px(f.y_fold), v.py(f.r_fold));
    for (const auto& e : equilibria)
        s += fmt::format("<circle class=\"equilibrium {}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\"><title>{}</title></circle>\n",
                         is_stable(e.classification) ? "stable" : "unstable", v.px(e.y), v.py(e.r),
                         to_string(e.classification));
    s += "</g>\n";

    // Legend.
    const double lx = v.x1 - 170, ly = v.p0 + 12;
    s += "<g class=\"legend\">\n";
    const char* items[][2] = {{"is-curve", "IS"},
                              {"lm-branch stable", "LM, stable arc"},
                              {"lm-branch unstable", "LM, unstable arc"},
                              {"trajectory", "trajectory"}};
    for (std::size_t k = 0; k < std::size(items); ++k) {
        const double y = ly + 16.0 * static_cast<double>(k);
        s += fmt::format("<line class=\"{}\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>", items[k][0], lx, y,
                         lx + 24, y);
        s += fmt::format("<text class=\"tick\" x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 30, y + 4, items[k][1]);
    }
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace islm

#pragma once

// Finite-difference check of the sign conditions on a (Y, R) rectangle.
// Trap-window interiors are checked against the reversed money-market signs.

#include <islm/geometry.hpp>
#include <islm/model.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace islm {

struct PropertyCheck {
    std::string name;
    bool passed = true;
    std::size_t evaluated = 0;
    std::size_t violations = 0;
    std::size_t degenerate = 0;  ///< |derivative| too small to count as signed
    double worst_margin = std::numeric_limits<double>::infinity();
    Point worst_at;

    friend bool operator==(const PropertyCheck&, const PropertyCheck&) = default;
};

struct ValidationReport {
    std::vector<PropertyCheck> checks;
    std::string error;  ///< set when the request itself was unusable

    [[nodiscard]] bool passed() const {
        if (!error.empty()) return false;
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    [[nodiscard]] const PropertyCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

inline constexpr double kSignTolerance = 1e-9;

namespace detail {

struct CheckAccumulator {
    PropertyCheck c;

    explicit CheckAccumulator(std::string name) { c.name = std::move(name); }

    // `margin` > 0 means the condition holds; |margin| <= tolerance is degenerate.
    void add(double margin, Point at) {
        ++c.evaluated;
        if (margin < c.worst_margin) {
            c.worst_margin = margin;
            c.worst_at = at;
        }
        if (std::abs(margin) <= kSignTolerance)
            ++c.degenerate;
        else if (margin < 0.0)
            ++c.violations;
    }

    PropertyCheck done() {
        c.passed = c.violations == 0;
        if (c.evaluated == 0) c.worst_margin = 0.0;
        return c;
    }
};

}  // namespace detail

/// Never throws: problems with the request itself are reported in `error`.
[[nodiscard]] inline ValidationReport validate_properties(const ModelSpec& spec, Interval y_range, Interval r_range,
                                                          std::size_t grid_n = 200) {
    ValidationReport rep;
    if (grid_n < 100) {
        rep.error = "grid_n must be >= 100 per axis (got " + std::to_string(grid_n) + ")";
        return rep;
    }
    if (!(y_range.hi > y_range.lo) || !(r_range.hi > r_range.lo)) {
        rep.error = "validation ranges must be non-degenerate";
        return rep;
    }
    if (y_range.lo < 0.0) {
        rep.error = "income range must lie in Y >= 0";
        return rep;
    }
    try {
        const auto& b = spec.is_block;
        const auto& m = spec.money;
        const auto& p = spec.params;
        const double hy = 1e-6 * y_range.width();
        const double hr = 1e-6 * r_range.width();
        const auto dy = [&](const std::function<double(double, double)>& f, double y, double r) {
            return (f(y + hy, r) - f(y - hy, r)) / (2.0 * hy);
        };
        const auto dr = [&](const std::function<double(double, double)>& f, double y, double r) {
            return (f(y, r + hr) - f(y, r - hr)) / (2.0 * hr);
        };
        const std::function<double(double, double)> inv = [&](double y, double r) { return b.investment(y, r); };
        const std::function<double(double, double)> sav = [&](double y, double r) { return b.saving(y, r); };
        const std::function<double(double, double)> dem = [&](double y, double r) {
            return m.demand(y, short_rate(r, p));
        };
        const std::function<double(double, double)> sup = [&](double y, double r) {
            return m.supply(y, short_rate(r, p));
        };

        detail::CheckAccumulator i_y{"0 < dI/dY < 1"}, i_r{"dI/dR < 0"}, s_y{"0 < dS/dY < 1"},
            s_r{"dS/dR > 0"}, is_slope{"dI/dY < dS/dY"}, l_y{"dL/dY > 0"}, m_y{"0 < dM/dY < dL/dY"},
            l_r{"dL/dR < 0 outside trap windows"}, m_r{"dM/dR > 0 outside trap windows"},
            l_rev{"dL/dR > 0 inside trap windows"}, m_rev{"dM/dR < 0 inside trap windows"};

        const auto edge = [&](double i) {
            for (const auto& w : m.windows())
                if (std::abs(i - w.p) <= 2.0 * hr || std::abs(i - w.q) <= 2.0 * hr) return true;
            return false;
        };
        for (std::size_t a = 0; a < grid_n; ++a) {
            const double y = y_range.lo + y_range.width() * static_cast<double>(a) / static_cast<double>(grid_n - 1);
            for (std::size_t c = 0; c < grid_n; ++c) {
                const double r =
                    r_range.lo + r_range.width() * static_cast<double>(c) / static_cast<double>(grid_n - 1);
                const Point at{y, r};
                const double diy = dy(inv, y, r), dsy = dy(sav, y, r);
                i_y.add(std::min(diy, 1.0 - diy), at);
                i_r.add(-dr(inv, y, r), at);
                s_y.add(std::min(dsy, 1.0 - dsy), at);
                s_r.add(dr(sav, y, r), at);
                is_slope.add(dsy - diy, at);
                const double dly = dy(dem, y, r), dmy = dy(sup, y, r);
                l_y.add(dly, at);
                m_y.add(std::min(dmy, dly - dmy), at);
                const double i = short_rate(r, p);
                const double dlr = dr(dem, y, r), dmr = dr(sup, y, r);
                if (edge(i)) {
                    // The difference stencil straddles a window edge, where the slope is zero.
                    l_r.c.degenerate++;
                    m_r.c.degenerate++;
                    continue;
                }
                if (m.in_window(i)) {
                    l_rev.add(dlr, at);
                    m_rev.add(-dmr, at);
                } else {
                    l_r.add(-dlr, at);
                    m_r.add(dmr, at);
                }
            }
        }
        for (auto* acc : {&i_y, &i_r, &s_y, &s_r, &is_slope, &l_y, &m_y, &l_r, &m_r, &l_rev, &m_rev})
            rep.checks.push_back(acc->done());

        // Boundary condition: near Y = 0 the IS curve lies above the lowest LM branch.
        PropertyCheck bc;
        bc.name = "R_IS(0+) > R_LM(0+)";
        const double y0 = std::max(y_range.lo, 0.0);
        const auto roots = lm_roots(y0, spec, r_range, 2000).roots;
        bc.evaluated = 1;
        bc.worst_at = Point{y0, roots.empty() ? 0.0 : roots.front()};
        if (roots.empty()) {
            bc.passed = false;
            bc.violations = 1;
            bc.worst_margin = -std::numeric_limits<double>::infinity();
        } else {
            bc.worst_margin = is_curve(spec).rate(y0) - roots.front();
            bc.passed = bc.worst_margin > 0.0;
            bc.violations = bc.passed ? 0 : 1;
        }
        rep.checks.push_back(bc);
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return rep;
}

}  // namespace islm

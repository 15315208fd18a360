#pragma once

// Bracketing root finders. Bisection is the correctness baseline: the
// functions solved here have vanishing derivatives exactly where accuracy
// matters (folds), so no derivative-based refinement is used.

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace islm::roots {

/// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign (or zero).
/// Iterates until the bracket collapses to adjacent doubles.
template <class F>
double bisect(const F& f, double lo, double hi, double flo, double fhi, std::size_t max_iter = 200) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    const bool lo_negative = flo < 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == lo_negative)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

template <class F>
double bisect(const F& f, double lo, double hi) {
    return bisect(f, lo, hi, f(lo), f(hi));
}

/// Bisection on a boolean predicate that is false at `lo` and true at `hi`.
/// Returns the final bracket once its width drops below `width`.
template <class P>
std::pair<double, double> bisect_predicate(const P& pred, double lo, double hi, double width) {
    while (std::abs(hi - lo) > width) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {lo, hi};
}

struct Bracket {
    double lo, hi;
    double flo, fhi;
};

/// Uniform scan of [a, b] with n cells; returns every cell whose endpoint
/// values change sign. A sample that is exactly zero is reported once as a
/// degenerate bracket [x, x].
template <class F>
std::vector<Bracket> scan_sign_changes(const F& f, double a, double b, std::size_t n) {
    std::vector<Bracket> out;
    const double h = (b - a) / static_cast<double>(n);
    double x_prev = a;
    double f_prev = f(a);
    if (f_prev == 0.0) out.push_back({a, a, 0.0, 0.0});
    for (std::size_t k = 1; k <= n; ++k) {
        const double x = (k == n) ? b : a + h * static_cast<double>(k);
        const double fx = f(x);
        if (fx == 0.0) {
            out.push_back({x, x, 0.0, 0.0});
        } else if (f_prev != 0.0 && ((f_prev < 0.0) != (fx < 0.0))) {
            out.push_back({x_prev, x, f_prev, fx});
        }
        x_prev = x;
        f_prev = fx;
    }
    return out;
}

/// All roots of f on [a, b] isolated by a uniform scan and refined by bisection.
template <class F>
std::vector<double> all_roots(const F& f, double a, double b, std::size_t n) {
    std::vector<double> roots;
    for (const auto& br : scan_sign_changes(f, a, b, n)) {
        roots.push_back(br.lo == br.hi ? br.lo : bisect(f, br.lo, br.hi, br.flo, br.fhi));
    }
    return roots;
}

/// Golden-section minimisation of a unimodal f on [a, b].
template <class F>
std::pair<double, double> golden_min(const F& f, double a, double b, double tol = 1e-14, std::size_t max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (std::size_t it = 0; it < max_iter && std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

/// Expands [lo, hi] geometrically until f changes sign across it.
template <class F>
std::optional<Bracket> expand_bracket(const F& f, double lo, double hi, std::size_t max_iter = 60) {
    double flo = f(lo), fhi = f(hi);
    for (std::size_t it = 0; it < max_iter; ++it) {
        if ((flo <= 0.0) != (fhi <= 0.0) || flo == 0.0 || fhi == 0.0) return Bracket{lo, hi, flo, fhi};
        const double w = hi - lo;
        if (std::abs(flo) < std::abs(fhi)) {
            lo -= w;
            flo = f(lo);
        } else {
            hi += w;
            fhi = f(hi);
        }
    }
    return std::nullopt;
}

}  // namespace islm::roots

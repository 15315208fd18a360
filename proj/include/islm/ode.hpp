#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with adaptive step-size
// control and cubic Hermite dense output.

#include <islm/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <string>

namespace islm::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0.0;  ///< 0 selects an automatic first step
    double h_max = 0.0;   ///< 0 means unbounded
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_calls = 0;
};

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

template <std::size_t N>
bool finite(const State<N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1. After every accepted step,
/// `on_step(t_a, y_a, f_a, t_b, y_b, f_b)` is called; returning false stops
/// the integration early. Returns the final time reached.
template <std::size_t N, class Rhs, class OnStep>
double integrate(const Rhs& f, double t0, double t1, State<N>& y, const Tolerances& tol, OnStep&& on_step,
                 Stats* stats = nullptr) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    // error coefficients: b - b_hat
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    Stats local;
    Stats& st = stats ? *stats : local;
    double t = t0;
    if (t1 <= t0) return t0;
    if (!detail::finite(y)) throw NumericalError("integrate: non-finite initial state");

    State<N> k1 = f(t, y);
    ++st.rhs_calls;
    const auto scale = [&](std::size_t i, const State<N>& a, const State<N>& b) {
        return tol.atol + tol.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    };

    double h = tol.h_init;
    if (h <= 0.0) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = tol.atol + tol.rtol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1 = std::sqrt(d1 / N);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }
    const double h_max = tol.h_max > 0.0 ? tol.h_max : (t1 - t0);
    h = std::min(h, h_max);

    while (t < t1) {
        if (st.accepted + st.rejected > tol.max_steps) throw NumericalError("integrate: step budget exhausted");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw NumericalError("integrate: step-size underflow at t=" + std::to_string(t) + " (state " +
                                 std::to_string(y[0]) + (N > 1 ? ", " + std::to_string(y[N - 1]) : "") +
                                 "): near-singular dynamics");
        }
        State<N> k2, k3, k4, k5, k6, k7, y5;
        try {
            k2 = f(t + c2 * h, detail::axpy<N>(y, h, {{a21, &k1}}));
            k3 = f(t + c3 * h, detail::axpy<N>(y, h, {{a31, &k1}, {a32, &k2}}));
            k4 = f(t + c4 * h, detail::axpy<N>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            k5 = f(t + c5 * h, detail::axpy<N>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            k6 = f(t + h, detail::axpy<N>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
            y5 = detail::axpy<N>(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            k7 = f(t + h, y5);
            st.rhs_calls += 6;
        } catch (const DomainError&) {
            // A trial stage left the model's domain: shrink the step.
            if (h < 1e-10 * std::max(1.0, std::abs(t))) throw;
            h *= 0.1;
            ++st.rejected;
            continue;
        }

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]) / scale(i, y, y5);
            err += e * e;
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err) || !detail::finite(y5)) {
            if (!detail::finite(y5) && h < 1e-10)
                throw NumericalError("integrate: non-finite state at t=" + std::to_string(t));
            h *= 0.1;
            ++st.rejected;
            continue;
        }
        if (err <= 1.0) {
            const double t_new = last ? t1 : t + h;
            ++st.accepted;
            const bool go_on = on_step(t, y, k1, t_new, y5, k7);
            t = t_new;
            y = y5;
            k1 = k7;
            if (!go_on) return t;
            const double fac = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
            h = std::min(h * fac, h_max);
        } else {
            ++st.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
        }
    }
    return t;
}

/// Cubic Hermite interpolation on [ta, tb] from end values and slopes.
template <std::size_t N>
State<N> hermite(double ta, const State<N>& ya, const State<N>& fa, double tb, const State<N>& yb,
                 const State<N>& fb, double t) {
    const double h = tb - ta;
    const double s = (t - ta) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    State<N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = h00 * ya[i] + h10 * h * fa[i] + h01 * yb[i] + h11 * h * fb[i];
    return out;
}

}  // namespace islm::ode

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "apex/errors.hpp"

namespace apex {

// Right-hand side dy/dt = f(t, y) for a small fixed-size system.
template <std::size_t N>
using OdeRhs = std::function<std::array<double, N>(double, const std::array<double, N>&)>;

// Scalar event g(t, y); integration stops where g crosses zero (refined by bisection).
template <std::size_t N>
using OdeEvent = std::function<double(double, const std::array<double, N>&)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double min_step_fraction = 1e-14;  // relative to |t1 - t0|
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
};

template <std::size_t N>
struct OdeResult {
    std::vector<double> t;
    std::vector<std::array<double, N>> y;
    bool event_hit = false;
    double event_time = 0.0;
    std::array<double, N> event_state{};
};

namespace detail {

// Dormand-Prince 5(4) step: returns 5th-order solution and the embedded error estimate.
template <std::size_t N>
void dp45_step(const OdeRhs<N>& f, double t, const std::array<double, N>& y, double h,
               std::array<double, N>& y5, std::array<double, N>& err,
               const std::array<double, N>& k1, std::array<double, N>& k_last) {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                     e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                     e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    std::array<double, N> tmp, k2, k3, k4, k5, k6, k7;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = f(t + h / 5.0, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + 3.0 * h / 10.0, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + 4.0 * h / 5.0, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + 8.0 * h / 9.0, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = f(t + h, y5);
    for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    k_last = k7;
}

}  // namespace detail

// Adaptive DP45 from t0 to t1 (either direction). Records every accepted step.
template <std::size_t N>
OdeResult<N> integrate_ode(const OdeRhs<N>& f, double t0, double t1,
                           std::array<double, N> y0, const OdeOptions& opt = {},
                           const OdeEvent<N>* event = nullptr) {
    OdeResult<N> out;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    if (span == 0.0) {
        out.t.push_back(t0);
        out.y.push_back(y0);
        return out;
    }
    double t = t0;
    std::array<double, N> y = y0;
    out.t.push_back(t);
    out.y.push_back(y);
    double g_prev = event ? (*event)(t, y) : 1.0;

    std::array<double, N> k1 = f(t, y);
    double h = dir * span * 1e-4;
    const double hmin = span * opt.min_step_fraction;

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (dir * (t - t1) >= 0.0) return out;
        if (std::abs(h) > opt.max_step) h = dir * opt.max_step;
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        std::array<double, N> y5, err, k_last;
        detail::dp45_step<N>(f, t, y, h, y5, err, k1, k_last);

        double err_norm = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < N; ++i) {
            if (!std::isfinite(y5[i])) finite = false;
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err_norm = std::max(err_norm, std::abs(err[i]) / sc);
        }
        if (!finite || err_norm > 1.0) {
            const double shrink = finite ? std::max(0.2, 0.9 * std::pow(err_norm, -0.25)) : 0.2;
            h *= shrink;
            if (std::abs(h) < hmin) throw StepSizeError("integrate_ode: step size underflow");
            continue;
        }
        // accepted
        const double t_new = t + h;
        if (event) {
            const double g_new = (*event)(t_new, y5);
            if (std::isfinite(g_prev) && std::isfinite(g_new) && g_prev * g_new < 0.0) {
                // refine the crossing by bisection on sub-steps from (t, y)
                double lo = 0.0, hi = 1.0;  // fractions of this step
                std::array<double, N> y_mid{};
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    std::array<double, N> e2, kl2;
                    detail::dp45_step<N>(f, t, y, h * mid, y_mid, e2, k1, kl2);
                    const double g_mid = (*event)(t + h * mid, y_mid);
                    if (g_prev * g_mid < 0.0) hi = mid; else lo = mid;
                }
                std::array<double, N> e2, kl2;
                detail::dp45_step<N>(f, t, y, h * hi, y_mid, e2, k1, kl2);
                out.event_hit = true;
                out.event_time = t + h * hi;
                out.event_state = y_mid;
                out.t.push_back(out.event_time);
                out.y.push_back(y_mid);
                return out;
            }
            g_prev = g_new;
        }
        t = t_new;
        y = y5;
        k1 = k_last;  // FSAL
        out.t.push_back(t);
        out.y.push_back(y);
        const double grow = err_norm > 0.0 ? std::min(5.0, 0.9 * std::pow(err_norm, -0.2)) : 5.0;
        h *= grow;
    }
    throw ConvergenceError("integrate_ode: max step count exceeded");
}

// Linear interpolation in the recorded trajectory (accepted steps are dense
// enough for boundary-curve resampling at the tolerances used here).
template <std::size_t N>
double sample_component(const OdeResult<N>& res, double t, std::size_t comp) {
    const auto& ts = res.t;
    if (ts.size() < 2) return res.y.front()[comp];
    const bool increasing = ts.back() > ts.front();
    std::size_t lo = 0, hi = ts.size() - 1;
    const double tq = increasing ? std::clamp(t, ts.front(), ts.back())
                                 : std::clamp(t, ts.back(), ts.front());
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if ((ts[mid] <= tq) == increasing) lo = mid; else hi = mid;
    }
    const double w = (tq - ts[lo]) / (ts[hi] - ts[lo]);
    return res.y[lo][comp] * (1.0 - w) + res.y[hi][comp] * w;
}

}  // namespace apex

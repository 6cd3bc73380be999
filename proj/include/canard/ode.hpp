#pragma once
// Adaptive Dormand-Prince 5(4) integrator over fixed-size states. Used for
// conservation drift checks, quadrature oracles, and initial-guess
// construction; boundary-value work lives in bvp.hpp.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>

namespace canard {

struct ode_options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-4;
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

// Integrates y' = f(t, y) from t0 to t1 (either direction). The observer, if
// given, is called after every accepted step with (t, y).
template <std::size_t N, class F,
          class Obs = std::nullptr_t>
std::array<double, N> integrate(F&& f, std::array<double, N> y, double t0, double t1,
                                const ode_options& opt = {}, Obs&& obs = nullptr) {
    using state = std::array<double, N>;
    if (t1 == t0) return y;
    const double dir = t1 > t0 ? 1.0 : -1.0;

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    state k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double t = t0;
    double h = dir * std::min(std::abs(opt.h_init), std::abs(t1 - t0));
    f(t, y, k1);
    bool last = false;

    for (long step = 0; step < opt.max_steps; ++step) {
        if (dir * (t + h - t1) >= 0.0) {
            h = t1 - t;
            last = true;
        }
        auto stage = [&](const state& base, state& out, double hh, auto... terms) {
            // folds pairs (coeff, k) into base + hh * sum coeff_i * k_i
            for (std::size_t i = 0; i < N; ++i) out[i] = base[i];
            auto add = [&](double c, const state& k) {
                for (std::size_t i = 0; i < N; ++i) out[i] += hh * c * k[i];
            };
            (add(terms.first, *terms.second), ...);
        };
        using cp = std::pair<double, const state*>;
        stage(y, ytmp, h, cp{a21, &k1});
        f(t + c2 * h, ytmp, k2);
        stage(y, ytmp, h, cp{a31, &k1}, cp{a32, &k2});
        f(t + c3 * h, ytmp, k3);
        stage(y, ytmp, h, cp{a41, &k1}, cp{a42, &k2}, cp{a43, &k3});
        f(t + c4 * h, ytmp, k4);
        stage(y, ytmp, h, cp{a51, &k1}, cp{a52, &k2}, cp{a53, &k3}, cp{a54, &k4});
        f(t + c5 * h, ytmp, k5);
        stage(y, ytmp, h, cp{a61, &k1}, cp{a62, &k2}, cp{a63, &k3}, cp{a64, &k4}, cp{a65, &k5});
        f(t + h, ytmp, k6);
        stage(y, ynew, h, cp{b1, &k1}, cp{b3, &k3}, cp{b4, &k4}, cp{b5, &k5}, cp{b6, &k6});
        f(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0 || !std::isfinite(err)) {
            if (!std::isfinite(err)) throw std::runtime_error("integrate: state became non-finite");
            t += h;
            y = ynew;
            k1 = k7;
            if constexpr (!std::is_same_v<std::decay_t<Obs>, std::nullptr_t>) obs(t, y);
            if (last) return y;
        } else {
            last = false;
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h *= fac;
        if (std::abs(h) > opt.h_max) h = dir * opt.h_max;
        if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t)))
            throw std::runtime_error("integrate: step size underflow");
    }
    throw std::runtime_error("integrate: step budget exhausted");
}

} // namespace canard

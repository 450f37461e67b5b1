#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>

#include "oqb/errors.hpp"

namespace oqb {

struct SolverOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double safety = 0.9;
    double min_scale = 0.2;
    double max_scale = 5.0;
    std::int64_t max_steps = 20'000'000;  // accepted + rejected
};

struct SolverStats {
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    std::int64_t rhs_evaluations = 0;
};

// Dormand-Prince 5(4) with the classic fourth-order continuous extension.
// State is any Eigen type with array semantics (complex matrices or vectors).
// on_sample(index, t, y) receives the dense-output value at each requested
// time; on_accept(y) may adjust the state after every accepted step (used for
// Hermiticity re-symmetrization and norm control).
template <typename State, typename Rhs>
SolverStats integrate_dopri5(const Rhs& rhs, double t0, double t1, State y,
                             std::span<const double> sample_times,
                             const std::function<void(std::size_t, double, const State&)>& on_sample,
                             const std::function<void(State&)>& on_accept,
                             const SolverOptions& opt = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b_hat, the embedded error weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output weights (Hairer's D coefficients)
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;

    SolverStats stats;
    const double span_t = t1 - t0;
    double t = t0;
    State k1 = rhs(t, y);
    ++stats.rhs_evaluations;

    // initial step from the magnitude of the first derivative
    double h = [&] {
        const double fn = std::sqrt(k1.cwiseAbs2().sum() / static_cast<double>(k1.size()));
        const double yn = std::sqrt(y.cwiseAbs2().sum() / static_cast<double>(y.size()));
        double h0 = 0.01 * (opt.atol + opt.rtol * yn) / std::max(fn * opt.rtol, 1e-300);
        return std::clamp(h0, 1e-10 * span_t, 1e-3 * span_t);
    }();

    std::size_t next_sample = 0;
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t0) {
        on_sample(next_sample, t0, y);
        ++next_sample;
    }

    const double hmin = 1e-12 * std::max(1.0, std::abs(span_t));
    State k2, k3, k4, k5, k6, k7, ynew, yerr;
    while (t < t1) {
        const double remaining = t1 - t;
        h = std::min(h, remaining);
        if (h < hmin && h < remaining)
            throw ToleranceFailure("integrate_dopri5: step size underflow at t = " + std::to_string(t));
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw ToleranceFailure("integrate_dopri5: step budget exhausted at t = " + std::to_string(t));

        k2 = rhs(t + c2 * h, (y + h * (a21 * k1)).eval());
        k3 = rhs(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
        k4 = rhs(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        k5 = rhs(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        k6 = rhs(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(t + h, ynew);
        stats.rhs_evaluations += 6;

        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const auto scale =
            (opt.atol + opt.rtol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array()).eval();
        const double err =
            std::sqrt((yerr.cwiseAbs().array() / scale).square().sum() / static_cast<double>(y.size()));

        if (err <= 1.0) {
            // accepted; serve dense output inside (t, t+h]
            if (next_sample < sample_times.size() && sample_times[next_sample] <= t + h) {
                const State ydiff = ynew - y;
                const State bspl = h * k1 - ydiff;
                const State r4 = ydiff - h * k7 - bspl;
                const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next_sample < sample_times.size() &&
                       sample_times[next_sample] <= t + h + 1e-12 * std::abs(h)) {
                    const double th = std::clamp((sample_times[next_sample] - t) / h, 0.0, 1.0);
                    State ys = y + th * (ydiff + (1.0 - th) * (bspl + th * (r4 + (1.0 - th) * r5)));
                    on_sample(next_sample, sample_times[next_sample], ys);
                    ++next_sample;
                }
            }
            t += h;
            y = ynew;
            if (on_accept) on_accept(y);
            k1 = rhs(t, y);
            ++stats.rhs_evaluations;
            ++stats.accepted;
            const double scale_f =
                std::clamp(opt.safety * std::pow(err, -0.2), opt.min_scale, opt.max_scale);
            h *= scale_f;
        } else {
            ++stats.rejected;
            h *= std::clamp(opt.safety * std::pow(err, -0.2), opt.min_scale, 1.0);
        }
    }
    // serve any samples that coincide with t1 within roundoff
    while (next_sample < sample_times.size()) {
        on_sample(next_sample, t1, y);
        ++next_sample;
    }
    return stats;
}

}  // namespace oqb

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "oqb/models.hpp"
#include "oqb/phase.hpp"
#include "oqb/quadrature.hpp"

namespace oqb {

// Closed-form unitary states for the resonant RWA drive. These are the exact
// solutions of hamiltonian_2ls / hamiltonian_3ls in the rwa frame, with the
// Erf pulse-area form; they serve as oracles for the numerical pipeline.

inline Vector analytic_state_2ls(double t, const TwoLevelParams& p) {
    const double th = pulse_area_2ls(t, p.drive);
    const Complex sa = std::sqrt(p.a);
    const Complex sb = std::sqrt(1.0 - p.a) * std::polar(1.0, p.phi);
    const Complex i{0.0, 1.0};
    Vector v(2);
    v[0] = sa * std::cos(th) - i * sb * std::sin(th);
    v[1] = (-i * sa * std::sin(th) + sb * std::cos(th)) * std::polar(1.0, -p.gap * t);
    return v;
}

namespace detail {
struct ThreeLevelCoeffs {
    Complex c0, c1, c2;
};
inline ThreeLevelCoeffs analytic_coeffs_3ls(double big_theta, const ThreeLevelParams& p) {
    const Complex sa = std::sqrt(p.a);
    const Complex sb = std::sqrt(1.0 - p.a - p.c) * std::polar(1.0, p.phi);
    const Complex sc = std::sqrt(p.c) * std::polar(1.0, p.varphi);
    const double cth = std::cos(big_theta);
    const double sth = std::sin(big_theta);
    const Complex i{0.0, 1.0};
    const double r2 = std::numbers::sqrt2;
    ThreeLevelCoeffs k;
    k.c0 = 0.5 * (sa * (cth + 1.0) - i * r2 * sb * sth) + 0.5 * sc * (cth - 1.0);
    k.c1 = (1.0 / r2) * (-i * sa * sth + r2 * sb * cth) - (i / r2) * sc * sth;
    k.c2 = 0.5 * (sa * (cth - 1.0) - i * r2 * sb * sth) + 0.5 * sc * (cth + 1.0);
    return k;
}
}  // namespace detail

inline Vector analytic_state_3ls(double t, const ThreeLevelParams& p) {
    const auto k = detail::analytic_coeffs_3ls(pulse_area_3ls(t, p.drive01), p);
    Vector v(3);
    v[0] = k.c0;
    v[1] = k.c1 * std::polar(1.0, -p.gap01 * t);
    v[2] = k.c2 * std::polar(1.0, -(p.gap01 + p.gap12) * t);
    return v;
}

// Stored energy of the analytic states (no initial-value subtraction).
inline double analytic_energy_2ls(double t, const TwoLevelParams& p) {
    const Vector v = analytic_state_2ls(t, p);
    return p.gap * std::norm(v[1]);
}
inline double analytic_energy_3ls(double t, const ThreeLevelParams& p) {
    const Vector v = analytic_state_3ls(t, p);
    return p.gap01 * std::norm(v[1]) + (p.gap01 + p.gap12) * std::norm(v[2]);
}

// Closed-form unitary geometric phase on a time grid. The Pancharatnam term
// is referenced to the ideal preparation state and unwrapped along the grid
// exactly as the numerical PhaseRecord; the energy term is accumulated by
// adaptive quadrature of the analytic stored energy.
inline std::vector<double> analytic_gp_2ls(const std::vector<double>& times,
                                           const TwoLevelParams& p) {
    const double root = std::sqrt(p.a * (1.0 - p.a));
    std::vector<double> out(times.size(), 0.0);
    double arg_acc = 0.0, prev = 0.0, energy_int = 0.0;
    const Complex i{0.0, 1.0};
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const double th = pulse_area_2ls(t, p.drive);
        const Complex rot = std::polar(1.0, -p.gap * t);
        const Complex overlap = (p.a + (1.0 - p.a) * rot) * std::cos(th) -
                                i * root *
                                    (std::polar(1.0, p.phi) + std::polar(1.0, -(p.gap * t + p.phi))) *
                                    std::sin(th);
        const double a = std::arg(overlap);
        if (k > 0) {
            arg_acc += detail::principal(a - prev);
            energy_int += integrate_adaptive(
                [&](double s) { return analytic_energy_2ls(s, p); }, times[k - 1], t, 1e-12);
        }
        prev = a;
        out[k] = arg_acc + 2.0 * root * std::cos(p.phi) * th + energy_int;
    }
    return out;
}

inline std::vector<double> analytic_gp_3ls(const std::vector<double>& times,
                                           const ThreeLevelParams& p) {
    const double sb = std::sqrt(1.0 - p.a - p.c);
    const double drive_weight = sb * (std::sqrt(2.0 * p.a) * std::cos(p.phi) +
                                      std::sqrt(2.0 * p.c) * std::cos(p.phi - p.varphi));
    std::vector<double> out(times.size(), 0.0);
    double arg_acc = 0.0, prev = 0.0, energy_int = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const double th = pulse_area_3ls(t, p.drive01);
        const auto co = detail::analytic_coeffs_3ls(th, p);
        const Complex overlap =
            std::sqrt(p.a) * co.c0 +
            sb * std::polar(1.0, -(p.gap01 * t + p.phi)) * co.c1 +
            std::sqrt(p.c) * std::polar(1.0, -((p.gap01 + p.gap12) * t + p.varphi)) * co.c2;
        const double a = std::arg(overlap);
        if (k > 0) {
            arg_acc += detail::principal(a - prev);
            energy_int += integrate_adaptive(
                [&](double s) { return analytic_energy_3ls(s, p); }, times[k - 1], t, 1e-12);
        }
        prev = a;
        out[k] = arg_acc + drive_weight * th + energy_int;
    }
    return out;
}

namespace detail {
inline std::vector<double> dense_grid(double t, double fastest_phase) {
    const int n = std::max(2000, static_cast<int>(std::ceil(std::abs(fastest_phase) * t * 2.0)));
    std::vector<double> ts(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) ts[static_cast<std::size_t>(k)] = t * k / n;
    return ts;
}
}  // namespace detail

inline double analytic_gp_2ls(double t, const TwoLevelParams& p) {
    if (t == 0.0) return 0.0;
    return analytic_gp_2ls(detail::dense_grid(t, p.gap), p).back();
}

inline double analytic_gp_3ls(double t, const ThreeLevelParams& p) {
    if (t == 0.0) return 0.0;
    return analytic_gp_3ls(detail::dense_grid(t, p.gap01 + p.gap12), p).back();
}

}  // namespace oqb

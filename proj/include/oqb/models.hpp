#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "oqb/linalg.hpp"
#include "oqb/quadrature.hpp"

namespace oqb {

enum class Frame { lab, rwa };
enum class ModelKind { two_level, three_level, bipartite };

inline std::string to_string(Frame f) { return f == Frame::lab ? "lab" : "rwa"; }
inline std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::two_level: return "two_level";
        case ModelKind::three_level: return "three_level";
        default: return "bipartite";
    }
}

// Gaussian drive envelope f(t) = exp(-(t - center)^2 / 2 width^2) with unit
// peak amplitude; the effective coupling is carried by amplitude_eff.
//
// Conventions for the accumulated pulse area:
//   ladder 0-1 only:   area(t) = (g/2)    * int_0^t f,  max = g * width * sqrt(pi/2)
//   simultaneous 0-1-2: area(t) = (g/sqrt2)* int_0^t f,  max = g * width * sqrt(pi)
struct DrivePulse {
    enum class AreaConvention { two_level, three_level };
    double amplitude_eff = 0.0;   // g~, units 1/time
    double center = 0.5;          // tau/2
    double width = 0.125;         // sigma
    double carrier_freq = 0.0;    // Omega
    double pulse_area_max = 0.0;  // theta_m or Theta_m, rad
    AreaConvention convention = AreaConvention::two_level;

    static DrivePulse for_two_level(double theta_m, double sigma, double carrier, double center) {
        DrivePulse p;
        p.pulse_area_max = theta_m;
        p.width = sigma;
        p.carrier_freq = carrier;
        p.center = center;
        p.amplitude_eff = theta_m / (sigma * std::sqrt(std::numbers::pi / 2.0));
        p.convention = AreaConvention::two_level;
        return p;
    }
    static DrivePulse for_three_level(double area_m, double sigma, double carrier, double center) {
        DrivePulse p;
        p.pulse_area_max = area_m;
        p.width = sigma;
        p.carrier_freq = carrier;
        p.center = center;
        p.amplitude_eff = area_m / (sigma * std::sqrt(std::numbers::pi));
        p.convention = AreaConvention::three_level;
        return p;
    }
};

inline std::vector<std::string> drive_warnings(const DrivePulse& p, double duration) {
    std::vector<std::string> w;
    if (!(p.width > 0.0)) w.push_back("drive width must be positive");
    if (p.width > duration / 4.0)
        w.push_back("drive width exceeds duration/4; the pulse is not well contained in [0, duration]");
    return w;
}

inline double envelope(double t, const DrivePulse& p) {
    const double u = (t - p.center) / p.width;
    return std::exp(-0.5 * u * u);
}

namespace detail {
inline double erf_area(double t, const DrivePulse& p) {
    return 0.5 * p.pulse_area_max * (std::erf((t - p.center) / (std::sqrt(2.0) * p.width)) + 1.0);
}
}  // namespace detail

// Accumulated pulse area theta(t). The closed Erf form neglects the envelope
// tail left of t = 0; exact_quadrature integrates the envelope from 0 instead.
inline double pulse_area_2ls(double t, const DrivePulse& p, bool exact_quadrature = false) {
    if (!exact_quadrature) return detail::erf_area(t, p);
    const double pref = 0.5 * p.amplitude_eff;
    return pref * integrate_adaptive([&](double s) { return envelope(s, p); }, 0.0, t, 1e-10);
}

inline double pulse_area_3ls(double t, const DrivePulse& p, bool exact_quadrature = false) {
    if (!exact_quadrature) return detail::erf_area(t, p);
    const double pref = p.amplitude_eff / std::sqrt(2.0);
    return pref * integrate_adaptive([&](double s) { return envelope(s, p); }, 0.0, t, 1e-10);
}

// ---------------------------------------------------------------------------
// Parameter sets
// ---------------------------------------------------------------------------

struct TwoLevelParams {
    double gap = 1.0;  // Delta
    DrivePulse drive;
    double gamma = 0.0;  // relaxation rate
    double eta = 0.0;    // pure dephasing rate
    double a = 1.0;      // initial ground-state weight
    double phi = 0.0;    // initial relative phase

    bool resonant() const { return drive.carrier_freq == gap; }
};

struct ThreeLevelParams {
    double gap01 = 1.0;  // Delta
    double gap12 = 1.0;  // Delta'
    DrivePulse drive01;
    DrivePulse drive12;
    double gamma10 = 0.0;
    double gamma21 = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double a = 1.0;
    double c = 0.0;
    double phi = 0.0;
    double varphi = 0.0;
};

struct BipartiteParams {
    double omega_qb = 1.0;
    double omega_c = 1.0;
    double omega_d = 1.0;
    double coupling = 1.0;       // g
    double drive_strength = 0.5; // F
    double eta_charger = 0.0;

    bool resonant() const { return omega_d == omega_qb && omega_qb == omega_c; }
};

inline std::vector<std::string> bipartite_warnings(const BipartiteParams& p) {
    std::vector<std::string> w;
    if (!p.resonant())
        w.push_back("bipartite model is off resonance (omega_d = omega_QB = omega_C is the supported configuration)");
    return w;
}

struct DissipatorSpec {
    Matrix jump_operator;
    double rate = 0.0;
};

// ---------------------------------------------------------------------------
// Hamiltonians (energy reference omega_0 = 0; only gaps enter)
// ---------------------------------------------------------------------------

inline Matrix hamiltonian_2ls(double t, const TwoLevelParams& p, Frame frame) {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = p.gap;
    const double f = envelope(t, p.drive);
    const double g = p.drive.amplitude_eff;
    if (frame == Frame::lab) {
        const double v = g * f * std::cos(p.drive.carrier_freq * t);
        h(0, 1) += v;
        h(1, 0) += v;
    } else {
        // co-rotating half of the cosine drive, kept in the lab basis
        const Complex v = 0.5 * g * f * std::polar(1.0, p.drive.carrier_freq * t);
        h(0, 1) += v;
        h(1, 0) += std::conj(v);
    }
    return h;
}

inline Matrix hamiltonian_3ls(double t, const ThreeLevelParams& p, Frame frame) {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = p.gap01;
    h(2, 2) = p.gap01 + p.gap12;
    const double g = p.drive01.amplitude_eff;
    const double f01 = envelope(t, p.drive01);
    const double f12 = envelope(t, p.drive12);
    if (frame == Frame::lab) {
        const double v01 = g * f01 * std::cos(p.drive01.carrier_freq * t);
        const double v12 = g * f12 * std::cos(p.drive12.carrier_freq * t);
        h(0, 1) += v01;
        h(1, 0) += v01;
        h(1, 2) += v12;
        h(2, 1) += v12;
    } else {
        const Complex v01 = 0.5 * g * f01 * std::polar(1.0, p.drive01.carrier_freq * t);
        const Complex v12 = 0.5 * g * f12 * std::polar(1.0, p.drive12.carrier_freq * t);
        h(0, 1) += v01;
        h(1, 0) += std::conj(v01);
        h(1, 2) += v12;
        h(2, 1) += std::conj(v12);
    }
    return h;
}

// Basis order |0_C 0_B>, |0_C 1_B>, |1_C 0_B>, |1_C 1_B| (charger-major).
// The charger drive is written directly in its rotating form, so there is no
// frame choice here.
inline Matrix hamiltonian_bipartite(double t, const BipartiteParams& p) {
    Matrix h = Matrix::Zero(4, 4);
    h(1, 1) = p.omega_qb;
    h(2, 2) = p.omega_c;
    h(3, 3) = p.omega_c + p.omega_qb;
    // g |1_C 0_B><0_C 1_B| + h.c.
    h(2, 1) += p.coupling;
    h(1, 2) += p.coupling;
    // F |0_C><1_C| e^{i w_d t} (x) I + h.c.
    const Complex v = p.drive_strength * std::polar(1.0, p.omega_d * t);
    h(0, 2) += v;
    h(2, 0) += std::conj(v);
    h(1, 3) += v;
    h(3, 1) += std::conj(v);
    return h;
}

// ---------------------------------------------------------------------------
// Jump operators and initial states
// ---------------------------------------------------------------------------

namespace detail {
inline Matrix ketbra(int dim, int i, int j) {
    Matrix m = Matrix::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
}
inline void check_rate(double r, const char* name) {
    if (r < 0.0) throw NegativeRate(std::string("negative rate: ") + name);
}
}  // namespace detail

inline std::vector<DissipatorSpec> dissipators_for(const TwoLevelParams& p) {
    detail::check_rate(p.gamma, "gamma");
    detail::check_rate(p.eta, "eta");
    return {{detail::ketbra(2, 0, 1), p.gamma},   // relaxation |0><1|
            {detail::ketbra(2, 1, 1), p.eta}};    // dephasing |1><1|
}

inline std::vector<DissipatorSpec> dissipators_for(const ThreeLevelParams& p) {
    detail::check_rate(p.gamma10, "gamma10");
    detail::check_rate(p.gamma21, "gamma21");
    detail::check_rate(p.eta1, "eta1");
    detail::check_rate(p.eta2, "eta2");
    return {{detail::ketbra(3, 0, 1), p.gamma10},
            {detail::ketbra(3, 1, 2), p.gamma21},
            {detail::ketbra(3, 1, 1), p.eta1},
            {detail::ketbra(3, 2, 2), p.eta2}};
}

inline std::vector<DissipatorSpec> dissipators_for(const BipartiteParams& p) {
    detail::check_rate(p.eta_charger, "eta_charger");
    Matrix l = Matrix::Zero(4, 4);  // |1_C><1_C| (x) I
    l(2, 2) = 1.0;
    l(3, 3) = 1.0;
    return {{l, p.eta_charger}};
}

inline Vector initial_state(const TwoLevelParams& p) {
    if (p.a < 0.0 || p.a > 1.0) throw InvalidAmplitudes("two-level initial state needs a in [0, 1]");
    Vector v(2);
    v[0] = std::sqrt(p.a);
    v[1] = std::sqrt(1.0 - p.a) * std::polar(1.0, p.phi);
    return v;
}

inline Vector initial_state(const ThreeLevelParams& p) {
    if (p.a < 0.0 || p.c < 0.0 || p.a + p.c > 1.0)
        throw InvalidAmplitudes("three-level initial state needs a, c >= 0 and a + c <= 1");
    Vector v(3);
    v[0] = std::sqrt(p.a);
    v[1] = std::sqrt(1.0 - p.a - p.c) * std::polar(1.0, p.phi);
    v[2] = std::sqrt(p.c) * std::polar(1.0, p.varphi);
    return v;
}

inline Vector initial_state(const BipartiteParams&) {
    Vector v = Vector::Zero(4);
    v[0] = 1.0;  // |0_C 0_B>
    return v;
}

// Bare battery Hamiltonians used by the stored-energy observable.
inline Matrix bare_hamiltonian_2ls(const TwoLevelParams& p) {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = p.gap;
    return h;
}
inline Matrix bare_hamiltonian_3ls(const ThreeLevelParams& p) {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = p.gap01;
    h(2, 2) = p.gap01 + p.gap12;
    return h;
}
inline Matrix bare_hamiltonian_qb(const BipartiteParams& p) {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = p.omega_qb;
    return h;
}

}  // namespace oqb

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "oqb/linalg.hpp"
#include "oqb/models.hpp"
#include "oqb/ode.hpp"

namespace oqb {

using HamiltonianFn = std::function<Matrix(double)>;

struct TrajectoryMetadata {
    double rtol = 0.0;
    double atol = 0.0;
    std::string model;
    std::string frame;
    SolverStats solver;
    double max_norm_drift = 0.0;  // pure propagation only
};

// Density matrices sampled on a uniform grid over [0, t_end], times[0] = 0.
struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
    TrajectoryMetadata metadata;

    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct PurePath {
    std::vector<double> times;
    std::vector<Vector> states;
    TrajectoryMetadata metadata;
};

// Right-hand side of the Lindblad master equation,
//   drho/dt = -i [H(t), rho] + sum_k r_k (L rho L^+ - 1/2 {L^+L, rho}).
inline Matrix lindblad_rhs(double t, const Matrix& rho, const HamiltonianFn& hamiltonian,
                           const std::vector<DissipatorSpec>& dissipators) {
    const Matrix h = hamiltonian(t);
    Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
    for (const auto& d : dissipators) {
        if (d.rate == 0.0) continue;
        const Matrix& l = d.jump_operator;
        const Matrix ldl = l.adjoint() * l;
        out += d.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
    }
    return out;
}

inline std::vector<double> uniform_grid(double t_end, int grid_points) {
    std::vector<double> ts(static_cast<std::size_t>(grid_points) + 1);
    for (int k = 0; k <= grid_points; ++k)
        ts[static_cast<std::size_t>(k)] = t_end * static_cast<double>(k) / grid_points;
    ts.front() = 0.0;
    ts.back() = t_end;
    return ts;
}

// Trajectory invariants: Hermiticity, unit trace to 1e-8, spectrum above -1e-8.
inline void validate_physicality(const Trajectory& traj) {
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const Matrix& rho = traj.states[k];
        const double t = traj.times[k];
        const double trace_dev = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
        if (trace_dev > 1e-8)
            throw PhysicalityViolation("trace deviates from 1 by " + std::to_string(trace_dev) +
                                           " at t = " + std::to_string(t),
                                       t, trace_dev);
        Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0,
                                                 Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -1e-8)
            throw PhysicalityViolation("negative eigenvalue " + std::to_string(min_eig) +
                                           " at t = " + std::to_string(t),
                                       t, -min_eig);
    }
}

// Integrate the master equation over [0, t_end] and sample grid_points + 1
// uniformly spaced states. The state is re-symmetrized after every accepted
// internal step so Hermiticity drift cannot contaminate eigen-tracking.
inline Trajectory propagate(const HamiltonianFn& hamiltonian,
                            const std::vector<DissipatorSpec>& dissipators, const Matrix& rho0,
                            double t_end, int grid_points, const SolverOptions& opt = {},
                            const std::string& model_name = "", const std::string& frame_name = "") {
    if (grid_points < 1) throw ConfigError("propagate: grid_points must be >= 1");

    // precompute L^+L once; skip zero-rate channels in the hot loop
    struct Channel {
        Matrix l, ldl;
        double rate;
    };
    std::vector<Channel> channels;
    for (const auto& d : dissipators) {
        if (d.rate < 0.0) throw NegativeRate("propagate: dissipator rate must be >= 0");
        if (d.rate > 0.0) channels.push_back({d.jump_operator, d.jump_operator.adjoint() * d.jump_operator, d.rate});
    }
    const auto rhs = [&](double t, const Matrix& rho) -> Matrix {
        const Matrix h = hamiltonian(t);
        Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h);
        for (const auto& ch : channels)
            out += ch.rate * (ch.l * rho * ch.l.adjoint() - 0.5 * (ch.ldl * rho + rho * ch.ldl));
        return out;
    };

    Trajectory traj;
    traj.times = uniform_grid(t_end, grid_points);
    traj.states.resize(traj.times.size());
    traj.metadata.rtol = opt.rtol;
    traj.metadata.atol = opt.atol;
    traj.metadata.model = model_name;
    traj.metadata.frame = frame_name;

    const auto resymmetrize = [](Matrix& m) { m = ((m + m.adjoint()) / 2.0).eval(); };
    traj.metadata.solver = integrate_dopri5<Matrix>(
        rhs, 0.0, t_end, rho0, traj.times,
        [&](std::size_t idx, double, const Matrix& y) {
            Matrix s = y;
            resymmetrize(s);
            traj.states[idx] = std::move(s);
        },
        resymmetrize, opt);

    validate_physicality(traj);
    return traj;
}

// Schroedinger propagation of a pure state; all dissipator rates must vanish.
inline PurePath propagate_pure(const HamiltonianFn& hamiltonian,
                               const std::vector<DissipatorSpec>& dissipators, const Vector& psi0,
                               double t_end, int grid_points, const SolverOptions& opt = {},
                               const std::string& model_name = "",
                               const std::string& frame_name = "") {
    for (const auto& d : dissipators)
        if (d.rate != 0.0)
            throw NonzeroRates("propagate_pure: all dissipator rates must be zero");
    if (grid_points < 1) throw ConfigError("propagate_pure: grid_points must be >= 1");

    const auto rhs = [&](double t, const Vector& psi) -> Vector {
        return Complex(0.0, -1.0) * (hamiltonian(t) * psi);
    };

    PurePath path;
    path.times = uniform_grid(t_end, grid_points);
    path.states.resize(path.times.size());
    path.metadata.rtol = opt.rtol;
    path.metadata.atol = opt.atol;
    path.metadata.model = model_name;
    path.metadata.frame = frame_name;

    double max_drift = 0.0;
    path.metadata.solver = integrate_dopri5<Vector>(
        rhs, 0.0, t_end, psi0, path.times,
        [&](std::size_t idx, double, const Vector& y) {
            Vector s = y;
            s.normalize();
            path.states[idx] = std::move(s);
        },
        [&](Vector& y) {
            const double n = y.norm();
            max_drift = std::max(max_drift, std::abs(n - 1.0));
            y /= n;
        },
        opt);
    path.metadata.max_norm_drift = max_drift;
    if (max_drift > 1e-9)
        throw PhysicalityViolation("pure-state norm drifted by " + std::to_string(max_drift),
                                   t_end, max_drift);
    return path;
}

inline Trajectory density_path(const PurePath& path) {
    Trajectory traj;
    traj.times = path.times;
    traj.metadata = path.metadata;
    traj.states.reserve(path.states.size());
    for (const auto& psi : path.states) traj.states.push_back(psi * psi.adjoint());
    return traj;
}

}  // namespace oqb

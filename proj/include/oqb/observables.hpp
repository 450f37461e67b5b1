#pragma once

#include <cmath>
#include <vector>

#include "oqb/linalg.hpp"
#include "oqb/propagator.hpp"

namespace oqb {

// Stored energy E(t) = tr(H_QB rho(t)) - tr(H_QB rho(0)) and its cumulative
// trapezoid integral I_E(t) on the trajectory grid.
struct EnergySeries {
    std::vector<double> times;
    std::vector<double> stored;
    std::vector<double> integral;
};

inline EnergySeries stored_energy(const Trajectory& traj, const Matrix& h_qb) {
    if (traj.states.empty()) throw ConfigError("stored_energy: empty trajectory");
    if (h_qb.rows() != traj.states.front().rows())
        throw DimensionMismatch("stored_energy: Hamiltonian does not match state dimension");
    EnergySeries s;
    s.times = traj.times;
    s.stored.resize(traj.states.size());
    s.integral.resize(traj.states.size());
    const double e0 = (h_qb * traj.states.front()).trace().real();
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        s.stored[k] = (h_qb * traj.states[k]).trace().real() - e0;
    s.integral[0] = 0.0;
    for (std::size_t k = 1; k < s.stored.size(); ++k)
        s.integral[k] = s.integral[k - 1] +
                        0.5 * (s.stored[k] + s.stored[k - 1]) * (s.times[k] - s.times[k - 1]);
    return s;
}

// Reduce a bipartite trajectory to the battery and evaluate its stored energy.
inline Trajectory reduced_qb_trajectory(const Trajectory& traj) {
    Trajectory out;
    out.times = traj.times;
    out.metadata = traj.metadata;
    out.states.reserve(traj.states.size());
    for (const auto& rho : traj.states) out.states.push_back(partial_trace_charger(rho));
    return out;
}

inline EnergySeries stored_energy_qb_subsystem(const Trajectory& traj, const BipartiteParams& p) {
    if (traj.states.empty() || traj.states.front().rows() != 4)
        throw DimensionMismatch("stored_energy_qb_subsystem: expected a 4-dimensional trajectory");
    return stored_energy(reduced_qb_trajectory(traj), bare_hamiltonian_qb(p));
}

// Level populations rho_kk(t); one series per level.
inline std::vector<std::vector<double>> populations(const Trajectory& traj) {
    if (traj.states.empty()) return {};
    const auto dim = static_cast<std::size_t>(traj.states.front().rows());
    std::vector<std::vector<double>> pop(dim, std::vector<double>(traj.states.size()));
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        for (std::size_t l = 0; l < dim; ++l)
            pop[l][k] = traj.states[k](static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)).real();
    return pop;
}

inline std::vector<double> purity_series(const Trajectory& traj) {
    std::vector<double> out(traj.states.size());
    for (std::size_t k = 0; k < traj.states.size(); ++k)
        out[k] = (traj.states[k] * traj.states[k]).trace().real();
    return out;
}

// max |dE/dt| over the final `window` fraction of the grid, normalized by the
// peak stored energy; ~0 means the charge has settled.
inline double charge_stability(const EnergySeries& series, double window = 0.1) {
    if (window <= 0.0 || window > 0.5) throw ConfigError("charge_stability: window must be in (0, 0.5]");
    const std::size_t n = series.stored.size();
    if (n < 2) return 0.0;
    double emax = 0.0;
    for (double e : series.stored) emax = std::max(emax, std::abs(e));
    if (emax == 0.0) return 0.0;
    const auto start = static_cast<std::size_t>(std::ceil((1.0 - window) * static_cast<double>(n - 1)));
    double worst = 0.0;
    for (std::size_t k = start; k + 1 < n; ++k) {
        const double slope = std::abs(series.stored[k + 1] - series.stored[k]) /
                             (series.times[k + 1] - series.times[k]);
        worst = std::max(worst, slope);
    }
    return worst / emax;
}

}  // namespace oqb

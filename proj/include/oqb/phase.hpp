#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "oqb/linalg.hpp"
#include "oqb/propagator.hpp"

namespace oqb {

// The density-matrix eigenstate continuously connected to the (pure) initial
// state, tracked along a trajectory by maximal overlap.
struct EigenPath {
    std::vector<double> times;
    std::vector<Vector> vectors;      // |psi_+(t)>
    std::vector<double> eigenvalues;  // eps_+(t)
    std::vector<double> gaps;         // spectral gap to the nearest other branch, per time
    double min_gap = 0.0;
    double min_overlap_separation = 1.0;
};

// Unwrapped geometric phase and its two constituents,
//   Phi_g(t) = arg<psi(0)|psi(t)> - Im int <psi|psi'> dt,
// discretized gauge-invariantly (see geometric_phase).
struct PhaseRecord {
    std::vector<double> times;
    std::vector<double> total_gp;
    std::vector<double> pancharatnam_part;
    std::vector<double> dynamical_part;
};

inline EigenPath track_eigenstate(const Trajectory& traj) {
    if (traj.states.empty()) throw ConfigError("track_eigenstate: empty trajectory");
    EigenPath path;
    path.times = traj.times;
    const std::size_t n = traj.states.size();
    path.vectors.reserve(n);
    path.eigenvalues.reserve(n);
    path.gaps.reserve(n);

    EigenSystem es0 = eig_hermitian(traj.states[0]);
    if (es0.eigenvalues[0] < 1.0 - 1e-6)
        throw InitialStateNotPure("track_eigenstate: largest initial eigenvalue " +
                                  std::to_string(es0.eigenvalues[0]) + " < 1 - 1e-6");

    const auto record = [&path](const EigenSystem& es, Eigen::Index sel) {
        // positivity noise below 1e-8 is clamped; larger violations were
        // already rejected by the propagator guards
        path.eigenvalues.push_back(std::max(es.eigenvalues[sel], 0.0));
        double gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k)
            if (k != sel) gap = std::min(gap, std::abs(es.eigenvalues[sel] - es.eigenvalues[k]));
        path.gaps.push_back(gap);
        path.vectors.push_back(es.eigenvectors[static_cast<std::size_t>(sel)]);
    };
    record(es0, 0);

    for (std::size_t i = 1; i < n; ++i) {
        EigenSystem es = eig_hermitian(traj.states[i]);
        const Vector& prev = path.vectors.back();
        double best = -1.0, second = -1.0;
        Eigen::Index sel = 0;
        for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
            const double ov = std::abs(prev.dot(es.eigenvectors[static_cast<std::size_t>(k)]));
            if (ov > best) {
                second = best;
                best = ov;
                sel = k;
            } else if (ov > second) {
                second = ov;
            }
        }
        const double separation = best - second;
        path.min_overlap_separation = std::min(path.min_overlap_separation, separation);
        if (separation < 1e-3)
            throw BranchAmbiguity("track_eigenstate: branch overlaps separated by only " +
                                      std::to_string(separation) + " at t = " +
                                      std::to_string(traj.times[i]),
                                  traj.times[i], separation);
        record(es, sel);
    }
    path.min_gap = *std::min_element(path.gaps.begin(), path.gaps.end());
    return path;
}

namespace detail {
inline double principal(double angle) {
    while (angle > std::numbers::pi) angle -= 2.0 * std::numbers::pi;
    while (angle <= -std::numbers::pi) angle += 2.0 * std::numbers::pi;
    return angle;
}
}  // namespace detail

// Gauge-invariant discretization of the geometric phase:
//   Phi_g(t_n) = arg<psi_0|psi_n> - sum_{k<n} arg<psi_k|psi_{k+1}>.
// The total is accumulated through the Bargmann product
//   z_n = <psi_0|psi_n> prod_{k<n} <psi_{k+1}|psi_k>,
// whose value is exactly invariant under per-point phase dressing; arg(z_n)
// is unwrapped continuously in n. The Pancharatnam part is then
// total + dynamical, which equals arg<psi_0|psi_n> modulo 2 pi with the same
// unwrapping, so the record identity total = pancharatnam - dynamical holds
// exactly by construction.
inline PhaseRecord geometric_phase(const EigenPath& path) {
    const std::size_t n = path.vectors.size();
    if (n == 0) throw ConfigError("geometric_phase: empty path");
    PhaseRecord rec;
    rec.times = path.times;
    rec.total_gp.assign(n, 0.0);
    rec.pancharatnam_part.assign(n, 0.0);
    rec.dynamical_part.assign(n, 0.0);

    const Vector& psi0 = path.vectors.front();
    Complex w{1.0, 0.0};  // running product of <psi_{k+1}|psi_k>, kept on the unit circle
    double dyn = 0.0;
    double total = 0.0;
    double prev_arg = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const Complex step = path.vectors[k].dot(path.vectors[k - 1]);  // <psi_k|psi_{k-1}>
        if (std::abs(step) < 1e-6)
            throw OrthogonalNeighbors("geometric_phase: consecutive states nearly orthogonal at t = " +
                                          std::to_string(path.times[k]),
                                      path.times[k]);
        dyn += std::arg(std::conj(step));  // arg<psi_{k-1}|psi_k>
        w *= step / std::abs(step);
        const Complex z = psi0.dot(path.vectors[k]) * w;
        const double a = std::arg(z);
        total += detail::principal(a - prev_arg);
        prev_arg = a;
        rec.total_gp[k] = total;
        rec.dynamical_part[k] = dyn;
        rec.pancharatnam_part[k] = total + dyn;
    }
    return rec;
}

// The open-vs-unitary deviation series delta Phi_g(t).
inline std::vector<double> gp_deviation(const PhaseRecord& open_record,
                                        const PhaseRecord& unitary_record) {
    if (open_record.times.size() != unitary_record.times.size())
        throw GridMismatch("gp_deviation: records have different grid sizes");
    for (std::size_t k = 0; k < open_record.times.size(); ++k)
        if (open_record.times[k] != unitary_record.times[k])
            throw GridMismatch("gp_deviation: grids differ at index " + std::to_string(k));
    std::vector<double> out(open_record.times.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = open_record.total_gp[k] - unitary_record.total_gp[k];
    return out;
}

// Convenience: the phase record of a pure-state path (unitary benchmark).
inline PhaseRecord geometric_phase(const PurePath& pure) {
    EigenPath path;
    path.times = pure.times;
    path.vectors = pure.states;
    path.eigenvalues.assign(pure.states.size(), 1.0);
    path.gaps.assign(pure.states.size(), 1.0);
    path.min_gap = 1.0;
    return geometric_phase(path);
}

}  // namespace oqb

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oqb/analytic.hpp"
#include "oqb/models.hpp"
#include "oqb/phase.hpp"
#include "oqb/propagator.hpp"

using namespace oqb;
using Catch::Approx;

namespace {
constexpr double tau = 1.0;
const double pi = std::numbers::pi;

TwoLevelParams fig2_params(double a = 1.0, double phi = 0.0) {
    TwoLevelParams p;
    const double sigma = tau / 8.0;
    p.gap = 10.0 * (pi / 2.0) / (sigma * std::sqrt(pi / 2.0));
    p.drive = DrivePulse::for_two_level(pi / 2.0, sigma, p.gap, tau / 2.0);
    p.a = a;
    p.phi = phi;
    return p;
}

Trajectory zero_rate_trajectory(const TwoLevelParams& p, int grid, SolverOptions opt = {}) {
    const Vector psi0 = initial_state(p);
    return propagate([&](double t) { return hamiltonian_2ls(t, p, Frame::rwa); }, {},
                     (psi0 * psi0.adjoint()).eval(), tau, grid, opt);
}

EigenPath path_from_states(std::vector<Vector> states) {
    EigenPath path;
    path.vectors = std::move(states);
    path.times.resize(path.vectors.size());
    for (std::size_t k = 0; k < path.times.size(); ++k)
        path.times[k] = static_cast<double>(k) / static_cast<double>(path.times.size() - 1);
    path.eigenvalues.assign(path.vectors.size(), 1.0);
    path.gaps.assign(path.vectors.size(), 1.0);
    path.min_gap = 1.0;
    return path;
}

using Bloch = Eigen::Vector3d;

Vector bloch_state(const Bloch& n) {
    const double theta = std::acos(std::clamp(n[2], -1.0, 1.0));
    const double phi = std::atan2(n[1], n[0]);
    Vector v(2);
    v[0] = std::cos(theta / 2);
    v[1] = std::sin(theta / 2) * std::polar(1.0, phi);
    return v;
}

void append_geodesic(std::vector<Vector>& states, const Bloch& from, const Bloch& to, int steps) {
    Bloch axis = from.cross(to);
    const double angle = std::atan2(axis.norm(), from.dot(to));
    axis.normalize();
    for (int s = 0; s < steps; ++s) {
        const double a = angle * s / steps;
        states.push_back(bloch_state(Eigen::AngleAxisd(a, axis) * from));
    }
}

// interior-angle spherical excess, signed by the vertex orientation
double signed_excess(const Bloch& a, const Bloch& b, const Bloch& c) {
    const auto corner = [](const Bloch& v, const Bloch& p, const Bloch& q) {
        const Bloch tp = (p - v.dot(p) * v).normalized();
        const Bloch tq = (q - v.dot(q) * v).normalized();
        return std::acos(std::clamp(tp.dot(tq), -1.0, 1.0));
    };
    const double excess = corner(a, b, c) + corner(b, c, a) + corner(c, a, b) - pi;
    const double sign = a.dot(b.cross(c)) >= 0 ? 1.0 : -1.0;
    return sign * excess;
}

}  // namespace

TEST_CASE("tracking a unitary trajectory returns the state itself") {
    const TwoLevelParams p = fig2_params(0.8, 0.3);
    const auto traj = zero_rate_trajectory(p, 1500);
    const auto path = track_eigenstate(traj);
    const auto pure = propagate_pure([&](double t) { return hamiltonian_2ls(t, p, Frame::rwa); },
                                     {}, initial_state(p), tau, 1500);
    REQUIRE(path.vectors.size() == pure.states.size());
    for (std::size_t k = 0; k < path.vectors.size(); ++k) {
        CHECK(path.eigenvalues[k] == Approx(1.0).margin(1e-8));
        CHECK(std::abs(pure.states[k].dot(path.vectors[k])) == Approx(1.0).margin(1e-7));
    }
    // continuity of the tracked branch
    for (std::size_t k = 1; k < path.vectors.size(); ++k)
        CHECK(std::abs(path.vectors[k - 1].dot(path.vectors[k])) >= 0.999);
}

TEST_CASE("pure dephasing keeps the tracked branch fixed while eps decays") {
    // H = 0, rho(0) = |+><+|: coherence decays at eta/2, eigenvector constant
    const double eta = 2.0;
    Matrix deph = Matrix::Zero(2, 2);
    deph(1, 1) = 1.0;
    Vector plus(2);
    plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    const auto traj = propagate([](double) { return Matrix::Zero(2, 2).eval(); }, {{deph, eta}},
                                (plus * plus.adjoint()).eval(), tau, 1000);
    const auto path = track_eigenstate(traj);
    for (std::size_t k = 0; k < path.vectors.size(); ++k) {
        const double expected = 0.5 * (1.0 + std::exp(-eta * path.times[k] / 2.0));
        CHECK(path.eigenvalues[k] == Approx(expected).margin(1e-6));
        CHECK(std::abs(plus.dot(path.vectors[k])) == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("a degeneracy crossing raises BranchAmbiguity") {
    // Bloch vector shrinks to zero along z and regrows along x: at the swap
    // the old branch overlaps both new eigenvectors equally.
    Trajectory traj;
    Matrix sx(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    const auto mix = [&](const Matrix& dir, double r) {
        return ((Matrix::Identity(2, 2) + r * dir) / 2.0).eval();
    };
    traj.times = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    traj.states = {mix(sz, 1.0), mix(sz, 0.6),  mix(sz, 0.2),
                   mix(sx, 0.2), mix(sx, 0.6), mix(sx, 1.0)};
    CHECK_THROWS_AS(track_eigenstate(traj), BranchAmbiguity);
}

TEST_CASE("mixed initial states are rejected") {
    Trajectory traj;
    traj.times = {0.0, 1.0};
    Matrix mixed = Matrix::Zero(2, 2);
    mixed(0, 0) = 0.6;
    mixed(1, 1) = 0.4;
    traj.states = {mixed, mixed};
    CHECK_THROWS_AS(track_eigenstate(traj), InitialStateNotPure);
}

TEST_CASE("constant paths carry no phase") {
    Vector v(2);
    v << 0.6, Complex(0.0, 0.8);
    const auto rec = geometric_phase(path_from_states(std::vector<Vector>(100, v)));
    for (double g : rec.total_gp) CHECK(g == Approx(0.0).margin(1e-12));
}

TEST_CASE("a pure-gauge path carries no phase") {
    Vector v(2);
    v << 0.6, Complex(0.0, 0.8);
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uni(0.0, 2 * pi);
    std::vector<Vector> states;
    for (int k = 0; k < 200; ++k) states.push_back(std::polar(1.0, uni(rng)) * v);
    states[0] = v;
    const auto rec = geometric_phase(path_from_states(states));
    for (double g : rec.total_gp) CHECK(g == Approx(0.0).margin(1e-10));
}

TEST_CASE("half great circle accumulates pi") {
    std::vector<Vector> states;
    const int n = 3999;  // odd so no sample lands exactly on the orthogonal point
    for (int k = 0; k <= n; ++k) {
        const double s = pi * k / n;
        Vector v(2);
        v << std::cos(s), std::sin(s);
        states.push_back(v);
    }
    const auto rec = geometric_phase(path_from_states(states));
    CHECK(std::abs(rec.total_gp.back()) == Approx(pi).margin(1e-4));
}

TEST_CASE("geodesic triangles reproduce minus half the solid angle") {
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Bloch> v;
        while (v.size() < 3) {
            Bloch n(gauss(rng), gauss(rng), gauss(rng));
            n.normalize();
            bool ok = true;
            for (const auto& u : v)
                if (std::abs(u.dot(n)) > 0.9) ok = false;
            if (ok) v.push_back(n);
        }
        std::vector<Vector> states;
        const int steps = 2500;
        append_geodesic(states, v[0], v[1], steps);
        append_geodesic(states, v[1], v[2], steps);
        append_geodesic(states, v[2], v[0], steps);
        states.push_back(states.front());
        const auto rec = geometric_phase(path_from_states(states));
        const double expected = -0.5 * signed_excess(v[0], v[1], v[2]);
        CHECK(rec.total_gp.back() == Approx(expected).margin(1e-4));
    }
}

TEST_CASE("orthogonal neighbors are rejected") {
    Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
    e0[0] = 1.0;
    e1[1] = 1.0;
    CHECK_THROWS_AS(geometric_phase(path_from_states({e0, e1})), OrthogonalNeighbors);
}

TEST_CASE("the total phase is gauge invariant on a real trajectory") {
    const auto traj = zero_rate_trajectory(fig2_params(), 2000);
    const auto path = track_eigenstate(traj);
    const auto rec = geometric_phase(path);

    EigenPath dressed = path;
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> uni(0.0, 2 * pi);
    for (auto& v : dressed.vectors) v *= std::polar(1.0, uni(rng));
    const auto rec2 = geometric_phase(dressed);
    for (std::size_t k = 0; k < rec.total_gp.size(); ++k)
        CHECK(std::abs(rec2.total_gp[k] - rec.total_gp[k]) < 1e-10);
}

TEST_CASE("record identity and part consistency") {
    const auto traj = zero_rate_trajectory(fig2_params(0.6, 0.8), 1200);
    const auto rec = geometric_phase(track_eigenstate(traj));
    for (std::size_t k = 0; k < rec.total_gp.size(); ++k)
        CHECK(rec.total_gp[k] - (rec.pancharatnam_part[k] - rec.dynamical_part[k]) ==
              Approx(0.0).margin(1e-12));
}

TEST_CASE("open-system phase reduces to the pure-state phase at zero rates") {
    const TwoLevelParams p = fig2_params();
    SolverOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    const auto via_density = geometric_phase(track_eigenstate(zero_rate_trajectory(p, 4000, opt)));
    const auto via_pure =
        geometric_phase(propagate_pure([&](double t) { return hamiltonian_2ls(t, p, Frame::rwa); },
                                       {}, initial_state(p), tau, 4000, opt));
    for (std::size_t k = 0; k < via_density.total_gp.size(); ++k)
        CHECK(std::abs(via_density.total_gp[k] - via_pure.total_gp[k]) < 1e-6);
}

TEST_CASE("grid refinement leaves the final phase unchanged") {
    const TwoLevelParams p = fig2_params();
    SolverOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    const auto coarse = geometric_phase(track_eigenstate(zero_rate_trajectory(p, 4000, opt)));
    const auto fine = geometric_phase(track_eigenstate(zero_rate_trajectory(p, 8000, opt)));
    CHECK(std::abs(coarse.total_gp.back() - fine.total_gp.back()) <= 1e-5);
}

TEST_CASE("gp_deviation") {
    const auto traj = zero_rate_trajectory(fig2_params(), 1000);
    const auto rec = geometric_phase(track_eigenstate(traj));
    SECTION("identical records give a zero series") {
        for (double d : gp_deviation(rec, rec)) CHECK(d == 0.0);
    }
    SECTION("grid mismatch is rejected") {
        PhaseRecord other = rec;
        other.times.pop_back();
        other.total_gp.pop_back();
        CHECK_THROWS_AS(gp_deviation(rec, other), GridMismatch);
        PhaseRecord shifted = rec;
        shifted.times[1] += 1e-9;
        CHECK_THROWS_AS(gp_deviation(rec, shifted), GridMismatch);
    }
}

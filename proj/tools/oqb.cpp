// Command-line front end: reproduce the registry figure sweeps, run ad-hoc
// scenario files, and self-check the numerical kernels.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oqb/experiments.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPhysics = 2;
constexpr int kExitPartial = 3;

void write_result(const oqb::RunResult& r, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const fs::path file = out_dir / (r.config.name + ".csv");
    std::ofstream os(file);
    if (!os) throw oqb::ConfigError("cannot open output file: " + file.string());
    oqb::write_table(r, os);
    std::cout << "wrote " << file.string() << "\n";
}

int run_single(const std::string& config_path, const std::string& out_dir) {
    oqb::ScenarioConfig cfg;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot read config file: " << config_path << "\n";
            return kExitConfig;
        }
        cfg = oqb::parse_config(in);
    } catch (const oqb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const auto result = oqb::run_scenario(cfg);
        for (const auto& w : result.summary.warnings) std::cerr << "warning: " << w << "\n";
        write_result(result, out_dir);
    } catch (const oqb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const oqb::Error& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return kExitPhysics;
    }
    return kExitOk;
}

int run_figures(const std::string& name, const std::string& out_dir, const std::string& frame,
                int grid, int jobs) {
    std::vector<std::string> names;
    if (name == "fig-all") {
        names = oqb::figure_names();
    } else {
        names.push_back(name);
    }
    bool any_failed = false;
    for (const auto& fig : names) {
        std::vector<oqb::ScenarioConfig> cfgs;
        try {
            cfgs = oqb::figure_registry(fig);
        } catch (const oqb::UnknownFigure& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        for (auto& c : cfgs) {
            if (frame == "lab") c.frame = oqb::Frame::lab;
            if (frame == "rwa") c.frame = oqb::Frame::rwa;
            if (grid > 0) c.grid_points = grid;
        }
        const auto outcomes = oqb::run_sweep(cfgs, jobs);
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (outcomes[i].result) {
                write_result(*outcomes[i].result, fs::path(out_dir) / fig);
            } else {
                any_failed = true;
                std::cerr << "scenario " << cfgs[i].name << " failed: " << outcomes[i].error << "\n";
            }
        }
    }
    return any_failed ? kExitPartial : kExitOk;
}

bool report(const char* label, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS  " : "FAIL  ") << label;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    return ok;
}

// Fast oracle/invariant suite over the numerical kernels.
int run_check() {
    using namespace oqb;
    bool all = true;
    {
        Matrix rho(2, 2);
        rho << 0.5, 0.3, 0.3, 0.5;
        const auto es = eig_hermitian(rho);
        Matrix rebuilt = Matrix::Zero(2, 2);
        for (std::size_t k = 0; k < es.eigenvectors.size(); ++k)
            rebuilt += es.eigenvalues[static_cast<Eigen::Index>(k)] * es.eigenvectors[k] *
                       es.eigenvectors[k].adjoint();
        all &= report("eigendecomposition reconstructs the input",
                      (rebuilt - rho).cwiseAbs().maxCoeff() < 1e-12);
        all &= report("eigenvalue sum equals the trace",
                      std::abs(es.eigenvalues.sum() - rho.trace().real()) < 1e-12);
    }
    {
        Matrix m(3, 3);
        m << Complex(0.1, 0.2), Complex(0.4, -0.1), Complex(0.0, 0.3),
             Complex(-0.2, 0.1), Complex(0.3, 0.0), Complex(0.2, 0.2),
             Complex(0.5, -0.3), Complex(0.1, 0.1), Complex(-0.4, 0.1);
        const Matrix prod = expm(m) * expm((-m).eval());
        all &= report("expm(M) expm(-M) = 1",
                      (prod - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    }
    {
        Matrix a(2, 2), b(2, 2), c(2, 2), d(2, 2);
        a << 1, Complex(0, 2), 3, 4;
        b << Complex(0.5, 0.5), 1, 0, 2;
        c << 2, 1, Complex(0, -1), 0.5;
        d << 1, 0, 1, Complex(1, 1);
        const Matrix lhs = kron(a, b) * kron(c, d);
        const Matrix rhs = kron((a * c).eval(), (b * d).eval());
        all &= report("kron mixed-product identity", (lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
    {
        Vector bell(4);
        bell << 1.0 / std::numbers::sqrt2, 0, 0, 1.0 / std::numbers::sqrt2;
        const Matrix red = partial_trace_charger((bell * bell.adjoint()).eval());
        all &= report("partial trace of a Bell state is maximally mixed",
                      (red - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
    {
        const auto pulse =
            DrivePulse::for_two_level(std::numbers::pi / 2, 0.125, 0.0, 0.5);
        double worst = 0.0;
        for (int k = 0; k <= 100; ++k) {
            const double t = k / 100.0;
            worst = std::max(worst, std::abs(pulse_area_2ls(t, pulse) -
                                             pulse_area_2ls(t, pulse, true)));
        }
        all &= report("Erf pulse area matches exact quadrature",
                      worst < 1e-4 * pulse.pulse_area_max);
    }
    {
        ScenarioConfig cfg = detail::two_level_base();
        cfg.name = "check";
        const auto r = run_scenario(cfg);
        double worst = 0.0;
        for (std::size_t k = 0; k < r.times.size(); ++k)
            worst = std::max(worst, std::abs(r.phase.total_gp[k] - r.energy.integral[k]));
        all &= report("unitary geometric phase tracks the energy integral", worst < 5e-4,
                      "max deviation " + std::to_string(worst));

        // random per-point phase dressing must leave the phase untouched
        EigenPath dressed = r.path_info;
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
        for (auto& v : dressed.vectors) v *= std::polar(1.0, uni(rng));
        const auto rec = geometric_phase(dressed);
        double dmax = 0.0;
        for (std::size_t k = 0; k < rec.total_gp.size(); ++k)
            dmax = std::max(dmax, std::abs(rec.total_gp[k] - r.phase.total_gp[k]));
        all &= report("geometric phase is gauge invariant", dmax < 1e-10);
    }
    {
        ScenarioConfig cfg = detail::two_level_base();
        cfg.gamma_over_g = 1e-2;
        cfg.eta_over_g = 1e-3;
        cfg.name = "check_open";
        const auto r = run_scenario(cfg);
        double trace_dev = 0.0;
        for (std::size_t k = 0; k < r.level_populations[0].size(); ++k)
            trace_dev = std::max(trace_dev, std::abs(r.level_populations[0][k] +
                                                     r.level_populations[1][k] - 1.0));
        all &= report("open evolution conserves the trace", trace_dev < 1e-8);
        all &= report("open evolution stays positive", r.path_info.eigenvalues.back() >= 0.0);
    }
    std::cout << (all ? "all checks passed\n" : "some checks FAILED\n");
    return all ? kExitOk : kExitPhysics;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven-dissipative quantum battery simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", figure, frame, name;
    int grid = 0, jobs = 1;

    auto* run = app.add_subcommand("run", "run one scenario from a config file");
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory");

    auto* fig = app.add_subcommand("figure", "run a registry figure sweep (or fig-all)");
    fig->add_option("name", figure, "figure name")->required();
    fig->add_option("--out", out_dir, "output directory");
    fig->add_option("--frame", frame, "override frame: lab or rwa")
        ->check(CLI::IsMember({"lab", "rwa"}));
    fig->add_option("--grid", grid, "override grid points");
    fig->add_option("--jobs", jobs, "parallel scenarios")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list-figures", "print the known figure names");
    auto* check = app.add_subcommand("check", "run the oracle/invariant self-checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_single(config_path, out_dir);
        if (fig->parsed()) return run_figures(figure, out_dir, frame, grid, jobs);
        if (list->parsed()) {
            for (const auto& n : oqb::figure_names()) std::cout << n << "\n";
            return kExitOk;
        }
        if (check->parsed()) return run_check();
    } catch (const oqb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const oqb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPhysics;
    }
    return kExitOk;
}

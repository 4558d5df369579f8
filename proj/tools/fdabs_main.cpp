#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fdabs/csv_io.hpp"
#include "fdabs/experiment.hpp"
#include "fdabs/kernels.hpp"

namespace fs = std::filesystem;
using namespace fdabs;

namespace {

// exit-code contract: 0 all verdicts pass, 1 verdict failure,
// 2 configuration error, 3 solver failure
constexpr int exit_ok = 0;
constexpr int exit_verdict = 1;
constexpr int exit_config = 2;
constexpr int exit_solver = 3;

int code_for(const Error& e) {
    switch (e.code()) {
        case Errc::newton_divergence:
        case Errc::step_too_small:
        case Errc::non_extinction:
        case Errc::not_extinguished:
            return exit_solver;
        default:
            return exit_config;
    }
}

struct Overrides {
    std::optional<double> Rmax, dt_init, eps_ext;
    std::optional<std::size_t> M;
    std::optional<std::vector<double>> window;
    std::optional<int> workers;
    std::optional<std::string> out;
    bool serial_kernels = false;

    void apply(ExperimentConfig& cfg) const {
        if (Rmax) cfg.R_max = *Rmax;
        if (M) cfg.M = *M;
        if (dt_init) cfg.solver.dt_init = *dt_init;
        if (eps_ext) cfg.solver.eps_ext = *eps_ext;
        if (window) {
            if (window->size() != 2)
                raise(Errc::validation_error, "--window needs lo,hi");
            cfg.window = FitWindow{(*window)[0], (*window)[1]};
        }
        if (workers) cfg.workers = *workers;
        if (out) cfg.out_dir = *out;
        if (serial_kernels) kernels::set_backend(kernels::Backend::Serial);
    }
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--Rmax", ov.Rmax, "override truncation radius");
    cmd->add_option("--M", ov.M, "override grid cells");
    cmd->add_option("--dt-init", ov.dt_init, "override initial time step");
    cmd->add_option("--eps-ext", ov.eps_ext, "override extinction threshold");
    cmd->add_option("--window", ov.window,
                    "override rate-fit window (lo,hi fractions of T_e)")
        ->delimiter(',');
    cmd->add_option("--workers", ov.workers, "sweep worker count (0 = auto)");
    cmd->add_option("--out", ov.out, "output directory");
    cmd->add_flag("--serial-kernels", ov.serial_kernels,
                  "disable the OpenMP kernel backend");
}

void print_summary(const RunSummary& s) {
    std::cout << "T_e_est  = " << fmt_double(s.T_e_est) << "\n";
    std::cout << "T_e_raw  = " << fmt_double(s.T_e_raw) << "\n";
    std::cout << "clipped  = " << fmt_double(s.clipped_mass)
              << (s.clipping_flagged ? "  [FLAGGED]" : "") << "\n";
    std::cout << "energy identity pass fraction = "
              << fmt_double(s.energy_pass_fraction) << "\n";
    for (const auto& c : s.check_results) {
        std::cout << "check " << c.name << ": "
                  << (c.pass ? "pass" : "FAIL")
                  << " (worst margin " << fmt_double(c.worst_margin) << ")\n";
    }
    for (const auto& f : s.fit_results) {
        std::cout << "ratefit r=";
        if (f.order.is_inf) std::cout << "inf";
        else std::cout << fmt_double(f.order.value);
        std::cout << ": slope " << fmt_double(f.slope) << " expected "
                  << fmt_double(f.expected) << " rel_dev "
                  << fmt_double(f.rel_dev) << (f.pass ? " pass" : " FAIL")
                  << "\n";
    }
    std::cout << "wall clock: " << s.wall_clock_ms << " ms\n";
}

int cmd_simulate(const std::string& config_path, const Overrides& ov) {
    ExperimentConfig cfg = parse_config_file(config_path);
    ov.apply(cfg);
    const RunSummary sum = run_experiment(cfg);
    print_summary(sum);
    return sum.all_pass ? exit_ok : exit_verdict;
}

int cmd_sweep(const std::string& config_path, const Overrides& ov) {
    ExperimentConfig cfg = parse_config_file(config_path);
    ov.apply(cfg);
    const SweepResult res = run_sweep(cfg);
    bool verdict_ok = true;
    for (const auto& row : res.rows) {
        std::cout << "run " << row.index << " (N=" << fmt_double(row.N)
                  << ", m=" << fmt_double(row.m) << ", q=" << fmt_double(row.q)
                  << "): " << row.status;
        if (row.summary) {
            std::cout << " T_e_est=" << fmt_double(row.summary->T_e_est)
                      << (row.summary->all_pass ? " all-pass" : " verdict-FAIL");
            verdict_ok = verdict_ok && row.summary->all_pass;
        }
        std::cout << "\n";
    }
    std::cout << res.n_ok << " ok, " << res.n_skipped << " skipped, "
              << res.n_failed << " failed\n";
    if (res.n_failed > 0) return exit_verdict;
    return verdict_ok ? exit_ok : exit_verdict;
}

int cmd_ratefit(const std::string& csv_path, const Overrides& ov) {
    const TrajectoryFileData data = read_trajectory_csv(csv_path);
    Trajectory tr;
    tr.params = data.params;
    tr.records = data.records;
    tr.T_e_est = data.T_e_est;
    tr.config.newton_tol = data.newton_tol;
    tr.extinguished = true;

    const DerivedExponents ex = derive(validate_params(
        data.params.N, data.params.m, data.params.q));
    FitWindow window;
    if (ov.window) window = FitWindow{(*ov.window)[0], (*ov.window)[1]};

    bool all = true;
    std::vector<RateFitResult> fits;
    for (const NormOrder r :
         {NormOrder::finite(1.0), NormOrder::finite(data.params.m + 1.0),
          NormOrder::finite(2.0), NormOrder::inf()}) {
        fits.push_back(fit_rate(tr, ex, r, window));
        const auto& f = fits.back();
        std::cout << "r=";
        if (f.order.is_inf) std::cout << "inf";
        else std::cout << fmt_double(f.order.value);
        std::cout << " slope=" << fmt_double(f.slope)
                  << " stderr=" << fmt_double(f.stderr_slope)
                  << " expected=" << fmt_double(f.expected)
                  << " rel_dev=" << fmt_double(f.rel_dev)
                  << (f.pass ? " pass" : " FAIL") << "\n";
        all = all && f.pass;
    }
    if (ov.out) {
        write_ratefit_csv(*ov.out, fits,
                          file_header(hash_hex(fnv1a64("ratefit")), ex));
    }
    return all ? exit_ok : exit_verdict;
}

int cmd_check(const std::string& dir, const Overrides& ov) {
    (void)ov;
    const fs::path base(dir);
    std::ifstream sf(base / "summary.json");
    if (!sf) raise(Errc::io_error, "no summary.json in " + dir);
    nlohmann::json j;
    sf >> j;
    ExperimentConfig cfg = parse_config(j.at("config").get<std::string>());

    const Params params = validate_params(cfg.N, cfg.m, cfg.q);
    const DerivedExponents ex = derive(params);

    Trajectory tr;
    tr.params = params;
    tr.grid = make_uniform_grid(params, cfg.R_max, cfg.M);
    tr.config = cfg.solver;
    tr.T_e_est = j.at("T_e_est").get<double>();
    tr.T_e_raw = j.at("T_e_raw").get<double>();
    tr.extinguished = true;

    const auto data = read_trajectory_csv(base / "trajectory.csv");
    tr.records = data.records;

    std::vector<fs::path> snaps;
    for (const auto& entry : fs::directory_iterator(base / "snapshots")) {
        if (entry.path().extension() == ".csv") snaps.push_back(entry.path());
    }
    std::sort(snaps.begin(), snaps.end());
    for (const auto& p : snaps) tr.snapshots.push_back(read_snapshot_csv(p));

    const State u0 = make_initial_state(cfg.initial, tr.grid, ex);

    std::vector<CheckReport> reports;
    if (cfg.checks.barrier) {
        const double kappa0 = fit_kappa0(u0, tr.grid, ex);
        reports.push_back(check_barrier(tr, make_barrier_spec(kappa0, ex)));
    }
    if (cfg.checks.linf_lower) reports.push_back(check_linf_lower(tr, ex));
    if (cfg.checks.positivity) reports.push_back(check_positivity(tr));
    if (cfg.checks.dt_bound) reports.push_back(check_dt_bound(tr, params));

    bool all = true;
    for (const auto& rep : reports) {
        std::cout << "check " << rep.name << ": "
                  << (rep.pass ? "pass" : "FAIL") << " worst_margin="
                  << fmt_double(rep.worst_margin) << " at t="
                  << fmt_double(rep.worst_t) << " r=" << fmt_double(rep.worst_r)
                  << "\n";
        all = all && rep.pass;
    }
    write_checks_csv(base / "checks.csv", reports,
                     file_header(cfg.config_hash(), ex));
    return all ? exit_ok : exit_verdict;
}

int cmd_exponents(double N, double m, double q) {
    const Params p = validate_params(N, m, q);
    const DerivedExponents ex = derive(p);
    std::cout << "N          = " << fmt_double(p.N) << "\n";
    std::cout << "m          = " << fmt_double(p.m) << "\n";
    std::cout << "q          = " << fmt_double(p.q) << "\n";
    std::cout << "alpha      = " << fmt_double(ex.alpha) << "\n";
    std::cout << "beta       = " << fmt_double(ex.beta) << "\n";
    std::cout << "gamma      = " << fmt_double(ex.gamma) << "\n";
    std::cout << "theta      = " << fmt_double(ex.theta) << "\n";
    std::cout << "kappa_star = " << fmt_double(ex.kappa_star) << "\n";
    std::cout << "decay      = " << fmt_double(ex.decay) << "\n";
    std::cout << "rate(1)    = " << fmt_double(ex.rate(NormOrder::finite(1)))
              << "\n";
    std::cout << "rate(m+1)  = "
              << fmt_double(ex.rate(NormOrder::finite(m + 1))) << "\n";
    std::cout << "rate(2)    = " << fmt_double(ex.rate(NormOrder::finite(2)))
              << "\n";
    std::cout << "rate(inf)  = " << fmt_double(ex.rate(NormOrder::inf()))
              << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fdabs: fast diffusion with strong absorption, extinction "
                 "rate laboratory"};
    app.require_subcommand(1);

    std::string config_path, csv_path, dir_path;
    double eN = 1, em = 0.5, eq = 0.75;
    Overrides ov_sim, ov_sweep, ov_fit;

    auto* sim = app.add_subcommand("simulate", "run one experiment");
    sim->add_option("config", config_path, "config file")->required();
    add_override_flags(sim, ov_sim);

    auto* swp = app.add_subcommand("sweep", "run a parameter sweep");
    swp->add_option("config", config_path, "config file")->required();
    add_override_flags(swp, ov_sweep);

    auto* fit = app.add_subcommand("ratefit", "rate-fit a trajectory CSV");
    fit->add_option("trajectory", csv_path, "trajectory.csv")->required();
    fit->add_option("--window", ov_fit.window, "fit window lo,hi")
        ->delimiter(',');
    fit->add_option("--out", ov_fit.out, "write ratefit.csv here");

    auto* chk = app.add_subcommand("check", "re-run checks on a run directory");
    chk->add_option("dir", dir_path, "run output directory")->required();

    auto* exp = app.add_subcommand("exponents", "print derived exponents");
    exp->add_option("--N", eN, "dimension")->required();
    exp->add_option("--m", em, "diffusion exponent")->required();
    exp->add_option("--q", eq, "absorption exponent")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, ov_sim);
        if (swp->parsed()) return cmd_sweep(config_path, ov_sweep);
        if (fit->parsed()) return cmd_ratefit(csv_path, ov_fit);
        if (chk->parsed()) return cmd_check(dir_path, ov_fit);
        if (exp->parsed()) return cmd_exponents(eN, em, eq);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_config;
}

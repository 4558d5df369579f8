#include "fdabs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "fdabs/csv_io.hpp"

namespace fdabs {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& v,
                                      const std::string& key, int lineno) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const double x = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(x);
        } catch (const std::exception&) {
            raise(Errc::parse_error, "line " + std::to_string(lineno) +
                                         ", key '" + key +
                                         "': bad number '" + item + "'");
        }
    }
    return out;
}

double parse_one_double(const std::string& v, const std::string& key,
                        int lineno) {
    const auto xs = parse_double_list(v, key, lineno);
    if (xs.size() != 1) {
        raise(Errc::parse_error, "line " + std::to_string(lineno) + ", key '" +
                                     key + "': expected one number");
    }
    return xs[0];
}

bool parse_bool(const std::string& v, const std::string& key, int lineno) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    raise(Errc::parse_error, "line " + std::to_string(lineno) + ", key '" +
                                 key + "': expected true/false");
}

std::string checks_to_string(const CheckToggles& c) {
    std::vector<std::string> on;
    if (c.barrier) on.push_back("barrier");
    if (c.linf_lower) on.push_back("linf_lower");
    if (c.positivity) on.push_back("positivity");
    if (c.dt_bound) on.push_back("dt_bound");
    if (on.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < on.size(); ++i) {
        if (i) out += ",";
        out += on[i];
    }
    return out;
}

std::string list_to_string(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(v[i]);
    }
    return out;
}

} // namespace

const char* family_name(InitialFamily f) {
    switch (f) {
        case InitialFamily::Flat: return "flat";
        case InitialFamily::CappedPower: return "capped_power";
        case InitialFamily::Indicator: return "indicator";
        case InitialFamily::Gaussian: return "gaussian";
    }
    return "?";
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream os;
    os << "A = " << fmt_double(initial.A) << "\n";
    os << "M = " << M << "\n";
    os << "N = " << fmt_double(N) << "\n";
    os << "R = " << fmt_double(initial.R) << "\n";
    os << "Rmax = " << fmt_double(R_max) << "\n";
    os << "boundary = "
       << (solver.boundary == BoundaryKind::BarrierClamp ? "barrier_clamp"
                                                         : "dirichlet0")
       << "\n";
    os << "checks = " << checks_to_string(checks) << "\n";
    os << "dt_init = " << fmt_double(solver.dt_init) << "\n";
    os << "dt_max = " << fmt_double(solver.dt_max) << "\n";
    os << "dt_min = " << fmt_double(solver.dt_min) << "\n";
    os << "eps_ext = " << fmt_double(solver.eps_ext) << "\n";
    os << "fit_tolerance = " << fmt_double(fit_tolerance) << "\n";
    os << "initial = " << family_name(initial.family) << "\n";
    os << "m = " << fmt_double(m) << "\n";
    os << "newton_max_iter = " << solver.newton_max_iter << "\n";
    os << "newton_tol = " << fmt_double(solver.newton_tol) << "\n";
    os << "q = " << fmt_double(q) << "\n";
    os << "ratefit = " << (do_ratefit ? "true" : "false") << "\n";
    os << "refine_Te = " << (refine_Te ? "true" : "false") << "\n";
    os << "remaining_frac = " << fmt_double(solver.remaining_frac) << "\n";
    os << "sigma = " << fmt_double(initial.sigma) << "\n";
    os << "snapshot_stride = " << solver.snapshot_stride << "\n";
    if (!sweep_N.empty()) os << "sweep_N = " << list_to_string(sweep_N) << "\n";
    if (!sweep_m.empty()) os << "sweep_m = " << list_to_string(sweep_m) << "\n";
    if (!sweep_q.empty()) os << "sweep_q = " << list_to_string(sweep_q) << "\n";
    os << "window = " << fmt_double(window.f_lo) << ","
       << fmt_double(window.f_hi) << "\n";
    os << "workers = " << workers << "\n";
    return os.str();
}

std::string ExperimentConfig::config_hash() const {
    return hash_hex(fnv1a64(canonical_text()));
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, int> seen;
    bool has_N = false, has_m = false, has_q = false;

    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        const auto hash_pos = raw.find('#');
        std::string line =
            trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            raise(Errc::parse_error,
                  "line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            raise(Errc::parse_error,
                  "line " + std::to_string(lineno) + ": empty key or value");
        }
        if (auto it = seen.find(key); it != seen.end()) {
            raise(Errc::parse_error, "line " + std::to_string(lineno) +
                                         ": duplicate key '" + key +
                                         "' (first at line " +
                                         std::to_string(it->second) + ")");
        }
        seen[key] = lineno;

        if (key == "N") {
            cfg.N = parse_one_double(value, key, lineno);
            has_N = true;
        } else if (key == "m") {
            cfg.m = parse_one_double(value, key, lineno);
            has_m = true;
        } else if (key == "q") {
            cfg.q = parse_one_double(value, key, lineno);
            has_q = true;
        } else if (key == "initial") {
            if (value == "flat") cfg.initial.family = InitialFamily::Flat;
            else if (value == "capped_power")
                cfg.initial.family = InitialFamily::CappedPower;
            else if (value == "indicator")
                cfg.initial.family = InitialFamily::Indicator;
            else if (value == "gaussian")
                cfg.initial.family = InitialFamily::Gaussian;
            else
                raise(Errc::parse_error,
                      "line " + std::to_string(lineno) +
                          ", key 'initial': unknown family '" + value + "'");
        } else if (key == "A") {
            cfg.initial.A = parse_one_double(value, key, lineno);
        } else if (key == "R") {
            cfg.initial.R = parse_one_double(value, key, lineno);
        } else if (key == "sigma") {
            cfg.initial.sigma = parse_one_double(value, key, lineno);
        } else if (key == "Rmax") {
            cfg.R_max = parse_one_double(value, key, lineno);
        } else if (key == "M") {
            cfg.M = static_cast<std::size_t>(
                parse_one_double(value, key, lineno));
        } else if (key == "dt_init") {
            cfg.solver.dt_init = parse_one_double(value, key, lineno);
        } else if (key == "dt_min") {
            cfg.solver.dt_min = parse_one_double(value, key, lineno);
        } else if (key == "dt_max") {
            cfg.solver.dt_max = parse_one_double(value, key, lineno);
        } else if (key == "remaining_frac") {
            cfg.solver.remaining_frac = parse_one_double(value, key, lineno);
        } else if (key == "newton_tol") {
            cfg.solver.newton_tol = parse_one_double(value, key, lineno);
        } else if (key == "newton_max_iter") {
            cfg.solver.newton_max_iter =
                static_cast<int>(parse_one_double(value, key, lineno));
        } else if (key == "eps_ext") {
            cfg.solver.eps_ext = parse_one_double(value, key, lineno);
        } else if (key == "snapshot_stride") {
            cfg.solver.snapshot_stride = static_cast<std::size_t>(
                parse_one_double(value, key, lineno));
        } else if (key == "boundary") {
            if (value == "dirichlet0")
                cfg.solver.boundary = BoundaryKind::DirichletZero;
            else if (value == "barrier_clamp")
                cfg.solver.boundary = BoundaryKind::BarrierClamp;
            else
                raise(Errc::parse_error,
                      "line " + std::to_string(lineno) +
                          ", key 'boundary': unknown kind '" + value + "'");
        } else if (key == "checks") {
            cfg.checks = CheckToggles{false, false, false, false};
            if (value != "none") {
                std::istringstream cs(value);
                std::string name;
                while (std::getline(cs, name, ',')) {
                    name = trim(name);
                    if (name == "barrier") cfg.checks.barrier = true;
                    else if (name == "linf_lower") cfg.checks.linf_lower = true;
                    else if (name == "positivity") cfg.checks.positivity = true;
                    else if (name == "dt_bound") cfg.checks.dt_bound = true;
                    else if (name == "all")
                        cfg.checks = CheckToggles{true, true, true, true};
                    else
                        raise(Errc::parse_error,
                              "line " + std::to_string(lineno) +
                                  ", key 'checks': unknown check '" + name +
                                  "'");
                }
            }
        } else if (key == "window") {
            const auto xs = parse_double_list(value, key, lineno);
            if (xs.size() != 2) {
                raise(Errc::parse_error, "line " + std::to_string(lineno) +
                                             ", key 'window': expected lo,hi");
            }
            cfg.window = FitWindow{xs[0], xs[1]};
        } else if (key == "fit_tolerance") {
            cfg.fit_tolerance = parse_one_double(value, key, lineno);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(parse_one_double(value, key, lineno));
        } else if (key == "sweep_N") {
            cfg.sweep_N = parse_double_list(value, key, lineno);
        } else if (key == "sweep_m") {
            cfg.sweep_m = parse_double_list(value, key, lineno);
        } else if (key == "sweep_q") {
            cfg.sweep_q = parse_double_list(value, key, lineno);
        } else if (key == "ratefit") {
            cfg.do_ratefit = parse_bool(value, key, lineno);
        } else if (key == "refine_Te") {
            cfg.refine_Te = parse_bool(value, key, lineno);
        } else {
            raise(Errc::parse_error, "line " + std::to_string(lineno) +
                                         ": unknown key '" + key + "'");
        }
    }

    if (!has_N || !has_m || !has_q) {
        raise(Errc::validation_error, "config must set N, m and q");
    }
    const bool sweeping =
        !(cfg.sweep_N.empty() && cfg.sweep_m.empty() && cfg.sweep_q.empty());
    if (!sweeping) {
        validate_params(cfg.N, cfg.m, cfg.q);  // may throw ValidationError
    }
    const auto& s = cfg.solver;
    if (!(0.0 < s.dt_min && s.dt_min <= s.dt_init && s.dt_init <= s.dt_max)) {
        raise(Errc::validation_error,
              "need 0 < dt_min <= dt_init <= dt_max");
    }
    if (!(s.newton_tol > 0.0) || !(s.eps_ext > 0.0)) {
        raise(Errc::validation_error, "newton_tol and eps_ext must be > 0");
    }
    if (!(s.remaining_frac > 0.0 && s.remaining_frac <= 0.1)) {
        raise(Errc::validation_error, "remaining_frac must be in (0, 0.1]");
    }
    if (!(cfg.window.f_lo > 0.0 && cfg.window.f_lo < cfg.window.f_hi &&
          cfg.window.f_hi < 1.0)) {
        raise(Errc::validation_error, "window must satisfy 0 < lo < hi < 1");
    }
    if (cfg.solver.snapshot_stride == 0) {
        raise(Errc::validation_error, "snapshot_stride must be >= 1");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) raise(Errc::io_error, "cannot open config " + file.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

State make_initial_state(const InitialDatum& d, const RadialGrid& g,
                         const DerivedExponents& ex) {
    State s;
    s.t = 0.0;
    s.values.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double r = g.nodes[i];
        switch (d.family) {
            case InitialFamily::Flat:
                s.values[i] = d.A;
                break;
            case InitialFamily::CappedPower:
                s.values[i] =
                    d.A * (r <= 1.0 ? 1.0 : std::pow(r, -ex.decay));
                break;
            case InitialFamily::Indicator:
                s.values[i] = (r <= d.R) ? 1.0 : 0.0;
                break;
            case InitialFamily::Gaussian:
                s.values[i] = d.A * std::exp(-r * r / (2.0 * d.sigma * d.sigma));
                break;
        }
    }
    return s;
}

std::string RunSummary::to_json() const {
    json j;
    j["config"] = config.canonical_text();
    j["config_hash"] = config.config_hash();
    j["exponents"] = {
        {"alpha", exponents.alpha},   {"beta", exponents.beta},
        {"gamma", exponents.gamma},   {"theta", exponents.theta},
        {"kappa_star", exponents.kappa_star}, {"decay", exponents.decay},
    };
    j["T_e_est"] = T_e_est;
    j["T_e_raw"] = T_e_raw;
    j["clipped_mass"] = clipped_mass;
    j["clipping_flagged"] = clipping_flagged;
    j["energy_pass_fraction"] = energy_pass_fraction;
    j["wall_clock_ms"] = wall_clock_ms;
    j["all_pass"] = all_pass;
    j["checks"] = json::array();
    for (const auto& c : check_results) {
        j["checks"].push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"worst_margin", c.worst_margin}});
    }
    j["ratefits"] = json::array();
    for (const auto& f : fit_results) {
        j["ratefits"].push_back(
            {{"r", f.order.is_inf ? json("inf") : json(f.order.value)},
             {"slope", f.slope},
             {"stderr", f.stderr_slope},
             {"expected", f.expected},
             {"rel_dev", f.rel_dev},
             {"pass", f.pass}});
    }
    return j.dump(2);
}

namespace {

void write_outputs(const ExperimentConfig& cfg, const Trajectory& tr,
                   const DerivedExponents& ex,
                   const std::vector<CheckReport>& checks,
                   const std::vector<RateFitResult>& fits,
                   const std::vector<RescaledNormPoint>& vnorms) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_dir;
    fs::create_directories(dir / "snapshots");
    const std::string header = file_header(cfg.config_hash(), ex);

    write_trajectory_csv(dir / "trajectory.csv", tr, header);
    write_checks_csv(dir / "checks.csv", checks, header);
    write_ratefit_csv(dir / "ratefit.csv", fits, header);
    write_vnorms_csv(dir / "vnorms.csv", vnorms, header);
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%05zu.csv", i);
        write_snapshot_csv(dir / "snapshots" / name, tr.snapshots[i], tr.grid,
                           header);
    }
}

} // namespace

RunSummary run_experiment(const ExperimentConfig& config, Trajectory* out) {
    const auto t0 = std::chrono::steady_clock::now();

    RunSummary sum;
    sum.config = config;

    const Params params = validate_params(config.N, config.m, config.q);
    const DerivedExponents ex = derive(params);
    sum.exponents = ex;

    const RadialGrid grid = make_uniform_grid(params, config.R_max, config.M);
    const State u0 = make_initial_state(config.initial, grid, ex);

    SolverConfig scfg = config.solver;
    if (scfg.boundary == BoundaryKind::BarrierClamp) {
        State tmp{0.0, u0.values};
        const double kappa0 = fit_kappa0(tmp, grid, ex);
        scfg.boundary_value = std::max(kappa0, ex.kappa_star) *
                              std::pow(grid.R_max, -ex.decay);
    }

    Trajectory tr;
    try {
        tr = run(u0, grid, params, scfg);
    } catch (const Error& e) {
        if (!config.out_dir.empty()) {
            std::filesystem::create_directories(config.out_dir);
            std::ofstream os(config.out_dir / "summary.json");
            json j;
            j["config"] = config.canonical_text();
            j["config_hash"] = config.config_hash();
            j["error"] = e.what();
            os << j.dump(2) << "\n";
        }
        throw;
    }

    if (config.refine_Te) {
        tr.T_e_est = richardson_extinction(u0, grid, params, scfg);
    }

    sum.T_e_est = tr.T_e_est;
    sum.T_e_raw = tr.T_e_raw;
    sum.clipped_mass = tr.clipped_mass;
    sum.clipping_flagged = tr.clipping_flagged;

    std::vector<CheckReport> checks;
    if (config.checks.barrier) {
        const double kappa0 = fit_kappa0(u0, grid, ex);
        checks.push_back(check_barrier(tr, make_barrier_spec(kappa0, ex)));
    }
    if (config.checks.linf_lower) checks.push_back(check_linf_lower(tr, ex));
    if (config.checks.positivity) checks.push_back(check_positivity(tr));
    if (config.checks.dt_bound) checks.push_back(check_dt_bound(tr, params));

    std::vector<RateFitResult> fits;
    if (config.do_ratefit) {
        for (const NormOrder r :
             {NormOrder::finite(1.0), NormOrder::finite(params.m + 1.0),
              NormOrder::finite(2.0), NormOrder::inf()}) {
            fits.push_back(
                fit_rate(tr, ex, r, config.window, config.fit_tolerance));
        }
    }

    const auto vnorms = rescaled_norm_series(tr, ex);

    std::size_t energy_ok = 0;
    for (const auto& rec : tr.records) {
        if (rec.energy_resid <= rec.energy_tol) ++energy_ok;
    }
    sum.energy_pass_fraction =
        tr.records.empty()
            ? 0.0
            : static_cast<double>(energy_ok) /
                  static_cast<double>(tr.records.size());

    bool all = true;
    for (const auto& c : checks) {
        sum.check_results.push_back({c.name, c.pass, c.worst_margin});
        all = all && c.pass;
    }
    for (const auto& f : fits) all = all && f.pass;
    sum.fit_results = fits;
    sum.all_pass = all;

    if (!config.out_dir.empty()) {
        write_outputs(config, tr, ex, checks, fits, vnorms);
    }

    sum.wall_clock_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();

    if (!config.out_dir.empty()) {
        std::ofstream os(config.out_dir / "summary.json");
        os << sum.to_json() << "\n";
    }
    if (out) *out = std::move(tr);
    return sum;
}

RunSummary run_experiment(const ExperimentConfig& config) {
    return run_experiment(config, nullptr);
}

SweepResult run_sweep(const ExperimentConfig& config) {
    const std::vector<double> Ns =
        config.sweep_N.empty() ? std::vector<double>{config.N} : config.sweep_N;
    const std::vector<double> ms =
        config.sweep_m.empty() ? std::vector<double>{config.m} : config.sweep_m;
    const std::vector<double> qs =
        config.sweep_q.empty() ? std::vector<double>{config.q} : config.sweep_q;
    if (config.sweep_N.empty() && config.sweep_m.empty() &&
        config.sweep_q.empty()) {
        raise(Errc::empty_sweep, "no sweep axes set");
    }

    SweepResult result;
    for (std::size_t i = 0; i < Ns.size(); ++i)
        for (std::size_t j = 0; j < ms.size(); ++j)
            for (std::size_t k = 0; k < qs.size(); ++k) {
                SweepRow row;
                row.index = result.rows.size();
                row.N = Ns[i];
                row.m = ms[j];
                row.q = qs[k];
                result.rows.push_back(row);
            }
    if (result.rows.empty()) {
        raise(Errc::empty_sweep, "sweep axes produced no combinations");
    }

    // admissibility filter first: skipped rows never reach a worker
    std::vector<std::size_t> runnable;
    for (auto& row : result.rows) {
        try {
            validate_params(row.N, row.m, row.q);
            runnable.push_back(row.index);
        } catch (const Error& e) {
            row.status = std::string("skipped(") + errc_name(e.code()) + ")";
            ++result.n_skipped;
        }
    }

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int workers = std::max(
        1, config.workers > 0 ? config.workers : (hw > 0 ? hw : 1));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t slot = next.fetch_add(1);
            if (slot >= runnable.size()) break;
            SweepRow& row = result.rows[runnable[slot]];
            ExperimentConfig rc = config;
            rc.N = row.N;
            rc.m = row.m;
            rc.q = row.q;
            rc.sweep_N.clear();
            rc.sweep_m.clear();
            rc.sweep_q.clear();
            if (!config.out_dir.empty()) {
                char name[32];
                std::snprintf(name, sizeof(name), "run_%04zu", row.index);
                rc.out_dir = config.out_dir / name;
            }
            try {
                row.summary = run_experiment(rc);
                row.status = "ok";
            } catch (const Error& e) {
                row.status = std::string("failed(") + errc_name(e.code()) + ")";
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    for (const auto& row : result.rows) {
        if (row.status == "ok") ++result.n_ok;
        else if (row.status.rfind("failed", 0) == 0) ++result.n_failed;
    }

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        std::ofstream os(config.out_dir / "sweep.csv");
        os << "# fdabs v1 sweep config=" << config.config_hash() << "\n";
        os << "idx,N,m,q,status,alpha,beta,gamma,theta,kappa_star,decay,"
              "rate_inf,Te_est,worst_check_margin,dev_L1,dev_Lm1,dev_L2,"
              "dev_Linf\n";
        for (const auto& row : result.rows) {
            os << row.index << ',' << fmt_double(row.N) << ','
               << fmt_double(row.m) << ',' << fmt_double(row.q) << ','
               << row.status;
            if (row.summary) {
                const auto& s = *row.summary;
                double worst = std::numeric_limits<double>::infinity();
                for (const auto& c : s.check_results)
                    worst = std::min(worst, c.worst_margin);
                os << ',' << fmt_double(s.exponents.alpha) << ','
                   << fmt_double(s.exponents.beta) << ','
                   << fmt_double(s.exponents.gamma) << ','
                   << fmt_double(s.exponents.theta) << ','
                   << fmt_double(s.exponents.kappa_star) << ','
                   << fmt_double(s.exponents.decay) << ','
                   << fmt_double(s.exponents.alpha) << ','
                   << fmt_double(s.T_e_est) << ',' << fmt_double(worst);
                for (const auto& f : s.fit_results)
                    os << ',' << fmt_double(f.rel_dev);
            } else {
                os << ",,,,,,,,,,,,,";
            }
            os << "\n";
        }
    }
    return result;
}

} // namespace fdabs

#include "fdabs/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fdabs {

namespace {

/// key=value pairs from a '#' header line.
std::optional<std::string> header_field(const std::string& line,
                                        const std::string& key) {
    const std::string probe = key + "=";
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        if (tok.rfind(probe, 0) == 0) return tok.substr(probe.size());
    }
    return std::nullopt;
}

double header_double(const std::string& line, const std::string& key) {
    const auto v = header_field(line, key);
    if (!v) raise(Errc::parse_error, "missing header field " + key);
    return std::stod(*v);
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) raise(Errc::io_error, "cannot open " + file.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) raise(Errc::io_error, "cannot open " + file.string());
    return is;
}

} // namespace

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string file_header(const std::string& config_hash,
                        const DerivedExponents& ex) {
    std::ostringstream os;
    os << "# fdabs v1 config=" << config_hash << " N=" << fmt_double(ex.N)
       << " m=" << fmt_double(ex.m) << " q=" << fmt_double(ex.q)
       << " alpha=" << fmt_double(ex.alpha) << " beta=" << fmt_double(ex.beta)
       << " gamma=" << fmt_double(ex.gamma)
       << " theta=" << fmt_double(ex.theta)
       << " kappa_star=" << fmt_double(ex.kappa_star)
       << " decay=" << fmt_double(ex.decay);
    return os.str();
}

void write_trajectory_csv(const std::filesystem::path& file,
                          const Trajectory& tr, const std::string& header) {
    auto os = open_out(file);
    os << header << " Te_est=" << fmt_double(tr.T_e_est)
       << " Te_raw=" << fmt_double(tr.T_e_raw)
       << " newton_tol=" << fmt_double(tr.config.newton_tol)
       << " eps_ext=" << fmt_double(tr.config.eps_ext) << "\n";
    os << "t,norm_L1,norm_Lm1,norm_L2,norm_Linf,dt,newton_iters\n";
    for (const auto& r : tr.records) {
        os << fmt_double(r.t) << ',' << fmt_double(r.norm_L1) << ','
           << fmt_double(r.norm_Lm1) << ',' << fmt_double(r.norm_L2) << ','
           << fmt_double(r.norm_Linf) << ',' << fmt_double(r.dt) << ','
           << r.newton_iters << "\n";
    }
}

void write_snapshot_csv(const std::filesystem::path& file,
                        const Snapshot& snap, const RadialGrid& g,
                        const std::string& header) {
    auto os = open_out(file);
    os << header << " t=" << fmt_double(snap.t) << " dt=" << fmt_double(snap.dt)
       << " R_max=" << fmt_double(g.R_max) << " M=" << g.M << "\n";
    os << "r,u\n";
    for (std::size_t i = 0; i < snap.values.size(); ++i) {
        os << fmt_double(g.nodes[i]) << ',' << fmt_double(snap.values[i])
           << "\n";
    }
}

void write_checks_csv(const std::filesystem::path& file,
                      const std::vector<CheckReport>& reports,
                      const std::string& header) {
    auto os = open_out(file);
    os << header << "\n";
    os << "check,pass,worst_margin,t,r,tolerance\n";
    for (const auto& rep : reports) {
        os << rep.name << ',' << (rep.pass ? 1 : 0) << ','
           << fmt_double(rep.worst_margin) << ',' << fmt_double(rep.worst_t)
           << ',' << fmt_double(rep.worst_r) << ','
           << fmt_double(rep.tolerance) << "\n";
    }
}

void write_ratefit_csv(const std::filesystem::path& file,
                       const std::vector<RateFitResult>& fits,
                       const std::string& header) {
    auto os = open_out(file);
    os << header << "\n";
    os << "r,slope,stderr,expected,rel_dev,pass,window_lo,window_hi\n";
    for (const auto& f : fits) {
        if (f.order.is_inf)
            os << "inf";
        else
            os << fmt_double(f.order.value);
        os << ',' << fmt_double(f.slope) << ',' << fmt_double(f.stderr_slope)
           << ',' << fmt_double(f.expected) << ',' << fmt_double(f.rel_dev)
           << ',' << (f.pass ? 1 : 0) << ',' << fmt_double(f.window_lo) << ','
           << fmt_double(f.window_hi) << "\n";
    }
}

void write_vnorms_csv(const std::filesystem::path& file,
                      const std::vector<RescaledNormPoint>& series,
                      const std::string& header) {
    auto os = open_out(file);
    os << header << "\n";
    os << "s,v_L1,v_Lm1,v_L2,v_Linf\n";
    for (const auto& p : series) {
        os << fmt_double(p.s) << ',' << fmt_double(p.v_L1) << ','
           << fmt_double(p.v_Lm1) << ',' << fmt_double(p.v_L2) << ','
           << fmt_double(p.v_Linf) << "\n";
    }
}

TrajectoryFileData read_trajectory_csv(const std::filesystem::path& file) {
    auto is = open_in(file);
    std::string line;
    if (!std::getline(is, line) || line.empty() || line[0] != '#') {
        raise(Errc::parse_error, "missing header line in " + file.string());
    }
    TrajectoryFileData data;
    data.params.N = header_double(line, "N");
    data.params.m = header_double(line, "m");
    data.params.q = header_double(line, "q");
    data.T_e_est = header_double(line, "Te_est");
    data.newton_tol = header_double(line, "newton_tol");

    if (!std::getline(is, line)) {
        raise(Errc::parse_error, "missing column header in " + file.string());
    }
    std::size_t lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        StepRecord r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%d", &r.t,
                        &r.norm_L1, &r.norm_Lm1, &r.norm_L2, &r.norm_Linf,
                        &r.dt, &r.newton_iters) != 7) {
            raise(Errc::parse_error, file.string() + ": bad row at line " +
                                         std::to_string(lineno));
        }
        data.records.push_back(r);
    }
    return data;
}

Snapshot read_snapshot_csv(const std::filesystem::path& file) {
    auto is = open_in(file);
    std::string line;
    if (!std::getline(is, line) || line.empty() || line[0] != '#') {
        raise(Errc::parse_error, "missing header line in " + file.string());
    }
    Snapshot snap;
    snap.t = header_double(line, "t");
    snap.dt = header_double(line, "dt");
    if (!std::getline(is, line)) {
        raise(Errc::parse_error, "missing column header in " + file.string());
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double r = 0.0, u = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &r, &u) != 2) {
            raise(Errc::parse_error, file.string() + ": bad snapshot row");
        }
        snap.values.push_back(u);
    }
    return snap;
}

} // namespace fdabs

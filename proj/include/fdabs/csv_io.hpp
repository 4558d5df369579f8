#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "fdabs/diagnostics.hpp"
#include "fdabs/ratefit.hpp"
#include "fdabs/solver.hpp"

namespace fdabs {

/// Full-precision decimal formatting (%.17g); round-trips any double.
std::string fmt_double(double v);

/// FNV-1a 64-bit over a string; the config hash embedded in file headers.
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(std::uint64_t h);

/// One-line '#' header carrying the config hash and exponent echo, placed
/// at the top of every output file.
std::string file_header(const std::string& config_hash,
                        const DerivedExponents& ex);

void write_trajectory_csv(const std::filesystem::path& file,
                          const Trajectory& tr, const std::string& header);

void write_snapshot_csv(const std::filesystem::path& file,
                        const Snapshot& snap, const RadialGrid& g,
                        const std::string& header);

void write_checks_csv(const std::filesystem::path& file,
                      const std::vector<CheckReport>& reports,
                      const std::string& header);

void write_ratefit_csv(const std::filesystem::path& file,
                       const std::vector<RateFitResult>& fits,
                       const std::string& header);

void write_vnorms_csv(const std::filesystem::path& file,
                      const std::vector<RescaledNormPoint>& series,
                      const std::string& header);

/// Reads back a trajectory.csv written by write_trajectory_csv (the
/// `ratefit <trajectory.csv>` CLI path). The header line restores params
/// and T_e_est; snapshots are not part of this format.
struct TrajectoryFileData {
    Params params;
    double T_e_est = 0.0;
    double newton_tol = 0.0;
    std::vector<StepRecord> records;
};

TrajectoryFileData read_trajectory_csv(const std::filesystem::path& file);

/// Reads back a snapshot CSV (r,u columns; t and dt from the header).
Snapshot read_snapshot_csv(const std::filesystem::path& file);

} // namespace fdabs

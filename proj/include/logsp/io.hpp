#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "logsp/asymptotics.hpp"
#include "logsp/groundstate.hpp"
#include "logsp/minimizer.hpp"
#include "logsp/verify.hpp"

namespace logsp::io {

namespace fs = std::filesystem;

// Writes via a temp file and rename; partial outputs never appear under
// the final name.
void atomic_write_text(const fs::path& path, const std::string& content);
void atomic_write_bytes(const fs::path& path, const std::string& bytes);

void write_profile_csv(const fs::path& path, const RadialProfile& p, int stride = 10);
nlohmann::json profile_summary_json(const RadialProfile& p);

// Field dumps: headered CSV or raw binary (little-endian float64, row-major).
void write_field_csv(const fs::path& path, const Field2D& f);
Field2D read_field_csv(const fs::path& path);
void write_field_bin(const fs::path& path, const Field2D& f);
Field2D read_field_bin(const fs::path& path);
Field2D read_field_auto(const fs::path& path);

nlohmann::json solve_result_json(const SolveResult& res, const SolveConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::json verification_report_json(const VerificationReport& rep);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<Series>& series);

// Ground-state cache keyed by a content hash of (dr, r_max, tol).
std::uint64_t fnv1a(const std::string& s);
fs::path groundstate_cache_path(const fs::path& cache_dir, const ShootOptions& opts);
RadialProfile ground_state_cached(const ShootOptions& opts, const fs::path& cache_dir);

}  // namespace logsp::io

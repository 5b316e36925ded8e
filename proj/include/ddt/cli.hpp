#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddt/ddtest.hpp"
#include "ddt/io.hpp"
#include "ddt/simbench.hpp"

namespace ddt::cli {

inline constexpr const char* kVersion = "0.3.1";

/// Exit codes.
enum Exit : int { Ok = 0, Usage = 1, IoError = 2, Pipeline = 3 };

struct RunManifest {
  io::CohortFiles cohort;
  DdtConfig config;
  baseline::BaselineConfig baseline;
  std::vector<std::string> baselines;  // subset of t10, binb, binf
  std::uint64_t seed = 0;
  std::filesystem::path output;
};

/// Relative paths are resolved against `base_dir`.
RunManifest parse_run_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json to_json(const RunManifest& m);

sim::SimDesign parse_design(const nlohmann::json& j);
nlohmann::json to_json(const sim::SimDesign& d);
nlohmann::json to_json(const MomentSummary& m);

/// metrics.csv and the replicate table, as text.
std::string metrics_csv(const sim::ExperimentResult& r);
std::string replicates_csv(const sim::ExperimentResult& r);

/// Full command line (argv[0] first). Output goes to `out`, diagnostics and
/// the JSON error record to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace ddt::cli

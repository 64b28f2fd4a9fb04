#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dopfocus/eval.hpp"
#include "dopfocus/scene_io.hpp"

namespace dopfocus::cli {

/// Raised for bad configuration or arguments; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KappaSpec {
  int size = 0;  ///< 0 means N / 10
  KappaMode mode = KappaMode::consecutive;
  int offset = 0;
  std::optional<std::uint64_t> seed;  ///< random mode; defaults to the master seed
};

struct RecoverySpec {
  std::vector<std::string> detectors{"focusing"};
  int targets = 0;  ///< 0 means the number of truth targets
  int M = 0;
  std::string window = "rect";
  bool refine = true;
  bool gridless = false;
  double dc_exclusion_bins = -1.0;
  int decimation = 10;
};

struct RunConfig {
  std::filesystem::path source;  ///< config file, empty when built from flags only
  std::optional<std::filesystem::path> scenario;
  PulseOptions pulse;
  KappaSpec kappa;
  RecoverySpec recovery;
  std::optional<double> snr_db;  ///< simulate: noise level, unset means noiseless
  bool write_signal = true;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
  nlohmann::json suite;  ///< raw "suite" section
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Paths inside a config resolve against the config's directory.
std::filesystem::path resolve(const RunConfig& cfg, const std::filesystem::path& p);

/// Detector list from a name, a comma list or "all".
std::vector<std::string> parse_detectors(const std::string& text);

/// Output directory: explicit flag, then config, then DOPFOCUS_OUT, then ".".
std::filesystem::path output_dir(const RunConfig& cfg, const std::string& flag);

SuiteConfig make_suite_config(const RunConfig& cfg, const std::optional<RadarParams>& fallback);

CoefficientSet make_kappa(const RunConfig& cfg, const RadarParams& params);

}  // namespace dopfocus::cli

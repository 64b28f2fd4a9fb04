#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dopfocus::cli {

using nlohmann::json;

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::vector<std::string> parse_detectors(const std::string& text) {
  const auto& valid = detector_names();
  auto list_valid = [&] {
    std::string s;
    for (const auto& n : valid) s += (s.empty() ? "" : ", ") + n;
    return s;
  };
  if (text == "all") return {"focusing", "twostage", "classic"};
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) {
    if (std::find(valid.begin(), valid.end(), name) == valid.end())
      throw UsageError("unknown detector '" + name + "' (valid: " + list_valid() + ", all)");
    out.push_back(name);
  }
  if (out.empty()) throw UsageError("empty detector list (valid: " + list_valid() + ", all)");
  return out;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  RunConfig cfg;
  cfg.source = path;
  try {
    if (j.contains("scenario")) cfg.scenario = j.at("scenario").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("pulse")) {
      const auto& p = j.at("pulse");
      if (p.contains("kind")) cfg.pulse.kind = pulse_kind_from_string(p.at("kind").get<std::string>());
      take(p, "rolloff", cfg.pulse.rolloff);
      take(p, "gaussian_sigmas", cfg.pulse.gaussian_sigmas);
      take(p, "lowpass_fraction", cfg.pulse.lowpass_fraction);
      take(p, "dispersive", cfg.pulse.dispersive);
    }
    if (j.contains("kappa")) {
      const auto& k = j.at("kappa");
      take(k, "size", cfg.kappa.size);
      if (k.contains("mode")) cfg.kappa.mode = kappa_mode_from_string(k.at("mode").get<std::string>());
      take(k, "offset", cfg.kappa.offset);
      if (k.contains("seed")) cfg.kappa.seed = k.at("seed").get<std::uint64_t>();
    }
    if (j.contains("recovery")) {
      const auto& r = j.at("recovery");
      if (r.contains("detector")) {
        const auto& d = r.at("detector");
        if (d.is_array()) {
          std::string joined;
          for (const auto& e : d) joined += (joined.empty() ? "" : ",") + e.get<std::string>();
          cfg.recovery.detectors = parse_detectors(joined);
        } else {
          cfg.recovery.detectors = parse_detectors(d.get<std::string>());
        }
      }
      take(r, "targets", cfg.recovery.targets);
      take(r, "M", cfg.recovery.M);
      take(r, "window", cfg.recovery.window);
      take(r, "refine", cfg.recovery.refine);
      take(r, "gridless", cfg.recovery.gridless);
      take(r, "dc_exclusion_bins", cfg.recovery.dc_exclusion_bins);
      take(r, "decimation", cfg.recovery.decimation);
    }
    if (j.contains("simulate")) {
      const auto& s = j.at("simulate");
      if (s.contains("snr_db")) cfg.snr_db = s.at("snr_db").get<double>();
      take(s, "write_signal", cfg.write_signal);
    }
    if (j.contains("suite")) cfg.suite = j.at("suite");
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return cfg;
}

std::filesystem::path resolve(const RunConfig& cfg, const std::filesystem::path& p) {
  if (p.is_absolute() || cfg.source.empty()) return p;
  return cfg.source.parent_path() / p;
}

std::filesystem::path output_dir(const RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (cfg.output) return resolve(cfg, *cfg.output);
  if (const char* env = std::getenv("DOPFOCUS_OUT"); env && *env) return env;
  return ".";
}

CoefficientSet make_kappa(const RunConfig& cfg, const RadarParams& params) {
  const int n = params.nyquist_count();
  const int size = cfg.kappa.size > 0 ? cfg.kappa.size : std::max(1, n / 10);
  return select_kappa(params, size, cfg.kappa.mode, cfg.kappa.seed.value_or(*cfg.seed),
                      cfg.kappa.offset);
}

SuiteConfig make_suite_config(const RunConfig& cfg, const std::optional<RadarParams>& fallback) {
  const json& s = cfg.suite;
  SuiteConfig c;
  try {
    if (s.contains("radar"))
      c.params = params_from_json(s.at("radar"));
    else if (fallback)
      c.params = *fallback;
    else
      throw UsageError("suite needs a radar section or a scenario file");
    take(s, "name", c.name);
    if (s.contains("scenario")) c.scenario = scenario_kind_from_string(s.at("scenario").get<std::string>());
    take(s, "targets", c.targets);
    take(s, "amp_db_spread", c.amp_db_spread);
    take(s, "snr_db", c.snr_db);
    take(s, "trials", c.trials);
    take(s, "hit_bins", c.hit_bins);
    take(s, "dynamic_range_db", c.dynamic_range_db);
    take(s, "pair_doppler_bins", c.pair_doppler_bins);
    take(s, "clutter_scatterers", c.clutter_scatterers);
    take(s, "scr_db", c.scr_db);
    take(s, "doppler_separation_bins", c.doppler_separation_bins);
    take(s, "workers", c.workers);
    if (s.contains("detectors")) {
      std::string joined;
      for (const auto& e : s.at("detectors")) joined += (joined.empty() ? "" : ",") + e.get<std::string>();
      c.detectors = parse_detectors(joined);
    } else {
      c.detectors = cfg.recovery.detectors;
    }
  } catch (const json::exception& e) {
    throw UsageError("suite section: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw UsageError("suite section: " + std::string(e.what()));
  }
  c.pulse = cfg.pulse;
  const int n = c.params.nyquist_count();
  c.kappa_size = cfg.kappa.size > 0 ? cfg.kappa.size : std::max(1, n / 10);
  c.kappa_mode = cfg.kappa.mode;
  c.kappa_offset = cfg.kappa.offset;
  c.M = cfg.recovery.M;
  c.window = cfg.recovery.window;
  c.refine = cfg.recovery.refine;
  c.gridless = cfg.recovery.gridless;
  c.dc_exclusion_bins = cfg.recovery.dc_exclusion_bins;
  c.decimation = cfg.recovery.decimation;
  if (!cfg.seed) throw UsageError("a master seed is required (config \"seed\" or --seed)");
  c.seed = *cfg.seed;
  return c;
}

}  // namespace dopfocus::cli

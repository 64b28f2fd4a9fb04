#include "dopfocus/scene_io.hpp"

#include <fstream>
#include <stdexcept>

namespace dopfocus {

using nlohmann::json;

std::vector<Target> Scenario::all_targets() const {
  std::vector<Target> out = targets;
  if (generator) {
    auto gen = random_scene(params, generator->count, generator->seed, generator->amp_db_spread,
                            generator->spacing);
    out.insert(out.end(), gen.begin(), gen.end());
  }
  return out;
}

std::optional<ClutterField> Scenario::clutter_field() const {
  if (!clutter) return std::nullopt;
  return make_clutter(params, clutter->scatterers, clutter->scr_db, clutter->ref_power,
                      clutter->seed);
}

json to_json(const RadarParams& p) {
  return json{{"pulse_count", p.pulse_count}, {"pri", p.pri},
              {"bandwidth", p.bandwidth},     {"carrier", p.carrier},
              {"pulse_time", p.pulse_time},   {"noise_psd", p.noise_psd}};
}

RadarParams params_from_json(const json& j) {
  RadarParams p;
  p.pulse_count = j.at("pulse_count").get<int>();
  p.pri = j.at("pri").get<double>();
  if (j.contains("bandwidth")) {
    p.bandwidth = j.at("bandwidth").get<double>();
  } else {
    p.bandwidth = j.at("nyquist_count").get<int>() / p.pri;
  }
  p.carrier = j.value("carrier", 0.0);
  p.pulse_time = j.value("pulse_time", p.pri);
  p.noise_psd = j.value("noise_psd", 0.0);
  p.validate();
  return p;
}

json to_json(const std::vector<Target>& targets) {
  json arr = json::array();
  for (const auto& t : targets)
    arr.push_back({{"delay", t.delay},
                   {"doppler", t.doppler},
                   {"amplitude", {t.amplitude.real(), t.amplitude.imag()}}});
  return arr;
}

std::vector<Target> targets_from_json(const json& j) {
  std::vector<Target> out;
  for (const auto& e : j) {
    Target t;
    t.delay = e.at("delay").get<double>();
    t.doppler = e.at("doppler").get<double>();
    const auto& a = e.at("amplitude");
    if (a.is_array()) {
      t.amplitude = {a.at(0).get<double>(), a.at(1).get<double>()};
    } else {
      t.amplitude = {a.get<double>(), 0.0};
    }
    out.push_back(t);
  }
  return out;
}

json to_json(const Scenario& s) {
  json j;
  j["radar"] = to_json(s.params);
  j["targets"] = to_json(s.targets);
  if (s.generator) {
    json g{{"count", s.generator->count},
           {"seed", s.generator->seed},
           {"amp_db_spread", s.generator->amp_db_spread},
           {"max_delay_fraction", s.generator->spacing.max_delay_fraction}};
    if (s.generator->spacing.min_delay) g["min_delay"] = *s.generator->spacing.min_delay;
    if (s.generator->spacing.min_doppler) g["min_doppler"] = *s.generator->spacing.min_doppler;
    j["generator"] = g;
  }
  if (s.clutter) {
    j["clutter"] = {{"scatterers", s.clutter->scatterers},
                    {"scr_db", s.clutter->scr_db},
                    {"ref_power", s.clutter->ref_power},
                    {"seed", s.clutter->seed}};
  }
  return j;
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.params = params_from_json(j.at("radar"));
  if (j.contains("targets")) s.targets = targets_from_json(j.at("targets"));
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    SceneGenerator gen;
    gen.count = g.at("count").get<int>();
    gen.seed = g.at("seed").get<std::uint64_t>();
    gen.amp_db_spread = g.value("amp_db_spread", 0.0);
    gen.spacing.max_delay_fraction = g.value("max_delay_fraction", 0.95);
    if (g.contains("min_delay")) gen.spacing.min_delay = g.at("min_delay").get<double>();
    if (g.contains("min_doppler")) gen.spacing.min_doppler = g.at("min_doppler").get<double>();
    s.generator = gen;
  }
  if (j.contains("clutter")) {
    const auto& c = j.at("clutter");
    ClutterSpec spec;
    spec.scatterers = c.at("scatterers").get<int>();
    spec.scr_db = c.at("scr_db").get<double>();
    spec.ref_power = c.value("ref_power", 1.0);
    spec.seed = c.at("seed").get<std::uint64_t>();
    s.clutter = spec;
  }
  return s;
}

void write_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(s).dump(2) << '\n';
}

Scenario read_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return scenario_from_json(json::parse(in));
}

}  // namespace dopfocus

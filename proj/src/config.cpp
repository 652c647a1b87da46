#include "sparsenav/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sparsenav/errors.hpp"

namespace sparsenav {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

BlurMode parse_blur(const std::string& s) {
  if (s == "sliding") return BlurMode::Sliding;
  if (s == "tiled") return BlurMode::Tiled;
  throw ConfigError("blur must be 'sliding' or 'tiled'");
}

}  // namespace

std::vector<EncoderConfig> SweepGrid::expand(const EncoderConfig& base) const {
  std::vector<EncoderConfig> grid;
  for (Model m : models) {
    EncoderConfig cfg = base;
    cfg.model = m;
    if (m == Model::PerfectMemory) {
      grid.push_back(cfg);
      continue;
    }
    for (std::size_t n : n_kc) {
      for (double k : kappa) {
        cfg.n_kc = n;
        cfg.kappa = k;
        grid.push_back(cfg);
      }
    }
  }
  return grid;
}

Arena RunConfig::load_arena() const {
  return arena_path ? sparsenav::load_arena(*arena_path) : reference_arena();
}

RouteScript RunConfig::load_route() const {
  return route_path ? sparsenav::load_route(*route_path) : reference_route();
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  try {
    const json doc = json::parse(json_text);
    reject_unknown(doc, {"arena", "route", "seed", "out", "jobs", "trial", "sweep"}, "config");
    if (doc.contains("arena")) cfg.arena_path = resolve(base_dir, doc["arena"].get<std::string>());
    if (doc.contains("route")) cfg.route_path = resolve(base_dir, doc["route"].get<std::string>());
    if (doc.contains("out")) cfg.out_dir = resolve(base_dir, doc["out"].get<std::string>());
    read(doc, "seed", cfg.seed);
    read(doc, "jobs", cfg.jobs);

    if (doc.contains("trial")) {
      const json& t = doc["trial"];
      reject_unknown(t,
                     {"model", "n_pn", "n_kc", "kappa", "theta", "fixed_fanout", "alpha", "v_test", "v_train",
                      "snapshot_period", "n_snapshots", "success_radius", "max_test_time", "control_dt",
                      "robot_radius", "blur"},
                     "trial");
      TrialConfig& tc = cfg.trial;
      if (t.contains("model")) tc.encoder.model = parse_model(t["model"].get<std::string>());
      read(t, "n_pn", tc.encoder.n_pn);
      read(t, "n_kc", tc.encoder.n_kc);
      read(t, "kappa", tc.encoder.kappa);
      read(t, "theta", tc.encoder.theta);
      read(t, "fixed_fanout", tc.encoder.fixed_fanout);
      read(t, "alpha", tc.steering.alpha);
      read(t, "v_test", tc.steering.v_test);
      read(t, "v_train", tc.v_train);
      read(t, "snapshot_period", tc.snapshot_period);
      read(t, "n_snapshots", tc.n_snapshots);
      read(t, "success_radius", tc.success_radius);
      read(t, "max_test_time", tc.max_test_time);
      read(t, "control_dt", tc.control_dt);
      read(t, "robot_radius", tc.robot_radius);
      if (t.contains("blur")) tc.blur = parse_blur(t["blur"].get<std::string>());
    }

    if (doc.contains("sweep")) {
      const json& s = doc["sweep"];
      reject_unknown(s, {"models", "n_kc", "kappa", "n_trials"}, "sweep");
      if (s.contains("models")) {
        cfg.sweep.models.clear();
        for (const json& m : s["models"]) cfg.sweep.models.push_back(parse_model(m.get<std::string>()));
      }
      read(s, "n_kc", cfg.sweep.n_kc);
      read(s, "kappa", cfg.sweep.kappa);
      read(s, "n_trials", cfg.sweep.n_trials);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.trial.seed = cfg.seed;
  cfg.trial.validate();
  if (cfg.jobs == 0) throw ConfigError("jobs must be at least 1");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

std::string run_config_to_json(const RunConfig& cfg) {
  const TrialConfig& t = cfg.trial;
  json models = json::array();
  for (Model m : cfg.sweep.models) models.push_back(std::string(to_string(m)));
  json doc{{"seed", cfg.seed},
           {"out", cfg.out_dir.string()},
           {"jobs", cfg.jobs},
           {"trial",
            {{"model", std::string(to_string(t.encoder.model))},
             {"n_pn", t.encoder.n_pn},
             {"n_kc", t.encoder.n_kc},
             {"kappa", t.encoder.kappa},
             {"theta", t.encoder.theta},
             {"fixed_fanout", t.encoder.fixed_fanout},
             {"alpha", t.steering.alpha},
             {"v_test", t.steering.v_test},
             {"v_train", t.v_train},
             {"snapshot_period", t.snapshot_period},
             {"n_snapshots", t.n_snapshots},
             {"success_radius", t.success_radius},
             {"max_test_time", t.max_test_time},
             {"control_dt", t.control_dt},
             {"robot_radius", t.robot_radius},
             {"blur", t.blur == BlurMode::Sliding ? "sliding" : "tiled"}}},
           {"sweep", {{"models", models}, {"n_kc", cfg.sweep.n_kc}, {"kappa", cfg.sweep.kappa}, {"n_trials", cfg.sweep.n_trials}}}};
  if (cfg.arena_path) doc["arena"] = cfg.arena_path->string();
  if (cfg.route_path) doc["route"] = cfg.route_path->string();
  return doc.dump(2);
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPARSENAV_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError("SPARSENAV_SEED must be an unsigned integer");
    return v;
  }
  return config_seed;
}

}  // namespace sparsenav

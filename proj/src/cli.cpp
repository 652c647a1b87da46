#include "sparsenav/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsenav/analysis.hpp"
#include "sparsenav/config.hpp"
#include "sparsenav/errors.hpp"
#include "sparsenav/io.hpp"
#include "sparsenav/version.hpp"

namespace sparsenav {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned jobs = 0;  // 0: keep the config value
  bool fixed_fanout = false;
};

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig cfg = flags.config.empty() ? parse_run_config("{}") : load_run_config(flags.config);
  cfg.seed = resolve_seed(flags.seed, cfg.seed);
  cfg.trial.seed = cfg.seed;
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  if (flags.jobs > 0) cfg.jobs = flags.jobs;
  if (flags.fixed_fanout) cfg.trial.encoder.fixed_fanout = true;
  return cfg;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  body(out);
  if (!out) throw ConfigError("write failed: " + path.string());
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg, const Arena& arena,
                    const RouteScript& route) {
  const json manifest{{"tool", "sparsenav"},
                      {"version", kVersion},
                      {"command", command},
                      {"seed", cfg.seed},
                      {"config", json::parse(run_config_to_json(cfg))},
                      {"arena", json::parse(arena_to_json(arena))},
                      {"route", json::parse(route_to_json(route))}};
  write_file(dir / "manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

int cmd_trial(const CommonFlags& flags, std::ostream& out) {
  const RunConfig cfg = resolve_config(flags);
  const Arena arena = cfg.load_arena();
  const RouteScript route = cfg.load_route();
  const TrialRecord rec = run_trial(arena, route, cfg.trial);

  fs::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "train.csv", [&](std::ostream& o) { write_trajectory_csv(o, rec.train_trajectory); });
  write_file(cfg.out_dir / "test.csv", [&](std::ostream& o) { write_trajectory_csv(o, rec.test_trajectory); });
  write_file(cfg.out_dir / "novelty.csv", [&](std::ostream& o) { write_novelty_csv(o, rec.novelty_trace); });
  write_file(cfg.out_dir / "record.json", [&](std::ostream& o) { o << record_to_json(rec) << '\n'; });
  write_manifest(cfg.out_dir, "trial", cfg, arena, route);

  out << to_string(cfg.trial.encoder.model) << " seed=" << cfg.seed << " final_distance=" << rec.final_distance
      << " success=" << (rec.success ? "yes" : "no") << " collided=" << (rec.collided ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, std::ostream& out) {
  const RunConfig cfg = resolve_config(flags);
  const std::vector<EncoderConfig> grid = cfg.sweep.expand(cfg.trial.encoder);
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  if (cfg.sweep.n_trials == 0) throw ConfigError("sweep n_trials must be at least 1");
  const Arena arena = cfg.load_arena();
  const RouteScript route = cfg.load_route();
  const std::vector<SweepRow> rows =
      run_sweep(arena, route, grid, cfg.sweep.n_trials, cfg.seed, cfg.trial, cfg.jobs, false);

  fs::create_directories(cfg.out_dir);
  write_file(cfg.out_dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, rows); });
  write_file(cfg.out_dir / "trials.csv", [&](std::ostream& o) { write_trials_csv(o, rows); });
  write_manifest(cfg.out_dir, "sweep", cfg, arena, route);
  write_sweep_csv(out, rows);
  return kExitOk;
}

struct TableFlags {
  std::size_t n_pn = 726;
  std::size_t n_kc = 2000;
  double kappa = 0.1;
  std::size_t n_items = 25;
  std::size_t fanout = 10;
};

int cmd_tables(const TableFlags& f, std::ostream& out) {
  if (!(f.kappa > 0.0 && f.kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
  if (f.n_pn == 0 || f.n_kc == 0) throw ConfigError("n_pn and n_kc must be positive");
  constexpr Model kModels[] = {Model::FlyHash, Model::ConvLSH, Model::PerfectMemory};

  out << "storage (bits), n_items=" << f.n_items << "\n";
  out << std::left << std::setw(14) << "model" << std::right << std::setw(16) << "w" << std::setw(12) << "y"
      << std::setw(18) << "total" << '\n';
  for (Model m : kModels) {
    const StorageReport r = storage_size(m, f.n_pn, f.n_kc, f.n_items);
    out << std::left << std::setw(14) << to_string(m) << std::right << std::setw(16) << r.w_bits << std::setw(12)
        << r.y_bits << std::setw(18) << r.total_bits << '\n';
  }
  out << "\noperations per encode + one comparison (eval_adds of hash models is an upper bound)\n";
  out << std::left << std::setw(14) << "model" << std::right << std::setw(14) << "encode_mults" << std::setw(14)
      << "encode_adds" << std::setw(8) << "kwta" << std::setw(10) << "xor" << std::setw(14) << "square_mults"
      << std::setw(12) << "eval_adds" << '\n';
  for (Model m : kModels) {
    const OpCountReport r = op_counts(m, f.n_pn, f.n_kc, f.kappa, f.fanout);
    out << std::left << std::setw(14) << to_string(m) << std::right << std::setw(14) << r.encode_mults
        << std::setw(14) << r.encode_adds << std::setw(8) << r.encode_kwta << std::setw(10) << r.eval_xor
        << std::setw(14) << r.eval_square_mults << std::setw(12) << r.eval_adds << '\n';
  }
  out << "\nentropy bound " << std::setprecision(6) << compression_lower_bound(f.n_kc, f.kappa)
      << " bits/item, csr " << csr_bits(f.n_kc) << " bits/item, raw " << f.n_kc << " bits/item\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-hash visual route following workbench", "sparsenav"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonFlags trial_flags;
  CommonFlags sweep_flags;
  TableFlags table_flags;

  auto add_common = [](CLI::App* sub, CommonFlags& f) {
    sub->add_option("--config", f.config, "run config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "seed (overrides SPARSENAV_SEED and the config)");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--fixed-fanout", f.fixed_fanout, "exactly round(theta * n_pn) inputs per FlyHash KC");
  };
  CLI::App* trial = app.add_subcommand("trial", "train and test once, write trajectories and record");
  add_common(trial, trial_flags);
  CLI::App* sweep = app.add_subcommand("sweep", "repeat trials over an encoder grid");
  add_common(sweep, sweep_flags);
  CLI::App* tables = app.add_subcommand("tables", "print storage and operation tables");
  tables->add_option("--n-pn", table_flags.n_pn, "input neurons");
  tables->add_option("--n-kc", table_flags.n_kc, "hash length");
  tables->add_option("--kappa", table_flags.kappa, "hash sparsity");
  tables->add_option("--n-items", table_flags.n_items, "stored items");
  tables->add_option("--fanout", table_flags.fanout, "FlyHash inputs per KC")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*trial) return cmd_trial(trial_flags, out);
    if (*sweep) return cmd_sweep(sweep_flags, out);
    return cmd_tables(table_flags, out);
  } catch (const TrainingCollision& e) {
    err << "error: " << e.what() << '\n';
    return kExitTrainingCollision;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace sparsenav

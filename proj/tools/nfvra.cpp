// nfvra command-line driver.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 runtime error.
// Errors are also reported on stderr as one JSON object.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nfvra/nfvra.hpp"

namespace fs = std::filesystem;
using namespace nfvra;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::string topology;
  std::optional<double> eta;
  std::optional<int> vn_count;
  std::optional<int> k_paths;
  std::string out_dir;
  unsigned threads = 0;
  int verbosity = 1;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text, const std::string& field) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>)
        out.push_back(T(std::stod(item, &used)));
      else
        out.push_back(T(std::stoll(item, &used)));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(field, "'" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

SimulationConfig load(const CommonOptions& o) {
  SimulationConfig cfg = o.config_path.empty() ? preset_config("wx100") : load_config(o.config_path);
  if (!o.topology.empty()) cfg.topology = preset_config(o.topology).topology;
  if (o.eta) cfg.arrival_rate = *o.eta;
  if (o.vn_count) cfg.vn_count = *o.vn_count;
  if (o.k_paths) cfg.k_paths = *o.k_paths;
  validate(cfg);
  return cfg;
}

fs::path output_dir(const CommonOptions& o) {
  fs::path dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("NFVRA_OUT_DIR");
    dir = env && *env ? env : "results";
  }
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

json provenance(const SimulationConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  return {{"tool", "nfvra"},
          {"version", kVersion},
          {"fingerprint", fingerprint(cfg)},
          {"seeds", seeds},
          {"config", to_json(cfg)}};
}

void log(const CommonOptions& o, const std::string& line) {
  if (o.verbosity > 0) std::cerr << line << '\n';
}

void add_common(CLI::App* sub, CommonOptions& o, bool with_eta = true) {
  sub->add_option("-c,--config", o.config_path, "JSON config file");
  sub->add_option("-t,--topology", o.topology, "topology preset (wx100, wx100-s41)");
  if (with_eta) sub->add_option("--eta", o.eta, "arrival rate override");
  sub->add_option("--vn-count", o.vn_count, "number of requests override");
  sub->add_option("--k-paths", o.k_paths, "candidate paths per virtual link");
  sub->add_option("-o,--out", o.out_dir, "output directory (default $NFVRA_OUT_DIR or ./results)");
  sub->add_option("-j,--threads", o.threads, "worker threads (0 = hardware)");
  sub->add_flag("-q{0},--quiet{0}", o.verbosity, "suppress progress output");
}

int fail(int code, const std::string& kind, const std::string& detail, const std::string& field = "") {
  json report = {{"error", {{"kind", kind}, {"detail", detail}}}};
  if (!field.empty()) report["error"]["field"] = field;
  std::cerr << report.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NFV resource allocation simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonOptions common;

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "check a config file");
  validate_cmd->add_option("path", validate_path, "config file")->required();

  std::string solvers_text = "grc_rank";
  std::string seeds_text;
  bool debug_checks = false;
  std::optional<double> time_limit;
  auto* run_cmd = app.add_subcommand("run", "online simulation runs");
  add_common(run_cmd, common);
  run_cmd->add_option("-s,--solver,--solvers", solvers_text, "comma-separated solver names");
  run_cmd->add_option("--seeds", seeds_text, "comma-separated seeds (default 0,1111,...,9999)");
  run_cmd->add_flag("--debug-checks", debug_checks, "verify resource accounting on every event");
  run_cmd->add_option("--time-limit", time_limit, "per-request solver wall-clock cap (seconds)");

  int per_size = 20, min_size = 2, max_size = 10;
  std::uint64_t offline_seed = 0;
  auto* offline_cmd = app.add_subcommand("offline", "offline solvability table");
  add_common(offline_cmd, common, false);
  offline_cmd->add_option("-s,--solver,--solvers", solvers_text, "comma-separated solver names");
  offline_cmd->add_option("--per-size", per_size, "instances per VN size");
  offline_cmd->add_option("--min-size", min_size, "smallest VN size");
  offline_cmd->add_option("--max-size", max_size, "largest VN size");
  offline_cmd->add_option("--seed", offline_seed, "instance set seed");

  std::string axis = "eta", etas_text;
  auto* sweep_cmd = app.add_subcommand("sweep", "generalization sweeps");
  add_common(sweep_cmd, common, false);
  sweep_cmd->add_option("-s,--solver,--solvers", solvers_text, "comma-separated solver names");
  sweep_cmd->add_option("--seeds", seeds_text, "comma-separated seeds");
  sweep_cmd->add_option("--axis", axis, "eta | phases")->check(CLI::IsMember({"eta", "phases"}));
  sweep_cmd->add_option("--etas", etas_text, "arrival rates (default 0.04,...,0.28)");

  std::string vn_sizes_text, pn_sizes_text;
  ScaleOptions scale;
  auto* scale_cmd = app.add_subcommand("scale", "solve-time scalability profile");
  add_common(scale_cmd, common, false);
  scale_cmd->add_option("-s,--solver,--solvers", solvers_text, "comma-separated solver names");
  scale_cmd->add_option("--vn-sizes", vn_sizes_text, "VN sizes (default 5,...,30)");
  scale_cmd->add_option("--pn-sizes", pn_sizes_text, "PN sizes (default 200,...,1000)");
  scale_cmd->add_option("--batch", scale.batch, "instances per size");
  scale_cmd->add_option("--time-limit", scale.time_limit, "seconds counted as a timeout");
  scale_cmd->add_option("--seed", scale.seed, "instance seed");

  std::string listen, reward_text = "fir:0.1";
  bool use_stdio = false;
  std::uint64_t env_seed = 0;
  std::size_t max_sessions = 0;
  auto* serve_cmd = app.add_subcommand("serve-env", "serve the environment protocol");
  add_common(serve_cmd, common, false);
  serve_cmd->add_option("--listen", listen, "[HOST]:PORT to accept TCP clients");
  serve_cmd->add_flag("--stdio", use_stdio, "speak the protocol on stdin/stdout");
  serve_cmd->add_option("--seed", env_seed, "substrate and episode seed");
  serve_cmd->add_option("--reward", reward_text, "noir | air | fir:VALUE");
  serve_cmd->add_option("--max-sessions", max_sessions, "exit after N sessions (0 = never)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*validate_cmd) {
      const auto cfg = load_config(validate_path);
      std::cout << json{{"valid", true}, {"fingerprint", fingerprint(cfg)}}.dump() << '\n';
      return 0;
    }

    const auto solvers = split_list(solvers_text);
    for (const auto& s : solvers) make_solver(s);  // reject unknown names early
    const std::vector<std::uint64_t> seeds =
        seeds_text.empty() ? default_seeds() : parse_numbers<std::uint64_t>(seeds_text, "seeds");

    if (*run_cmd) {
      SimulationConfig cfg = load(common);
      if (debug_checks) cfg.debug_checks = true;
      if (time_limit) cfg.solver_time_limit = *time_limit;
      validate(cfg);
      const auto dir = output_dir(common);
      std::vector<BatchJob> jobs;
      for (const auto& s : solvers)
        for (auto seed : seeds) jobs.push_back({cfg, s, seed});
      const auto records = run_batch(jobs, common.threads);
      json summary = provenance(cfg, seeds);
      summary["runs"] = json::array();
      for (const auto& rec : records) {
        std::ostringstream csv;
        write_rows_csv(csv, rec);
        write_file(dir / (record_basename(rec) + ".csv"), csv.str());
        summary["runs"].push_back(summary_json(rec));
        log(common, rec.solver + " seed " + std::to_string(rec.seed) + ": RAC " +
                        std::to_string(rec.summary.rac) + " LRC " + std::to_string(rec.summary.lrc));
      }
      write_file(dir / "summary.json", summary.dump(2) + "\n");
      write_file(dir / "config.json", to_json(cfg).dump(2) + "\n");
      return 0;
    }

    if (*offline_cmd) {
      const SimulationConfig cfg = load(common);
      const auto dir = output_dir(common);
      const auto set = make_offline_set(cfg, offline_seed, per_size, min_size, max_size);
      const auto before = set.digest();
      const auto table = offline_solvability(set, solvers, cfg.solvers, std::size_t(cfg.k_paths),
                                             common.threads);
      std::ostringstream csv;
      write_heatmap_csv(csv, table);
      write_file(dir / "offline_heatmap.csv", csv.str());
      json meta = provenance(cfg, {offline_seed});
      meta["instance_digest"] = before;
      meta["instance_digest_after"] = set.digest();
      meta["per_size"] = per_size;
      write_file(dir / "offline.json", meta.dump(2) + "\n");
      log(common, "wrote " + (dir / "offline_heatmap.csv").string());
      return 0;
    }

    if (*sweep_cmd) {
      const SimulationConfig cfg = load(common);
      const auto dir = output_dir(common);
      std::vector<RunRecord> records;
      std::vector<SweepPoint> points;
      json meta = provenance(cfg, seeds);
      if (axis == "eta") {
        const auto etas = etas_text.empty() ? default_eta_axis() : parse_numbers<double>(etas_text, "etas");
        points = arrival_rate_sweep(cfg, etas, solvers, seeds, common.threads, &records);
        for (const auto& s : solvers) meta["spearman_eta_rac"][s] = eta_rac_spearman(points, s);
      } else {
        points = demand_phase_sweep(cfg, solvers, seeds, common.threads, &records);
      }
      for (const auto& rec : records) {
        std::ostringstream csv;
        write_rows_csv(csv, rec);
        write_file(dir / (record_basename(rec) + ".csv"), csv.str());
      }
      std::ostringstream csv;
      write_sweep_csv(csv, points);
      write_file(dir / ("sweep_" + axis + ".csv"), csv.str());
      write_file(dir / ("sweep_" + axis + ".json"), meta.dump(2) + "\n");
      log(common, "wrote " + (dir / ("sweep_" + axis + ".csv")).string());
      return 0;
    }

    if (*scale_cmd) {
      const SimulationConfig cfg = load(common);
      const auto dir = output_dir(common);
      if (!vn_sizes_text.empty()) scale.vn_sizes = parse_numbers<int>(vn_sizes_text, "vn-sizes");
      if (!pn_sizes_text.empty()) scale.pn_sizes = parse_numbers<int>(pn_sizes_text, "pn-sizes");
      const auto points = scalability_profile(cfg, solvers, scale);
      std::ostringstream csv;
      write_scale_csv(csv, points);
      write_file(dir / "scale.csv", csv.str());
      write_file(dir / "scale.json", provenance(cfg, {scale.seed}).dump(2) + "\n");
      log(common, "wrote " + (dir / "scale.csv").string());
      return 0;
    }

    if (*serve_cmd) {
      const SimulationConfig cfg = load(common);
      RewardSpec reward;
      if (reward_text == "noir")
        reward = RewardSpec::noir();
      else if (reward_text == "air")
        reward = RewardSpec::air();
      else if (reward_text.rfind("fir:", 0) == 0)
        reward = RewardSpec::fir(parse_numbers<double>(reward_text.substr(4), "reward").front());
      else
        throw ConfigError("reward", "expected noir, air or fir:VALUE");
      if (reward.kind == RewardKind::fir && !(reward.value > 0.0))
        throw ConfigError("reward", "FIR value must be > 0");
      auto factory = [&] { return std::make_unique<Session>(cfg, env_seed, reward); };
      if (use_stdio || listen.empty()) {
        auto session = factory();
        serve_stream(*session, std::cin, std::cout);
        return 0;
      }
      serve_tcp(
          listen, factory,
          [&](unsigned short port) { std::cerr << "listening on port " << port << std::endl; },
          max_sessions);
      return 0;
    }
  } catch (const ConfigError& e) {
    return fail(kExitConfig, "config", e.what(), e.field());
  } catch (const FormatError& e) {
    return fail(kExitConfig, "format", e.what());
  } catch (const ValidationError& e) {
    return fail(kExitConfig, "validation", e.what());
  } catch (const std::exception& e) {
    return fail(kExitRuntime, "runtime", e.what());
  }
  return 0;
}

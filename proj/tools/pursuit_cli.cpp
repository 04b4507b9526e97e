#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/experiments.hpp"
#include "pursuit/io.hpp"
#include "pursuit/server.hpp"

namespace fs = std::filesystem;
using namespace pursuit;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int workers = 1;
  std::optional<int> episodes;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed (overrides the spec)");
  app->add_option("--out-dir", c.out_dir, "Directory for CSV/JSONL output");
  app->add_option("--workers", c.workers, "Episodes run in parallel")->check(CLI::PositiveNumber);
  app->add_option("--episodes", c.episodes, "Episode count (overrides the spec)")->check(CLI::PositiveNumber);
}

void apply_common(ExperimentSpec& spec, const Common& c) {
  if (c.seed) spec.master_seed = *c.seed;
  if (c.episodes) spec.episodes = *c.episodes;
}

std::vector<ExperimentSpec> select(const std::string& path, const std::string& label, const Common& c) {
  auto specs = load_experiments(path);
  if (!label.empty()) {
    std::erase_if(specs, [&](const auto& s) { return s.label != label; });
    if (specs.empty()) throw InvalidParameter("no experiment labelled '" + label + "' in " + path);
  }
  for (auto& s : specs) apply_common(s, c);
  return specs;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  const auto path = fs::path(c.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  spdlog::info("writing {}", path.string());
  return out;
}

std::string file_label(const std::string& label) {
  std::string s = label;
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  return s;
}

int cmd_simulate(const std::string& path, const std::string& label, int episode, bool verbose, const Common& c) {
  auto spec = select(path, label, c).front();
  auto agent = spec.make_agent();
  const StrategyPolicy evader(spec.truth);
  const auto log = run_episode(spec.game, *agent, evader, spec.episode_seed(episode));
  if (verbose) {
    if (c.out_dir.empty()) {
      write_episode_jsonl(std::cout, log);
    } else {
      auto out = open_out(c, file_label(spec.label) + "_episode.jsonl");
      write_episode_jsonl(out, log);
    }
  }
  std::cout << fmt::format("{} episode {} seed {}: {} at T={} return={}", spec.label, episode, log.seed,
                           to_string(log.outcome), log.duration, log.total_return);
  if (spec.game.pacman()) std::cout << fmt::format(" score={}", log.score);
  if (log.captured()) std::cout << fmt::format(" shortest={}", shortest_capture_oracle(*spec.game.graph, log));
  std::cout << '\n';
  return 0;
}

int cmd_experiment(const std::string& path, const std::string& label, const Common& c) {
  const auto specs = select(path, label, c);
  std::vector<MetricsRow> rows;
  for (const auto& spec : specs) {
    spdlog::info("running '{}' ({} episodes, {} workers)", spec.label, spec.episodes, c.workers);
    auto batch = run_batch(spec, {.workers = c.workers});
    if (!c.out_dir.empty()) {
      auto out = open_out(c, file_label(spec.label) + ".jsonl");
      write_records_jsonl(out, spec.label, batch.records);
    }
    rows.push_back(batch.metrics);
  }
  write_metrics_csv(std::cout, rows);
  if (!c.out_dir.empty()) {
    auto out = open_out(c, "results.csv");
    write_metrics_csv(out, rows);
  }
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& label, const std::vector<int>& radii, const Common& c) {
  const auto spec = select(path, label, c).front();
  const auto rows = vision_sweep(spec, radii, {.workers = c.workers});
  write_metrics_csv(std::cout, rows);
  if (!c.out_dir.empty()) {
    auto out = open_out(c, "vision_sweep.csv");
    write_metrics_csv(out, rows);
  }
  return 0;
}

int cmd_trace(const std::string& path, const std::string& label, const std::vector<double>& ds, const Common& c) {
  const auto spec = select(path, label, c).front();
  const auto curves = truncation_trace(spec, ds, {.workers = c.workers});
  write_trace_csv(std::cout, curves);
  if (!c.out_dir.empty()) {
    auto out = open_out(c, "truncation_trace.csv");
    write_trace_csv(out, curves);
  }
  return 0;
}

LiveServer* g_server = nullptr;

int cmd_serve(const ServerOptions& options) {
  LiveServer server(options);
  const int port = server.bind();
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  spdlog::info("live service on http://{}:{}", options.host, port);
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pursuit-evasion planner: simulations, experiment batches and a live service"};
  app.require_subcommand(1);
  Common common;

  std::string spec_path, label;
  int episode = 0;
  bool verbose = false;
  auto* simulate = app.add_subcommand("simulate", "Run one episode of an experiment spec");
  simulate->add_option("spec", spec_path, "Experiment JSON file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--label", label, "Experiment label within the file (default: first)");
  simulate->add_option("--episode", episode, "Episode index (seed = master seed + index)");
  simulate->add_flag("-v,--verbose", verbose, "Emit the per-tick JSONL log");
  add_common(simulate, common);

  auto* experiment = app.add_subcommand("experiment", "Run experiment batches and print the metrics table");
  experiment->add_option("spec", spec_path, "Experiment JSON file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--label", label, "Run only this experiment");
  add_common(experiment, common);

  std::vector<int> radii{1, 2};
  auto* sweep = app.add_subcommand("sweep-vision", "Run one experiment at several vision radii");
  sweep->add_option("spec", spec_path, "Experiment JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--label", label, "Experiment label (default: first)");
  sweep->add_option("--radii", radii, "Vision radii")->delimiter(',');
  add_common(sweep, common);

  std::vector<double> ds{0.9, 1.0};
  auto* trace = app.add_subcommand("trace-truncation", "Proportion of decisions sampling the true strategy");
  trace->add_option("spec", spec_path, "Experiment JSON file")->required()->check(CLI::ExistingFile);
  trace->add_option("--label", label, "Experiment label (default: first)");
  trace->add_option("--d", ds, "Truncation coefficients")->delimiter(',');
  add_common(trace, common);

  ServerOptions server;
  int deadline_s = 30;
  auto* serve = app.add_subcommand("serve", "Host live games: a human plays the evader");
  serve->add_option("--host", server.host, "Bind address");
  serve->add_option("--port", server.port, "Port (0 = any free port)");
  serve->add_option("--static", server.static_dir, "Directory of UI assets served at /");
  serve->add_option("--deadline", deadline_s, "Seconds before an idle evader stays put")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_pattern("[%l] %v");

  try {
    if (simulate->parsed()) return cmd_simulate(spec_path, label, episode, verbose, common);
    if (experiment->parsed()) return cmd_experiment(spec_path, label, common);
    if (sweep->parsed()) return cmd_sweep(spec_path, label, radii, common);
    if (trace->parsed()) return cmd_trace(spec_path, label, ds, common);
    if (serve->parsed()) {
      server.live.move_deadline = std::chrono::seconds(deadline_s);
      return cmd_serve(server);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}

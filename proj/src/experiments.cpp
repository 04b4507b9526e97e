#include "pursuit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "pursuit/errors.hpp"

namespace pursuit {

std::string to_string(AgentKind k) { return k == AgentKind::kThompson ? "thompson" : "benchmark"; }

AgentKind agent_kind_from_string(const std::string& s) {
  if (s == "thompson") return AgentKind::kThompson;
  if (s == "benchmark") return AgentKind::kBenchmark;
  throw InvalidParameter("unknown agent '" + s + "' (expected thompson or benchmark)");
}

void ExperimentSpec::validate() const {
  if (episodes < 1) throw InvalidParameter("experiment '" + label + "': episode count must be positive");
  game.validate();
  truth.validate(*game.graph);
  if (agent == AgentKind::kThompson) {
    strategies.validate(*game.graph);
    planner.validate();
  }
}

std::unique_ptr<PursuerAgent> ExperimentSpec::make_agent() const {
  if (agent == AgentKind::kBenchmark) return std::make_unique<BenchmarkAgent>();
  return std::make_unique<ThompsonAgent>(strategies, planner);
}

int shortest_capture_time(const Graph& g, std::span<const NodeId> pursuer_starts,
                          std::span<const NodeId> evader_trajectory) {
  if (evader_trajectory.empty()) throw InvalidParameter("empty evader trajectory");
  auto nearest = [&](NodeId e) {
    int best = std::numeric_limits<int>::max();
    for (NodeId w : pursuer_starts) best = std::min(best, g.dist(w, e));
    return best;
  };
  if (nearest(evader_trajectory[0]) <= 1) return 0;
  // By time t a pursuer can stand anywhere within t hops of its start. It
  // captures during tick t if it is within one hop of the evader either
  // before the evader moves (E_{t-1}) or after (E_t).
  for (std::size_t t = 1; t < evader_trajectory.size(); ++t) {
    const int reach = static_cast<int>(t) + 1;
    if (nearest(evader_trajectory[t - 1]) <= reach || nearest(evader_trajectory[t]) <= reach)
      return static_cast<int>(t);
  }
  return -1;
}

bool shortest_capture_oracle(const Graph& g, const EpisodeLog& episode) {
  if (!episode.captured()) throw InvalidParameter("shortest-capture check needs a captured episode");
  const auto starts = episode.pursuer_starts();
  const auto trajectory = episode.evader_trajectory();
  return shortest_capture_time(g, starts, trajectory) == episode.duration;
}

EpisodeRecord summarize_episode(const Graph& g, const EpisodeLog& log, int index) {
  EpisodeRecord r;
  r.index = index;
  r.seed = log.seed;
  r.outcome = log.outcome;
  r.duration = log.duration;
  r.total_return = log.total_return;
  r.discounted_return = log.discounted_return;
  r.score = log.score;
  r.shortest = log.captured() && shortest_capture_oracle(g, log);
  r.sampled.reserve(log.ticks.size());
  for (const auto& tick : log.ticks) r.sampled.push_back(tick.sampled_strategy);
  return r;
}

namespace {

struct MeanStderr {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
  return m;
}

}  // namespace

MetricsRow aggregate(const std::string& label, std::span<const EpisodeRecord> records, int max_steps,
                     bool with_score) {
  MetricsRow row;
  row.label = label;
  row.max_steps = max_steps;
  row.episodes = static_cast<int>(records.size());
  std::vector<double> times;
  std::vector<double> scores;
  int shortest = 0;
  for (const auto& r : records) {
    switch (r.outcome) {
      case Status::kCaptured:
        ++row.captured;
        times.push_back(r.duration);
        if (r.shortest) ++shortest;
        break;
      case Status::kEvaderWon:
        ++row.evader_won;
        break;
      case Status::kTimeout:
        ++row.timeouts;
        break;
      case Status::kOngoing:
        break;
    }
    scores.push_back(r.score);
  }
  const double n = std::max(1, row.episodes);
  row.c1 = row.captured / n;
  row.c2 = shortest / n;
  const auto t = mean_stderr(times);
  row.t_mean = t.mean;
  row.t_stderr = t.stderr_;
  if (with_score) {
    const auto s = mean_stderr(scores);
    row.score_mean = s.mean;
    row.score_stderr = s.stderr_;
  }
  return row;
}

BatchResult run_batch(const ExperimentSpec& spec, const BatchOptions& options) {
  spec.validate();
  const int n = spec.episodes;
  const int workers = std::clamp(options.workers, 1, n);
  std::vector<EpisodeRecord> records(static_cast<std::size_t>(n));
  std::vector<EpisodeLog> logs(options.keep_logs ? static_cast<std::size_t>(n) : 0);
  const StrategyPolicy evader(spec.truth);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  int error_index = std::numeric_limits<int>::max();

  auto work = [&] {
    auto agent = spec.make_agent();
    while (!failed.load()) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        auto log = run_episode(spec.game, *agent, evader, spec.episode_seed(i));
        records[static_cast<std::size_t>(i)] = summarize_episode(*spec.game.graph, log, i);
        if (options.keep_logs) logs[static_cast<std::size_t>(i)] = std::move(log);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::make_exception_ptr(Error(fmt::format("experiment '{}' aborted at episode {} (seed {}): {}",
                                                            spec.label, i, spec.episode_seed(i), e.what())));
        }
        failed.store(true);
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  BatchResult result;
  result.metrics = aggregate(spec.label, records, spec.game.max_steps, spec.game.pacman());
  result.records = std::move(records);
  result.logs = std::move(logs);
  return result;
}

std::vector<MetricsRow> vision_sweep(const ExperimentSpec& base, std::span<const int> radii,
                                     const BatchOptions& options) {
  std::vector<MetricsRow> rows;
  for (int v : radii) {
    ExperimentSpec spec = base;
    spec.game.vision_radius = v;
    spec.label = fmt::format("{} v={}", base.label, v);
    rows.push_back(run_batch(spec, options).metrics);
  }
  return rows;
}

std::vector<TruncationCurve> truncation_trace(const ExperimentSpec& spec, std::span<const double> d_values,
                                              const BatchOptions& options) {
  if (spec.agent != AgentKind::kThompson) throw InvalidParameter("truncation trace needs the Thompson agent");
  const auto truth = spec.strategies.find(spec.truth);
  if (!truth) throw InvalidParameter("truncation trace: the true strategy is not in the hypothesis class");
  std::vector<TruncationCurve> curves;
  for (double d : d_values) {
    ExperimentSpec run = spec;
    run.planner.truncation = d;
    const auto batch = run_batch(run, options);
    TruncationCurve curve;
    curve.d = d;
    for (const auto& r : batch.records) {
      for (std::size_t t = 0; t < r.sampled.size(); ++t) {
        if (!r.sampled[t]) continue;
        if (curve.alive.size() <= t) {
          curve.alive.resize(t + 1, 0);
          curve.hits.resize(t + 1, 0);
        }
        ++curve.alive[t];
        if (*r.sampled[t] == static_cast<int>(*truth)) ++curve.hits[t];
      }
    }
    for (std::size_t t = 0; t < curve.alive.size(); ++t)
      curve.proportion.push_back(curve.alive[t] > 0 ? static_cast<double>(curve.hits[t]) / curve.alive[t]
                                                    : std::numeric_limits<double>::quiet_NaN());
    curves.push_back(std::move(curve));
  }
  return curves;
}

namespace {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "NA";
  return fmt::format("{:.4f}", x);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "label,episodes,C1,T,T_se,C2,Score,Score_se,captured,evader_won,timeouts\n";
  for (const auto& r : rows) {
    out << csv_field(r.label) << ',' << r.episodes << ',' << fmt_num(r.c1) << ',' << fmt_num(r.t_mean) << ','
        << fmt_num(r.t_stderr) << ',' << fmt_num(r.c2) << ','
        << (r.score_mean ? fmt_num(*r.score_mean) : "NA") << ','
        << (r.score_stderr ? fmt_num(*r.score_stderr) : "NA") << ',' << r.captured << ',' << r.evader_won << ','
        << r.timeouts << '\n';
  }
  out << "# timeout cap (max_steps): ";
  for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? ";" : "") << rows[i].max_steps;
  out << "; T averages captured episodes only; timeouts count as not captured\n";
}

void write_trace_csv(std::ostream& out, std::span<const TruncationCurve> curves) {
  out << "d,t,alive,hits,proportion\n";
  for (const auto& c : curves)
    for (std::size_t t = 0; t < c.alive.size(); ++t)
      out << fmt::format("{},{},{},{},{}\n", c.d, t, c.alive[t], c.hits[t], fmt_num(c.proportion[t]));
}

void write_records_jsonl(std::ostream& out, const std::string& label, std::span<const EpisodeRecord> records) {
  for (const auto& r : records) {
    nlohmann::json j;
    j["label"] = label;
    j["episode"] = r.index;
    j["seed"] = r.seed;
    j["outcome"] = to_string(r.outcome);
    j["T"] = r.duration;
    j["return"] = r.total_return;
    j["discounted_return"] = r.discounted_return;
    j["score"] = r.score;
    j["shortest"] = r.shortest;
    auto sampled = nlohmann::json::array();
    for (const auto& s : r.sampled) sampled.push_back(s ? nlohmann::json(*s) : nlohmann::json(nullptr));
    j["sampled"] = std::move(sampled);
    out << j.dump() << '\n';
  }
}

}  // namespace pursuit

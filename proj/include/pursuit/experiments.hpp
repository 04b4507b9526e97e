#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/game.hpp"
#include "pursuit/planner.hpp"
#include "pursuit/strategy.hpp"

namespace pursuit {

enum class AgentKind { kThompson, kBenchmark };
std::string to_string(AgentKind k);
AgentKind agent_kind_from_string(const std::string& s);

/// One batch of seeded episodes: board, rules, agent and evader.
struct ExperimentSpec {
  std::string label = "experiment";
  GameConfig game;
  AgentKind agent = AgentKind::kThompson;
  StrategyClass strategies;  // hypothesis class; unused by the benchmark agent
  EvaderStrategy truth;
  PlannerConfig planner;
  int episodes = 100;
  std::uint64_t master_seed = 0;

  void validate() const;
  std::unique_ptr<PursuerAgent> make_agent() const;
  std::uint64_t episode_seed(int index) const { return master_seed + static_cast<std::uint64_t>(index); }
};

/// Earliest time at which some pursuer team could have captured an evader
/// that follows the logged trajectory, starting from the logged positions.
int shortest_capture_time(const Graph& g, std::span<const NodeId> pursuer_starts,
                          std::span<const NodeId> evader_trajectory);

/// True when a captured episode ended at the earliest possible capture time.
/// Throws InvalidParameter for episodes that did not end in a capture.
bool shortest_capture_oracle(const Graph& g, const EpisodeLog& episode);

struct MetricsRow {
  std::string label;
  int episodes = 0;
  int captured = 0;
  int evader_won = 0;
  int timeouts = 0;
  double c1 = 0.0;
  double t_mean = 0.0;    // over captured episodes; NaN when none
  double t_stderr = 0.0;  // sample standard error; NaN with fewer than two captures
  double c2 = 0.0;
  std::optional<double> score_mean;
  std::optional<double> score_stderr;
  int max_steps = 0;
};

/// Per-episode record kept by batches; enough to recompute every metric.
struct EpisodeRecord {
  int index = 0;
  std::uint64_t seed = 0;
  Status outcome = Status::kOngoing;
  int duration = 0;
  double total_return = 0.0;
  double discounted_return = 0.0;
  int score = 0;
  bool shortest = false;
  std::vector<std::optional<int>> sampled;  // strategy sampled when acting from t
};

EpisodeRecord summarize_episode(const Graph& g, const EpisodeLog& log, int index);

/// Deterministic aggregation in record order.
MetricsRow aggregate(const std::string& label, std::span<const EpisodeRecord> records, int max_steps,
                     bool with_score);

struct BatchResult {
  MetricsRow metrics;
  std::vector<EpisodeRecord> records;
  std::vector<EpisodeLog> logs;  // filled only when requested
};

struct BatchOptions {
  int workers = 1;
  bool keep_logs = false;
};

/// Runs the spec's episodes on a worker pool. Episode i always uses seed
/// master_seed + i, so results do not depend on the worker count.
BatchResult run_batch(const ExperimentSpec& spec, const BatchOptions& options = {});

std::vector<MetricsRow> vision_sweep(const ExperimentSpec& base, std::span<const int> radii,
                                     const BatchOptions& options = {});

struct TruncationCurve {
  double d = 0.0;
  std::vector<int> alive;         // episodes still acting at time t
  std::vector<int> hits;          // of those, how many sampled the true strategy
  std::vector<double> proportion; // hits / alive (NaN when none alive)
};

/// Per-time proportion of decisions that sampled the true strategy, one
/// curve per truncation coefficient. The truth must belong to the class.
std::vector<TruncationCurve> truncation_trace(const ExperimentSpec& spec, std::span<const double> d_values,
                                              const BatchOptions& options = {});

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
void write_trace_csv(std::ostream& out, std::span<const TruncationCurve> curves);
void write_records_jsonl(std::ostream& out, const std::string& label, std::span<const EpisodeRecord> records);

}  // namespace pursuit

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Tolerances are fixed below; the bundled experiment files supply every
// other setting.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "filter_oracle.hpp"
#include "pursuit/experiments.hpp"
#include "pursuit/io.hpp"
#include "support.hpp"

using namespace pursuit;

namespace {

// Pinned tolerances.
constexpr double kFilterTolerance = 1e-12;
constexpr int kFilterTrials = 3000;
constexpr double kFilterSeconds = 60.0;

constexpr int kExpAEpisodes = 500;
constexpr double kExpAC1Low = 0.64, kExpAC1High = 0.80;
constexpr double kExpATLow = 10.3, kExpATHigh = 11.9;
constexpr double kExpASeconds = 60.0;

constexpr int kExp1Episodes = 100;
constexpr double kExp1C1Min = 0.97;
constexpr double kExp1TLow = 9.5, kExp1THigh = 11.0;
constexpr double kExp1C2Min = 0.85;

constexpr int kLookaheadEpisodes = 200;
constexpr double kLookaheadSlack = 0.03;

constexpr int kVisionEpisodes = 200;
constexpr double kVisionGap = 0.10;

constexpr int kTruncationEpisodes = 500;
constexpr double kTruncationD = 0.9;
constexpr int kTruncationFrom = 15;
constexpr double kTruncationLevel = 0.9;
constexpr double kTruncationBand = 0.02;
constexpr int kTruncationMinAlive = 30;  // points backed by fewer episodes are not judged

constexpr int kC2Episodes = 200;

constexpr int kPacmanEpisodes = 50;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string source(const std::string& relative) { return std::string(PURSUIT_SOURCE_DIR) + "/" + relative; }

ExperimentSpec spec_from(const std::string& file, const std::string& label, int episodes) {
  for (auto& s : load_experiments(source(file))) {
    if (s.label != label) continue;
    s.episodes = episodes;
    return s;
  }
  throw std::runtime_error("no experiment '" + label + "' in " + file);
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  write_metrics_csv(os, rows);
  return os.str();
}

std::string batch_csv(const BatchResult& b) {
  std::ostringstream os;
  write_metrics_csv(os, std::span<const MetricsRow>(&b.metrics, 1));
  write_records_jsonl(os, b.metrics.label, b.records);
  return os.str();
}

std::string trace_csv(const std::vector<TruncationCurve>& curves) {
  std::ostringstream os;
  write_trace_csv(os, curves);
  return os.str();
}

std::string fmt_t(const MetricsRow& r) { return fmt::format("{:.2f} ± {:.2f}", r.t_mean, r.t_stderr); }

struct Report {
  int failures = 0;

  void line(bool pass, const std::string& name, const std::string& detail) {
    failures += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  }
};

// A batch whose output text must be reproduced by a second run.
struct Rerun {
  std::string name;
  std::string first;
  std::function<std::string()> again;
};

}  // namespace

int main() {
  Report report;
  std::vector<Rerun> reruns;
  const BatchOptions serial{.workers = 1};
  const BatchOptions pooled{.workers = 2};

  {
    const auto start = Clock::now();
    const auto r = testing_support::compare_filter_with_enumeration(kFilterTrials, 2024);
    const double secs = seconds_since(start);
    report.line(r.max_error <= kFilterTolerance && r.alive_mismatches == 0 && secs < kFilterSeconds,
                "filter-exactness",
                fmt::format("{} instances, {} ticks, horizon ≤ {}, B ≤ {}; max |error| {:.2e} (≤ {:.0e}), "
                            "support mismatches {}, {:.1f} s",
                            r.instances, r.ticks, r.longest, r.largest_class, r.max_error, kFilterTolerance,
                            r.alive_mismatches, secs));
  }

  {
    int ticks = 0, differences = 0;
    for (std::uint64_t seed : {17, 18, 19, 20, 21}) {
      const auto r = testing_support::filter_independent_of_pursuer_policy(seed);
      ticks += r.ticks;
      differences += r.differences;
    }
    report.line(differences == 0 && ticks > 0, "policy-independent-beliefs",
                fmt::format("{} ticks replayed through two planners and a bare filter, {} bitwise differences",
                            ticks, differences));
  }

  {
    const auto spec = spec_from("experiments/table2_m10.json", "A", kExpAEpisodes);
    const auto start = Clock::now();
    const auto b = run_batch(spec, serial);
    const double secs = seconds_since(start);
    const auto& m = b.metrics;
    report.line(m.c1 >= kExpAC1Low && m.c1 <= kExpAC1High && m.t_mean >= kExpATLow && m.t_mean <= kExpATHigh &&
                    secs < kExpASeconds,
                "experiment-A",
                fmt::format("C1 {:.3f} in [{}, {}], T {} in [{}, {}], {:.2f} s (< {} s)", m.c1, kExpAC1Low,
                            kExpAC1High, fmt_t(m), kExpATLow, kExpATHigh, secs, kExpASeconds));
    reruns.push_back({"experiment-A", batch_csv(b), [=] { return batch_csv(run_batch(spec, pooled)); }});
  }

  {
    const auto spec = spec_from("experiments/table2_m10.json", "1", kExp1Episodes);
    const auto start = Clock::now();
    const auto b = run_batch(spec, serial);
    const double secs = seconds_since(start);
    const auto& m = b.metrics;
    report.line(m.c1 >= kExp1C1Min && m.t_mean >= kExp1TLow && m.t_mean <= kExp1THigh && m.c2 >= kExp1C2Min,
                "experiment-1",
                fmt::format("C1 {:.3f} (≥ {}), T {} in [{}, {}], C2 {:.3f} (≥ {}), s={}, {:.0f} s", m.c1,
                            kExp1C1Min, fmt_t(m), kExp1TLow, kExp1THigh, m.c2, kExp1C2Min,
                            spec.planner.rollouts_per_path, secs));
    reruns.push_back({"experiment-1", batch_csv(b), [=] { return batch_csv(run_batch(spec, pooled)); }});
  }

  {
    std::vector<MetricsRow> rows;
    for (const char* label : {"2", "3", "4"}) {
      const auto spec = spec_from("experiments/table2_m10.json", label, kLookaheadEpisodes);
      const auto b = run_batch(spec, serial);
      rows.push_back(b.metrics);
      reruns.push_back({fmt::format("lookahead-{}", label), batch_csv(b),
                        [=] { return batch_csv(run_batch(spec, pooled)); }});
    }
    const double n0 = rows[0].c1, n1 = rows[1].c1, n2 = rows[2].c1;
    report.line(n2 >= n1 && n1 >= n0 - kLookaheadSlack, "lookahead-ordering",
                fmt::format("C1 n=0 {:.3f}, n=1 {:.3f}, n=2 {:.3f}; need n2 ≥ n1 ≥ n0 − {} (T {} / {} / {})", n0,
                            n1, n2, kLookaheadSlack, fmt_t(rows[0]), fmt_t(rows[1]), fmt_t(rows[2])));
  }

  {
    const auto spec = spec_from("experiments/table1_vision.json", "vision", kVisionEpisodes);
    const std::vector<int> radii{1, 2};
    const auto rows = vision_sweep(spec, radii, serial);
    const double gap = rows[1].c1 - rows[0].c1;
    report.line(gap >= kVisionGap && rows[1].t_mean < rows[0].t_mean, "vision-sweep",
                fmt::format("C1 v=1 {:.3f}, v=2 {:.3f}, gap {:+.3f} (≥ {}); T v=1 {}, v=2 {}", rows[0].c1,
                            rows[1].c1, gap, kVisionGap, fmt_t(rows[0]), fmt_t(rows[1])));
    reruns.push_back({"vision-sweep", metrics_csv(rows),
                      [=] { return metrics_csv(vision_sweep(spec, radii, pooled)); }});
  }

  {
    const auto spec = spec_from("experiments/fig3_truncation.json", "fig3-left", kTruncationEpisodes);
    const std::vector<double> ds{kTruncationD};
    const auto curves = truncation_trace(spec, ds, serial);
    const auto& c = curves.front();
    int judged = 0, below = 0, drops = 0;
    double lowest = 1.0, worst_drop = 0.0;
    std::optional<double> previous;
    for (std::size_t t = 0; t < c.proportion.size(); ++t) {
      if (c.alive[t] < kTruncationMinAlive) break;
      if (previous && *previous - c.proportion[t] > kTruncationBand) ++drops;
      if (previous) worst_drop = std::max(worst_drop, *previous - c.proportion[t]);
      previous = c.proportion[t];
      if (static_cast<int>(t) >= kTruncationFrom) {
        ++judged;
        lowest = std::min(lowest, c.proportion[t]);
        below += !(c.proportion[t] > kTruncationLevel);
      }
    }
    std::string curve;
    for (std::size_t t = 0; t < c.proportion.size() && c.alive[t] >= kTruncationMinAlive; t += 5)
      curve += fmt::format(" t{}={:.2f}", t, c.proportion[t]);
    report.line(judged > 0 && below == 0 && drops == 0, "truncation-concentration",
                fmt::format("d={}: {} points with t ≥ {} (alive ≥ {}), {} at or below {}, lowest {:.3f}; "
                            "{} drops beyond {} (worst {:.3f});{}",
                            kTruncationD, judged, kTruncationFrom, kTruncationMinAlive, below, kTruncationLevel,
                            lowest, drops, kTruncationBand, worst_drop, curve));
    reruns.push_back({"truncation-trace", trace_csv(curves),
                      [=] { return trace_csv(truncation_trace(spec, ds, pooled)); }});
  }

  {
    // Random 5×5 episodes: one or two pursuers, random starts, both agent kinds.
    Rng rng(77);
    int agree = 0, captured = 0;
    for (int i = 0; i < kC2Episodes; ++i) {
      ExperimentSpec spec;
      spec.game.graph = std::make_shared<const Graph>(build_grid(5));
      const Graph& g = *spec.game.graph;
      const auto pick = [&] { return static_cast<NodeId>(rng.index(25)); };
      const int k = 1 + static_cast<int>(rng.index(2));
      const NodeId goal = pick();
      spec.truth = EvaderStrategy::drift_walk(goal, 0.25 * static_cast<double>(rng.index(4)));
      spec.game.goal_set = {goal};
      do {
        spec.game.pursuer_starts.clear();
        for (int j = 0; j < k; ++j) spec.game.pursuer_starts.push_back(pick());
        spec.game.evader_start = pick();
      } while (spec.game.evader_start == goal || within_capture(g, spec.game.pursuer_starts, spec.game.evader_start));
      spec.game.vision_radius = static_cast<int>(rng.index(3));
      spec.game.informant.reading = ExponentialReading::kRate;
      spec.game.max_steps = 60;
      spec.agent = i % 2 ? AgentKind::kThompson : AgentKind::kBenchmark;
      spec.strategies = StrategyClass::uniform({spec.truth, EvaderStrategy::drift_walk(pick(), 0.5)});
      spec.planner.lookahead = 0;
      spec.validate();
      auto agent = spec.make_agent();
      const StrategyPolicy evader(spec.truth);
      const auto log = run_episode(spec.game, *agent, evader, 900 + static_cast<std::uint64_t>(i));
      const auto starts = log.pursuer_starts();
      const auto traj = log.evader_trajectory();
      const int brute = testing_support::brute_force_capture_time(g, starts, traj);
      bool ok = shortest_capture_time(g, starts, traj) == brute;
      if (log.captured()) {
        ++captured;
        ok = ok && shortest_capture_oracle(g, log) == (brute == log.duration);
      }
      agree += ok;
    }
    report.line(agree == kC2Episodes, "shortest-capture-oracle",
                fmt::format("{}/{} episodes agree with joint-path search ({} captured)", agree, kC2Episodes,
                            captured));
  }

  {
    const auto tts_spec = spec_from("experiments/pacman.json", "pacman-tts", kPacmanEpisodes);
    const auto bench_spec = spec_from("experiments/pacman.json", "pacman-benchmark", kPacmanEpisodes);
    const auto tts = run_batch(tts_spec, serial);
    const auto bench = run_batch(bench_spec, serial);
    const auto& a = tts.metrics;
    const auto& b = bench.metrics;
    report.line(a.t_mean <= b.t_mean + b.t_stderr, "pacman-capture-time",
                fmt::format("TTS T {} (C1 {:.2f}, score {:.0f}) vs benchmark T {} (C1 {:.2f}, score {:.0f})",
                            fmt_t(a), a.c1, a.score_mean.value_or(0.0), fmt_t(b), b.c1,
                            b.score_mean.value_or(0.0)));
    reruns.push_back({"pacman-tts", batch_csv(tts), [=] { return batch_csv(run_batch(tts_spec, pooled)); }});
    reruns.push_back({"pacman-benchmark", batch_csv(bench), [=] { return batch_csv(run_batch(bench_spec, pooled)); }});
  }

  {
    // Second runs use two workers, so this also covers scheduling order.
    std::vector<std::string> differing;
    for (const auto& r : reruns)
      if (r.again() != r.first) differing.push_back(r.name);
    std::string names;
    for (const auto& n : differing) names += " " + n;
    report.line(differing.empty(), "determinism",
                fmt::format("{} batches re-run with the same seeds; {} differ{}", reruns.size(), differing.size(),
                            names));
  }

  std::cout << fmt::format("{} of 10 criteria failed", report.failures) << std::endl;
  return report.failures == 0 ? 0 : 1;
}

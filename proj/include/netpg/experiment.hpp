#pragma once

// Running configured experiments: single runs with CSV/snapshot output and
// multi-seed batches with convergence summaries.

#include <algorithm>
#include <atomic>
#include <deque>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "netpg/config_io.hpp"
#include "netpg/metrics.hpp"
#include "netpg/simulator.hpp"

namespace netpg {

struct ExperimentResult {
  RunResult run;
  MetricsRow last_row;
  std::int64_t rows = 0;
  std::vector<double> final_probabilities;
};

// Relative output paths resolve against $NETPG_OUTPUT_DIR when it is set.
inline std::string resolve_output_path(const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  if (const char* dir = std::getenv("NETPG_OUTPUT_DIR"); dir && *dir) return (std::filesystem::path(dir) / p).string();
  return path;
}

inline void write_theta_snapshot(const Topology& t, const std::vector<ParamTable>& tables, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write parameter snapshot");
  out << theta_snapshot(t, tables).dump(2) << '\n';
}

// Runs cfg, writing metrics rows to `csv` (or to cfg.output.csv when csv is
// null and a path is configured) and the final snapshot to cfg.output.theta.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* csv = nullptr,
                                       const TickObserver& extra = {}) {
  std::ofstream file;
  if (!csv && !cfg.output.csv.empty()) {
    const std::string path = resolve_output_path(cfg.output.csv);
    file.open(path);
    if (!file) throw Error(path + ": cannot write metrics CSV");
    csv = &file;
  }
  MetricsRecorder recorder(cfg, csv);
  ExperimentResult result;
  result.run = run(cfg, [&](const TickStats& s, const Simulator& sim) {
    recorder.observe(s, sim);
    if (extra) extra(s, sim);
  });
  result.rows = recorder.rows();
  result.last_row = recorder.last_row();
  for (const TrackedProbability& tp : cfg.tracked)
    result.final_probabilities.push_back(action_probabilities(result.run.tables.at(tp.router.index()), tp.destination).probs.at(tp.slot));
  if (csv) csv->flush();
  if (file.is_open() && !file) throw Error(cfg.output.csv + ": write failed");
  if (!cfg.output.theta.empty()) write_theta_snapshot(cfg.topology, result.run.tables, resolve_output_path(cfg.output.theta));
  return result;
}

struct BatchOptions {
  // Convergence threshold on the sliding mean of the per-tick underlying
  // reward; ticks-to-threshold is reported only when set.
  std::optional<double> threshold;
  std::int64_t threshold_window = 10'000;
  // Trailing window for the final reward/probability means.
  std::int64_t final_window = 100'000;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct SeedResult {
  std::uint64_t seed = 0;
  double running_mean = 0.0;
  double final_mean_reward = 0.0;
  double final_mean_underlying = 0.0;
  std::vector<double> final_mean_probabilities;
  std::optional<std::int64_t> ticks_to_threshold;
  CumulativeStats cumulative;
};

struct BatchSummary {
  std::vector<SeedResult> runs;
  std::optional<double> median_ticks_to_threshold;  // nullopt: median run never reached it
  double mean_final_reward = 0.0;
};

// Sliding mean over per-tick values with an O(1) update. Used for
// ticks-to-threshold, where bit-exact reproduction offline is not needed.
class TickWindow {
 public:
  explicit TickWindow(std::int64_t size) : size_(size) {}

  void push(double v) {
    values_.push_back(v);
    sum_ += v;
    if (static_cast<std::int64_t>(values_.size()) > size_) {
      sum_ -= values_.front();
      values_.pop_front();
    }
  }

  bool full() const { return static_cast<std::int64_t>(values_.size()) == size_; }
  double mean() const { return values_.empty() ? 0.0 : sum_ / static_cast<double>(values_.size()); }

 private:
  std::int64_t size_;
  std::deque<double> values_;
  long double sum_ = 0.0;
};

inline SeedResult run_seed(ExperimentConfig cfg, std::uint64_t seed, const BatchOptions& opt) {
  cfg.seed = seed;
  cfg.output = {};
  SeedResult r;
  r.seed = seed;
  TickWindow window(opt.threshold_window);
  const std::int64_t final_start = std::max<std::int64_t>(0, cfg.steps - opt.final_window);
  double final_total = 0.0, final_underlying = 0.0;
  std::vector<double> final_probs(cfg.tracked.size(), 0.0);

  RunResult run_result = run(cfg, [&](const TickStats& s, const Simulator& sim) {
    if (opt.threshold && !r.ticks_to_threshold) {
      window.push(s.reward.underlying);
      if (window.full() && window.mean() >= *opt.threshold) r.ticks_to_threshold = s.tick + 1;
    }
    if (s.tick >= final_start) {
      final_total += s.reward.total;
      final_underlying += s.reward.underlying;
      for (std::size_t i = 0; i < cfg.tracked.size(); ++i) final_probs[i] += sim.probability(cfg.tracked[i]);
    }
  });
  const double n = static_cast<double>(std::max<std::int64_t>(1, cfg.steps - final_start));
  r.running_mean = run_result.average.mean();
  r.final_mean_reward = final_total / n;
  r.final_mean_underlying = final_underlying / n;
  for (double& p : final_probs) p /= n;
  r.final_mean_probabilities = final_probs;
  r.cumulative = run_result.cumulative;
  return r;
}

inline std::optional<double> median_ticks(std::vector<std::optional<std::int64_t>> ticks) {
  constexpr double kNever = std::numeric_limits<double>::infinity();
  std::vector<double> v;
  for (const auto& t : ticks) v.push_back(t ? static_cast<double>(*t) : kNever);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double m = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  if (m == kNever) return std::nullopt;
  return m;
}

// One simulation per seed, spread over worker threads; simulations share no
// mutable state.
inline BatchSummary batch(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                          const BatchOptions& opt = {}) {
  if (seeds.empty()) throw Error("batch: at least one seed is required");
  require_valid(cfg);
  unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(seeds.size()));

  BatchSummary summary;
  summary.runs.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < seeds.size(); i = next++) summary.runs[i] = run_seed(cfg, seeds[i], opt);
    }));
  }
  for (auto& f : pool) f.get();

  std::vector<std::optional<std::int64_t>> ticks;
  double total = 0.0;
  for (const SeedResult& r : summary.runs) {
    ticks.push_back(r.ticks_to_threshold);
    total += r.final_mean_reward;
  }
  if (opt.threshold) summary.median_ticks_to_threshold = median_ticks(ticks);
  summary.mean_final_reward = total / static_cast<double>(summary.runs.size());
  return summary;
}

}  // namespace netpg

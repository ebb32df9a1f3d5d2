#pragma once

// Sampled metric rows and their CSV encoding.
//
// Header: tick,reward_total,reward_underlying,reward_shaping,reward_ma,
//         running_mean,<p[R->L|dest=Y] ...>,delivered,dropped,cycles
//
// A row is emitted after every `sample_every` ticks and after the last tick.
// The reward_* columns are means over the ticks since the previous row;
// reward_ma is the mean of the last `ma_window` emitted reward_total values;
// running_mean is the mean of every tick reward so far; the counters are
// cumulative.

#include <charconv>
#include <cstdint>
#include <deque>
#include <ostream>
#include <string>
#include <vector>

#include "netpg/experiment_config.hpp"
#include "netpg/simulator.hpp"

namespace netpg {

struct MetricsRow {
  std::int64_t tick = 0;
  double reward_total = 0.0;
  double reward_underlying = 0.0;
  double reward_shaping = 0.0;
  double reward_ma = 0.0;
  double running_mean = 0.0;
  std::vector<double> probabilities;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  std::int64_t cycles = 0;
};

// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline std::string probability_column(const Topology& t, const TrackedProbability& tp) {
  auto out = outgoing_links(t, tp.router);
  const Link& link = out.at(tp.slot);
  std::string name = "p[" + t.label(tp.router) + "->" + t.label(link.to);
  int parallel = 0;
  for (const Link& l : out) parallel += l.to == link.to;
  if (parallel > 1) name += "#" + std::to_string(tp.slot);
  return name + "|dest=" + t.label(tp.destination) + "]";
}

inline std::vector<std::string> csv_columns(const ExperimentConfig& cfg) {
  std::vector<std::string> cols{"tick",      "reward_total", "reward_underlying", "reward_shaping",
                                "reward_ma", "running_mean"};
  for (const TrackedProbability& tp : cfg.tracked) cols.push_back(probability_column(cfg.topology, tp));
  for (const char* c : {"delivered", "dropped", "cycles"}) cols.emplace_back(c);
  return cols;
}

inline void write_csv_header(std::ostream& out, const ExperimentConfig& cfg) {
  auto cols = csv_columns(cfg);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

inline void write_csv_row(std::ostream& out, const MetricsRow& row) {
  out << row.tick << ',' << format_double(row.reward_total) << ',' << format_double(row.reward_underlying) << ','
      << format_double(row.reward_shaping) << ',' << format_double(row.reward_ma) << ','
      << format_double(row.running_mean);
  for (double p : row.probabilities) out << ',' << format_double(p);
  out << ',' << row.delivered << ',' << row.dropped << ',' << row.cycles << '\n';
}

// Mean of the last `window` values pushed. Summed front to back on every
// query so an offline recomputation over the same values agrees bit for bit.
class SlidingMean {
 public:
  explicit SlidingMean(std::size_t window) : window_(window) {}

  void push(double v) {
    values_.push_back(v);
    if (values_.size() > window_) values_.pop_front();
  }

  double mean() const {
    if (values_.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
  }

  std::size_t size() const { return values_.size(); }

 private:
  std::size_t window_;
  std::deque<double> values_;
};

// Tick observer that turns TickStats into MetricsRows.
class MetricsRecorder {
 public:
  MetricsRecorder(const ExperimentConfig& cfg, std::ostream* csv)
      : cfg_(cfg), csv_(csv), ma_(static_cast<std::size_t>(cfg.ma_window)), interval_(cfg.sampling_interval()) {
    if (csv_) write_csv_header(*csv_, cfg_);
  }

  void observe(const TickStats& s, const Simulator& sim) {
    sum_total_ += s.reward.total;
    sum_underlying_ += s.reward.underlying;
    sum_shaping_ += s.reward.shaping;
    ++pending_ticks_;
    const bool last = sim.ticks_done() == cfg_.steps;
    if (sim.ticks_done() % interval_ != 0 && !last) return;

    MetricsRow row;
    row.tick = s.tick;
    const double n = static_cast<double>(pending_ticks_);
    row.reward_total = sum_total_ / n;
    row.reward_underlying = sum_underlying_ / n;
    row.reward_shaping = sum_shaping_ / n;
    ma_.push(row.reward_total);
    row.reward_ma = ma_.mean();
    row.running_mean = sim.running_average().mean();
    for (const TrackedProbability& tp : cfg_.tracked) row.probabilities.push_back(sim.probability(tp));
    row.delivered = sim.cumulative().delivered;
    row.dropped = sim.cumulative().dropped;
    row.cycles = sim.cumulative().cycles_detected;

    if (csv_) write_csv_row(*csv_, row);
    last_ = row;
    ++rows_;
    sum_total_ = sum_underlying_ = sum_shaping_ = 0.0;
    pending_ticks_ = 0;
  }

  std::int64_t rows() const { return rows_; }
  const MetricsRow& last_row() const { return last_; }

 private:
  const ExperimentConfig& cfg_;
  std::ostream* csv_;
  SlidingMean ma_;
  std::int64_t interval_;
  double sum_total_ = 0.0, sum_underlying_ = 0.0, sum_shaping_ = 0.0;
  std::int64_t pending_ticks_ = 0;
  std::int64_t rows_ = 0;
  MetricsRow last_;
};

}  // namespace netpg

// netpg: run routing experiments, batches and oracles from the command line.
//
//   netpg run <config.json>
//   netpg preset <name> [--steps N] [--seed S] [--beta B] [--gamma G] [--out CSV]
//   netpg batch <config.json | preset:NAME> --seeds 1,2,3 [--threshold X]
//   netpg oracle <name> [params]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netpg/netpg.hpp"

namespace {

using namespace netpg;

void print_summary(const ExperimentConfig& cfg, const ExperimentResult& r) {
  std::printf("experiment      %s\n", cfg.name.empty() ? "(unnamed)" : cfg.name.c_str());
  std::printf("ticks           %lld\n", static_cast<long long>(r.run.ticks));
  std::printf("running mean    %s\n", format_double(r.run.average.mean()).c_str());
  std::printf("reward ma       %s\n", format_double(r.last_row.reward_ma).c_str());
  std::printf("generated       %lld\n", static_cast<long long>(r.run.cumulative.generated));
  std::printf("delivered       %lld\n", static_cast<long long>(r.run.cumulative.delivered));
  std::printf("dropped         %lld\n", static_cast<long long>(r.run.cumulative.dropped));
  std::printf("cycles          %lld\n", static_cast<long long>(r.run.cumulative.cycles_detected));
  for (std::size_t i = 0; i < cfg.tracked.size(); ++i)
    std::printf("%-15s %s\n", probability_column(cfg.topology, cfg.tracked[i]).c_str(),
                format_double(r.final_probabilities[i]).c_str());
}

int run_and_report(const ExperimentConfig& cfg) {
  require_valid(cfg);
  ExperimentResult r = run_experiment(cfg, cfg.output.csv.empty() ? &std::cout : nullptr);
  if (!cfg.output.csv.empty()) print_summary(cfg, r);
  return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("bad seed '" + item + "'");
    }
  }
  return seeds;
}

ExperimentConfig config_or_preset(const std::string& ref) {
  constexpr std::string_view kPrefix = "preset:";
  if (ref.starts_with(kPrefix)) return preset(ref.substr(kPrefix.size()));
  return load_config(ref);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent policy-gradient packet routing simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config file");
  std::string config_path;
  run_cmd->add_option("config", config_path, "Config file")->required();

  // preset
  auto* preset_cmd = app.add_subcommand("preset", "Run (or dump) one of the built-in experiments");
  std::string preset_name;
  std::optional<std::int64_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<double> beta, gamma;
  std::optional<int> sample_every;
  std::string out_csv, out_theta;
  bool per_tick = false, dump_config = false;
  preset_cmd->add_option("name", preset_name, "triangle | contention | six_node | braess1")->required();
  preset_cmd->add_option("--steps", steps, "Number of ticks");
  preset_cmd->add_option("--seed", seed, "Random seed");
  preset_cmd->add_option("--beta", beta, "Trace discount");
  preset_cmd->add_option("--gamma", gamma, "Step size");
  preset_cmd->add_option("--sample-every", sample_every, "Ticks per metrics row");
  preset_cmd->add_flag("--per-tick", per_tick, "Emit a metrics row every tick");
  preset_cmd->add_option("--out", out_csv, "Metrics CSV path (default: stdout)");
  preset_cmd->add_option("--theta-out", out_theta, "Final parameter snapshot path");
  preset_cmd->add_flag("--dump-config", dump_config, "Print the preset as a config file and exit");

  // batch
  auto* batch_cmd = app.add_subcommand("batch", "Run one config over several seeds");
  std::string batch_ref, seeds_text;
  std::optional<double> threshold;
  std::int64_t threshold_window = 10'000, final_window = 100'000;
  std::optional<std::int64_t> batch_steps;
  std::optional<double> batch_gamma, batch_beta;
  batch_cmd->add_option("config", batch_ref, "Config file or preset:NAME")->required();
  batch_cmd->add_option("--seeds", seeds_text, "Comma-separated seeds")->required();
  batch_cmd->add_option("--steps", batch_steps, "Override the number of ticks");
  batch_cmd->add_option("--gamma", batch_gamma, "Override the step size");
  batch_cmd->add_option("--beta", batch_beta, "Override the trace discount");
  batch_cmd->add_option("--threshold", threshold, "Underlying-reward level for ticks-to-threshold");
  batch_cmd->add_option("--threshold-window", threshold_window, "Sliding window (ticks) for the threshold test");
  batch_cmd->add_option("--final-window", final_window, "Trailing window (ticks) for final means");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate an exact reference value");
  oracle_cmd->require_subcommand(1);
  double p = 0.25, d = 21.0, p_left = 0.5, p_ef = 1.0;
  int ac_delay = 3;
  std::int64_t left = 3, right = 3, bridge = 0;
  auto* o_cr = oracle_cmd->add_subcommand("contention-reward", "Expected contention reward at top-link probability p");
  o_cr->add_option("--p", p);
  o_cr->add_option("--d", d);
  auto* o_co = oracle_cmd->add_subcommand("contention-optimal", "Optimal top-link probability for drop penalty d");
  o_co->add_option("--d", d);
  auto* o_be = oracle_cmd->add_subcommand("braess-expected", "Expected per-packet cost of a stochastic Braess policy");
  o_be->add_option("--p-left", p_left);
  o_be->add_option("--p-ef", p_ef);
  auto* o_bf = oracle_cmd->add_subcommand("braess-flows", "Per-packet cost of deterministic path flows");
  o_bf->add_option("--left", left, "Packets on ACDB");
  o_bf->add_option("--right", right, "Packets on AEFB");
  o_bf->add_option("--bridge", bridge, "Packets on AEGDB (0 evaluates the network without G)");
  auto* o_tri = oracle_cmd->add_subcommand("triangle-optimal", "Optimal reward per tick on the triangle network");
  o_tri->add_option("--ac-delay", ac_delay);
  auto* o_opt = oracle_cmd->add_subcommand("optimal-reward", "Shortest-path reward per tick for a link-delay config");
  std::string oracle_config;
  o_opt->add_option("config", oracle_config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_and_report(load_config(config_path));

    if (*preset_cmd) {
      ExperimentConfig cfg = preset(preset_name);
      if (steps) cfg.steps = *steps;
      if (seed) cfg.seed = *seed;
      if (beta) cfg.learner.beta = *beta;
      if (gamma) cfg.learner.gamma = *gamma;
      if (sample_every) cfg.sample_every = *sample_every;
      cfg.per_tick = per_tick;
      cfg.output.csv = out_csv;
      cfg.output.theta = out_theta;
      if (dump_config) {
        require_valid(cfg);
        std::cout << config_to_json(cfg).dump(2) << '\n';
        return 0;
      }
      return run_and_report(cfg);
    }

    if (*batch_cmd) {
      ExperimentConfig cfg = config_or_preset(batch_ref);
      if (batch_steps) cfg.steps = *batch_steps;
      if (batch_gamma) cfg.learner.gamma = *batch_gamma;
      if (batch_beta) cfg.learner.beta = *batch_beta;
      BatchOptions opt;
      opt.threshold = threshold;
      opt.threshold_window = threshold_window;
      opt.final_window = final_window;
      BatchSummary summary = batch(cfg, parse_seeds(seeds_text), opt);
      std::printf("seed,running_mean,final_mean_reward,final_mean_underlying,ticks_to_threshold");
      for (const auto& tp : cfg.tracked) std::printf(",%s", probability_column(cfg.topology, tp).c_str());
      std::printf("\n");
      for (const SeedResult& r : summary.runs) {
        std::printf("%llu,%s,%s,%s,%s", static_cast<unsigned long long>(r.seed), format_double(r.running_mean).c_str(),
                    format_double(r.final_mean_reward).c_str(), format_double(r.final_mean_underlying).c_str(),
                    r.ticks_to_threshold ? std::to_string(*r.ticks_to_threshold).c_str() : "");
        for (double v : r.final_mean_probabilities) std::printf(",%s", format_double(v).c_str());
        std::printf("\n");
      }
      std::printf("# mean_final_reward %s\n", format_double(summary.mean_final_reward).c_str());
      if (threshold)
        std::printf("# median_ticks_to_threshold %s\n",
                    summary.median_ticks_to_threshold ? format_double(*summary.median_ticks_to_threshold).c_str()
                                                      : "not reached");
      return 0;
    }

    if (*oracle_cmd) {
      if (*o_cr) std::printf("%s\n", format_double(oracles::contention_expected_reward(p, d)).c_str());
      if (*o_co) std::printf("%s\n", format_double(oracles::contention_optimal_p(d)).c_str());
      if (*o_be) std::printf("%s\n", format_double(oracles::braess_expected_cost(p_left, p_ef)).c_str());
      if (*o_bf) {
        const Topology t = bridge > 0 ? braess1_network() : braess0_network();
        auto paths = oracles::braess_paths(t);
        std::vector<std::pair<oracles::Path, std::int64_t>> flows{{paths.left, left}, {paths.right, right}};
        if (bridge > 0) flows.push_back({paths.bridge, bridge});
        std::printf("%s\n", format_double(oracles::braess_cost_for_flows(t, flows)).c_str());
      }
      if (*o_tri) std::printf("%s\n", format_double(oracles::triangle_optimal_average_reward(ac_delay)).c_str());
      if (*o_opt) {
        ExperimentConfig cfg = config_or_preset(oracle_config);
        std::printf("%s\n", format_double(oracles::optimal_average_reward(cfg.topology, cfg.traffic)).c_str());
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "netpg: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

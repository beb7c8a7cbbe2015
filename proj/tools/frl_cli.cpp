// frl: run and compare fuzzy RL auto-scaling controllers on the simulator.

#include "frl/experiment.hpp"
#include "frl/io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Experiment JSON config (defaults used when omitted)");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed (overrides the config)");
  cmd->add_option("--horizon", f.horizon, "Number of control intervals (overrides the config)");
}

frl::Json read_json(const std::string& path) {
  if (path.empty()) return frl::Json::object();
  std::ifstream in(path);
  if (!in) throw frl::IoError("cannot open config " + path);
  try {
    return frl::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
}

// Precedence, lowest first: config file, --seed/--horizon, FRL_SEED.
void apply_overrides(frl::ExperimentConfig& cfg, const CommonFlags& f) {
  if (f.seed) cfg.seed = *f.seed;
  if (f.horizon) cfg.horizon = *f.horizon;
  if (const char* env = std::getenv("FRL_SEED"); env && *env) {
    std::size_t used = 0;
    const std::string text(env);
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("FRL_SEED must be a non-negative integer");
    cfg.seed = v;
  }
}

void print_summary_line(const frl::Summary& s) {
  std::cout << s.controller << ": intervals=" << s.intervals << " mean_rt_s=" << frl::format_number(s.mean_rt_s)
            << " p95_rt_s=" << frl::format_number(s.p95_rt_s)
            << " sla_violation_ratio=" << frl::format_number(s.sla_violation_ratio)
            << " mean_vm_pct=" << frl::format_number(s.mean_vm_pct) << " convergence_step="
            << (s.convergence_step ? std::to_string(*s.convergence_step) : std::string("none"))
            << (s.truncated ? " (trace ended early)" : "") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy SARSA / fuzzy Q-learning auto-scaling experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one controller and write steps.csv, summary.json, rt.dat");
  add_common(run, run_flags);

  CommonFlags cmp_flags;
  auto* compare = app.add_subcommand("compare", "Run the config's \"controllers\" list side by side");
  add_common(compare, cmp_flags);

  std::string trace_out;
  int trace_rows = 144;
  auto* gen = app.add_subcommand("gen-trace-template", "Write an example trace CSV (t,count)");
  gen->add_option("--out", trace_out, "Output file (stdout when omitted)");
  gen->add_option("--rows", trace_rows, "Number of rows")->capture_default_str()->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = frl::config_from_json(read_json(run_flags.config));
      apply_overrides(cfg, run_flags);
      const auto result = frl::run_experiment(cfg);
      frl::emit_outputs(result, run_flags.out);
      print_summary_line(result.summary);
    } else if (*compare) {
      auto cfgs = frl::compare_configs_from_json(read_json(cmp_flags.config));
      for (auto& c : cfgs) apply_overrides(c, cmp_flags);
      const auto cmp = frl::compare_controllers(cfgs);
      frl::emit_comparison(cmp, cmp_flags.out);
      for (const auto& row : cmp.rows) print_summary_line(row.summary);
    } else if (*gen) {
      if (trace_out.empty()) {
        frl::write_trace_template(std::cout, trace_rows);
      } else {
        std::ofstream out(trace_out);
        if (!out) throw frl::IoError("cannot open " + trace_out + " for writing");
        frl::write_trace_template(out, trace_rows);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "frl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

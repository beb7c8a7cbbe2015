#pragma once

// The control loop: workload -> simulator -> reward -> controller, one
// control interval at a time, plus run summaries and controller comparison.

#include "frl/agent.hpp"
#include "frl/cloud_sim.hpp"
#include "frl/fuzzy.hpp"
#include "frl/reward.hpp"
#include "frl/workload.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace frl {

struct ControllerSpec {
  enum class Kind { fsl, fql, fixed };
  Kind kind = Kind::fql;
  int fixed_vms = 0;

  static ControllerSpec fsl() { return {Kind::fsl, 0}; }
  static ControllerSpec fql() { return {Kind::fql, 0}; }
  static ControllerSpec fixed(int n) { return {Kind::fixed, n}; }

  /// "FSL", "FQL" or "fixed(n)".
  static ControllerSpec parse(const std::string& text);
  std::string name() const;
  bool learning() const { return kind != Kind::fixed; }

  bool operator==(const ControllerSpec&) const = default;
};

struct ExperimentConfig {
  PatternSpec pattern;
  AgentConfig agent;
  RewardConfig reward;
  SimParams sim;
  ControllerSpec controller;
  std::optional<FuzzyPartition<double>> workload_partition;
  std::optional<FuzzyPartition<double>> rt_partition;
  int horizon = 2000;
  std::uint64_t seed = 0;
  int warmup = 0;
  int snapshot_interval = 0;

  // Set when the corresponding field was given explicitly rather than
  // derived (pattern seed from the run seed, rt_cap from the SLA, initial
  // group size from the controller).
  bool pattern_seed_set = false;
  bool rt_cap_set = false;
  bool initial_vms_set = false;

  /// Fills derived fields and validates everything; throws
  /// std::invalid_argument on the first problem.
  ExperimentConfig resolved() const;
  FuzzyModel<double> fuzzy_model() const;
};

struct StepRecord {
  std::int64_t t = 0;
  double w = 0.0;
  double rt = 0.0;
  int vm_active = 0;
  int vm_total = 0;
  double action_crisp = 0.0;
  int action_applied = 0;
  double reward = 0.0;
  double epsilon = 0.0;
  double q_delta_max = 0.0;
};

inline constexpr const char* kStepHeader =
    "t,w,rt,vm_active,vm_total,action_crisp,action_applied,reward,epsilon,q_delta_max";

/// Statistics over a contiguous range of intervals.
struct PhaseStats {
  std::int64_t start = 0;
  std::int64_t intervals = 0;
  double mean_rt_s = 0.0;
  double p95_rt_s = 0.0;
  double sla_violation_ratio = 0.0;
  double mean_vm_pct = 0.0;
  double mean_reward = 0.0;
};

struct Summary {
  std::string controller;
  std::int64_t horizon = 0;    // requested
  std::int64_t intervals = 0;  // completed
  bool truncated = false;      // trace ran out first
  std::int64_t warmup = 0;
  double mean_rt_s = 0.0;
  double p95_rt_s = 0.0;
  double sla_violation_ratio = 0.0;
  double mean_vm_pct = 0.0;
  std::map<int, std::int64_t> vm_histogram;
  std::int64_t scale_ups = 0;
  std::int64_t scale_downs = 0;
  double cumulative_reward = 0.0;
  std::optional<std::int64_t> convergence_step;
  std::optional<PhaseStats> post_convergence;
  std::optional<PhaseStats> exploitation;  // from the first interval at the epsilon floor
};

struct ExperimentResult {
  ExperimentConfig config;  // resolved
  std::vector<StepRecord> records;
  Summary summary;
  std::vector<std::pair<std::int64_t, QTable>> snapshots;
  std::optional<QTable> final_qtable;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Statistics over records[from, to), using the run's SLA and group bounds.
PhaseStats phase_stats(const std::vector<StepRecord>& records, std::size_t from, std::size_t to, double sla_rt,
                       int vm_max);

/// Nearest-rank percentile (q in (0, 1]).
double percentile(std::vector<double> values, double q);

struct BaselineDelta {
  std::string baseline;
  double mean_rt_s = 0.0;
  double p95_rt_s = 0.0;
  double sla_violation_ratio = 0.0;
  double mean_vm_pct = 0.0;
};

struct ComparisonRow {
  std::string controller;
  Summary summary;
  std::vector<BaselineDelta> deltas;  // row minus each fixed baseline
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<ExperimentResult> runs;
};

/// Runs every config (in parallel) and tabulates them in input order. All
/// configs must share pattern, sim, reward, horizon and seed.
Comparison compare_controllers(const std::vector<ExperimentConfig>& cfgs);

}  // namespace frl

#include "frl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <regex>
#include <stdexcept>

namespace frl {

ControllerSpec ControllerSpec::parse(const std::string& text) {
  if (text == "FSL" || text == "fsl") return fsl();
  if (text == "FQL" || text == "fql") return fql();
  static const std::regex fixed_re(R"(\s*(?:fixed|VM#)\s*\(?\s*(\d+)\s*\)?\s*)", std::regex::icase);
  std::smatch m;
  if (std::regex_match(text, m, fixed_re)) return fixed(std::stoi(m[1].str()));
  throw std::invalid_argument("controller: expected FSL, FQL or fixed(n), got '" + text + "'");
}

std::string ControllerSpec::name() const {
  switch (kind) {
    case Kind::fsl:
      return "FSL";
    case Kind::fql:
      return "FQL";
    case Kind::fixed:
      return "fixed(" + std::to_string(fixed_vms) + ")";
  }
  return {};
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig out = *this;
  out.reward.validate();
  if (horizon < 1) throw std::invalid_argument("experiment: horizon must be >= 1");
  if (warmup < 0) throw std::invalid_argument("experiment: warmup must be >= 0");
  if (snapshot_interval < 0) throw std::invalid_argument("experiment: snapshot_interval must be >= 0");

  out.sim.vm_min = reward.vm_min;
  out.sim.vm_max = reward.vm_max;
  if (!rt_cap_set) out.sim.rt_cap = 2.0 * reward.sla_rt;
  if (controller.kind == ControllerSpec::Kind::fixed) {
    if (controller.fixed_vms < reward.vm_min || controller.fixed_vms > reward.vm_max) {
      throw std::invalid_argument("controller: fixed(" + std::to_string(controller.fixed_vms) +
                                  ") is outside [vm_min, vm_max]");
    }
    out.sim.initial_vms = controller.fixed_vms;
  } else if (!initial_vms_set) {
    out.sim.initial_vms = reward.vm_min;
  }
  out.sim.validate();

  if (!pattern_seed_set) out.pattern.seed = seed;
  out.pattern.validate();

  out.agent.seed = seed;
  out.agent.mode = controller.kind == ControllerSpec::Kind::fsl ? LearningMode::fsl : LearningMode::fql;
  out.agent.validate();
  (void)out.fuzzy_model();
  return out;
}

FuzzyModel<double> ExperimentConfig::fuzzy_model() const {
  return {workload_partition.value_or(default_workload_partition<double>()),
          rt_partition.value_or(default_response_time_partition<double>(reward.sla_rt)), RuleBase::standard()};
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

PhaseStats phase_stats(const std::vector<StepRecord>& records, std::size_t from, std::size_t to, double sla_rt,
                       int vm_max) {
  PhaseStats s;
  to = std::min(to, records.size());
  s.start = from < records.size() ? records[from].t : static_cast<std::int64_t>(from);
  if (from >= to) return s;
  s.intervals = static_cast<std::int64_t>(to - from);
  std::vector<double> rts;
  rts.reserve(to - from);
  double rt_sum = 0.0, vm_sum = 0.0, reward_sum = 0.0;
  std::int64_t violations = 0;
  for (std::size_t i = from; i < to; ++i) {
    const auto& r = records[i];
    rts.push_back(r.rt);
    rt_sum += r.rt;
    vm_sum += r.vm_active;
    reward_sum += r.reward;
    if (r.rt > sla_rt) ++violations;
  }
  const auto n = static_cast<double>(s.intervals);
  s.mean_rt_s = rt_sum / n;
  s.p95_rt_s = percentile(std::move(rts), 0.95);
  s.sla_violation_ratio = static_cast<double>(violations) / n;
  s.mean_vm_pct = 100.0 * vm_sum / (n * vm_max);
  s.mean_reward = reward_sum / n;
  return s;
}

namespace {

Summary summarize(const ExperimentConfig& cfg, const std::vector<StepRecord>& records, bool truncated,
                  std::optional<std::int64_t> convergence_step) {
  Summary s;
  s.controller = cfg.controller.name();
  s.horizon = cfg.horizon;
  s.intervals = static_cast<std::int64_t>(records.size());
  s.truncated = truncated;
  s.warmup = cfg.warmup;
  s.convergence_step = convergence_step;

  const double sla = cfg.reward.sla_rt;
  const int vm_max = cfg.reward.vm_max;
  const std::size_t from = std::min(records.size(), static_cast<std::size_t>(cfg.warmup));
  const PhaseStats all = phase_stats(records, from, records.size(), sla, vm_max);
  s.mean_rt_s = all.mean_rt_s;
  s.p95_rt_s = all.p95_rt_s;
  s.sla_violation_ratio = all.sla_violation_ratio;
  s.mean_vm_pct = all.mean_vm_pct;

  for (int v = cfg.reward.vm_min; v <= vm_max; ++v) s.vm_histogram[v] = 0;
  for (std::size_t i = from; i < records.size(); ++i) {
    const auto& r = records[i];
    ++s.vm_histogram[r.vm_active];
    if (r.action_applied > 0) s.scale_ups += r.action_applied;
    if (r.action_applied < 0) s.scale_downs -= r.action_applied;
    s.cumulative_reward += r.reward;
  }

  if (convergence_step) {
    const auto start = static_cast<std::size_t>(*convergence_step + 1);
    if (start < records.size()) s.post_convergence = phase_stats(records, start, records.size(), sla, vm_max);
  }
  if (cfg.controller.learning()) {
    const std::int64_t floor_step = epsilon_floor_step(cfg.agent);
    if (floor_step >= 0 && static_cast<std::size_t>(floor_step) < records.size()) {
      s.exploitation = phase_stats(records, static_cast<std::size_t>(floor_step), records.size(), sla, vm_max);
    }
  }
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& raw) {
  ExperimentResult result;
  result.config = raw.resolved();
  const ExperimentConfig& cfg = result.config;

  const Workload workload(cfg.pattern);
  SimulatedCluster cluster(cfg.sim);
  std::optional<Agent> agent;
  if (cfg.controller.learning()) agent.emplace(cfg.agent, cfg.fuzzy_model());
  ConvergenceMonitor monitor(cfg.agent.convergence_delta, cfg.agent.convergence_window);
  std::optional<std::int64_t> convergence_step;

  bool truncated = false;
  result.records.reserve(static_cast<std::size_t>(cfg.horizon));
  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    const auto w = workload.at(t);
    if (!w) {
      truncated = true;
      break;
    }
    // Monitor, then credit the reward for this observation to the action
    // applied in the previous interval, then plan and execute.
    const SystemState obs = cluster.advance(*w);
    StepRecord rec;
    rec.t = t;
    rec.w = obs.w;
    rec.rt = obs.rt;
    rec.vm_active = obs.vm;
    rec.vm_total = cluster.total();
    rec.reward = compute_reward(obs, cfg.reward);

    ScalingAction action{0};
    if (agent) {
      const auto d = agent->step(obs, t == 0 ? std::nullopt : std::optional<double>(rec.reward));
      action = d.action;
      rec.action_crisp = d.crisp;
      rec.epsilon = d.epsilon;
      rec.q_delta_max = d.q_delta_max;
      if (d.updated && monitor.push(d.q_delta_max) && !convergence_step) convergence_step = t;
    }
    rec.action_applied = cluster.scale(action);
    result.records.push_back(rec);

    if (agent && cfg.snapshot_interval > 0 && t > 0 && t % cfg.snapshot_interval == 0) {
      result.snapshots.emplace_back(t, agent->qtable());
    }
  }
  if (agent) result.final_qtable = agent->qtable();
  result.summary = summarize(cfg, result.records, truncated, convergence_step);
  return result;
}

Comparison compare_controllers(const std::vector<ExperimentConfig>& cfgs) {
  if (cfgs.empty()) throw std::invalid_argument("compare: no controllers given");
  const auto& ref = cfgs.front();
  for (std::size_t i = 1; i < cfgs.size(); ++i) {
    const auto& c = cfgs[i];
    auto mismatch = [&](const char* field) {
      throw std::invalid_argument(std::string("compare: field '") + field + "' differs between " +
                                  ref.controller.name() + " and " + c.controller.name());
    };
    if (!(c.pattern == ref.pattern) || c.pattern_seed_set != ref.pattern_seed_set) mismatch("pattern");
    if (!(c.sim == ref.sim) || c.rt_cap_set != ref.rt_cap_set) mismatch("sim");
    if (!(c.reward == ref.reward)) mismatch("reward");
    if (c.horizon != ref.horizon) mismatch("horizon");
    if (c.seed != ref.seed) mismatch("seed");
  }
  // Validate everything before running anything.
  for (const auto& c : cfgs) (void)c.resolved();

  std::vector<std::future<ExperimentResult>> jobs;
  jobs.reserve(cfgs.size());
  for (const auto& c : cfgs) jobs.push_back(std::async(std::launch::async, [&c] { return run_experiment(c); }));

  Comparison out;
  for (auto& j : jobs) out.runs.push_back(j.get());
  for (const auto& run : out.runs) out.rows.push_back({run.summary.controller, run.summary, {}});
  if (out.rows.size() > 1) {
    for (auto& row : out.rows) {
      for (std::size_t b = 0; b < out.runs.size(); ++b) {
        const auto& base = out.runs[b];
        if (base.config.controller.learning() || base.summary.controller == row.controller) continue;
        row.deltas.push_back({base.summary.controller, row.summary.mean_rt_s - base.summary.mean_rt_s,
                              row.summary.p95_rt_s - base.summary.p95_rt_s,
                              row.summary.sla_violation_ratio - base.summary.sla_violation_ratio,
                              row.summary.mean_vm_pct - base.summary.mean_vm_pct});
      }
    }
  }
  return out;
}

}  // namespace frl

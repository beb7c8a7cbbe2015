#pragma once

// Fuzzy SARSA / fuzzy Q-learning over a per-rule q-value table.

#include "frl/fuzzy.hpp"
#include "frl/random.hpp"
#include "frl/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace frl {

enum class LearningMode { fsl, fql };
enum class InitMode { non_expert_zero, expert_table };

struct AgentConfig {
  double eta = 0.1;
  double gamma = 0.8;
  double epsilon0 = 1.0;
  double epsilon_min = 0.2;
  double epsilon_decay_tau = 200.0;
  LearningMode mode = LearningMode::fql;
  InitMode init = InitMode::non_expert_zero;
  double convergence_delta = 1e-3;
  int convergence_window = 50;
  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("agent: " + what); };
    if (!(eta > 0.0 && eta <= 1.0)) fail("eta must be in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must be in [0, 1)");
    if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0)) fail("epsilon0 must be in [0, 1]");
    if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon0)) fail("epsilon_min must be in [0, epsilon0]");
    if (!(epsilon_decay_tau > 0.0)) fail("epsilon_decay_tau must be positive");
    if (!(convergence_delta > 0.0)) fail("convergence_delta must be positive");
    if (convergence_window < 1) fail("convergence_window must be >= 1");
  }
};

/// Hand-crafted prior: designated consequent 1.0, its neighbours 0.25.
template <typename Scalar = double>
QTableT<Scalar> expert_qtable() {
  // Designated delta per rule, rows (low|medium|high) x cols (good|ok|bad).
  constexpr int designated[kSetsPerVariable][kSetsPerVariable] = {
      {-2, -1, +1},
      {-1, 0, +1},
      {0, +1, +2},
  };
  QTableT<Scalar> q = QTableT<Scalar>::Zero();
  for (Index w = 0; w < kSetsPerVariable; ++w) {
    for (Index r = 0; r < kSetsPerVariable; ++r) {
      const Index i = RuleBase::rule_index(w, r);
      const Index k = slot_of(designated[w][r]);
      q(i, k) = Scalar(1);
      if (k > 0) q(i, k - 1) = Scalar(0.25);
      if (k + 1 < kActions) q(i, k + 1) = Scalar(0.25);
    }
  }
  return q;
}

template <typename Scalar = double>
QTableT<Scalar> init_qtable(const AgentConfig& cfg) {
  return cfg.init == InitMode::expert_table ? expert_qtable<Scalar>() : QTableT<Scalar>::Zero();
}

// Slots ordered by preference among equal q-values: smaller |delta| first,
// then the negative one.
inline constexpr std::array<Index, kActions> kTiePreference = {2, 1, 3, 0, 4};

template <typename Derived>
Index greedy_slot(const Eigen::MatrixBase<Derived>& row) {
  Index best = kTiePreference[0];
  for (const Index k : kTiePreference) {
    if (row(k) > row(best)) best = k;
  }
  return best;
}

/// Per-rule epsilon-greedy. Rules with zero firing cannot influence the
/// action or the update; they get the greedy slot without consuming
/// randomness.
template <typename Scalar>
Choices select_partial_actions(const QTableT<Scalar>& q, const FiringT<Scalar>& strengths, double eps, Rng& rng) {
  Choices chosen;
  for (Index i = 0; i < kRules; ++i) {
    if (strengths(i) > Scalar(0) && uniform01(rng) < eps) {
      chosen(i) = uniform_index(rng, kActions);
    } else {
      chosen(i) = greedy_slot(q.row(i));
    }
  }
  return chosen;
}

/// Q(s, a) = sum_i mu_i(s) q[i, a_i].
template <typename Scalar>
Scalar approx_q(const QTableT<Scalar>& q, const FiringT<Scalar>& strengths, const Choices& chosen) {
  Scalar acc(0);
  for (Index i = 0; i < kRules; ++i) acc += strengths(i) * q(i, chosen(i));
  return acc;
}

/// V(s') = sum_i mu_i(s') max_k q[i, k].
template <typename Scalar>
Scalar state_value(const QTableT<Scalar>& q, const FiringT<Scalar>& strengths_next) {
  return strengths_next.dot(q.rowwise().maxCoeff());
}

/// Temporal-difference error. SARSA bootstraps on the next chosen action,
/// Q-learning on the greedy value of the next state.
template <typename Scalar>
Scalar error_signal(LearningMode mode, Scalar r, Scalar q_sa, Scalar q_next_sa, Scalar v_next, Scalar gamma) {
  const Scalar bootstrap = mode == LearningMode::fsl ? q_next_sa : v_next;
  return r + gamma * bootstrap - q_sa;
}

/// q[i, a_i] += eta * dq * mu_i for every firing rule. Returns the largest
/// absolute cell change.
template <typename Scalar>
Scalar update_qtable(QTableT<Scalar>& q, const FiringT<Scalar>& strengths, const Choices& chosen, Scalar dq,
                     Scalar eta) {
  Scalar max_change(0);
  for (Index i = 0; i < kRules; ++i) {
    if (!(strengths(i) > Scalar(0))) continue;
    Scalar& cell = q(i, chosen(i));
    const Scalar before = cell;
    cell += eta * dq * strengths(i);
    max_change = std::max(max_change, Scalar(std::abs(cell - before)));
  }
  return max_change;
}

inline double epsilon_at(std::int64_t step, const AgentConfig& cfg) {
  const double decayed = cfg.epsilon0 * std::exp(-static_cast<double>(step) / cfg.epsilon_decay_tau);
  return std::max(cfg.epsilon_min, decayed);
}

/// First step at which epsilon_at reaches the floor.
inline std::int64_t epsilon_floor_step(const AgentConfig& cfg) {
  if (cfg.epsilon0 <= cfg.epsilon_min) return 0;
  if (cfg.epsilon_min <= 0.0) return -1;
  auto step = static_cast<std::int64_t>(std::floor(cfg.epsilon_decay_tau * std::log(cfg.epsilon0 / cfg.epsilon_min)));
  while (epsilon_at(step, cfg) > cfg.epsilon_min) ++step;
  while (step > 0 && epsilon_at(step - 1, cfg) <= cfg.epsilon_min) --step;
  return step;
}

/// True iff every one of the last `window` consecutive table changes has a
/// max-abs cell difference below `delta`.
template <typename Scalar>
bool check_convergence(std::span<const QTableT<Scalar>> history, double delta, int window) {
  if (window < 1 || history.size() < static_cast<std::size_t>(window) + 1) return false;
  for (std::size_t t = history.size() - static_cast<std::size_t>(window); t < history.size(); ++t) {
    const double change = static_cast<double>((history[t] - history[t - 1]).cwiseAbs().maxCoeff());
    if (!(change < delta)) return false;
  }
  return true;
}

/// Streaming form of check_convergence: feed the max-abs change of each step.
class ConvergenceMonitor {
 public:
  ConvergenceMonitor(double delta, int window) : delta_(delta), window_(window) {}

  /// Returns true while the trailing window is quiet.
  bool push(double max_change) {
    streak_ = max_change < delta_ ? streak_ + 1 : 0;
    return converged();
  }

  bool converged() const { return streak_ >= window_; }
  int streak() const { return streak_; }

 private:
  double delta_;
  int window_;
  int streak_ = 0;
};

/// Outcome of one agent step.
template <typename Scalar>
struct Decision {
  Scalar crisp = Scalar(0);
  ScalingAction action{};
  Choices chosen = Choices::Zero();
  double epsilon = 0.0;
  bool updated = false;
  Scalar td_error = Scalar(0);
  Scalar q_delta_max = Scalar(0);
};

/// One learning controller. Single-owner, stepped sequentially.
template <typename Scalar>
class BasicAgent {
 public:
  BasicAgent(AgentConfig cfg, FuzzyModel<Scalar> model)
      : cfg_(cfg), model_(std::move(model)), q_(init_qtable<Scalar>(cfg)), rng_(cfg.seed) {
    cfg_.validate();
  }

  BasicAgent(AgentConfig cfg, FuzzyModel<Scalar> model, const QTableT<Scalar>& q0)
      : BasicAgent(cfg, std::move(model)) {
    q_ = q0;
  }

  const AgentConfig& config() const { return cfg_; }
  const FuzzyModel<Scalar>& model() const { return model_; }
  const QTableT<Scalar>& qtable() const { return q_; }
  std::int64_t steps() const { return steps_; }
  bool initialized() const { return prev_.has_value(); }

  /// The first call must carry no reward; every later call must carry the
  /// reward earned by the previously returned action.
  Decision<Scalar> step(const SystemState& obs, std::optional<Scalar> reward) {
    return step(model_.fire(obs), reward);
  }

  Decision<Scalar> step(const FiringVector<Scalar>& fv, std::optional<Scalar> reward) {
    if (!prev_) {
      if (reward) throw std::logic_error("agent: reward supplied before the first observation");
      Decision<Scalar> d;
      d.epsilon = epsilon_at(steps_, cfg_);
      d.chosen = select_partial_actions(q_, fv.strengths, d.epsilon, rng_);
      finish(d, fv);
      return d;
    }
    if (!reward) throw std::logic_error("agent: missing reward for the previous action");
    if (!std::isfinite(static_cast<double>(*reward))) throw std::invalid_argument("agent: reward must be finite");

    const Scalar gamma = static_cast<Scalar>(cfg_.gamma);
    const Scalar eta = static_cast<Scalar>(cfg_.eta);
    Decision<Scalar> d;
    d.updated = true;
    if (cfg_.mode == LearningMode::fsl) {
      d.epsilon = epsilon_at(steps_, cfg_);
      d.chosen = select_partial_actions(q_, fv.strengths, d.epsilon, rng_);
      const Scalar q_next = approx_q(q_, fv.strengths, d.chosen);
      const Scalar q_sa = approx_q(q_, prev_->strengths, prev_->chosen);
      d.td_error = error_signal(cfg_.mode, *reward, q_sa, q_next, Scalar(0), gamma);
      d.q_delta_max = update_qtable(q_, prev_->strengths, prev_->chosen, d.td_error, eta);
    } else {
      const Scalar v_next = state_value(q_, fv.strengths);
      const Scalar q_sa = approx_q(q_, prev_->strengths, prev_->chosen);
      d.td_error = error_signal(cfg_.mode, *reward, q_sa, Scalar(0), v_next, gamma);
      d.q_delta_max = update_qtable(q_, prev_->strengths, prev_->chosen, d.td_error, eta);
      d.epsilon = epsilon_at(steps_, cfg_);
      d.chosen = select_partial_actions(q_, fv.strengths, d.epsilon, rng_);
    }
    finish(d, fv);
    return d;
  }

 private:
  struct Previous {
    FiringT<Scalar> strengths;
    Choices chosen;
  };

  void finish(Decision<Scalar>& d, const FiringVector<Scalar>& fv) {
    d.crisp = combine_action(fv.strengths, d.chosen);
    d.action = discretize_action(d.crisp);
    prev_ = Previous{fv.strengths, d.chosen};
    ++steps_;
  }

  AgentConfig cfg_;
  FuzzyModel<Scalar> model_;
  QTableT<Scalar> q_;
  Rng rng_;
  std::optional<Previous> prev_;
  std::int64_t steps_ = 0;
};

using Agent = BasicAgent<double>;

}  // namespace frl

#pragma once

#include "frl/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace frl {

struct RewardConfig {
  double sla_rt = 0.6;       // seconds
  double cost_weight = 0.3;  // beta
  int vm_min = 1;
  int vm_max = 5;

  bool operator==(const RewardConfig&) const = default;

  void validate() const {
    if (!(sla_rt > 0.0)) throw std::invalid_argument("reward: sla_rt must be positive");
    if (!(cost_weight >= 0.0 && cost_weight <= 1.0)) throw std::invalid_argument("reward: cost_weight must be in [0, 1]");
    if (vm_min < 1) throw std::invalid_argument("reward: vm_min must be >= 1");
    if (vm_max < vm_min) throw std::invalid_argument("reward: vm_max must be >= vm_min");
  }
};

// Performance term in [-1, 1] minus a weighted resource-cost term in [0, 1].
// r = 0 exactly at the SLA with the minimum group size.
inline double compute_reward(const SystemState& obs, const RewardConfig& cfg) {
  const double perf = std::clamp((cfg.sla_rt - obs.rt) / cfg.sla_rt, -1.0, 1.0);
  const int span = cfg.vm_max - cfg.vm_min;
  const double cost = span > 0 ? static_cast<double>(obs.vm - cfg.vm_min) / span : 0.0;
  return perf - cfg.cost_weight * cost;
}

}  // namespace frl

#include "frl/cloud_sim.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace frl {

void SimParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("sim: " + what); };
  if (vm_min < 1) fail("vm_min must be >= 1");
  if (vm_max < vm_min) fail("vm_max must be >= vm_min");
  if (!(mu_cap > 0.0)) fail("mu_cap must be positive");
  if (!(rt_floor >= 0.0)) fail("rt_floor must be non-negative");
  if (!(rt_cap > rt_floor)) fail("rt_cap must exceed rt_floor");
  if (boot_delay < 0) fail("boot_delay must be >= 0");
  if (initial_vms < vm_min || initial_vms > vm_max) fail("initial_vms must lie in [vm_min, vm_max]");
}

ClusterState ClusterState::create(const SimParams& params) {
  params.validate();
  ClusterState cs;
  cs.params = params;
  for (int i = 0; i < params.initial_vms; ++i) cs.instances.push_back({cs.next_id++, VmPhase::active, 0});
  return cs;
}

int ClusterState::active() const {
  return static_cast<int>(
      std::count_if(instances.begin(), instances.end(), [](const VmInstance& v) { return v.phase == VmPhase::active; }));
}

double response_time(int active_vms, double w, const SimParams& params) {
  if (active_vms < 1) return params.rt_cap;
  const double lambda = w / active_vms;
  // Capped so the near-saturation tail never exceeds the saturated value.
  if (lambda < params.mu_cap) return std::min(params.rt_floor + 1.0 / (params.mu_cap - lambda), params.rt_cap);
  return params.rt_cap;
}

int apply_scale(ClusterState& cs, ScalingAction sa) {
  const int current = cs.total();
  const int target = std::clamp(current + sa.delta, cs.params.vm_min, cs.params.vm_max);
  for (int n = current; n < target; ++n) {
    if (cs.params.boot_delay == 0) {
      cs.instances.push_back({cs.next_id++, VmPhase::active, 0});
    } else {
      cs.instances.push_back({cs.next_id++, VmPhase::booting, cs.params.boot_delay});
    }
  }
  for (int n = current; n > target; --n) {
    // Newest booting instance first, otherwise newest active.
    auto victim = std::find_if(cs.instances.rbegin(), cs.instances.rend(),
                               [](const VmInstance& v) { return v.phase == VmPhase::booting; });
    if (victim == cs.instances.rend()) victim = cs.instances.rbegin();
    cs.instances.erase(std::next(victim).base());
  }
  return target - current;
}

SystemState advance(ClusterState& cs, double w) {
  for (auto& v : cs.instances) {
    if (v.phase == VmPhase::booting && --v.boot_remaining == 0) v.phase = VmPhase::active;
  }
  const int active = cs.active();
  return {w, response_time(active, w, cs.params), active};
}

SimulatedCluster::SimulatedCluster(const SimParams& params) : state_(ClusterState::create(params)) {
  last_ = {0.0, response_time(state_.active(), 0.0, params), state_.active()};
}

SystemState SimulatedCluster::advance(double w) {
  last_ = frl::advance(state_, w);
  return last_;
}

}  // namespace frl

#pragma once

// Discrete-time model of an auto-scaling group behind a round-robin load
// balancer. Deterministic: no randomness anywhere.

#include "frl/types.hpp"

#include <optional>
#include <vector>

namespace frl {

struct SimParams {
  int vm_min = 1;
  int vm_max = 5;
  double mu_cap = 30.0;   // requests/sec one active VM serves
  double rt_floor = 0.05; // seconds
  double rt_cap = 1.2;    // seconds, reported when saturated
  int boot_delay = 2;     // control intervals
  int initial_vms = 1;    // active at t = 0

  bool operator==(const SimParams&) const = default;
  void validate() const;
};

enum class VmPhase { booting, active };

struct VmInstance {
  int id = 0;
  VmPhase phase = VmPhase::active;
  int boot_remaining = 0;  // > 0 iff booting
};

struct ClusterState {
  SimParams params;
  std::vector<VmInstance> instances;  // creation order
  int next_id = 0;

  static ClusterState create(const SimParams& params);

  int total() const { return static_cast<int>(instances.size()); }
  int active() const;
  int booting() const { return total() - active(); }
};

/// Even split of w over the active VMs, each an M/M/1 queue, capped at rt_cap.
double response_time(int active_vms, double w, const SimParams& params);

/// Clamp-and-apply a scaling action; returns the applied delta.
int apply_scale(ClusterState& cs, ScalingAction sa);

/// One control interval: boot countdowns tick, finished boots go active,
/// then the interval is observed under offered load w.
SystemState advance(ClusterState& cs, double w);

/// What a controller drives. A real cloud driver can implement this in
/// place of the simulator.
class ScalingTarget {
 public:
  virtual ~ScalingTarget() = default;
  /// Let one control interval elapse under offered load w and observe it.
  virtual SystemState advance(double w) = 0;
  /// Most recent observation.
  virtual SystemState observe() const = 0;
  /// Request a change in group size; returns the delta actually applied.
  virtual int scale(ScalingAction sa) = 0;
  /// Instances in the group, booting included.
  virtual int total() const = 0;
};

class SimulatedCluster final : public ScalingTarget {
 public:
  explicit SimulatedCluster(const SimParams& params);

  SystemState advance(double w) override;
  SystemState observe() const override { return last_; }
  int scale(ScalingAction sa) override { return apply_scale(state_, sa); }
  int total() const override { return state_.total(); }

  const ClusterState& state() const { return state_; }

 private:
  ClusterState state_;
  SystemState last_;
};

}  // namespace frl

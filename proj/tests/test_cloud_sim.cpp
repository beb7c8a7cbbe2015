#include "frl/cloud_sim.hpp"

#include "doctest.h"

#include <algorithm>
#include <functional>
#include <vector>

using namespace frl;

namespace {

// Counting model: active count plus per-instance boot countdowns in
// creation order.
struct HandCluster {
  int lo, hi, boot;
  int active;
  std::vector<int> booting;

  int total() const { return active + static_cast<int>(booting.size()); }

  int scale(int delta) {
    const int before = total();
    int target = before + delta;
    target = target < lo ? lo : (target > hi ? hi : target);
    for (int n = before; n < target; ++n) {
      if (boot == 0) {
        ++active;
      } else {
        booting.push_back(boot);
      }
    }
    for (int n = before; n > target; --n) {
      if (!booting.empty()) {
        booting.pop_back();
      } else {
        --active;
      }
    }
    return target - before;
  }

  int tick() {
    std::vector<int> still;
    for (int b : booting) {
      if (b - 1 == 0) {
        ++active;
      } else {
        still.push_back(b - 1);
      }
    }
    booting = still;
    return active;
  }
};

SimParams params_with(int initial, int boot = 2) {
  SimParams p;
  p.initial_vms = initial;
  p.boot_delay = boot;
  return p;
}

}  // namespace

TEST_CASE("scaling clamps to [vm_min, vm_max]") {
  SimulatedCluster c(params_with(5));
  CHECK(c.scale({+1}) == 0);
  CHECK(c.total() == 5);
  SimulatedCluster d(params_with(1));
  CHECK(d.scale({-2}) == 0);
  CHECK(d.total() == 1);
  CHECK(d.scale({+2}) == 2);
  CHECK(d.scale({+2}) == 2);
  CHECK(d.scale({+2}) == 0);
  CHECK(d.total() == 5);
}

TEST_CASE("boot delay 3: a new VM serves from the third observation on") {
  SimulatedCluster c(params_with(1, 3));
  c.advance(10);
  c.scale({+1});
  CHECK(c.advance(10).vm == 1);
  CHECK(c.advance(10).vm == 1);
  CHECK(c.advance(10).vm == 2);
  CHECK(c.state().booting() == 0);

  SimulatedCluster now(params_with(1, 0));
  now.scale({+2});
  CHECK(now.state().active() == 3);
}

TEST_CASE("response time examples") {
  const SimParams p;  // mu 30, floor 0.05, cap 1.2
  CHECK(response_time(3, 60, p) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(response_time(1, 0, p) == doctest::Approx(0.05 + 1.0 / 30).epsilon(1e-15));
  CHECK(response_time(2, 60, p) == 1.2);   // lambda == mu saturates
  CHECK(response_time(1, 100, p) == 1.2);
  CHECK(response_time(0, 5, p) == 1.2);
}

TEST_CASE("response time is monotone in load and in VMs") {
  const SimParams p;
  for (int vm = 1; vm <= 5; ++vm) {
    double prev = 0.0;
    for (int i = 0; i <= 300; ++i) {
      const double w = 0.5 * i;
      const double rt = response_time(vm, w, p);
      REQUIRE(rt >= prev);
      REQUIRE(rt >= p.rt_floor);
      REQUIRE(rt <= p.rt_cap);
      if (vm > 1) REQUIRE(rt <= response_time(vm - 1, w, p));
      prev = rt;
    }
  }
}

TEST_CASE("ten-interval scripted run") {
  SimulatedCluster c(params_with(1));
  const double w[10] = {20, 20, 60, 60, 50, 50, 90, 0, 29, 29};
  const int action[10] = {+2, 0, -1, +2, -1, +5, -5, 0, +1, 0};
  const int applied[10] = {2, 0, -1, 2, -1, 2, -4, 0, 1, 0};
  const int active[10] = {1, 1, 3, 2, 2, 3, 3, 1, 1, 1};
  const int total_after[10] = {3, 3, 2, 4, 3, 5, 1, 1, 2, 2};
  const double rt[10] = {0.15, 0.15, 0.15, 1.2, 0.25, 0.05 + 1.0 / (30.0 - 50.0 / 3), 1.2, 0.05 + 1.0 / 30, 1.05, 1.05};
  for (int t = 0; t < 10; ++t) {
    CAPTURE(t);
    const auto obs = c.advance(w[t]);
    CHECK(obs.vm == active[t]);
    CHECK(obs.rt == doctest::Approx(rt[t]).epsilon(1e-12));
    CHECK(c.scale({action[t]}) == applied[t]);
    CHECK(c.total() == total_after[t]);
  }
  // Survivors: the original instance and the one launched at t = 8.
  REQUIRE(c.state().instances.size() == 2);
  CHECK(c.state().instances[0].id == 0);
  CHECK(c.state().instances[1].id == 7);
}

TEST_CASE("all length-6 action sequences agree with the counting model") {
  for (const int boot : {0, 1, 2, 3}) {
    for (int start = 1; start <= 5; ++start) {
      std::vector<int> seq(6, 0);
      std::function<void(int)> walk = [&](int depth) {
        if (depth == 6) {
          SimulatedCluster sim(params_with(start, boot));
          HandCluster hand{1, 5, boot, start, {}};
          for (int t = 0; t < 6; ++t) {
            REQUIRE(sim.advance(40).vm == hand.tick());
            const int got = sim.scale({seq[t]});
            REQUIRE(got == hand.scale(seq[t]));
            REQUIRE(sim.total() == hand.total());
            REQUIRE(sim.total() >= 1);
            REQUIRE(sim.total() <= 5);
            REQUIRE(sim.state().active() + sim.state().booting() == sim.total());
            for (const auto& v : sim.state().instances) {
              REQUIRE((v.phase == VmPhase::booting) == (v.boot_remaining > 0));
              REQUIRE(v.boot_remaining <= boot);
            }
          }
          return;
        }
        for (int d = -2; d <= 2; ++d) {
          seq[depth] = d;
          walk(depth + 1);
        }
      };
      walk(0);
    }
  }
}

TEST_CASE("sim parameter validation") {
  SimParams p;
  p.initial_vms = 6;
  CHECK_THROWS_AS(SimulatedCluster{p}, std::invalid_argument);
  p = {};
  p.mu_cap = 0;
  CHECK_THROWS_AS(SimulatedCluster{p}, std::invalid_argument);
  p = {};
  p.boot_delay = -1;
  CHECK_THROWS_AS(SimulatedCluster{p}, std::invalid_argument);
}

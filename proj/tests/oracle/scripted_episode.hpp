#pragma once

// A fixed four-observation episode executed by hand, step by step, for both
// learning loops. Everything here is straight-line arithmetic on a plain
// array; nothing calls into the library.
//
// Settings: eta = 0.1, gamma = 0.8, epsilon pinned at 1 (every firing rule
// explores, so the seed decides each partial action), expert prior.
// Observations (firing strengths) and rewards:
//   s0: rule 4 = 0.6, rule 5 = 0.4
//   s1: rule 8 = 1.0                     r = -0.5
//   s2: rule 7 = 0.25, rule 8 = 0.75     r =  0.5
//   s3: rule 4 = 1.0                     r =  1.0

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>

namespace oracle {

using Grid = std::array<std::array<double, 5>, 9>;

// Designated consequent 1.0, neighbours 0.25, by rule (low|medium|high) x
// (good|ok|bad): -2 -1 +1 / -1 0 +1 / 0 +1 +2.
inline Grid expert_prior() {
  return {{{1.0, 0.25, 0, 0, 0},
           {0.25, 1.0, 0.25, 0, 0},
           {0, 0, 0.25, 1.0, 0.25},
           {0.25, 1.0, 0.25, 0, 0},
           {0, 0.25, 1.0, 0.25, 0},
           {0, 0, 0.25, 1.0, 0.25},
           {0, 0.25, 1.0, 0.25, 0},
           {0, 0, 0.25, 1.0, 0.25},
           {0, 0, 0, 0.25, 1.0}}};
}

inline constexpr double kEta = 0.1;
inline constexpr double kGamma = 0.8;
inline constexpr double kR1 = -0.5, kR2 = 0.5, kR3 = 1.0;

struct Draws {
  explicit Draws(std::uint64_t seed) : gen(seed) {}
  // One exploring rule: the "explore?" draw (always below 1), then the slot.
  int slot() {
    (void)unit();
    return static_cast<int>(unit() * 5.0);
  }
  double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  std::mt19937_64 gen;
};

inline double row_max(const std::array<double, 5>& row) { return *std::max_element(row.begin(), row.end()); }

/// Fuzzy SARSA: pick a' for s', bootstrap on Q(s', a'), update with the
/// firing of s.
inline Grid hand_fsl(std::uint64_t seed) {
  Grid q = expert_prior();
  Draws d(seed);
  // s0
  const int a4 = d.slot(), a5 = d.slot();
  // s1
  const int b8 = d.slot();
  double q_next = 1.0 * q[8][b8];
  double q_sa = 0.6 * q[4][a4] + 0.4 * q[5][a5];
  double dq = kR1 + kGamma * q_next - q_sa;
  q[4][a4] += kEta * dq * 0.6;
  q[5][a5] += kEta * dq * 0.4;
  // s2
  const int c7 = d.slot(), c8 = d.slot();
  q_next = 0.25 * q[7][c7] + 0.75 * q[8][c8];
  q_sa = 1.0 * q[8][b8];
  dq = kR2 + kGamma * q_next - q_sa;
  q[8][b8] += kEta * dq * 1.0;
  // s3
  const int e4 = d.slot();
  q_next = 1.0 * q[4][e4];
  q_sa = 0.25 * q[7][c7] + 0.75 * q[8][c8];
  dq = kR3 + kGamma * q_next - q_sa;
  q[7][c7] += kEta * dq * 0.25;
  q[8][c8] += kEta * dq * 0.75;
  return q;
}

/// Fuzzy Q-learning: bootstrap on V(s') = sum mu max q, update, then pick
/// the action for s'.
inline Grid hand_fql(std::uint64_t seed) {
  Grid q = expert_prior();
  Draws d(seed);
  // s0
  const int a4 = d.slot(), a5 = d.slot();
  // s1
  double v_next = 1.0 * row_max(q[8]);
  double q_sa = 0.6 * q[4][a4] + 0.4 * q[5][a5];
  double dq = kR1 + kGamma * v_next - q_sa;
  q[4][a4] += kEta * dq * 0.6;
  q[5][a5] += kEta * dq * 0.4;
  const int b8 = d.slot();
  // s2
  v_next = 0.25 * row_max(q[7]) + 0.75 * row_max(q[8]);
  q_sa = 1.0 * q[8][b8];
  dq = kR2 + kGamma * v_next - q_sa;
  q[8][b8] += kEta * dq * 1.0;
  const int c7 = d.slot(), c8 = d.slot();
  // s3
  v_next = 1.0 * row_max(q[4]);
  q_sa = 0.25 * q[7][c7] + 0.75 * q[8][c8];
  dq = kR3 + kGamma * v_next - q_sa;
  q[7][c7] += kEta * dq * 0.25;
  q[8][c8] += kEta * dq * 0.75;
  (void)d.slot();
  return q;
}

}  // namespace oracle

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>

namespace frl {

using Index = Eigen::Index;

// 3 workload sets x 3 response-time sets.
inline constexpr Index kSetsPerVariable = 3;
inline constexpr Index kRules = kSetsPerVariable * kSetsPerVariable;
inline constexpr Index kActions = 5;

// Candidate consequents, indexed by action slot k.
inline constexpr std::array<int, kActions> kActionDeltas = {-2, -1, 0, 1, 2};

inline constexpr int delta_of(Index k) { return kActionDeltas[static_cast<std::size_t>(k)]; }
inline constexpr Index slot_of(int delta) { return static_cast<Index>(delta + 2); }

template <typename Scalar>
using QTableT = Eigen::Matrix<Scalar, kRules, kActions, Eigen::RowMajor>;

template <typename Scalar>
using FiringT = Eigen::Matrix<Scalar, kRules, 1>;

// Per-rule chosen action slot (0..kActions-1).
using Choices = Eigen::Matrix<Index, kRules, 1>;

using QTable = QTableT<double>;
using Firing = FiringT<double>;

/// Observed triple (w, rt, vm) for one control interval.
struct SystemState {
  double w = 0.0;   // users/sec
  double rt = 0.0;  // seconds
  int vm = 1;       // active instances
};

struct ScalingAction {
  int delta = 0;
};

}  // namespace frl

#pragma once

// Fuzzification and rule firing for the two-input (workload, response time)
// scaling controller.

#include "frl/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace frl {

enum class MfShape { triangular, trapezoidal };

/// Piecewise-linear membership function. Triangles are stored as
/// trapezoids with a degenerate plateau (b == c).
template <typename Scalar>
class MembershipFunction {
 public:
  static MembershipFunction triangular(Scalar a, Scalar b, Scalar c) {
    return MembershipFunction(MfShape::triangular, {a, b, b, c});
  }

  static MembershipFunction trapezoidal(Scalar a, Scalar b, Scalar c, Scalar d) {
    return MembershipFunction(MfShape::trapezoidal, {a, b, c, d});
  }

  MfShape shape() const { return shape_; }
  const std::array<Scalar, 4>& points() const { return p_; }

  Scalar operator()(Scalar x) const {
    const auto& [a, b, c, d] = p_;
    if (x < a || x > d) return Scalar(0);
    if (x >= b && x <= c) return Scalar(1);
    if (x < b) return (x - a) / (b - a);
    return (d - x) / (d - c);
  }

 private:
  MembershipFunction(MfShape shape, std::array<Scalar, 4> p) : shape_(shape), p_(p) {
    for (const Scalar v : p_) {
      if (!std::isfinite(static_cast<double>(v))) {
        throw std::invalid_argument("membership function breakpoints must be finite");
      }
    }
    if (!(p_[0] <= p_[1] && p_[1] <= p_[2] && p_[2] <= p_[3])) {
      throw std::invalid_argument("membership function breakpoints must be non-decreasing");
    }
  }

  MfShape shape_;
  std::array<Scalar, 4> p_;
};

template <typename Scalar>
Scalar eval_membership(const MembershipFunction<Scalar>& mf, Scalar x) {
  return mf(x);
}

template <typename Scalar>
struct FuzzySet {
  std::string label;
  MembershipFunction<Scalar> mf;
};

/// Three fuzzy sets over one input variable, forming a partition of unity
/// on [lo, hi]. Construction rejects anything else.
template <typename Scalar>
class FuzzyPartition {
 public:
  using Sets = std::array<FuzzySet<Scalar>, kSetsPerVariable>;
  using Degrees = Eigen::Matrix<Scalar, kSetsPerVariable, 1>;

  FuzzyPartition(std::string variable, Scalar lo, Scalar hi, Sets sets)
      : variable_(std::move(variable)), lo_(lo), hi_(hi), sets_(std::move(sets)) {
    if (!(lo_ < hi_)) throw std::invalid_argument(variable_ + ": domain must satisfy lo < hi");
    check_unity();
  }

  const std::string& variable() const { return variable_; }
  Scalar lo() const { return lo_; }
  Scalar hi() const { return hi_; }
  const Sets& sets() const { return sets_; }

  Scalar clamp(Scalar x) const { return std::clamp(x, lo_, hi_); }

  /// Degrees of the three sets at x; x is clamped to the domain first.
  Degrees degrees(Scalar x) const {
    const Scalar xc = clamp(x);
    Degrees out;
    for (Index k = 0; k < kSetsPerVariable; ++k) out(k) = sets_[static_cast<std::size_t>(k)].mf(xc);
    return out;
  }

  /// Center of a set: midpoint of its plateau (the peak for triangles).
  Scalar center(Index k) const {
    const auto& p = sets_[static_cast<std::size_t>(k)].mf.points();
    return (p[1] + p[2]) / Scalar(2);
  }

 private:
  // The membership sum is linear between consecutive breakpoints, so checking
  // it at every breakpoint inside the domain (plus the ends) covers the domain.
  void check_unity() const {
    auto check_at = [&](Scalar x) {
      if (x < lo_ || x > hi_) return;
      const Scalar sum = degrees(x).sum();
      if (std::abs(static_cast<double>(sum - Scalar(1))) > 1e-9) {
        throw std::invalid_argument(variable_ + ": fuzzy sets do not sum to 1 at x=" +
                                    std::to_string(static_cast<double>(x)));
      }
    };
    check_at(lo_);
    check_at(hi_);
    for (const auto& s : sets_) {
      for (const Scalar p : s.mf.points()) check_at(p);
    }
  }

  std::string variable_;
  Scalar lo_;
  Scalar hi_;
  Sets sets_;
};

/// Antecedents are (workload set, response-time set) pairs enumerating the
/// full 3x3 cross product, workload outer.
struct RuleBase {
  std::array<std::pair<Index, Index>, kRules> antecedents{};

  static RuleBase standard() {
    RuleBase rb;
    for (Index i = 0; i < kSetsPerVariable; ++i) {
      for (Index j = 0; j < kSetsPerVariable; ++j) {
        rb.antecedents[static_cast<std::size_t>(i * kSetsPerVariable + j)] = {i, j};
      }
    }
    return rb;
  }

  static constexpr Index rule_index(Index w_set, Index rt_set) { return w_set * kSetsPerVariable + rt_set; }
};

template <typename Scalar>
struct FiringVector {
  FiringT<Scalar> strengths = FiringT<Scalar>::Zero();
  SystemState state{};
};

/// Product conjunction of the two per-variable memberships for each rule.
template <typename Scalar>
FiringVector<Scalar> fire_rules(const RuleBase& rb, const FuzzyPartition<Scalar>& pw,
                                const FuzzyPartition<Scalar>& prt, const SystemState& s) {
  const auto mw = pw.degrees(static_cast<Scalar>(s.w));
  const auto mrt = prt.degrees(static_cast<Scalar>(s.rt));
  FiringVector<Scalar> fv;
  fv.state = s;
  for (Index i = 0; i < kRules; ++i) {
    const auto [wi, ri] = rb.antecedents[static_cast<std::size_t>(i)];
    fv.strengths(i) = mw(wi) * mrt(ri);
  }
  return fv;
}

template <typename Scalar = double>
Eigen::Matrix<Scalar, kRules, 1> deltas_of(const Choices& chosen) {
  return chosen.unaryExpr([](Index k) { return static_cast<Scalar>(delta_of(k)); });
}

/// Weighted average of the per-rule consequents.
template <typename Derived>
typename Derived::Scalar combine_action(const Eigen::MatrixBase<Derived>& strengths, const Choices& chosen) {
  return strengths.dot(deltas_of<typename Derived::Scalar>(chosen));
}

template <typename Scalar>
Scalar combine_action(const FiringVector<Scalar>& fv, const Choices& chosen) {
  return combine_action(fv.strengths, chosen);
}

/// Round half away from zero, clamped to the action range.
template <typename Scalar>
ScalingAction discretize_action(Scalar a) {
  const auto r = static_cast<int>(std::round(static_cast<double>(a)));
  return {std::clamp(r, delta_of(0), delta_of(kActions - 1))};
}

/// Partitions plus rule base: everything needed to turn an observation into
/// rule firing strengths.
template <typename Scalar>
struct FuzzyModel {
  FuzzyPartition<Scalar> workload;
  FuzzyPartition<Scalar> response_time;
  RuleBase rules = RuleBase::standard();

  FiringVector<Scalar> fire(const SystemState& s) const { return fire_rules(rules, workload, response_time, s); }
};

template <typename Scalar>
FuzzyPartition<Scalar> default_workload_partition() {
  using Mf = MembershipFunction<Scalar>;
  return FuzzyPartition<Scalar>("w", Scalar(0), Scalar(120),
                                {{{"low", Mf::trapezoidal(0, 0, 10, 55)},
                                  {"medium", Mf::triangular(10, 55, 100)},
                                  {"high", Mf::trapezoidal(55, 100, 120, 120)}}});
}

template <typename Scalar>
FuzzyPartition<Scalar> default_response_time_partition(Scalar sla) {
  using Mf = MembershipFunction<Scalar>;
  const Scalar s = sla;
  return FuzzyPartition<Scalar>("rt", Scalar(0), Scalar(2) * s,
                                {{{"good", Mf::trapezoidal(0, 0, Scalar(0.2) * s, s)},
                                  {"ok", Mf::triangular(Scalar(0.2) * s, s, Scalar(1.5) * s)},
                                  {"bad", Mf::trapezoidal(s, Scalar(1.5) * s, Scalar(2) * s, Scalar(2) * s)}}});
}

template <typename Scalar>
FuzzyModel<Scalar> default_fuzzy_model(Scalar sla) {
  return {default_workload_partition<Scalar>(), default_response_time_partition<Scalar>(sla), RuleBase::standard()};
}

}  // namespace frl

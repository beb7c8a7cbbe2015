#pragma once

// Offered load (users/sec) per control interval: three synthetic patterns
// and replay of recorded traces.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frl {

enum class PatternKind { predictable_bursting, variations, on_off, trace };
enum class TraceScale { linear, none };

struct PatternSpec {
  PatternKind kind = PatternKind::predictable_bursting;
  double u_min = 10.0;
  double u_max = 100.0;
  int period = 200;        // bursting and variations
  double jitter = 10.0;    // variations, users/sec
  std::uint64_t seed = 0;  // variations
  int dwell = 100;         // on_off
  std::filesystem::path trace_path;
  TraceScale scale = TraceScale::linear;

  bool operator==(const PatternSpec&) const = default;
  void validate() const;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value of a synthetic pattern at interval t. Pure function of (spec, t).
/// Throws for trace specs; use Workload for those.
double generate(const PatternSpec& spec, std::int64_t t);

/// Reads "t,count" rows (optional header) and maps counts onto
/// [u_min, u_max]: affinely for TraceScale::linear, by clamping for none.
std::vector<double> load_trace(const std::filesystem::path& path, TraceScale scale, double u_min, double u_max);

/// A pattern ready to be sampled; trace files are loaded once up front.
class Workload {
 public:
  explicit Workload(PatternSpec spec);

  /// nullopt once a trace is exhausted.
  std::optional<double> at(std::int64_t t) const;

  const PatternSpec& spec() const { return spec_; }

 private:
  PatternSpec spec_;
  std::vector<double> trace_;
};

}  // namespace frl

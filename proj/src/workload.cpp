#include "frl/workload.hpp"

#include "frl/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string_view>

namespace frl {

namespace {

constexpr double kBurstProbability = 0.02;
constexpr int kBurstLength = 3;
constexpr double kBurstGain = 0.4;

enum Stream : std::uint64_t { kJitterStream = 1, kBurstStream = 2 };

double sinusoid(const PatternSpec& spec, std::int64_t t) {
  const double mid = 0.5 * (spec.u_min + spec.u_max);
  const double amp = 0.5 * (spec.u_max - spec.u_min);
  // Reduce the phase modulo the period so u(t) == u(t + P) bit for bit.
  const std::int64_t phase = t % spec.period;
  return mid + amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(phase) / spec.period);
}

bool burst_starts(const PatternSpec& spec, std::int64_t t) {
  return t >= 0 && hash01(spec.seed, kBurstStream, static_cast<std::uint64_t>(t)) < kBurstProbability;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

void PatternSpec::validate() const {
  if (!(u_min < u_max)) throw std::invalid_argument("pattern: u_min must be < u_max");
  switch (kind) {
    case PatternKind::predictable_bursting:
      if (period < 2) throw std::invalid_argument("pattern: period must be >= 2");
      break;
    case PatternKind::variations:
      if (period < 2) throw std::invalid_argument("pattern: period must be >= 2");
      if (!(jitter >= 0.0)) throw std::invalid_argument("pattern: jitter must be >= 0");
      break;
    case PatternKind::on_off:
      if (dwell < 2) throw std::invalid_argument("pattern: dwell must be >= 2");
      break;
    case PatternKind::trace:
      if (trace_path.empty()) throw std::invalid_argument("pattern: trace needs a path");
      break;
  }
}

double generate(const PatternSpec& spec, std::int64_t t) {
  if (t < 0) throw std::invalid_argument("pattern: t must be >= 0");
  double u = 0.0;
  switch (spec.kind) {
    case PatternKind::predictable_bursting:
      u = sinusoid(spec, t);
      break;
    case PatternKind::variations: {
      const double amp = 0.5 * (spec.u_max - spec.u_min);
      const double jitter = spec.jitter * (2.0 * hash01(spec.seed, kJitterStream, static_cast<std::uint64_t>(t)) - 1.0);
      bool in_burst = false;
      for (int back = 0; back < kBurstLength; ++back) in_burst = in_burst || burst_starts(spec, t - back);
      u = sinusoid(spec, t) + jitter + (in_burst ? kBurstGain * amp : 0.0);
      break;
    }
    case PatternKind::on_off:
      u = (t / spec.dwell) % 2 == 0 ? spec.u_max : spec.u_min;
      break;
    case PatternKind::trace:
      throw std::logic_error("pattern: trace patterns are sampled through Workload");
  }
  return std::clamp(u, spec.u_min, spec.u_max);
}

std::vector<double> load_trace(const std::filesystem::path& path, TraceScale scale, double u_min, double u_max) {
  std::ifstream in(path);
  if (!in) throw TraceError("trace: cannot open " + path.string());

  std::vector<double> counts;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    const auto t_field = text.substr(0, comma);
    const auto count_field = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto t_val = parse_double(t_field);
    const auto count = parse_double(count_field);
    if (t_val && count) {
      counts.push_back(*count);
      continue;
    }
    // A header is allowed only as the first non-empty row, and only if
    // neither column is numeric.
    const bool header = counts.empty() && !t_val && !parse_double(count_field) && comma != std::string_view::npos;
    if (header && row == 1) continue;
    throw TraceError("trace: " + path.string() + ": malformed row " + std::to_string(row) + ": '" +
                     std::string(text) + "'");
  }
  if (counts.empty()) throw TraceError("trace: " + path.string() + ": no data rows");

  if (scale == TraceScale::none) {
    for (double& c : counts) c = std::clamp(c, u_min, u_max);
    return counts;
  }
  const auto [lo_it, hi_it] = std::minmax_element(counts.begin(), counts.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    throw TraceError("trace: " + path.string() + ": cannot scale a degenerate range (" +
                     std::to_string(counts.size()) + " rows, all equal)");
  }
  for (double& c : counts) c = std::clamp(u_min + (c - lo) * (u_max - u_min) / (hi - lo), u_min, u_max);
  return counts;
}

Workload::Workload(PatternSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.kind == PatternKind::trace) trace_ = load_trace(spec_.trace_path, spec_.scale, spec_.u_min, spec_.u_max);
}

std::optional<double> Workload::at(std::int64_t t) const {
  if (spec_.kind != PatternKind::trace) return generate(spec_, t);
  if (t < 0 || static_cast<std::size_t>(t) >= trace_.size()) return std::nullopt;
  return trace_[static_cast<std::size_t>(t)];
}

}  // namespace frl

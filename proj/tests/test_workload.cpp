#include "frl/workload.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace frl;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("frl_test_" + name);
  std::ofstream(path) << body;
  return path;
}

PatternSpec of_kind(PatternKind k) {
  PatternSpec s;
  s.kind = k;
  return s;
}

}  // namespace

TEST_CASE("bursting examples") {
  const auto s = of_kind(PatternKind::predictable_bursting);
  CHECK(generate(s, 0) == doctest::Approx(55.0).epsilon(1e-15));
  CHECK(generate(s, 50) == 100.0);
  CHECK(generate(s, 150) == 10.0);
  CHECK(generate(s, 100) == doctest::Approx(55.0).epsilon(1e-12));
}

TEST_CASE("on/off examples") {
  auto s = of_kind(PatternKind::on_off);
  s.dwell = 5;
  CHECK(generate(s, 0) == 100.0);
  CHECK(generate(s, 4) == 100.0);
  CHECK(generate(s, 5) == 10.0);
  CHECK(generate(s, 7) == 10.0);
  CHECK(generate(s, 10) == 100.0);
}

TEST_CASE("synthetic patterns are bounded and periodic") {
  for (const auto kind : {PatternKind::predictable_bursting, PatternKind::variations, PatternKind::on_off}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto s = of_kind(kind);
      s.seed = seed;
      s.period = 37;
      s.dwell = 11;
      for (std::int64_t t = 0; t < 3000; ++t) {
        const double u = generate(s, t);
        REQUIRE(u >= s.u_min);
        REQUIRE(u <= s.u_max);
        REQUIRE(u == generate(s, t));
        if (kind == PatternKind::predictable_bursting) REQUIRE(u == generate(s, t + s.period));
        if (kind == PatternKind::on_off) REQUIRE(u == generate(s, t + 2 * s.dwell));
      }
    }
  }
}

TEST_CASE("variations matches the frozen sequence") {
  std::ifstream in(std::string(FRL_TEST_DATA_DIR) + "/variations_seed7.csv");
  REQUIRE(in);
  auto s = of_kind(PatternKind::variations);
  s.seed = 7;
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const std::int64_t t = std::stoll(line.substr(0, comma));
    const double expected = std::stod(line.substr(comma + 1));
    REQUIRE(generate(s, t) == doctest::Approx(expected).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == 600);

  // Different seeds give different sequences.
  auto other = s;
  other.seed = 8;
  int same = 0;
  for (int t = 0; t < 100; ++t) same += generate(s, t) == generate(other, t);
  CHECK(same < 10);
}

TEST_CASE("trace: linear scaling, header, end of data") {
  const auto path = write_temp("trace_ok.csv", "t,count\n0,0\n1,50\n2,100\n");
  const auto v = load_trace(path, TraceScale::linear, 10, 100);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 10.0);
  CHECK(v[1] == 55.0);
  CHECK(v[2] == 100.0);

  PatternSpec s = of_kind(PatternKind::trace);
  s.trace_path = path;
  const Workload w(s);
  CHECK(*w.at(1) == 55.0);
  CHECK_FALSE(w.at(3).has_value());
  CHECK_THROWS_AS(generate(s, 0), std::logic_error);

  const auto raw = load_trace(write_temp("trace_raw.csv", "0,5\n1,50\n2,500\n"), TraceScale::none, 10, 100);
  CHECK(raw == std::vector<double>{10, 50, 100});
}

TEST_CASE("trace errors") {
  CHECK_THROWS_WITH_AS(load_trace(write_temp("one.csv", "0,42\n"), TraceScale::linear, 10, 100),
                       doctest::Contains("degenerate"), TraceError);
  CHECK_THROWS_WITH_AS(load_trace(write_temp("bad.csv", "t,count\n0,1\n1,abc\n2,3\n"), TraceScale::linear, 10, 100),
                       doctest::Contains("row 3"), TraceError);
  CHECK_THROWS_WITH_AS(load_trace(write_temp("late_header.csv", "0,1\nt,count\n"), TraceScale::linear, 10, 100),
                       doctest::Contains("row 2"), TraceError);
  CHECK_THROWS_WITH_AS(load_trace(write_temp("empty.csv", "t,count\n"), TraceScale::linear, 10, 100),
                       doctest::Contains("no data rows"), TraceError);
  CHECK_THROWS_AS(load_trace("/nonexistent/trace.csv", TraceScale::linear, 10, 100), TraceError);
}

TEST_CASE("pattern validation") {
  auto s = of_kind(PatternKind::predictable_bursting);
  s.u_min = 100;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = of_kind(PatternKind::on_off);
  s.dwell = 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = of_kind(PatternKind::trace);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

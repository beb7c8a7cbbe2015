#pragma once

// File formats: experiment config, steps.csv, summary.json, q-table
// snapshots, gnuplot data, comparison tables.

#include "frl/experiment.hpp"

#include "json.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace frl {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every field is optional; `{"controller":"FQL"}` is a complete config.
/// Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& cfg);

/// A compare config: the run config plus "controllers": [...].
std::vector<ExperimentConfig> compare_configs_from_json(const Json& j);

Json agent_config_to_json(const AgentConfig& cfg);
Json qtable_to_json(const QTable& q, const AgentConfig& cfg, std::optional<std::int64_t> t = std::nullopt);
QTable qtable_from_json(const Json& j);

Json summary_to_json(const Summary& s);
Json comparison_to_json(const Comparison& c);

/// Shortest round-trip decimal form.
std::string format_number(double v);
/// RFC 4180 field quoting (only when needed).
std::string csv_field(std::string_view s);

void write_steps_csv(std::ostream& out, const std::vector<StepRecord>& records);
void write_comparison_csv(std::ostream& out, const Comparison& c);

/// steps.csv, summary.json, config.json, rt.dat and, when snapshots exist,
/// qtable_t<t>.json plus qtable_final.json. Returns the files written.
std::vector<std::filesystem::path> emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// Writes comparison.csv/.json and one emit_outputs directory per controller.
std::vector<std::filesystem::path> emit_comparison(const Comparison& c, const std::filesystem::path& dir);

/// Example trace file ("t,count" with header) for users to adapt.
void write_trace_template(std::ostream& out, int rows);

}  // namespace frl

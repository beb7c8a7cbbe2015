#include "frl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace frl {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: " + where + ": " + what);
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) bad(where, std::string(key) + " must be a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned()) bad(where, std::string(key) + " must be a non-negative integer");
    out = v.get<std::uint64_t>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) bad(where, std::string(key) + " must be an integer");
    out = v.get<T>();
  } else {
    if (!v.is_string()) bad(where, std::string(key) + " must be a string");
    out = v.get<std::string>();
  }
}

PatternKind parse_kind(const std::string& s) {
  if (s == "predictable_bursting" || s == "bursting") return PatternKind::predictable_bursting;
  if (s == "variations") return PatternKind::variations;
  if (s == "on_off") return PatternKind::on_off;
  if (s == "trace") return PatternKind::trace;
  bad("pattern", "unknown kind '" + s + "'");
}

const char* kind_name(PatternKind k) {
  switch (k) {
    case PatternKind::predictable_bursting:
      return "predictable_bursting";
    case PatternKind::variations:
      return "variations";
    case PatternKind::on_off:
      return "on_off";
    case PatternKind::trace:
      return "trace";
  }
  return "";
}

InitMode parse_init(const std::string& s) {
  if (s == "non_expert_zero" || s == "non_expert" || s == "zero") return InitMode::non_expert_zero;
  if (s == "expert_table" || s == "expert") return InitMode::expert_table;
  bad("agent", "unknown init '" + s + "'");
}

FuzzyPartition<double> parse_partition(const Json& j, const std::string& name) {
  const std::string where = "fuzzy." + name;
  check_keys(j, where, {"domain", "sets"});
  if (!j.contains("domain") || !j.at("domain").is_array() || j.at("domain").size() != 2) {
    bad(where, "domain must be [lo, hi]");
  }
  const auto& sets_j = j.at("sets");
  if (!sets_j.is_array() || sets_j.size() != static_cast<std::size_t>(kSetsPerVariable)) {
    bad(where, "exactly 3 sets are required");
  }
  using Mf = MembershipFunction<double>;
  std::vector<FuzzySet<double>> sets;
  for (const auto& sj : sets_j) {
    check_keys(sj, where, {"label", "shape", "points"});
    const auto label = sj.value("label", std::string{});
    const auto shape = sj.value("shape", std::string{});
    const auto pts = sj.at("points").get<std::vector<double>>();
    if (shape == "triangular" && pts.size() == 3) {
      sets.push_back({label, Mf::triangular(pts[0], pts[1], pts[2])});
    } else if (shape == "trapezoidal" && pts.size() == 4) {
      sets.push_back({label, Mf::trapezoidal(pts[0], pts[1], pts[2], pts[3])});
    } else {
      bad(where, "set '" + label + "' needs shape triangular (3 points) or trapezoidal (4 points)");
    }
  }
  return FuzzyPartition<double>(name, j.at("domain")[0].get<double>(), j.at("domain")[1].get<double>(),
                                {sets[0], sets[1], sets[2]});
}

Json partition_to_json(const FuzzyPartition<double>& p) {
  Json sets = Json::array();
  for (const auto& s : p.sets()) {
    const auto& pts = s.mf.points();
    Json pj = s.mf.shape() == MfShape::triangular ? Json::array({pts[0], pts[1], pts[3]})
                                                  : Json::array({pts[0], pts[1], pts[2], pts[3]});
    sets.push_back({{"label", s.label},
                    {"shape", s.mf.shape() == MfShape::triangular ? "triangular" : "trapezoidal"},
                    {"points", pj}});
  }
  return {{"domain", {p.lo(), p.hi()}}, {"sets", sets}};
}

Json phase_to_json(const PhaseStats& p) {
  return {{"start", p.start},
          {"intervals", p.intervals},
          {"mean_rt_s", p.mean_rt_s},
          {"p95_rt_s", p.p95_rt_s},
          {"sla_violation_ratio", p.sla_violation_ratio},
          {"mean_vm_pct", p.mean_vm_pct},
          {"mean_reward", p.mean_reward}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  check_keys(j, "root",
             {"controller", "horizon", "seed", "warmup", "snapshot_interval", "pattern", "agent", "reward", "sim",
              "fuzzy", "controllers"});
  ExperimentConfig cfg;
  if (j.contains("controller")) {
    if (!j.at("controller").is_string()) bad("root", "controller must be a string");
    cfg.controller = ControllerSpec::parse(j.at("controller").get<std::string>());
  }
  read(j, "horizon", cfg.horizon, "root");
  read(j, "seed", cfg.seed, "root");
  read(j, "warmup", cfg.warmup, "root");
  read(j, "snapshot_interval", cfg.snapshot_interval, "root");

  if (j.contains("pattern")) {
    const auto& p = j.at("pattern");
    check_keys(p, "pattern", {"kind", "u_min", "u_max", "period", "jitter", "seed", "dwell", "path", "scale"});
    std::string kind = kind_name(cfg.pattern.kind);
    read(p, "kind", kind, "pattern");
    cfg.pattern.kind = parse_kind(kind);
    read(p, "u_min", cfg.pattern.u_min, "pattern");
    read(p, "u_max", cfg.pattern.u_max, "pattern");
    read(p, "period", cfg.pattern.period, "pattern");
    read(p, "jitter", cfg.pattern.jitter, "pattern");
    read(p, "dwell", cfg.pattern.dwell, "pattern");
    if (p.contains("seed")) {
      read(p, "seed", cfg.pattern.seed, "pattern");
      cfg.pattern_seed_set = true;
    }
    std::string path;
    read(p, "path", path, "pattern");
    cfg.pattern.trace_path = path;
    std::string scale = "linear";
    read(p, "scale", scale, "pattern");
    if (scale == "linear") {
      cfg.pattern.scale = TraceScale::linear;
    } else if (scale == "none") {
      cfg.pattern.scale = TraceScale::none;
    } else {
      bad("pattern", "scale must be 'linear' or 'none'");
    }
  }

  if (j.contains("agent")) {
    const auto& a = j.at("agent");
    check_keys(a, "agent",
               {"eta", "gamma", "epsilon0", "epsilon_min", "epsilon_decay_tau", "init", "convergence_delta",
                "convergence_window"});
    read(a, "eta", cfg.agent.eta, "agent");
    read(a, "gamma", cfg.agent.gamma, "agent");
    read(a, "epsilon0", cfg.agent.epsilon0, "agent");
    read(a, "epsilon_min", cfg.agent.epsilon_min, "agent");
    read(a, "epsilon_decay_tau", cfg.agent.epsilon_decay_tau, "agent");
    read(a, "convergence_delta", cfg.agent.convergence_delta, "agent");
    read(a, "convergence_window", cfg.agent.convergence_window, "agent");
    if (a.contains("init")) {
      std::string init;
      read(a, "init", init, "agent");
      cfg.agent.init = parse_init(init);
    }
  }

  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    check_keys(r, "reward", {"sla_rt", "cost_weight", "vm_min", "vm_max"});
    read(r, "sla_rt", cfg.reward.sla_rt, "reward");
    read(r, "cost_weight", cfg.reward.cost_weight, "reward");
    read(r, "vm_min", cfg.reward.vm_min, "reward");
    read(r, "vm_max", cfg.reward.vm_max, "reward");
  }

  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    check_keys(s, "sim", {"mu_cap", "rt_floor", "rt_cap", "boot_delay", "initial_vms"});
    read(s, "mu_cap", cfg.sim.mu_cap, "sim");
    read(s, "rt_floor", cfg.sim.rt_floor, "sim");
    read(s, "boot_delay", cfg.sim.boot_delay, "sim");
    if (s.contains("rt_cap")) {
      read(s, "rt_cap", cfg.sim.rt_cap, "sim");
      cfg.rt_cap_set = true;
    }
    if (s.contains("initial_vms")) {
      read(s, "initial_vms", cfg.sim.initial_vms, "sim");
      cfg.initial_vms_set = true;
    }
  }

  if (j.contains("fuzzy")) {
    const auto& f = j.at("fuzzy");
    check_keys(f, "fuzzy", {"w", "rt"});
    if (f.contains("w")) cfg.workload_partition = parse_partition(f.at("w"), "w");
    if (f.contains("rt")) cfg.rt_partition = parse_partition(f.at("rt"), "rt");
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<ExperimentConfig> compare_configs_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("controllers") || !j.at("controllers").is_array()) {
    throw std::invalid_argument("config: compare needs a \"controllers\" array");
  }
  Json base = j;
  base.erase("controllers");
  base.erase("controller");
  std::vector<ExperimentConfig> out;
  for (const auto& c : j.at("controllers")) {
    Json one = base;
    one["controller"] = c;
    out.push_back(config_from_json(one));
  }
  if (out.empty()) throw std::invalid_argument("config: \"controllers\" is empty");
  return out;
}

Json agent_config_to_json(const AgentConfig& a) {
  return {{"mode", a.mode == LearningMode::fsl ? "FSL" : "FQL"},
          {"eta", a.eta},
          {"gamma", a.gamma},
          {"epsilon0", a.epsilon0},
          {"epsilon_min", a.epsilon_min},
          {"epsilon_decay_tau", a.epsilon_decay_tau},
          {"init", a.init == InitMode::expert_table ? "expert_table" : "non_expert_zero"},
          {"convergence_delta", a.convergence_delta},
          {"convergence_window", a.convergence_window},
          {"seed", a.seed}};
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json agent = agent_config_to_json(cfg.agent);
  agent.erase("mode");
  agent.erase("seed");
  Json pattern = {{"kind", kind_name(cfg.pattern.kind)},
                  {"u_min", cfg.pattern.u_min},
                  {"u_max", cfg.pattern.u_max},
                  {"period", cfg.pattern.period},
                  {"jitter", cfg.pattern.jitter},
                  {"dwell", cfg.pattern.dwell}};
  if (cfg.pattern_seed_set) pattern["seed"] = cfg.pattern.seed;
  if (cfg.pattern.kind == PatternKind::trace) {
    pattern["path"] = cfg.pattern.trace_path.string();
    pattern["scale"] = cfg.pattern.scale == TraceScale::linear ? "linear" : "none";
  }
  Json sim = {{"mu_cap", cfg.sim.mu_cap}, {"rt_floor", cfg.sim.rt_floor}, {"boot_delay", cfg.sim.boot_delay}};
  if (cfg.rt_cap_set) sim["rt_cap"] = cfg.sim.rt_cap;
  if (cfg.initial_vms_set) sim["initial_vms"] = cfg.sim.initial_vms;
  Json j = {{"controller", cfg.controller.name()},
            {"horizon", cfg.horizon},
            {"seed", cfg.seed},
            {"warmup", cfg.warmup},
            {"snapshot_interval", cfg.snapshot_interval},
            {"pattern", pattern},
            {"agent", agent},
            {"reward",
             {{"sla_rt", cfg.reward.sla_rt},
              {"cost_weight", cfg.reward.cost_weight},
              {"vm_min", cfg.reward.vm_min},
              {"vm_max", cfg.reward.vm_max}}},
            {"sim", sim}};
  Json fuzzy = Json::object();
  if (cfg.workload_partition) fuzzy["w"] = partition_to_json(*cfg.workload_partition);
  if (cfg.rt_partition) fuzzy["rt"] = partition_to_json(*cfg.rt_partition);
  if (!fuzzy.empty()) j["fuzzy"] = fuzzy;
  return j;
}

Json qtable_to_json(const QTable& q, const AgentConfig& cfg, std::optional<std::int64_t> t) {
  Json rows = Json::array();
  for (Index i = 0; i < kRules; ++i) {
    Json row = Json::array();
    for (Index k = 0; k < kActions; ++k) row.push_back(q(i, k));
    rows.push_back(row);
  }
  Json j = {{"rules", kRules}, {"actions", kActionDeltas}};
  if (t) j["t"] = *t;
  j["q"] = rows;
  j["config"] = agent_config_to_json(cfg);
  return j;
}

QTable qtable_from_json(const Json& j) {
  if (!j.contains("q") || !j.at("q").is_array() || j.at("q").size() != static_cast<std::size_t>(kRules)) {
    throw std::invalid_argument("qtable: expected a 9x5 'q' matrix");
  }
  QTable q;
  for (Index i = 0; i < kRules; ++i) {
    const auto& row = j.at("q")[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(kActions)) {
      throw std::invalid_argument("qtable: row " + std::to_string(i) + " must have 5 entries");
    }
    for (Index k = 0; k < kActions; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number() || !std::isfinite(v.get<double>())) throw std::invalid_argument("qtable: non-finite entry");
      q(i, k) = v.get<double>();
    }
  }
  return q;
}

Json summary_to_json(const Summary& s) {
  Json hist = Json::object();
  for (const auto& [vm, n] : s.vm_histogram) hist[std::to_string(vm)] = n;
  Json j = {{"controller", s.controller},
            {"horizon", s.horizon},
            {"intervals", s.intervals},
            {"truncated", s.truncated},
            {"warmup", s.warmup},
            {"mean_rt_s", s.mean_rt_s},
            {"p95_rt_s", s.p95_rt_s},
            {"sla_violation_ratio", s.sla_violation_ratio},
            {"mean_vm_pct", s.mean_vm_pct},
            {"vm_histogram", hist},
            {"scale_ups", s.scale_ups},
            {"scale_downs", s.scale_downs},
            {"cumulative_reward", s.cumulative_reward}};
  j["convergence_step"] = s.convergence_step ? Json(*s.convergence_step) : Json(nullptr);
  if (s.post_convergence) j["post_convergence"] = phase_to_json(*s.post_convergence);
  if (s.exploitation) j["exploitation"] = phase_to_json(*s.exploitation);
  return j;
}

Json comparison_to_json(const Comparison& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    Json deltas = Json::array();
    for (const auto& d : r.deltas) {
      deltas.push_back({{"baseline", d.baseline},
                        {"mean_rt_s", d.mean_rt_s},
                        {"p95_rt_s", d.p95_rt_s},
                        {"sla_violation_ratio", d.sla_violation_ratio},
                        {"mean_vm_pct", d.mean_vm_pct}});
    }
    rows.push_back({{"controller", r.controller}, {"summary", summary_to_json(r.summary)}, {"deltas", deltas}});
  }
  return {{"rows", rows}};
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::logic_error("format_number: to_chars failed");
  return std::string(buf, ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_steps_csv(std::ostream& out, const std::vector<StepRecord>& records) {
  out << kStepHeader << "\r\n";
  for (const auto& r : records) {
    out << r.t << ',' << format_number(r.w) << ',' << format_number(r.rt) << ',' << r.vm_active << ',' << r.vm_total
        << ',' << format_number(r.action_crisp) << ',' << r.action_applied << ',' << format_number(r.reward) << ','
        << format_number(r.epsilon) << ',' << format_number(r.q_delta_max) << "\r\n";
  }
}

void write_comparison_csv(std::ostream& out, const Comparison& c) {
  std::vector<std::string> baselines;
  for (const auto& r : c.rows) {
    for (const auto& d : r.deltas) {
      if (std::find(baselines.begin(), baselines.end(), d.baseline) == baselines.end()) baselines.push_back(d.baseline);
    }
  }
  out << "controller,mean_rt_s,p95_rt_s,sla_violation_ratio,mean_vm_pct,scale_ups,scale_downs,convergence_step";
  for (const auto& b : baselines) {
    for (const char* m : {"mean_rt_s", "sla_violation_ratio", "mean_vm_pct"}) {
      out << ',' << csv_field("d_" + std::string(m) + "_vs_" + b);
    }
  }
  out << "\r\n";
  for (const auto& r : c.rows) {
    const auto& s = r.summary;
    out << csv_field(r.controller) << ',' << format_number(s.mean_rt_s) << ',' << format_number(s.p95_rt_s) << ','
        << format_number(s.sla_violation_ratio) << ',' << format_number(s.mean_vm_pct) << ',' << s.scale_ups << ','
        << s.scale_downs << ',' << (s.convergence_step ? std::to_string(*s.convergence_step) : std::string{});
    for (const auto& b : baselines) {
      const auto it = std::find_if(r.deltas.begin(), r.deltas.end(), [&](const BaselineDelta& d) { return d.baseline == b; });
      if (it == r.deltas.end()) {
        out << ",,,";
      } else {
        out << ',' << format_number(it->mean_rt_s) << ',' << format_number(it->sla_violation_ratio) << ','
            << format_number(it->mean_vm_pct);
      }
    }
    out << "\r\n";
  }
}

std::vector<fs::path> emit_outputs(const ExperimentResult& result, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    write_file(p, content);
    written.push_back(p);
  };

  std::ostringstream csv;
  write_steps_csv(csv, result.records);
  emit("steps.csv", csv.str());
  emit("summary.json", summary_to_json(result.summary).dump(2) + "\n");
  emit("config.json", config_to_json(result.config).dump(2) + "\n");

  std::ostringstream dat;
  dat << "# t rt_s\n";
  for (const auto& r : result.records) dat << r.t << ' ' << format_number(r.rt) << '\n';
  emit("rt.dat", dat.str());

  for (const auto& [t, q] : result.snapshots) {
    char name[48];
    std::snprintf(name, sizeof name, "qtable_t%06lld.json", static_cast<long long>(t));
    emit(name, qtable_to_json(q, result.config.agent, t).dump(2) + "\n");
  }
  if (result.final_qtable && (!result.snapshots.empty() || result.config.snapshot_interval > 0)) {
    emit("qtable_final.json", qtable_to_json(*result.final_qtable, result.config.agent).dump(2) + "\n");
  }
  return written;
}

std::vector<fs::path> emit_comparison(const Comparison& c, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<fs::path> written;
  std::ostringstream csv;
  write_comparison_csv(csv, c);
  write_file(dir / "comparison.csv", csv.str());
  written.push_back(dir / "comparison.csv");
  write_file(dir / "comparison.json", comparison_to_json(c).dump(2) + "\n");
  written.push_back(dir / "comparison.json");
  for (const auto& run : c.runs) {
    std::string sub = run.summary.controller;
    for (char& ch : sub) {
      if (ch == '(' || ch == ')') ch = '_';
    }
    while (!sub.empty() && sub.back() == '_') sub.pop_back();
    const auto files = emit_outputs(run, dir / sub);
    written.insert(written.end(), files.begin(), files.end());
  }
  return written;
}

void write_trace_template(std::ostream& out, int rows) {
  // A day-shaped curve sampled once per row, as a starting point.
  out << "t,count\n";
  for (int t = 0; t < rows; ++t) {
    const double phase = 2.0 * 3.14159265358979323846 * t / std::max(rows, 1);
    const double count = 500.0 + 400.0 * std::sin(phase - 1.5707963267948966);
    out << t << ',' << static_cast<long long>(std::llround(count)) << '\n';
  }
}

}  // namespace frl

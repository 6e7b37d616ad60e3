#ifndef TWRN_EXPERIMENT_HPP
#define TWRN_EXPERIMENT_HPP

// Experiment orchestration: JSON configuration, lambda sweeps over one shared
// state draw, sweep CSV and schedule JSON emission.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "twrn/channel.hpp"
#include "twrn/switcher.hpp"

namespace twrn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<double> lambdas = default_lambdas();
  std::size_t n_states = 1000;
  std::uint64_t seed = 7;
  FadingModel fading = FadingModel::rayleigh(true);
  double epsilon = 1e-4;
  int max_iter = 200;
  Mode init_mode = Mode::SPCDNC;
  SolverOptions tolerances;
  std::string states_path;  // when set, states are read from this CSV instead of sampled
  std::string output_path;  // empty: stdout

  static std::vector<double> default_lambdas() {
    std::vector<double> l;
    for (int i = 1; i <= 12; ++i) l.push_back(0.25 * i);
    return l;
  }

  SwitchOptions switch_options() const {
    SwitchOptions o;
    o.epsilon = epsilon;
    o.max_iter = max_iter;
    o.init_mode = init_mode;
    o.solver = tolerances;
    return o;
  }

  void validate() const {
    if (lambdas.empty()) throw ConfigError("lambdas: must be nonempty");
    for (double l : lambdas)
      if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambdas: entries must be finite and >= 0");
    if (n_states < 1) throw ConfigError("n_states: must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon: must be > 0");
    if (max_iter < 1) throw ConfigError("max_iter: must be >= 1");
    if (!(tolerances.f_lo > 0.0 && tolerances.f_hi < 1.0 && tolerances.f_lo < tolerances.f_hi))
      throw ConfigError("tolerances: need 0 < f_lo < f_hi < 1");
    if (!(tolerances.rate_rel_tol > 0.0) || !(tolerances.f_tol > 0.0))
      throw ConfigError("tolerances: rate_rel_tol and f_tol must be > 0");
    if (fading.kind == FadingModel::Kind::Deterministic && fading.fixed.empty())
      throw ConfigError("fading.states: deterministic fading needs at least one state");
  }
};

// ---------------------------------------------------------------------------
// JSON <-> config

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json fading;
  if (c.fading.kind == FadingModel::Kind::RayleighUnitMean) {
    fading = {{"kind", "rayleigh"}, {"reciprocal", c.fading.reciprocal}};
  } else {
    json rows = json::array();
    for (const auto& s : c.fading.fixed) rows.push_back({s.g1r, s.g2r, s.gr1, s.gr2});
    fading = {{"kind", "deterministic"}, {"states", rows}};
  }
  return json{
      {"lambdas", c.lambdas},
      {"n_states", c.n_states},
      {"seed", c.seed},
      {"fading", fading},
      {"epsilon", c.epsilon},
      {"max_iter", c.max_iter},
      {"init_mode", std::string(to_string(c.init_mode))},
      {"tolerances",
       {{"rate_rel_tol", c.tolerances.rate_rel_tol},
        {"f_tol", c.tolerances.f_tol},
        {"f_lo", c.tolerances.f_lo},
        {"f_hi", c.tolerances.f_hi},
        {"f_scan_points", c.tolerances.f_scan_points}}},
      {"states_path", c.states_path},
      {"output_path", c.output_path},
  };
}

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& j, const std::string& where, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(where + it.key() + ": unknown field");
  }
}

}  // namespace detail

/// Applies the fields present in `j` on top of `base`. Unknown fields are
/// rejected so that typos do not silently fall back to defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
  using detail::get_field;
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  detail::reject_unknown(j, "",
                         {"lambdas", "n_states", "seed", "fading", "epsilon", "max_iter", "init_mode", "tolerances",
                          "states_path", "output_path"});
  auto& c = base;
  if (j.contains("lambdas")) c.lambdas = get_field<std::vector<double>>(j["lambdas"], "lambdas");
  if (j.contains("n_states")) c.n_states = get_field<std::size_t>(j["n_states"], "n_states");
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j["seed"], "seed");
  if (j.contains("epsilon")) c.epsilon = get_field<double>(j["epsilon"], "epsilon");
  if (j.contains("max_iter")) c.max_iter = get_field<int>(j["max_iter"], "max_iter");
  if (j.contains("init_mode")) {
    try {
      c.init_mode = parse_mode(get_field<std::string>(j["init_mode"], "init_mode"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("init_mode: ") + e.what());
    }
  }
  if (j.contains("states_path")) c.states_path = get_field<std::string>(j["states_path"], "states_path");
  if (j.contains("output_path")) c.output_path = get_field<std::string>(j["output_path"], "output_path");
  if (j.contains("fading")) {
    const auto& f = j["fading"];
    if (!f.is_object()) throw ConfigError("fading: must be an object");
    detail::reject_unknown(f, "fading.", {"kind", "reciprocal", "states"});
    const auto kind = f.contains("kind") ? get_field<std::string>(f["kind"], "fading.kind") : "rayleigh";
    if (kind == "rayleigh") {
      c.fading = FadingModel::rayleigh(f.contains("reciprocal") ? get_field<bool>(f["reciprocal"], "fading.reciprocal")
                                                                : true);
    } else if (kind == "deterministic") {
      if (!f.contains("states")) throw ConfigError("fading.states: required for deterministic fading");
      StateList st;
      const auto rows = get_field<std::vector<std::vector<double>>>(f["states"], "fading.states");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string where = "fading.states[" + std::to_string(i) + "]";
        if (rows[i].size() != 4) throw ConfigError(where + ": expected [g1r, g2r, gr1, gr2]");
        ChannelState s{rows[i][0], rows[i][1], rows[i][2], rows[i][3]};
        if (!s.valid()) throw ConfigError(where + ": gains must be positive and finite");
        st.push_back(s);
      }
      c.fading = FadingModel::deterministic(std::move(st));
    } else {
      throw ConfigError("fading.kind: expected 'rayleigh' or 'deterministic', got '" + kind + "'");
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances: must be an object");
    detail::reject_unknown(t, "tolerances.", {"rate_rel_tol", "f_tol", "f_lo", "f_hi", "f_scan_points"});
    auto& o = c.tolerances;
    if (t.contains("rate_rel_tol")) o.rate_rel_tol = get_field<double>(t["rate_rel_tol"], "tolerances.rate_rel_tol");
    if (t.contains("f_tol")) o.f_tol = get_field<double>(t["f_tol"], "tolerances.f_tol");
    if (t.contains("f_lo")) o.f_lo = get_field<double>(t["f_lo"], "tolerances.f_lo");
    if (t.contains("f_hi")) o.f_hi = get_field<double>(t["f_hi"], "tolerances.f_hi");
    if (t.contains("f_scan_points")) o.f_scan_points = get_field<int>(t["f_scan_points"], "tolerances.f_scan_points");
  }
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_json(j, std::move(base));
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return parse_config(is, std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline StateList experiment_states(const ExperimentConfig& c) {
  if (!c.states_path.empty()) return load_states(c.states_path);
  return sample_states(c.n_states, c.seed, c.fading);
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
  double lambda = 0.0;
  double energy_switch = 0.0;
  double energy_pnc_only = 0.0;
  double energy_dnc_only = 0.0;
  double f_u = 0.5;
  int iterations = 0;  // negative: iteration cap hit before convergence
  double pnc_state_fraction = 0.0;
};

/// Full result for one lambda, kept for callers that need more than the row.
struct SweepPoint {
  SweepRow row;
  SwitchReport report;
  Allocation pnc_only;
  Allocation dnc_only;
};

inline SweepPoint run_point(const StateList& states, double lambda, const ExperimentConfig& c) {
  SweepPoint p;
  p.report = solve_p1(states, lambda, c.switch_options());
  p.pnc_only = solve_baseline(states, lambda, Mode::PNC, c.tolerances);
  p.dnc_only = solve_baseline(states, lambda, Mode::SPCDNC, c.tolerances);
  auto& r = p.row;
  r.lambda = lambda;
  r.energy_switch = p.report.final.avg_energy;
  r.energy_pnc_only = p.pnc_only.avg_energy;
  r.energy_dnc_only = p.dnc_only.avg_energy;
  r.f_u = p.report.final.split.f_u;
  r.iterations = p.report.converged ? p.report.iterations : -p.report.iterations;
  r.pnc_state_fraction = static_cast<double>(p.report.pnc_count) / static_cast<double>(states.size());
  return p;
}

/// One point per lambda, all on the same state list, in config order.
inline std::vector<SweepPoint> run_sweep_points(const ExperimentConfig& c, const StateList& states) {
  c.validate();
  std::vector<SweepPoint> out;
  out.reserve(c.lambdas.size());
  for (double l : c.lambdas) out.push_back(run_point(states, l, c));
  return out;
}

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& c) {
  const auto states = experiment_states(c);
  std::vector<SweepRow> rows;
  for (auto& p : run_sweep_points(c, states)) rows.push_back(p.row);
  return rows;
}

inline constexpr const char* kSweepHeader =
    "lambda,energy_switch,energy_pnc_only,energy_dnc_only,f_u,iterations,pnc_state_fraction";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%d,%.12g\n", r.lambda, r.energy_switch,
                  r.energy_pnc_only, r.energy_dnc_only, r.f_u, r.iterations, r.pnc_state_fraction);
    os << buf;
  }
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSweepHeader) throw std::runtime_error("sweep csv: bad header");
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    SweepRow r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%d,%lf", &r.lambda, &r.energy_switch, &r.energy_pnc_only,
                    &r.energy_dnc_only, &r.f_u, &r.iterations, &r.pnc_state_fraction) != 7)
      throw std::runtime_error("sweep csv: malformed line " + std::to_string(lineno));
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Schedule JSON

inline nlohmann::json allocation_json(const Allocation& a, const StateList& states) {
  using nlohmann::json;
  json per = json::array();
  for (std::size_t i = 0; i < a.per_state.size(); ++i) {
    const auto& s = a.per_state[i];
    per.push_back({{"index", i},
                   {"mode", std::string(to_string(s.mode))},
                   {"rate_u", s.rate_u},
                   {"rate_d", s.rate_d},
                   {"power_u", s.power_u},
                   {"power_d", s.power_d},
                   {"gains", {states[i].g1r, states[i].g2r, states[i].gr1, states[i].gr2}}});
  }
  return json{{"split", {{"f_u", a.split.f_u}, {"f_d", a.split.f_d}}},
              {"duals", {{"beta1", a.duals.beta1}, {"beta2", a.duals.beta2}, {"gamma", a.duals.gamma}}},
              {"avg_energy", a.avg_energy},
              {"avg_rate_u", a.avg_rate_u},
              {"avg_rate_d", a.avg_rate_d},
              {"states", per}};
}

inline nlohmann::json schedule_json(double lambda, const SwitchReport& rep, const StateList& states) {
  nlohmann::json j = allocation_json(rep.final, states);
  j["lambda"] = lambda;
  j["energy_trace"] = rep.energy_trace;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["epsilon"] = rep.epsilon;
  j["mode_counts"] = {{"PNC", rep.pnc_count}, {"SPCDNC", rep.dnc_count}};
  return j;
}

}  // namespace twrn

#endif  // TWRN_EXPERIMENT_HPP

#ifndef TWRN_VALIDATE_HPP
#define TWRN_VALIDATE_HPP

// Self-check battery behind `twrn validate`: hand-derived formula values,
// solver-vs-oracle agreement on tiny instances, and convexity probes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "twrn/oracle.hpp"
#include "twrn/subp1.hpp"

namespace twrn {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::string text() const {
    std::ostringstream os;
    std::size_t failed = 0;
    for (const auto& c : checks) {
      os << (c.pass ? "PASS " : "FAIL ") << c.name;
      if (!c.detail.empty()) os << ": " << c.detail;
      os << '\n';
      failed += c.pass ? 0 : 1;
    }
    if (failed == 0)
      os << "all checks passed (" << checks.size() << ")\n";
    else
      os << failed << " of " << checks.size() << " checks failed\n";
    return os.str();
  }
};

struct OracleCase {
  std::string name;
  StateList states;
  std::vector<Mode> modes;
  double lambda = 0.5;
};

struct Battery {
  bool formula_table = false;
  bool convexity = false;
  std::vector<OracleCase> oracle_cases;
  PowerModel power;  // formulas under test
  GridSpec grid;
  double oracle_rel_tol = 1e-3;
};

/// Formula table, three convexity probes, and six seeded oracle cases.
inline Battery default_battery() {
  Battery b;
  b.formula_table = true;
  b.convexity = true;
  const Mode P = Mode::PNC, D = Mode::SPCDNC;
  const ChannelState unit{1, 1, 1, 1};
  b.oracle_cases.push_back({"single_unit_pnc", {unit}, {P}, 0.5});
  b.oracle_cases.push_back({"single_unit_dnc", {unit}, {D}, 0.5});
  const std::vector<std::vector<Mode>> patterns = {{D, D}, {P, P, P}, {P, D, P, D}, {D, P}};
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    OracleCase c;
    c.modes = patterns[i];
    c.states = sample_states(c.modes.size(), 1000 + i, FadingModel::rayleigh(true));
    c.lambda = i % 2 == 0 ? 0.5 : 1.0;
    c.name = "rayleigh_seed" + std::to_string(1000 + i) + "_n" + std::to_string(c.modes.size());
    b.oracle_cases.push_back(std::move(c));
  }
  return b;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline CheckResult table_check(const std::string& name, const std::vector<std::pair<double, double>>& got_want) {
  CheckResult c{name, true, ""};
  double worst = 0.0;
  for (const auto& [got, want] : got_want) {
    const double err = std::abs(got - want);
    worst = std::max(worst, std::isfinite(err) ? err : INFINITY);
    if (!(err <= 1e-9)) c.pass = false;
  }
  c.detail = "max abs error " + fmt_double(worst);
  return c;
}

}  // namespace detail

inline ValidationReport run_validate(const Battery& b) {
  ValidationReport rep;
  const Mode P = Mode::PNC, D = Mode::SPCDNC;
  if (b.formula_table) {
    auto s = [](double a, double c) { return ChannelState{a, c, a, c}; };
    const auto& up = b.power.uplink;
    const auto& dn = b.power.downlink;
    rep.checks.push_back(detail::table_check(
        "formula.pnc_uplink_sum_power", {{up(P, 1, s(1, 1)), 3.0}, {up(P, 2, s(1, 1)), 7.0}, {up(P, 1, s(1, 2)), 2.25}}));
    rep.checks.push_back(detail::table_check(
        "formula.dnc_uplink_sum_power", {{up(D, 1, s(1, 1)), 3.0}, {up(D, 2, s(1, 1)), 15.0}, {up(D, 1, s(2, 1)), 2.0}}));
    rep.checks.push_back(detail::table_check("formula.downlink_power", {{dn(1, {1, 1, 1, 4}), 1.0},
                                                                        {dn(1, {1, 1, 4, 1}), 1.0},
                                                                        {dn(2, {1, 1, 0.5, 2}), 6.0}}));
  }

  if (b.convexity) {
    const ChannelState st{0.7, 1.9, 0.4, 2.3};
    const ProbeBox box;
    struct Probe {
      const char* name;
      std::function<double(double, double)> fn;
    };
    const Probe probes[] = {
        {"convexity.pnc_perspective", [&](double T, double f) { return pnc_perspective_energy(T, f, st); }},
        {"convexity.dnc_perspective", [&](double T, double f) { return dnc_perspective_energy(T, f, st); }},
        {"convexity.downlink_perspective", [&](double T, double f) { return downlink_perspective_energy(T, f, st); }},
    };
    for (const auto& p : probes) {
      const auto r = midpoint_convexity_probe(p.fn, box, 10000, 42);
      rep.checks.push_back({p.name, r.pass,
                            std::to_string(r.violations) + " violations, worst " + detail::fmt_double(r.worst_violation)});
    }
    const auto neg = midpoint_convexity_probe([](double T, double) { return -T * T; }, box, 10000, 42);
    rep.checks.push_back({"convexity.negative_control", !neg.pass,
                          "concave -T^2 flagged with worst violation " + detail::fmt_double(neg.worst_violation)});
  }

  for (const auto& c : b.oracle_cases) {
    CheckResult r{"oracle." + c.name, false, ""};
    try {
      const auto sol = solve_subp1(c.states, c.modes, c.lambda);
      const auto orc = brute_force_subp1(c.states, c.modes, c.lambda, b.grid, b.power);
      const double scale = std::max(std::abs(sol.avg_energy), 1e-300);
      const double rel = (orc.energy - sol.avg_energy) / scale;
      r.pass = std::abs(rel) <= b.oracle_rel_tol;
      r.detail = "solver " + detail::fmt_double(sol.avg_energy) + ", oracle " + detail::fmt_double(orc.energy) +
                 ", rel diff " + detail::fmt_double(rel);
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    rep.checks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace twrn

#endif  // TWRN_VALIDATE_HPP

#ifndef TWRN_SWITCHER_HPP
#define TWRN_SWITCHER_HPP

// Per-state PNC / SPC-DNC switching. Alternates between solving sub-P1 for
// the current mode vector and re-picking, at the rates just allocated, the
// cheaper uplink mode of every state. Stops once the relative energy change
// drops below epsilon.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "twrn/subp1.hpp"

namespace twrn {

struct SwitchOptions {
  double epsilon = 1e-4;
  int max_iter = 200;
  Mode init_mode = Mode::SPCDNC;
  SolverOptions solver;
};

struct SwitchReport {
  Allocation final;
  std::vector<double> energy_trace;  // E^(0), E^(1), ...
  int iterations = 0;                // number of sub-P1 solves
  double epsilon = 0.0;
  bool converged = false;
  std::size_t pnc_count = 0;
  std::size_t dnc_count = 0;

  std::vector<Mode> modes() const {
    std::vector<Mode> m;
    m.reserve(final.per_state.size());
    for (const auto& s : final.per_state) m.push_back(s.mode);
    return m;
  }
};

/// Cheaper mode per state at the allocation's uplink rates. States with no
/// uplink rate keep their current mode.
inline std::vector<Mode> reselect_modes(const Allocation& alloc, const StateList& states) {
  std::vector<Mode> modes;
  modes.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& sa = alloc.per_state[i];
    modes.push_back(sa.rate_u > 0.0 ? cheaper_mode(sa.rate_u, states[i]) : sa.mode);
  }
  return modes;
}

inline Allocation solve_baseline(const StateList& states, double lambda, Mode mode, const SolverOptions& opt = {}) {
  return solve_subp1(states, std::vector<Mode>(states.size(), mode), lambda, opt);
}

inline SwitchReport solve_p1(const StateList& states, double lambda, const SwitchOptions& opt = {}) {
  if (states.empty()) throw std::invalid_argument("solve_p1: states must be nonempty");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("solve_p1: lambda must be >= 0");
  if (!(opt.epsilon > 0.0)) throw std::invalid_argument("solve_p1: epsilon must be > 0");
  if (opt.max_iter < 1) throw std::invalid_argument("solve_p1: max_iter must be >= 1");

  SwitchReport rep;
  rep.epsilon = opt.epsilon;
  std::vector<Mode> modes(states.size(), opt.init_mode);
  rep.final = solve_subp1(states, modes, lambda, opt.solver);
  rep.energy_trace.push_back(rep.final.avg_energy);
  rep.iterations = 1;

  if (lambda == 0.0) {
    rep.converged = true;
  } else {
    while (rep.iterations < opt.max_iter) {
      auto next_modes = reselect_modes(rep.final, states);
      if (next_modes == modes) {
        // Same modes give the same sub-P1 solution: Delta E = 0.
        rep.energy_trace.push_back(rep.final.avg_energy);
        ++rep.iterations;
        rep.converged = true;
        break;
      }
      modes = std::move(next_modes);
      Allocation next = solve_subp1(states, modes, lambda, opt.solver);
      const double prev = rep.final.avg_energy;
      rep.final = std::move(next);
      rep.energy_trace.push_back(rep.final.avg_energy);
      ++rep.iterations;
      if (std::abs(rep.final.avg_energy - prev) / rep.final.avg_energy < opt.epsilon) {
        rep.converged = true;
        break;
      }
    }
  }

  for (const auto& s : rep.final.per_state) (s.mode == Mode::PNC ? rep.pnc_count : rep.dnc_count)++;
  return rep;
}

}  // namespace twrn

#endif  // TWRN_SWITCHER_HPP

#ifndef TWRN_ORACLE_HPP
#define TWRN_ORACLE_HPP

// Ground truth for the sub-P1 solver on tiny instances. Nothing here uses
// multipliers or stationarity: rates are enumerated on grids, projected onto
// the average-rate constraint by scaling, and the time split is searched over
// f_u + f_d <= 1 including slack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "twrn/channel.hpp"
#include "twrn/ratepower.hpp"

namespace twrn {

/// Rate-to-power maps used by the oracle. Defaults to the formula layer;
/// tests swap entries to check that a wrong formula is caught.
struct PowerModel {
  std::function<double(Mode, double, const ChannelState&)> uplink =
      [](Mode m, double R, const ChannelState& s) { return uplink_sum_power(m, R, s); };
  std::function<double(double, const ChannelState&)> downlink =
      [](double R, const ChannelState& s) { return downlink_power(R, s); };
};

struct GridSpec {
  int f_points = 40;         // coarse time-fraction grid: f = i / f_points
  int geometric_points = 3;  // rate grid between 1e-3 and 0.1 bits
  int linear_points = 6;     // rate grid on (0.1, rate_max]
  double rate_max = 6.0;
  int refine_levels = 25;    // halvings of the local pattern grid
  double rate_cap = 60.0;    // scaled rate vectors beyond this are skipped

  GridSpec refined() const {
    GridSpec g = *this;
    g.f_points *= 2;
    g.geometric_points *= 2;
    g.linear_points *= 2;
    return g;
  }
};

struct OracleResult {
  double energy = 0.0;
  GridSpec grid;
  double f_u = 0.5;
  double f_d = 0.5;
  std::vector<double> rates_u;
  std::vector<double> rates_d;
};

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<double> oracle_rate_grid(const GridSpec& g) {
  std::vector<double> r{0.0};
  for (int i = 0; i < g.geometric_points; ++i) {
    const double u = g.geometric_points == 1 ? 0.0 : static_cast<double>(i) / (g.geometric_points - 1);
    r.push_back(1e-3 * std::pow(100.0, u));
  }
  for (int i = 1; i <= g.linear_points; ++i) r.push_back(0.1 + (g.rate_max - 0.1) * i / g.linear_points);
  return r;
}

// Min over r >= 0 with mean(r) = m of mean_s cost(s, r_s); cost(s, 0) = 0.
template <class Cost>
double oracle_min_mean_power(std::size_t n, double m, const Cost& cost, const GridSpec& g,
                             std::vector<double>& best_rates) {
  best_rates.assign(n, 0.0);
  if (m <= 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> r(n), scaled(n);

  auto try_vector = [&](const std::vector<double>& dir) {
    double sum = 0.0;
    for (double v : dir) sum += v;
    if (!(sum > 0.0)) return;
    const double scale = m * static_cast<double>(n) / sum;
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = dir[i] * scale;
      if (scaled[i] > g.rate_cap) return;
      if (scaled[i] > 0.0) e += cost(i, scaled[i]);
    }
    e /= static_cast<double>(n);
    if (e < best) {
      best = e;
      best_rates = scaled;
    }
  };

  // Coarse enumeration of every grid vector.
  const auto grid = oracle_rate_grid(g);
  const std::size_t G = grid.size();
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) r[i] = grid[idx[i]];
    try_vector(r);
    std::size_t k = 0;
    while (k < n && ++idx[k] == G) idx[k++] = 0;
    if (k == n) break;
  }
  if (!std::isfinite(best)) return best;

  // Pattern refinement: all offsets in {-2..2}^n around the incumbent, step
  // halved whenever a full sweep brings no improvement.
  double h = (g.rate_max - 0.1) / g.linear_points;
  for (int level = 0, sweeps = 0; level < g.refine_levels && sweeps < 50 * (g.refine_levels + 1); ++sweeps) {
    const std::vector<double> center = best_rates;
    const double before = best;
    std::vector<int> off(n, -2);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) r[i] = std::max(0.0, center[i] + off[i] * h);
      try_vector(r);
      std::size_t k = 0;
      while (k < n && ++off[k] == 3) off[k++] = -2;
      if (k == n) break;
    }
    if (!(best < before * (1.0 - 1e-15))) {
      h *= 0.5;
      ++level;
    }
  }
  return best;
}

}  // namespace detail

/// Exhaustive-grid minimum of sub-P1 for at most four states.
inline OracleResult brute_force_subp1(const StateList& states, const std::vector<Mode>& modes, double lambda,
                                      const GridSpec& grid = {}, const PowerModel& power = {}) {
  if (states.empty() || states.size() > 4) throw std::invalid_argument("oracle handles 1 to 4 states");
  if (modes.size() != states.size()) throw std::invalid_argument("modes and states differ in length");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (grid.f_points < 2 || grid.linear_points < 1 || grid.geometric_points < 1 || grid.refine_levels < 0)
    throw std::invalid_argument("grid resolutions must be positive");

  const std::size_t n = states.size();
  OracleResult res;
  res.grid = grid;
  res.rates_u.assign(n, 0.0);
  res.rates_d.assign(n, 0.0);
  if (lambda == 0.0) return res;

  auto up_cost = [&](std::size_t i, double R) { return power.uplink(modes[i], R, states[i]); };
  auto down_cost = [&](std::size_t i, double R) { return power.downlink(R, states[i]); };

  struct Leg {
    double f, energy;
    std::vector<double> rates;
  };
  auto uplink = [&](double f) {
    Leg l{f, 0.0, {}};
    l.energy = f * detail::oracle_min_mean_power(n, lambda / f, up_cost, grid, l.rates);
    return l;
  };
  auto downlink = [&](double f) {
    Leg l{f, 0.0, {}};
    l.energy = f * detail::oracle_min_mean_power(n, lambda / f, down_cost, grid, l.rates);
    return l;
  };

  // Coarse: every pair on the f grid with f_u + f_d <= 1.
  const int F = grid.f_points;
  std::vector<Leg> ups, downs;
  for (int i = 1; i < F; ++i) {
    ups.push_back(uplink(static_cast<double>(i) / F));
    downs.push_back(downlink(static_cast<double>(i) / F));
  }
  double best = std::numeric_limits<double>::infinity();
  Leg bu{}, bd{};
  for (int i = 1; i < F; ++i)
    for (int j = 1; i + j <= F; ++j) {
      const double e = ups[i - 1].energy + downs[j - 1].energy;
      if (e < best) {
        best = e;
        bu = ups[i - 1];
        bd = downs[j - 1];
      }
    }
  if (!std::isfinite(best)) throw OracleError("oracle: no feasible grid point (lambda too large for rate cap)");

  // Local 5x5 refinement in (f_u, f_d), halving the step when stuck.
  double h = 1.0 / F;
  for (int level = 0, sweeps = 0; level < grid.refine_levels && sweeps < 50 * (grid.refine_levels + 1); ++sweeps) {
    const double before = best;
    const Leg cu = bu, cd = bd;
    std::vector<Leg> lu, ld;
    for (int k = -2; k <= 2; ++k) {
      const double fu = cu.f + k * h, fd = cd.f + k * h;
      if (fu > 0.0 && fu < 1.0) lu.push_back(k == 0 ? cu : uplink(fu));
      if (fd > 0.0 && fd < 1.0) ld.push_back(k == 0 ? cd : downlink(fd));
    }
    for (const auto& a : lu)
      for (const auto& b : ld) {
        if (a.f + b.f > 1.0 + 1e-15) continue;
        if (a.energy + b.energy < best) {
          best = a.energy + b.energy;
          bu = a;
          bd = b;
        }
      }
    if (!(best < before * (1.0 - 1e-15))) {
      h *= 0.5;
      ++level;
    }
  }

  res.energy = best;
  res.f_u = bu.f;
  res.f_d = bd.f;
  res.rates_u = bu.rates;
  res.rates_d = bd.rates;
  return res;
}

// ---------------------------------------------------------------------------

struct ProbeBox {
  double T_lo = 0.0, T_hi = 2.0;
  double f_lo = 0.05, f_hi = 1.0;
};

struct ProbeResult {
  bool pass = true;
  std::size_t violations = 0;
  double worst_violation = -std::numeric_limits<double>::infinity();  // F(mid) - mean(F(a), F(b))
};

/// Samples point pairs uniformly in the box and checks
/// F(midpoint) <= (F(a) + F(b)) / 2 + 1e-12 (1 + |(F(a) + F(b)) / 2|).
inline ProbeResult midpoint_convexity_probe(const std::function<double(double, double)>& fn, const ProbeBox& box,
                                            std::size_t samples, std::uint64_t seed) {
  if (!(box.f_lo > 0.0 && box.f_hi <= 1.0 && box.T_lo >= 0.0 && box.T_lo <= box.T_hi && box.f_lo <= box.f_hi))
    throw std::invalid_argument("probe box must satisfy 0 < f <= 1 and T >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uT(box.T_lo, box.T_hi), uf(box.f_lo, box.f_hi);
  ProbeResult res;
  for (std::size_t i = 0; i < samples; ++i) {
    const double T1 = uT(rng), f1 = uf(rng), T2 = uT(rng), f2 = uf(rng);
    const double mean = 0.5 * (fn(T1, f1) + fn(T2, f2));
    const double mid = fn(0.5 * (T1 + T2), 0.5 * (f1 + f2));
    const double v = mid - mean;
    res.worst_violation = std::max(res.worst_violation, v);
    if (v > 1e-12 * (1.0 + std::abs(mean))) ++res.violations;
  }
  res.pass = res.violations == 0;
  return res;
}

}  // namespace twrn

#endif  // TWRN_ORACLE_HPP

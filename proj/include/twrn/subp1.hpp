#ifndef TWRN_SUBP1_HPP
#define TWRN_SUBP1_HPP

// Fixed-mode energy minimization ("sub-P1"): with every state's uplink mode
// pinned, choose the uplink/downlink time split and per-state rates that
// minimize average power subject to both average rates reaching lambda.
//
// For a fixed split the problem separates into an uplink and a downlink
// water-filling, each parameterized by one multiplier (beta1, beta2) and
// inverted by a bracketed safeguarded-Newton search on log(beta). The split
// itself is found by golden-section search on the reduced objective and then
// polished on the analytic derivative of that objective.
//
// PNC states carry a fixed cost: an active PNC state pays (1/2)(1/g1r+1/g2r)
// even as its rate goes to zero, while an idle one pays nothing. Because all
// PNC power curves are the same function scaled by c = 1/g1r + 1/g2r, the
// optimal set of active PNC states is always the k states with smallest c, so
// the uplink solve searches over that prefix length k.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "twrn/channel.hpp"
#include "twrn/ratepower.hpp"

namespace twrn {

inline constexpr double kLn2 = std::numbers::ln2;

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double rate_rel_tol = 1e-12;  // dual search, relative to the target mean rate
  double f_tol = 1e-6;          // golden-section bracket width on f_u
  double f_lo = 1e-3;
  double f_hi = 1.0 - 1e-3;
  int f_scan_points = 16;       // coarse scan that seeds the golden bracket
  int max_dual_iter = 400;
  int max_golden_iter = 200;
  int max_polish_iter = 100;
  std::size_t exhaustive_pnc_limit = 64;  // enumerate every PNC prefix up to this many PNC states
};

struct KktPoint {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double gamma = 0.0;
};

struct TimeSplit {
  double f_u = 0.5;
  double f_d = 0.5;
};

struct StateAllocation {
  Mode mode = Mode::SPCDNC;
  double rate_u = 0.0;
  double rate_d = 0.0;
  double power_u = 0.0;
  double power_d = 0.0;
};

struct Allocation {
  TimeSplit split;
  std::vector<StateAllocation> per_state;
  KktPoint duals;
  double avg_energy = 0.0;
  double avg_rate_u = 0.0;
  double avg_rate_d = 0.0;
};

// ---------------------------------------------------------------------------
// Stationarity: rate as a function of the multiplier

inline double pnc_rate_given_beta1(double beta1, const ChannelState& s) {
  if (!(beta1 > 0.0)) return 0.0;
  const double c = 1.0 / s.g1r + 1.0 / s.g2r;
  return std::max(0.0, std::log2(beta1 / (kLn2 * c)));
}

/// Positive root x = 2^R of (2 ln2/g_Mr) x^2 + ln2 (1/g_mr - 1/g_Mr) x = beta1,
/// written in the cancellation-free form 2 beta / (b + sqrt(b^2 + 4 a beta)).
inline double dnc_rate_given_beta1(double beta1, const ChannelState& s) {
  if (!(beta1 > 0.0)) return 0.0;
  const double a = 2.0 * kLn2 / s.g_Mr();
  const double b = kLn2 * (1.0 / s.g_mr() - 1.0 / s.g_Mr());
  const double x = 2.0 * beta1 / (b + std::sqrt(b * b + 4.0 * a * beta1));
  return std::max(0.0, std::log2(x));
}

inline double uplink_rate_given_beta1(Mode m, double beta1, const ChannelState& s) {
  return m == Mode::PNC ? pnc_rate_given_beta1(beta1, s) : dnc_rate_given_beta1(beta1, s);
}

inline double downlink_rate_given_beta2(double beta2, const ChannelState& s) {
  if (!(beta2 > 0.0)) return 0.0;
  return std::max(0.0, std::log2(beta2 * s.g_rm() / kLn2));
}

namespace detail {

// 2^R at which a PNC state's power-per-bit curve touches its chord from the
// origin: y (1 - ln y) = 1/2, y > 1. Idle below, active above, in the convex
// relaxation of the on/off choice.
inline double pnc_activation_ratio() {
  static const double y = [] {
    double v = 2.0;
    for (int i = 0; i < 60; ++i) {
      const double g = v - v * std::log(v) - 0.5;
      const double step = g / -std::log(v);
      v -= step;
      if (std::abs(step) < 1e-16 * v) break;
    }
    return v;
  }();
  return y;
}

/// Per-state constants for the uplink of one fixed mode vector.
struct UplinkTerm {
  Mode mode;
  double c;         // PNC: 1/g1r + 1/g2r
  double log_k;     // PNC: ln(ln2 * c), rate = (t - log_k)/ln2 with t = ln beta
  double a, b;      // DNC stationarity quadratic a x^2 + b x = beta
  double inv_mr, inv_Mr;
};

struct UplinkEval {
  double mean_rate = 0.0;
  double dmean_dt = 0.0;
};

class UplinkModel {
 public:
  UplinkModel(const StateList& states, const std::vector<Mode>& modes) {
    terms_.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& s = states[i];
      UplinkTerm u{};
      u.mode = modes[i];
      u.inv_mr = 1.0 / s.g_mr();
      u.inv_Mr = 1.0 / s.g_Mr();
      u.c = 1.0 / s.g1r + 1.0 / s.g2r;
      u.log_k = std::log(kLn2 * u.c);
      u.a = 2.0 * kLn2 * u.inv_Mr;
      u.b = kLn2 * (u.inv_mr - u.inv_Mr);
      terms_.push_back(u);
      if (u.mode == Mode::PNC)
        pnc_order_.push_back(i);
      else
        ++n_dnc_;
    }
    std::stable_sort(pnc_order_.begin(), pnc_order_.end(),
                     [&](std::size_t x, std::size_t y) { return terms_[x].c < terms_[y].c; });
  }

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t n_pnc() const noexcept { return pnc_order_.size(); }
  std::size_t n_dnc() const noexcept { return n_dnc_; }
  const UplinkTerm& term(std::size_t i) const { return terms_[i]; }
  const std::vector<std::size_t>& pnc_order() const noexcept { return pnc_order_; }

  // ln(2^R) of the DNC stationarity root at beta = e^t, overflow-free:
  // b + sqrt(b^2 + 4 a beta) = e^q (z + sqrt(1 + z^2)) with q = ln sqrt(4 a beta)
  // and z = b e^-q.
  static double dnc_log_root(const UplinkTerm& u, double t) {
    const double q = 0.5 * (std::log(4.0 * u.a) + t);
    return kLn2 + t - q - std::asinh(u.b * std::exp(-q));
  }

  static double rate(const UplinkTerm& u, double t) {
    if (u.mode == Mode::PNC) return std::max(0.0, (t - u.log_k) / kLn2);
    return std::max(0.0, dnc_log_root(u, t) / kLn2);
  }

  // Rate and its derivative with respect to t = ln beta.
  static void rate_and_slope(const UplinkTerm& u, double t, double& r, double& dr) {
    if (u.mode == Mode::PNC) {
      r = (t - u.log_k) / kLn2;
      if (r <= 0.0) {
        r = 0.0;
        dr = 0.0;
      } else {
        dr = 1.0 / kLn2;
      }
      return;
    }
    const double lx = dnc_log_root(u, t);
    if (lx <= 0.0) {
      r = 0.0;
      dr = 0.0;
      return;
    }
    r = lx / kLn2;
    // beta = a x^2 + b x gives dR/dt = (a x + b) / ((2 a x + b) ln2).
    const double z = u.b / (u.a * std::exp(lx));
    dr = (1.0 + z) / ((2.0 + z) * kLn2);
  }

  static double power(const UplinkTerm& u, double r) {
    const double x = std::exp2(r);
    if (u.mode == Mode::PNC) return u.c * (x - 0.5);
    return (x - 1.0) * u.inv_mr + x * (x - 1.0) * u.inv_Mr;
  }

  // P(R) - R P'(R): the per-state contribution to d/df of f P(T/f).
  static double time_slope(const UplinkTerm& u, double r) {
    const double x = std::exp2(r);
    const double dp = u.mode == Mode::PNC ? kLn2 * u.c * x : u.a * x * x + u.b * x;
    return power(u, r) - r * dp;
  }

  static double marginal_power(const UplinkTerm& u, double r) {
    const double x = std::exp2(r);
    return u.mode == Mode::PNC ? kLn2 * u.c * x : u.a * x * x + u.b * x;
  }

  UplinkEval eval(double t, const std::vector<char>& mask) const {
    UplinkEval e;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!mask[i]) continue;
      double r, dr;
      rate_and_slope(terms_[i], t, r, dr);
      e.mean_rate += r;
      e.dmean_dt += dr;
    }
    const double n = static_cast<double>(terms_.size());
    e.mean_rate /= n;
    e.dmean_dt /= n;
    return e;
  }

  std::vector<char> prefix_mask(std::size_t k) const {
    std::vector<char> mask(terms_.size(), 0);
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].mode == Mode::SPCDNC) mask[i] = 1;
    for (std::size_t j = 0; j < k && j < pnc_order_.size(); ++j) mask[pnc_order_[j]] = 1;
    return mask;
  }

 private:
  std::vector<UplinkTerm> terms_;
  std::vector<std::size_t> pnc_order_;
  std::size_t n_dnc_ = 0;
};

/// Finds t = ln(beta) with mean_rate(t) = target. `eval(t)` must return a
/// continuous nondecreasing mean rate and its slope. Newton steps are taken
/// when they stay inside the current bracket, bisection otherwise.
template <class Eval>
double invert_mean_rate(Eval&& eval, double target, double rel_tol, int max_iter, double t0 = 0.0) {
  const double tol = rel_tol * target;
  double t = t0;
  UplinkEval e = eval(t);
  int iter = 0;
  double lo, hi;
  if (e.mean_rate < target) {
    lo = t;
    double step = 1.0;
    for (;;) {
      if (++iter > max_iter) throw ConvergenceError("dual search: could not bracket target rate");
      t = lo + step;
      e = eval(t);
      if (e.mean_rate >= target) {
        hi = t;
        break;
      }
      lo = t;
      step *= 2.0;
    }
  } else {
    hi = t;
    double step = 1.0;
    for (;;) {
      if (++iter > max_iter) throw ConvergenceError("dual search: could not bracket target rate");
      t = hi - step;
      e = eval(t);
      if (e.mean_rate < target) {
        lo = t;
        break;
      }
      hi = t;
      step *= 2.0;
    }
  }
  if (std::abs(e.mean_rate - target) <= tol) return t;
  for (;;) {
    if (++iter > max_iter) throw ConvergenceError("dual search: iteration cap reached");
    double next = 0.5 * (lo + hi);
    if (e.dmean_dt > 0.0) {
      const double newton = t - (e.mean_rate - target) / e.dmean_dt;
      if (newton > lo && newton < hi) next = newton;
    }
    t = next;
    e = eval(t);
    if (std::abs(e.mean_rate - target) <= tol) return t;
    if (e.mean_rate < target)
      lo = t;
    else
      hi = t;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) return t;
  }
}

struct UplinkSolution {
  double t = -std::numeric_limits<double>::infinity();  // ln beta1
  std::size_t k = 0;                                     // active PNC prefix length
  std::vector<double> rates;
  double mean_power = 0.0;         // idle states at zero power
  double mean_power_forced = 0.0;  // every masked PNC state pays its fixed cost
  double mean_time_slope = 0.0;
};

inline UplinkSolution solve_uplink_mask(const UplinkModel& model, std::size_t k, double target,
                                        const SolverOptions& opt) {
  const auto mask = model.prefix_mask(k);
  UplinkSolution sol;
  sol.k = k;
  sol.rates.assign(model.size(), 0.0);
  if (target <= 0.0) return sol;
  sol.t = invert_mean_rate([&](double t) { return model.eval(t, mask); }, target, opt.rate_rel_tol,
                           opt.max_dual_iter);
  const double n = static_cast<double>(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (!mask[i]) continue;
    const auto& u = model.term(i);
    const double r = UplinkModel::rate(u, sol.t);
    sol.rates[i] = r;
    if (r > 0.0) {
      const double p = UplinkModel::power(u, r);
      sol.mean_power += p;
      sol.mean_power_forced += p;
      sol.mean_time_slope += UplinkModel::time_slope(u, r);
    } else if (u.mode == Mode::PNC) {
      sol.mean_power_forced += 0.5 * u.c;
    }
  }
  sol.mean_power /= n;
  sol.mean_power_forced /= n;
  sol.mean_time_slope /= n;
  return sol;
}

// Prefix length suggested by the convex relaxation of the PNC on/off choice:
// a PNC state is active iff beta >= ln2 * c * y_t.
inline std::size_t relaxed_pnc_prefix(const UplinkModel& model, double target) {
  const double log_yt = std::log(pnc_activation_ratio());
  auto mean_rate = [&](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
      const auto& u = model.term(i);
      if (u.mode == Mode::PNC && t < u.log_k + log_yt) continue;
      sum += UplinkModel::rate(u, t);
    }
    return sum / static_cast<double>(model.size());
  };
  double lo = -1.0, hi = 1.0;
  while (mean_rate(lo) >= target) lo -= 2.0 * (1.0 - lo);
  while (mean_rate(hi) < target) hi += 2.0 * (1.0 + hi);
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean_rate(mid) < target ? lo : hi) = mid;
  }
  std::size_t k = 0;
  for (std::size_t j : model.pnc_order())
    if (hi >= model.term(j).log_k + log_yt) ++k;
  return k;
}

/// Minimum mean uplink power for mean rate `target`, over every admissible
/// PNC prefix (exhaustive for small PNC counts, local descent from the
/// relaxed prefix otherwise).
inline UplinkSolution solve_uplink(const UplinkModel& model, double target, const SolverOptions& opt) {
  if (target <= 0.0) return solve_uplink_mask(model, 0, 0.0, opt);
  const std::size_t n_pnc = model.n_pnc();
  const std::size_t k_min = model.n_dnc() > 0 ? 0 : 1;
  if (n_pnc == 0) return solve_uplink_mask(model, 0, target, opt);

  auto better = [](const UplinkSolution& x, const UplinkSolution& y) {
    return x.mean_power_forced < y.mean_power_forced;
  };

  if (n_pnc <= opt.exhaustive_pnc_limit) {
    UplinkSolution best = solve_uplink_mask(model, k_min, target, opt);
    for (std::size_t k = k_min + 1; k <= n_pnc; ++k) {
      UplinkSolution cand = solve_uplink_mask(model, k, target, opt);
      if (better(cand, best)) best = std::move(cand);
    }
    return best;
  }

  std::size_t k0 = std::clamp(relaxed_pnc_prefix(model, target), k_min, n_pnc);
  UplinkSolution best = solve_uplink_mask(model, k0, target, opt);
  for (int dir : {+1, -1}) {
    std::size_t k = best.k;
    for (;;) {
      if ((dir < 0 && k == k_min) || (dir > 0 && k == n_pnc)) break;
      k = dir > 0 ? k + 1 : k - 1;
      UplinkSolution cand = solve_uplink_mask(model, k, target, opt);
      if (!better(cand, best)) break;
      best = std::move(cand);
    }
  }
  return best;
}

class DownlinkModel {
 public:
  explicit DownlinkModel(const StateList& states) {
    log_k_.reserve(states.size());
    inv_g_.reserve(states.size());
    for (const auto& s : states) {
      log_k_.push_back(std::log(kLn2 / s.g_rm()));
      inv_g_.push_back(1.0 / s.g_rm());
    }
  }

  std::size_t size() const noexcept { return log_k_.size(); }

  UplinkEval eval(double t) const {
    UplinkEval e;
    for (double lk : log_k_) {
      if (t > lk) {
        e.mean_rate += (t - lk) / kLn2;
        e.dmean_dt += 1.0 / kLn2;
      }
    }
    const double n = static_cast<double>(log_k_.size());
    e.mean_rate /= n;
    e.dmean_dt /= n;
    return e;
  }

  double rate(std::size_t i, double t) const { return std::max(0.0, (t - log_k_[i]) / kLn2); }
  double power(std::size_t i, double r) const { return (std::exp2(r) - 1.0) * inv_g_[i]; }
  double marginal_power(std::size_t i, double r) const { return kLn2 * std::exp2(r) * inv_g_[i]; }
  double time_slope(std::size_t i, double r) const { return power(i, r) - r * marginal_power(i, r); }

 private:
  std::vector<double> log_k_;
  std::vector<double> inv_g_;
};

struct DownlinkSolution {
  double t = -std::numeric_limits<double>::infinity();
  std::vector<double> rates;
  double mean_power = 0.0;
  double mean_time_slope = 0.0;
};

inline DownlinkSolution solve_downlink(const DownlinkModel& model, double target, const SolverOptions& opt) {
  DownlinkSolution sol;
  sol.rates.assign(model.size(), 0.0);
  if (target <= 0.0) return sol;
  sol.t = invert_mean_rate([&](double t) { return model.eval(t); }, target, opt.rate_rel_tol,
                           opt.max_dual_iter);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double r = model.rate(i, sol.t);
    sol.rates[i] = r;
    if (r > 0.0) {
      sol.mean_power += model.power(i, r);
      sol.mean_time_slope += model.time_slope(i, r);
    }
  }
  const double n = static_cast<double>(model.size());
  sol.mean_power /= n;
  sol.mean_time_slope /= n;
  return sol;
}

inline void check_inputs(const StateList& states, const std::vector<Mode>& modes, double target) {
  if (states.empty()) throw std::invalid_argument("states must be nonempty");
  if (modes.size() != states.size()) throw std::invalid_argument("modes and states differ in length");
  if (!(target >= 0.0) || !std::isfinite(target)) throw std::invalid_argument("target rate must be finite and >= 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Multiplier searches

/// beta1 at which the mean over states of the mode-appropriate stationarity
/// rate equals `target_avg_rate`. Every state participates.
inline double solve_beta1(const StateList& states, const std::vector<Mode>& modes, double target_avg_rate,
                          const SolverOptions& opt = {}) {
  detail::check_inputs(states, modes, target_avg_rate);
  if (target_avg_rate == 0.0) return 0.0;
  const detail::UplinkModel model(states, modes);
  const auto mask = model.prefix_mask(model.n_pnc());
  return std::exp(detail::invert_mean_rate([&](double t) { return model.eval(t, mask); }, target_avg_rate,
                                           opt.rate_rel_tol, opt.max_dual_iter));
}

inline double solve_beta2(const StateList& states, double target_avg_rate, const SolverOptions& opt = {}) {
  detail::check_inputs(states, std::vector<Mode>(states.size(), Mode::PNC), target_avg_rate);
  if (target_avg_rate == 0.0) return 0.0;
  const detail::DownlinkModel model(states);
  return std::exp(detail::invert_mean_rate([&](double t) { return model.eval(t); }, target_avg_rate,
                                           opt.rate_rel_tol, opt.max_dual_iter));
}

// ---------------------------------------------------------------------------
// Time split

/// Reusable evaluator of the reduced sub-P1 objective for one (states, modes,
/// lambda). The downlink gets f_d = 1 - f_u.
class Subp1Problem {
 public:
  Subp1Problem(const StateList& states, const std::vector<Mode>& modes, double lambda, SolverOptions opt = {})
      : states_(states), modes_(modes), lambda_(lambda), opt_(opt), up_(states, modes), down_(states) {
    detail::check_inputs(states, modes, lambda);
  }

  double lambda() const noexcept { return lambda_; }
  const SolverOptions& options() const noexcept { return opt_; }

  struct Point {
    double f_u = 0.5;
    double energy = 0.0;
    double derivative = 0.0;  // d energy / d f_u
    detail::UplinkSolution up;
    detail::DownlinkSolution down;
  };

  Point evaluate(double f_u) const {
    if (!(f_u > 0.0 && f_u < 1.0)) throw std::invalid_argument("f_u must lie in (0,1)");
    Point p;
    p.f_u = f_u;
    const double f_d = 1.0 - f_u;
    p.up = detail::solve_uplink(up_, lambda_ / f_u, opt_);
    p.down = detail::solve_downlink(down_, lambda_ / f_d, opt_);
    p.energy = f_u * p.up.mean_power_forced + f_d * p.down.mean_power;
    p.derivative = p.up.mean_time_slope - p.down.mean_time_slope;
    return p;
  }

  double energy(double f_u) const { return evaluate(f_u).energy; }

  /// Allocation with both average-rate constraints tight at the given split.
  Allocation allocate(double f_u) const { return to_allocation(evaluate(f_u)); }

  Allocation to_allocation(const Point& p) const {
    Allocation a;
    a.split = {p.f_u, 1.0 - p.f_u};
    a.per_state.resize(states_.size());
    double sum_e = 0.0, sum_ru = 0.0, sum_rd = 0.0;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      auto& sa = a.per_state[i];
      sa.mode = modes_[i];
      sa.rate_u = p.up.rates[i];
      sa.rate_d = p.down.rates[i];
      sa.power_u = sa.rate_u > 0.0 ? uplink_sum_power(sa.mode, sa.rate_u, states_[i]) : 0.0;
      sa.power_d = sa.rate_d > 0.0 ? downlink_power(sa.rate_d, states_[i]) : 0.0;
      sum_e += a.split.f_u * sa.power_u + a.split.f_d * sa.power_d;
      sum_ru += sa.rate_u;
      sum_rd += sa.rate_d;
    }
    const double n = static_cast<double>(states_.size());
    a.avg_energy = sum_e / n;
    a.avg_rate_u = a.split.f_u * sum_ru / n;
    a.avg_rate_d = a.split.f_d * sum_rd / n;
    a.duals.beta1 = std::exp(p.up.t);
    a.duals.beta2 = std::exp(p.down.t);
    a.duals.gamma = -p.down.mean_time_slope;
    return a;
  }

  /// Coarse scan, golden-section refinement of the best bracket, then a
  /// safeguarded secant on d energy / d f_u when the bracket straddles its root.
  Point minimize() const {
    const int n = std::max(3, opt_.f_scan_points);
    const double lo = opt_.f_lo, hi = opt_.f_hi;
    std::vector<double> xs(n), es(n);
    std::size_t best = 0;
    for (int i = 0; i < n; ++i) {
      xs[i] = lo + (hi - lo) * i / (n - 1);
      es[i] = energy(xs[i]);
      if (es[i] < es[best]) best = i;
    }
    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[best + 1 == static_cast<std::size_t>(n) ? n - 1 : best + 1];

    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = energy(c), fd = energy(d);
    int iter = 0;
    while (b - a > opt_.f_tol) {
      if (++iter > opt_.max_golden_iter) throw ConvergenceError("golden-section search: iteration cap reached");
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = energy(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = energy(d);
      }
    }

    Point pa = evaluate(a), pb = evaluate(b);
    Point best_pt = pa.energy <= pb.energy ? pa : pb;
    const Point mid = evaluate(0.5 * (a + b));
    if (mid.energy <= best_pt.energy) best_pt = mid;
    if (!(pa.derivative < 0.0 && pb.derivative > 0.0)) return best_pt;

    // Illinois regula falsi on the derivative.
    double da = pa.derivative, db = pb.derivative;
    int side = 0;
    for (int i = 0; i < opt_.max_polish_iter; ++i) {
      const double x = (a * db - b * da) / (db - da);
      Point px = evaluate(x);
      if (px.derivative == 0.0 || b - a < 1e-14) {
        best_pt = px;
        break;
      }
      if (px.derivative < 0.0) {
        a = x;
        da = px.derivative;
        if (side == -1) db *= 0.5;
        side = -1;
      } else {
        b = x;
        db = px.derivative;
        if (side == +1) da *= 0.5;
        side = +1;
      }
      best_pt = std::move(px);
      if (std::abs(best_pt.derivative) <= 1e-13 * std::max(1.0, best_pt.energy)) break;
    }
    return best_pt;
  }

 private:
  const StateList& states_;
  const std::vector<Mode>& modes_;
  double lambda_;
  SolverOptions opt_;
  detail::UplinkModel up_;
  detail::DownlinkModel down_;
};

inline Allocation zero_allocation(const StateList& states, const std::vector<Mode>& modes) {
  Allocation a;
  a.per_state.resize(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) a.per_state[i].mode = modes[i];
  return a;
}

/// Solves sub-P1 for a fixed mode vector. f_u + f_d = 1 at the returned
/// optimum; both average-rate constraints are tight.
inline Allocation solve_subp1(const StateList& states, const std::vector<Mode>& modes, double lambda,
                              const SolverOptions& opt = {}) {
  detail::check_inputs(states, modes, lambda);
  if (!(opt.f_lo > 0.0 && opt.f_hi < 1.0 && opt.f_lo < opt.f_hi))
    throw std::invalid_argument("f bounds must satisfy 0 < f_lo < f_hi < 1");
  if (lambda == 0.0) return zero_allocation(states, modes);
  const Subp1Problem problem(states, modes, lambda, opt);
  return problem.to_allocation(problem.minimize());
}

// ---------------------------------------------------------------------------
// Optimality check

struct KktReport {
  bool applicable = false;
  double rate_u = 0.0;  // max |P_u'(R) - beta1| over active uplink states
  double rate_d = 0.0;  // max |P_d'(R) - beta2| over active downlink states
  double time_u = 0.0;  // |mean(P_u - R P_u') + gamma|
  double time_d = 0.0;  // |mean(P_d - R P_d') + gamma|, zero since gamma is taken from it
  double gamma = 0.0;
  std::vector<std::size_t> clamped_u;
  std::vector<std::size_t> clamped_d;

  double max_residual() const { return std::max({rate_u, rate_d, time_u, time_d}); }
};

/// Evaluates the stationarity conditions at an allocation. gamma is recovered
/// from the downlink time condition; states at zero rate are listed as
/// clamped and excluded from the rate conditions.
inline KktReport kkt_residuals(const Allocation& alloc, const StateList& states, const std::vector<Mode>& modes) {
  detail::check_inputs(states, modes, 0.0);
  KktReport rep;
  const std::size_t n = states.size();
  const detail::UplinkModel up(states, modes);
  const detail::DownlinkModel down(states);
  double slope_u = 0.0, slope_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& sa = alloc.per_state[i];
    const auto& u = up.term(i);
    if (sa.rate_u > 0.0) {
      rep.rate_u = std::max(rep.rate_u, std::abs(detail::UplinkModel::marginal_power(u, sa.rate_u) - alloc.duals.beta1));
      slope_u += detail::UplinkModel::time_slope(u, sa.rate_u);
    } else {
      rep.clamped_u.push_back(i);
    }
    if (sa.rate_d > 0.0) {
      rep.rate_d = std::max(rep.rate_d, std::abs(down.marginal_power(i, sa.rate_d) - alloc.duals.beta2));
      slope_d += down.time_slope(i, sa.rate_d);
    } else {
      rep.clamped_d.push_back(i);
    }
  }
  if (rep.clamped_u.size() == n || rep.clamped_d.size() == n) {
    rep.applicable = false;
    rep.rate_u = rep.rate_d = 0.0;
    return rep;
  }
  rep.applicable = true;
  slope_u /= static_cast<double>(n);
  slope_d /= static_cast<double>(n);
  rep.gamma = -slope_d;
  rep.time_u = std::abs(slope_u + rep.gamma);
  rep.time_d = std::abs(slope_d + rep.gamma);
  return rep;
}

// ---------------------------------------------------------------------------
// Time-scaled energy of serving T bits in fraction f of the frame while
// active. These are the perspectives f * P(T/f) that make sub-P1 convex.

inline double pnc_perspective_energy(double T, double f, const ChannelState& s) {
  return f * (std::exp2(T / f) - 0.5) * (1.0 / s.g1r + 1.0 / s.g2r);
}

inline double dnc_perspective_energy(double T, double f, const ChannelState& s) {
  const double x = std::exp2(T / f);
  return f * ((x - 1.0) / s.g_mr() + x * (x - 1.0) / s.g_Mr());
}

inline double downlink_perspective_energy(double T, double f, const ChannelState& s) {
  return f * (std::exp2(T / f) - 1.0) / s.g_rm();
}

}  // namespace twrn

#endif  // TWRN_SUBP1_HPP

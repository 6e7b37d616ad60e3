#ifndef TWRN_RATEPOWER_HPP
#define TWRN_RATEPOWER_HPP

// Rate/power relations for the PNC and SPC-DNC uplinks and the shared
// broadcast downlink, and the per-state mode-selection test between them.
// Rates are in bits per channel use, powers are linear with unit noise.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

#include "twrn/channel.hpp"

namespace twrn {

enum class Mode { PNC, SPCDNC };

inline constexpr std::string_view to_string(Mode m) noexcept {
  return m == Mode::PNC ? "PNC" : "SPCDNC";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "PNC" || s == "pnc") return Mode::PNC;
  if (s == "SPCDNC" || s == "spcdnc" || s == "DNC" || s == "dnc" || s == "SPC-DNC") return Mode::SPCDNC;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

namespace detail {
inline void require_positive_rate(double R, const char* who) {
  if (!(R > 0.0)) throw std::domain_error(std::string(who) + ": rate must be > 0");
}
}  // namespace detail

/// Achievable PNC uplink rate at receive SNR `snr`, clamped at zero.
inline double pnc_uplink_rate(double snr) {
  if (snr < 0.0) throw std::domain_error("pnc_uplink_rate: snr must be >= 0");
  return std::max(0.0, std::log2(0.5 + snr));
}

inline double pnc_uplink_sum_power(double R, const ChannelState& s) {
  detail::require_positive_rate(R, "pnc_uplink_sum_power");
  return (std::exp2(R) - 0.5) * (1.0 / s.g1r + 1.0 / s.g2r);
}

struct DncUserPowers {
  int weak_node = 1;  // 1 or 2; the weaker uplink is decoded last
  double weak = 0.0;
  double strong = 0.0;
};

/// Successive-decoding uplink: the strong user is decoded first and sees the
/// weak user as interference, the weak user is decoded interference-free.
/// Equal gains name S1 the weak user.
inline DncUserPowers dnc_uplink_user_powers(double R, const ChannelState& s) {
  detail::require_positive_rate(R, "dnc_uplink_user_powers");
  const double x = std::exp2(R);
  DncUserPowers p;
  p.weak_node = s.g1r <= s.g2r ? 1 : 2;
  p.weak = (x - 1.0) / s.g_mr();
  p.strong = x * (x - 1.0) / s.g_Mr();
  return p;
}

inline double dnc_uplink_sum_power(double R, const ChannelState& s) {
  detail::require_positive_rate(R, "dnc_uplink_sum_power");
  const double x = std::exp2(R);
  return (x - 1.0) / s.g_mr() + x * (x - 1.0) / s.g_Mr();
}

/// Broadcast power; the same for both network-coding modes.
inline double downlink_power(double R, const ChannelState& s) {
  detail::require_positive_rate(R, "downlink_power");
  return (std::exp2(R) - 1.0) / s.g_rm();
}

inline double uplink_sum_power(Mode m, double R, const ChannelState& s) {
  return m == Mode::PNC ? pnc_uplink_sum_power(R, s) : dnc_uplink_sum_power(R, s);
}

/// PNC minus SPC-DNC uplink power by direct subtraction.
inline double energy_gap(double R, const ChannelState& s) {
  detail::require_positive_rate(R, "energy_gap");
  return pnc_uplink_sum_power(R, s) - dnc_uplink_sum_power(R, s);
}

/// The same gap in the reduced form 2^R(2-2^R)/g_Mr + 1/(2 g_mr) - 1/(2 g_Mr).
inline double energy_gap_closed(double R, const ChannelState& s) {
  detail::require_positive_rate(R, "energy_gap_closed");
  const double x = std::exp2(R);
  return x * (2.0 - x) / s.g_Mr() + 0.5 / s.g_mr() - 0.5 / s.g_Mr();
}

/// True when PNC needs no more uplink power than SPC-DNC at rate R. Ties go
/// to PNC.
inline bool prefer_pnc(double R, const ChannelState& s) {
  detail::require_positive_rate(R, "prefer_pnc");
  const double x = std::exp2(R);
  return 0.5 / s.g_mr() - 0.5 / s.g_Mr() <= x * (x - 2.0) / s.g_Mr();
}

inline Mode cheaper_mode(double R, const ChannelState& s) {
  return prefer_pnc(R, s) ? Mode::PNC : Mode::SPCDNC;
}

}  // namespace twrn

#endif  // TWRN_RATEPOWER_HPP

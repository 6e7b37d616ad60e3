#ifndef TWRN_CHANNEL_HPP
#define TWRN_CHANNEL_HPP

// Channel-gain data model for the three-node two-way relay network, plus
// seeded Rayleigh sampling and CSV ingest/egress of state lists.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace twrn {

/// One fading realization. All four entries are linear power gains with the
/// noise power normalized to one, so the receive SNR of a link is P * g.
struct ChannelState {
  double g1r = 1.0;  // S1 -> R
  double g2r = 1.0;  // S2 -> R
  double gr1 = 1.0;  // R -> S1
  double gr2 = 1.0;  // R -> S2

  double g_mr() const noexcept { return std::min(g1r, g2r); }
  double g_Mr() const noexcept { return std::max(g1r, g2r); }
  double g_rm() const noexcept { return std::min(gr1, gr2); }

  bool valid() const noexcept {
    auto ok = [](double g) { return std::isfinite(g) && g > 0.0; };
    return ok(g1r) && ok(g2r) && ok(gr1) && ok(gr2);
  }

  friend bool operator==(const ChannelState&, const ChannelState&) = default;
};

using StateList = std::vector<ChannelState>;

struct FadingModel {
  enum class Kind { RayleighUnitMean, Deterministic };

  Kind kind = Kind::RayleighUnitMean;
  bool reciprocal = true;
  StateList fixed;  // used when kind == Deterministic

  static FadingModel rayleigh(bool reciprocal = true) {
    return FadingModel{Kind::RayleighUnitMean, reciprocal, {}};
  }
  static FadingModel deterministic(StateList states) {
    return FadingModel{Kind::Deterministic, false, std::move(states)};
  }
};

class ChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ChannelError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : ChannelError("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class NonpositiveGainError : public ParseError {
 public:
  NonpositiveGainError(std::size_t row, const std::string& what) : ParseError(row, what) {}
};

class EmptyInputError : public ChannelError {
 public:
  using ChannelError::ChannelError;
};

namespace detail {

// Unit-mean exponential variate by inversion. The uniform is built from the
// top 53 bits of one mt19937_64 output and offset by half an ulp so it lies
// strictly inside (0,1); the result is therefore finite and positive, and
// identical across standard libraries (std::exponential_distribution is not).
inline double exponential_unit(std::mt19937_64& rng) {
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

}  // namespace detail

/// Draws n channel states.
///
/// Rayleigh stream discipline: generator std::mt19937_64 seeded with `seed`;
/// each state consumes exactly four outputs in the order g1r, g2r, gr1, gr2.
/// With reciprocity the downlink draws are still consumed and then replaced
/// by the uplink gains, so toggling reciprocity never shifts the stream.
///
/// Deterministic models return the first n listed states (cycling if the
/// list is shorter than n).
inline StateList sample_states(std::size_t n, std::uint64_t seed, const FadingModel& model) {
  if (n == 0) throw std::invalid_argument("sample_states: n must be >= 1");
  StateList out;
  out.reserve(n);
  if (model.kind == FadingModel::Kind::Deterministic) {
    if (model.fixed.empty()) throw EmptyInputError("sample_states: deterministic model has no states");
    for (std::size_t i = 0; i < n; ++i) out.push_back(model.fixed[i % model.fixed.size()]);
    return out;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    ChannelState s;
    s.g1r = detail::exponential_unit(rng);
    s.g2r = detail::exponential_unit(rng);
    s.gr1 = detail::exponential_unit(rng);
    s.gr2 = detail::exponential_unit(rng);
    if (model.reciprocal) {
      s.gr1 = s.g1r;
      s.gr2 = s.g2r;
    }
    out.push_back(s);
  }
  return out;
}

inline constexpr const char* kStatesHeader = "g1r,g2r,gr1,gr2";

inline void write_states(std::ostream& os, const StateList& states) {
  os << kStatesHeader << '\n';
  char buf[128];
  for (const auto& s : states) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.g1r, s.g2r, s.gr1, s.gr2);
    os << buf;
  }
}

inline void save_states(const std::string& path, const StateList& states) {
  std::ofstream os(path);
  if (!os) throw ChannelError("cannot open '" + path + "' for writing");
  write_states(os, states);
}

/// Parses the `g1r,g2r,gr1,gr2` CSV. Row numbers in diagnostics are 1-based
/// file line numbers. Blank lines are skipped.
inline StateList read_states(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  StateList out;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line)
        if (c != ' ' && c != '\t') compact += c;
      if (compact != kStatesHeader)
        throw ParseError(lineno, "expected header '" + std::string(kStatesHeader) + "'");
      header_seen = true;
      continue;
    }
    double g[4];
    std::stringstream ss(line);
    std::string field;
    int k = 0;
    while (std::getline(ss, field, ',')) {
      if (k >= 4) throw ParseError(lineno, "too many fields");
      std::size_t used = 0;
      try {
        g[k] = std::stod(field, &used);
      } catch (const std::exception&) {
        throw ParseError(lineno, "field " + std::to_string(k + 1) + " is not a number: '" + field + "'");
      }
      if (field.find_first_not_of(" \t", used) != std::string::npos)
        throw ParseError(lineno, "trailing characters in field " + std::to_string(k + 1));
      ++k;
    }
    if (k != 4) throw ParseError(lineno, "expected 4 fields, got " + std::to_string(k));
    ChannelState s{g[0], g[1], g[2], g[3]};
    if (!s.valid()) throw NonpositiveGainError(lineno, "gains must be positive and finite");
    out.push_back(s);
  }
  if (!header_seen) throw EmptyInputError("states file has no header");
  if (out.empty()) throw EmptyInputError("states file has no data rows");
  return out;
}

inline StateList load_states(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ChannelError("cannot open states file '" + path + "'");
  return read_states(is);
}

}  // namespace twrn

#endif  // TWRN_CHANNEL_HPP

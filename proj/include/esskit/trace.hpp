#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace esskit {

enum class TraceKind { rsr_signal, power_kw };

// Uniformly sampled time series: a regulation signal in [-1,1] or a facility
// power draw in kW.
struct Trace {
  double slot_seconds = 0.0;
  TraceKind kind = TraceKind::rsr_signal;
  std::vector<double> values;
};

namespace detail {

// Uniform in [0,1) from the top 53 bits; identical on every platform, unlike
// std::uniform_real_distribution.
inline double next_unit(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

// Bounded-increment random walk with mild mean reversion: each step moves by
// at most slot_seconds/tau, and the pull toward zero keeps day-long means
// small. mean_reversion = 0 gives the pure walk.
inline Trace gen_rsr_signal(std::size_t slots, double slot_seconds, double tau,
                            double mean_reversion = 0.005, std::uint64_t seed = 0) {
  if (slots < 1) throw std::invalid_argument("slots must be >= 1");
  if (!(slot_seconds > 0.0)) throw std::invalid_argument("slot_seconds must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(mean_reversion >= 0.0 && mean_reversion <= 1.0))
    throw std::invalid_argument("mean_reversion must be in [0,1]");
  std::mt19937_64 rng(seed);
  const double step = slot_seconds / tau;
  Trace tr;
  tr.slot_seconds = slot_seconds;
  tr.kind = TraceKind::rsr_signal;
  tr.values.resize(slots);
  double beta = 0.0;
  for (std::size_t t = 0; t < slots; ++t) {
    const double delta = (2.0 * detail::next_unit(rng) - 1.0) * step;
    beta = std::clamp(beta * (1.0 - mean_reversion) + delta, -1.0, 1.0);
    tr.values[t] = beta;
  }
  return tr;
}

// Diurnal half-sine between base_fraction*peak and peak with multiplicative
// noise, clamped to [0, peak]. The largest sample is then pinned to exactly
// peak_kw so downstream peak math is exact.
inline Trace gen_power_trace(std::size_t slots, double slot_seconds, double peak_kw,
                             double base_fraction = 0.3, double noise_fraction = 0.05,
                             std::uint64_t seed = 0) {
  if (slots < 1) throw std::invalid_argument("slots must be >= 1");
  if (!(slot_seconds > 0.0)) throw std::invalid_argument("slot_seconds must be > 0");
  if (!(peak_kw > 0.0)) throw std::invalid_argument("peak_kw must be > 0");
  if (!(base_fraction >= 0.0 && base_fraction < 1.0))
    throw std::invalid_argument("base_fraction must be in [0,1)");
  if (!(noise_fraction >= 0.0 && noise_fraction < 1.0))
    throw std::invalid_argument("noise_fraction must be in [0,1)");
  std::mt19937_64 rng(seed);
  const double base = base_fraction * peak_kw;
  Trace tr;
  tr.slot_seconds = slot_seconds;
  tr.kind = TraceKind::power_kw;
  tr.values.resize(slots);
  std::size_t peak_at = 0;
  for (std::size_t t = 0; t < slots; ++t) {
    const double day_pos = std::fmod((double(t) + 0.5) * slot_seconds, 86400.0) / 86400.0;
    const double shape = base + (peak_kw - base) * std::sin(day_pos * std::numbers::pi);
    const double noisy = shape * (1.0 + noise_fraction * (2.0 * detail::next_unit(rng) - 1.0));
    tr.values[t] = std::clamp(noisy, 0.0, peak_kw);
    if (tr.values[t] > tr.values[peak_at]) peak_at = t;
  }
  tr.values[peak_at] = peak_kw;
  return tr;
}

struct TraceParseError : std::runtime_error {
  std::size_t line;
  TraceParseError(std::size_t line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline std::string_view chomp(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

} // namespace detail

// CSV layout: "t,beta" or "t,power_kw", then "# slot_seconds=<n>", then rows
// "t,value" with t counting up from 1. Written at full precision so a
// save/load round trip is exact.
inline void save_csv(const Trace& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << (tr.kind == TraceKind::rsr_signal ? "t,beta\n" : "t,power_kw\n");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", tr.slot_seconds);
  out << "# slot_seconds=" << buf << "\n";
  for (std::size_t t = 0; t < tr.values.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", tr.values[t]);
    out << (t + 1) << ',' << buf << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline Trace load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string raw;
  std::size_t lineno = 0;

  if (!std::getline(in, raw)) throw TraceParseError(1, "missing header");
  ++lineno;
  std::string_view header = detail::chomp(raw);
  Trace tr;
  if (header == "t,beta") tr.kind = TraceKind::rsr_signal;
  else if (header == "t,power_kw") tr.kind = TraceKind::power_kw;
  else throw TraceParseError(lineno, "unrecognized header: " + std::string(header));

  if (!std::getline(in, raw)) throw TraceParseError(2, "missing slot_seconds line");
  ++lineno;
  std::string_view meta = detail::chomp(raw);
  constexpr std::string_view prefix = "# slot_seconds=";
  if (meta.substr(0, prefix.size()) != prefix)
    throw TraceParseError(lineno, "expected '# slot_seconds=<number>'");
  if (!detail::parse_double(meta.substr(prefix.size()), tr.slot_seconds) ||
      !(tr.slot_seconds > 0.0))
    throw TraceParseError(lineno, "bad slot_seconds value");

  std::size_t expect_t = 1;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view row = detail::chomp(raw);
    auto comma = row.find(',');
    if (comma == std::string_view::npos)
      throw TraceParseError(lineno, "malformed row (no comma)");
    double tval = 0.0, v = 0.0;
    if (!detail::parse_double(row.substr(0, comma), tval) || tval != double(expect_t))
      throw TraceParseError(lineno, "slot index must be " + std::to_string(expect_t));
    if (!detail::parse_double(row.substr(comma + 1), v))
      throw TraceParseError(lineno, "malformed value");
    if (tr.kind == TraceKind::rsr_signal && !(v >= -1.0 && v <= 1.0))
      throw TraceParseError(lineno, "signal value out of [-1,1]");
    if (tr.kind == TraceKind::power_kw && !(v >= 0.0))
      throw TraceParseError(lineno, "power value must be >= 0");
    tr.values.push_back(v);
    ++expect_t;
  }
  return tr;
}

// Block means; the trailing partial block, if any, is dropped and flagged.
inline Trace downsample(const Trace& tr, std::size_t factor,
                        bool* dropped_remainder = nullptr) {
  if (factor == 0) throw std::invalid_argument("factor must be >= 1");
  Trace out;
  out.slot_seconds = tr.slot_seconds * double(factor);
  out.kind = tr.kind;
  const std::size_t blocks = tr.values.size() / factor;
  if (dropped_remainder) *dropped_remainder = blocks * factor != tr.values.size();
  out.values.resize(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < factor; ++i) sum += tr.values[b * factor + i];
    out.values[b] = sum / double(factor);
  }
  return out;
}

// Crude usage-rate proxy: two sign changes of the signal make one cycle.
inline double estimate_cycles_per_day(const Trace& tr) {
  if (tr.kind != TraceKind::rsr_signal)
    throw std::invalid_argument("cycle estimation needs an rsr_signal trace");
  if (tr.values.empty()) return 0.0;
  int last_sign = 0;
  std::size_t changes = 0;
  for (double v : tr.values) {
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s != 0) {
      if (last_sign != 0 && s != last_sign) ++changes;
      last_sign = s;
    }
  }
  const double span_days = double(tr.values.size()) * tr.slot_seconds / 86400.0;
  return (double(changes) / 2.0) / span_days;
}

inline Trace slice(const Trace& tr, std::size_t first, std::size_t count) {
  if (first + count > tr.values.size()) throw std::invalid_argument("slice out of range");
  Trace out;
  out.slot_seconds = tr.slot_seconds;
  out.kind = tr.kind;
  out.values.assign(tr.values.begin() + std::ptrdiff_t(first),
                    tr.values.begin() + std::ptrdiff_t(first + count));
  return out;
}

} // namespace esskit

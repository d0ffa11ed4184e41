#pragma once

// Two agents stepping simultaneously on the plane, with the sign of each step
// set by a correlated measurement outcome.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qnav/correlations.hpp"
#include "qnav/parallel.hpp"
#include "qnav/random.hpp"

namespace qnav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

enum class ProtocolKind { Plus, Minus, Classical };

inline std::string_view to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::Plus: return "plus";
    case ProtocolKind::Minus: return "minus";
    case ProtocolKind::Classical: return "classical";
  }
  return "?";
}

inline std::optional<ProtocolKind> parse_protocol(std::string_view s) {
  if (s == "plus") return ProtocolKind::Plus;
  if (s == "minus") return ProtocolKind::Minus;
  if (s == "classical") return ProtocolKind::Classical;
  return std::nullopt;
}

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::Plus;
  WernerParameter p{};

  /// Werner parameter actually used for sampling; Classical walks use uncorrelated signs.
  WernerParameter effective_p() const {
    return kind == ProtocolKind::Classical ? WernerParameter{0.0} : p;
  }

  /// w in ⟨r′²⟩ = r² + w l². Plus: 2 − p, Minus: 2 + p, Classical: 2.
  double weight() const {
    switch (kind) {
      case ProtocolKind::Plus: return 2.0 - p.value();
      case ProtocolKind::Minus: return 2.0 + p.value();
      case ProtocolKind::Classical: return 2.0;
    }
    return 2.0;
  }
};

class WalkState {
 public:
  WalkState(Vec2 pos_a, Vec2 pos_b, double step_length)
      : pos_a_(pos_a), pos_b_(pos_b), step_length_(step_length) {
    if (!(step_length > 0.0) || !std::isfinite(step_length))
      throw std::invalid_argument("step length must be positive");
  }

  /// Agents on the x axis, A at (r, 0) and B at the origin.
  static WalkState at_separation(double r, double step_length) {
    if (!(r >= 0.0)) throw std::invalid_argument("separation must be non-negative");
    return {{r, 0.0}, {0.0, 0.0}, step_length};
  }

  Vec2 pos_a() const { return pos_a_; }
  Vec2 pos_b() const { return pos_b_; }
  double step_length() const { return step_length_; }
  Vec2 relative() const { return pos_a_ - pos_b_; }
  double separation() const { return relative().norm(); }

 private:
  Vec2 pos_a_;
  Vec2 pos_b_;
  double step_length_;
};

struct StepOutcome {
  WalkState new_state;
  double r_prime;
  SignPair signs;
  std::pair<PlanarDirection, PlanarDirection> directions;
};

/// Moves both agents for given directions and outcomes. A always moves along
/// σ_A n_A; B moves along −σ_B n_B under Plus (and Classical) and along +σ_B n_B
/// under Minus.
inline StepOutcome apply_step(const WalkState& state, const ProtocolSpec& proto,
                              const PlanarDirection& n_a, const PlanarDirection& n_b,
                              const SignPair& signs) {
  const double l = state.step_length();
  const Vec2 ua{n_a.x(), n_a.y()};
  const Vec2 ub{n_b.x(), n_b.y()};
  const double b_sign = proto.kind == ProtocolKind::Minus ? 1.0 : -1.0;
  const Vec2 new_a = state.pos_a() + (l * signs.sigma_a()) * ua;
  const Vec2 new_b = state.pos_b() + (b_sign * l * signs.sigma_b()) * ub;
  WalkState next{new_a, new_b, l};
  const double r_prime = next.separation();
  return {next, r_prime, signs, {n_a, n_b}};
}

template <std::uniform_random_bit_generator Rng>
StepOutcome step(const WalkState& state, const ProtocolSpec& proto, Rng& rng) {
  const auto n_a = sample_direction(rng);
  const auto n_b = sample_direction(rng);
  const auto signs = sample_outcomes(n_a, n_b, proto.effective_p(), rng);
  return apply_step(state, proto, n_a, n_b, signs);
}

inline double expected_sq_separation(double r, double l, const ProtocolSpec& proto) {
  if (!(r >= 0.0)) throw std::invalid_argument("separation must be non-negative");
  if (!(l > 0.0)) throw std::invalid_argument("step length must be positive");
  return r * r + proto.weight() * l * l;
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;

  double z_score(double expected) const { return (mean - expected) / std_error; }
};

namespace detail {

// Welford accumulator; merge() is order-sensitive, so callers merge in a fixed order.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  McEstimate estimate() const {
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
  }
};

inline void check_samples(std::uint64_t n_samples) {
  if (n_samples < 1000) throw std::invalid_argument("n_samples must be at least 1000");
}

}  // namespace detail

/// Sample mean and standard error of r′² over independent single steps from separation r.
template <std::uniform_random_bit_generator Rng>
McEstimate mc_sq_separation(double r, double l, const ProtocolSpec& proto, std::uint64_t n_samples,
                            Rng& rng) {
  detail::check_samples(n_samples);
  const auto start = WalkState::at_separation(r, l);
  detail::Moments m;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const double rp = step(start, proto, rng).r_prime;
    m.push(rp * rp);
  }
  return m.estimate();
}

inline constexpr std::uint64_t kMcChunk = 1u << 16;

/// Seeded variant: samples are split into fixed chunks with their own substreams,
/// so the result is bit-identical for any worker count.
inline McEstimate mc_sq_separation_seeded(double r, double l, const ProtocolSpec& proto,
                                          std::uint64_t n_samples, std::uint64_t seed,
                                          unsigned workers = 1) {
  detail::check_samples(n_samples);
  const auto start = WalkState::at_separation(r, l);
  const std::size_t chunks = (n_samples + kMcChunk - 1) / kMcChunk;
  std::vector<detail::Moments> parts(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    auto rng = substream(seed, c);
    const std::uint64_t begin = c * kMcChunk;
    const std::uint64_t end = std::min<std::uint64_t>(n_samples, begin + kMcChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      const double rp = step(start, proto, rng).r_prime;
      parts[c].push(rp * rp);
    }
  });
  detail::Moments total;
  for (const auto& p : parts) total.merge(p);
  return total.estimate();
}

struct EnsembleSpec {
  std::uint64_t n_steps = 1;
  std::uint64_t n_walkers = 1;
  double meeting_radius = 0.0;
};

/// Per-step statistics, index 0 being the initial state.
struct EnsembleStats {
  std::vector<double> mean_r2;
  std::vector<double> r2_stderr;
  /// Fraction of walker pairs that came within the meeting radius at or before each step.
  std::vector<double> meeting_fraction;
};

inline constexpr std::uint64_t kWalkerChunk = 64;

/// Runs n_walkers independent pairs for n_steps each. Walker i draws from
/// substream(seed, i); per-chunk sums are combined in chunk order.
inline EnsembleStats run_ensemble(const WalkState& initial, const ProtocolSpec& proto,
                                  const EnsembleSpec& spec, std::uint64_t seed,
                                  unsigned workers = 1) {
  if (spec.n_walkers < 1) throw std::invalid_argument("n_walkers must be at least 1");
  if (!(spec.meeting_radius >= 0.0)) throw std::invalid_argument("meeting radius must be non-negative");
  const std::size_t rows = spec.n_steps + 1;
  const std::size_t chunks = (spec.n_walkers + kWalkerChunk - 1) / kWalkerChunk;

  struct Partial {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::vector<std::uint64_t> met;
  };
  std::vector<Partial> parts(chunks);

  parallel_for(chunks, workers, [&](std::size_t c) {
    Partial& part = parts[c];
    part.sum.assign(rows, 0.0);
    part.sum_sq.assign(rows, 0.0);
    part.met.assign(rows, 0);
    const std::uint64_t begin = c * kWalkerChunk;
    const std::uint64_t end = std::min<std::uint64_t>(spec.n_walkers, begin + kWalkerChunk);
    for (std::uint64_t w = begin; w < end; ++w) {
      auto rng = substream(seed, w);
      WalkState state = initial;
      double r = state.separation();
      bool met = r <= spec.meeting_radius;
      for (std::size_t s = 0; s < rows; ++s) {
        if (s > 0) {
          auto out = step(state, proto, rng);
          state = out.new_state;
          r = out.r_prime;
          met = met || r <= spec.meeting_radius;
        }
        const double r2 = r * r;
        part.sum[s] += r2;
        part.sum_sq[s] += r2 * r2;
        part.met[s] += met ? 1 : 0;
      }
    }
  });

  EnsembleStats stats;
  stats.mean_r2.assign(rows, 0.0);
  stats.r2_stderr.assign(rows, 0.0);
  stats.meeting_fraction.assign(rows, 0.0);
  const double n = static_cast<double>(spec.n_walkers);
  for (std::size_t s = 0; s < rows; ++s) {
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t met = 0;
    for (const auto& p : parts) {
      sum += p.sum[s];
      sum_sq += p.sum_sq[s];
      met += p.met[s];
    }
    const double mean = sum / n;
    stats.mean_r2[s] = mean;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    stats.r2_stderr[s] = std::sqrt(var / n);
    stats.meeting_fraction[s] = static_cast<double>(met) / n;
  }
  return stats;
}

}  // namespace qnav

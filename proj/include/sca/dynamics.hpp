#pragma once

// Samplers over Omega = {+1,-1}^n:
//
//  * SCA: every spin is resampled independently from the pre-step
//    configuration; new s_x = +1 with probability
//      p(s, x) = [1 + tanh(beta/2 (h~_x(s) + q_x s_x))] / 2.
//  * Glauber: one uniformly chosen spin flips with probability
//      e^{-beta h~_x s_x} / (2 cosh(beta h~_x)).
//  * Binomial subset: each vertex joins S with probability epsilon; members
//    flip with probability e^{-beta/2 h~_x s_x} / (2 cosh(beta/2 h~_x)).
//
// Randomness is counter-based (see rng.hpp): the uniforms used at step t for
// vertex x depend only on (seed, t, x).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "sca/errors.hpp"
#include "sca/model.hpp"
#include "sca/numeric.hpp"
#include "sca/parallel.hpp"
#include "sca/rng.hpp"

namespace sca {

struct ScaSampler {
  PinningVector q;
};
struct GlauberSampler {};
struct BinomialSampler {
  double epsilon = 0.5;
  PinningVector q;
};
using SamplerKind = std::variant<ScaSampler, GlauberSampler, BinomialSampler>;

inline const char* sampler_name(const SamplerKind& kind) {
  switch (kind.index()) {
    case 0: return "sca";
    case 1: return "glauber";
    default: return "binomial";
  }
}

struct SamplerConfig {
  double beta = 0.0;
  std::uint64_t seed = 0;
  SamplerKind kind = GlauberSampler{};

  void validate(const IsingModel& model) const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
    if (const auto* s = std::get_if<ScaSampler>(&kind)) check_pinning(model, s->q);
    if (const auto* b = std::get_if<BinomialSampler>(&kind)) {
      if (!(b->epsilon > 0.0 && b->epsilon < 1.0)) throw ConfigError("binomial epsilon must lie in (0, 1)");
      if (!b->q.q.empty()) check_pinning(model, b->q);
    }
  }
};

struct StepStats {
  std::size_t flips = 0;
  double energy_after = 0.0;
};

struct StepResult {
  SpinConfiguration next;
  StepStats stats;
};

// Probability that the new spin at x is +1 under SCA. Evaluated as a
// logistic of 2a, a = beta/2 (h~_x + q_x s_x), which equals (1 + tanh a)/2.
inline double sca_up_probability(const IsingModel& model, const PinningVector& q,
                                 const SpinConfiguration& s, Vertex x, double beta) {
  model.check_config(s);
  model.check_vertex(x);
  check_pinning(model, q);
  return numeric::logistic(beta * (cavity_field_unchecked(model, s, x) + q[x] * s[x]));
}

// Flip probability of vertex x once it has been selected by Glauber.
inline double glauber_flip_probability(const IsingModel& model, const SpinConfiguration& s, Vertex x,
                                       double beta) {
  model.check_config(s);
  model.check_vertex(x);
  return numeric::logistic(-2.0 * beta * cavity_field_unchecked(model, s, x) * s[x]);
}

// p_x(s) = e^{-beta/2 h~_x s_x} / (2 cosh(beta/2 h~_x)), the flip probability
// of a member of the binomial subset.
inline double binomial_flip_probability(const IsingModel& model, const SpinConfiguration& s, Vertex x,
                                        double beta) {
  model.check_config(s);
  model.check_vertex(x);
  return numeric::logistic(-beta * cavity_field_unchecked(model, s, x) * s[x]);
}

inline StepResult sca_step(const IsingModel& model, const PinningVector& q, double beta,
                           const SpinConfiguration& s, const CounterRng& rng, std::uint64_t step,
                           unsigned threads = 1) {
  model.check_config(s);
  check_pinning(model, q);
  const std::size_t n = model.size();
  StepResult out{s, {}};
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (Vertex x = begin; x < end; ++x) {
      const double p = numeric::logistic(beta * (cavity_field_unchecked(model, s, x) + q[x] * s[x]));
      const double u = rng.uniform(step, static_cast<std::uint32_t>(x), Stream::kVertexUpdate);
      out.next.set(x, u <= p ? 1 : -1);
    }
  });
  for (Vertex x = 0; x < n; ++x) out.stats.flips += (out.next[x] != s[x]);
  out.stats.energy_after = energy(model, out.next);
  return out;
}

inline StepResult glauber_step(const IsingModel& model, double beta, const SpinConfiguration& s,
                               const CounterRng& rng, std::uint64_t step) {
  model.check_config(s);
  const std::size_t n = model.size();
  const auto [u_vertex, u_accept] = rng.uniforms(step, 0, Stream::kGlauber);
  const auto x = std::min<Vertex>(n - 1, static_cast<Vertex>(u_vertex * static_cast<double>(n)));
  StepResult out{s, {}};
  const double p = numeric::logistic(-2.0 * beta * cavity_field_unchecked(model, s, x) * s[x]);
  if (u_accept <= p) {
    out.next.flip_in_place(x);
    out.stats.flips = 1;
  }
  out.stats.energy_after = energy(model, out.next);
  return out;
}

inline StepResult binomial_step(const IsingModel& model, double epsilon, double beta,
                                const SpinConfiguration& s, const CounterRng& rng, std::uint64_t step,
                                unsigned threads = 1) {
  model.check_config(s);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("binomial epsilon must lie in (0, 1)");
  const std::size_t n = model.size();
  StepResult out{s, {}};
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (Vertex x = begin; x < end; ++x) {
      const auto [u_member, u_flip] = rng.uniforms(step, static_cast<std::uint32_t>(x), Stream::kBinomialSubset);
      if (u_member > epsilon) continue;
      const double p = numeric::logistic(-beta * cavity_field_unchecked(model, s, x) * s[x]);
      if (u_flip <= p) out.next.flip_in_place(x);
    }
  });
  for (Vertex x = 0; x < n; ++x) out.stats.flips += (out.next[x] != s[x]);
  out.stats.energy_after = energy(model, out.next);
  return out;
}

// One step of the configured sampler at the config's beta.
inline StepResult sampler_step(const IsingModel& model, const SamplerConfig& config, const SpinConfiguration& s,
                               std::uint64_t step, unsigned threads = 1) {
  const CounterRng rng(config.seed);
  return std::visit(
      [&](const auto& kind) -> StepResult {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, ScaSampler>)
          return sca_step(model, kind.q, config.beta, s, rng, step, threads);
        else if constexpr (std::is_same_v<K, GlauberSampler>)
          return glauber_step(model, config.beta, s, rng, step);
        else
          return binomial_step(model, kind.epsilon, config.beta, s, rng, step, threads);
      },
      config.kind);
}

// A chain owning its state. Not for concurrent use; move it between threads freely.
class Chain {
 public:
  Chain(const IsingModel& model, SamplerConfig config, SpinConfiguration start, unsigned threads = 1)
      : model_(&model), config_(std::move(config)), state_(std::move(start)), threads_(threads) {
    config_.validate(model);
    model.check_config(state_);
  }

  const SpinConfiguration& state() const noexcept { return state_; }
  std::uint64_t steps_taken() const noexcept { return t_; }
  const SamplerConfig& config() const noexcept { return config_; }
  void set_beta(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
    config_.beta = beta;
  }

  // Advances one step; steps are numbered 1, 2, ... for the RNG counter.
  StepStats step() {
    auto r = sampler_step(*model_, config_, state_, ++t_, threads_);
    state_ = std::move(r.next);
    return r.stats;
  }

 private:
  const IsingModel* model_;
  SamplerConfig config_;
  SpinConfiguration state_;
  unsigned threads_;
  std::uint64_t t_ = 0;
};

// Uniform random configuration drawn from the initial-state stream.
inline SpinConfiguration random_configuration(std::size_t n, const CounterRng& rng) {
  SpinConfiguration s(n);
  for (Vertex x = 0; x < n; ++x)
    s.set(x, rng.uniform(0, static_cast<std::uint32_t>(x), Stream::kInitialState) < 0.5 ? 1 : -1);
  return s;
}

// Grand coupling: both chains threshold the same uniform U_x.
inline std::pair<SpinConfiguration, SpinConfiguration> coupled_sca_step(
    const IsingModel& model, const PinningVector& q, double beta, const SpinConfiguration& s,
    const SpinConfiguration& t, const CounterRng& rng, std::uint64_t step) {
  model.check_config(s);
  model.check_config(t);
  check_pinning(model, q);
  SpinConfiguration x_next(model.size()), y_next(model.size());
  for (Vertex x = 0; x < model.size(); ++x) {
    const double u = rng.uniform(step, static_cast<std::uint32_t>(x), Stream::kVertexUpdate);
    const double ps = numeric::logistic(beta * (cavity_field_unchecked(model, s, x) + q[x] * s[x]));
    const double pt = numeric::logistic(beta * (cavity_field_unchecked(model, t, x) + q[x] * t[x]));
    x_next.set(x, u <= ps ? 1 : -1);
    y_next.set(x, u <= pt ? 1 : -1);
  }
  return {std::move(x_next), std::move(y_next)};
}

// E|D_{X,Y}| after one coupled step: sum_y |p(s, y) - p(t, y)|.
inline double coupled_expected_disagreement(const IsingModel& model, const PinningVector& q, double beta,
                                            const SpinConfiguration& s, const SpinConfiguration& t) {
  model.check_config(s);
  model.check_config(t);
  check_pinning(model, q);
  double total = 0.0;
  for (Vertex y = 0; y < model.size(); ++y) {
    const double ps = numeric::logistic(beta * (cavity_field_unchecked(model, s, y) + q[y] * s[y]));
    const double pt = numeric::logistic(beta * (cavity_field_unchecked(model, t, y) + q[y] * t[y]));
    total += std::abs(ps - pt);
  }
  return total;
}

// r = max_x [ tanh(beta q_x / 2) + sum_y tanh(beta |J_xy| / 2) ]
inline double contraction_rate(const IsingModel& model, const PinningVector& q, double beta) {
  check_pinning(model, q);
  double r = 0.0;
  for (Vertex x = 0; x < model.size(); ++x) {
    double row = std::tanh(0.5 * beta * q[x]);
    for (const auto& nb : model.neighbors(x)) row += std::tanh(0.5 * beta * std::abs(nb.J));
    r = std::max(r, row);
  }
  return r;
}

// ceil((log n - log eps) / log(1/r)) when r < 1, nullopt otherwise. For r = 0
// one step already lands on the stationary law, and the bound is its r -> 0+
// limit, 1.
inline std::optional<std::size_t> mixing_time_bound(double r, std::size_t n, double epsilon_tv) {
  if (!(epsilon_tv > 0.0 && epsilon_tv < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (!(r < 1.0)) return std::nullopt;
  if (r <= 0.0) return 1;
  const double bound = (std::log(static_cast<double>(n)) - std::log(epsilon_tv)) / std::log(1.0 / r);
  return static_cast<std::size_t>(std::ceil(bound));
}

inline std::optional<std::size_t> mixing_time_bound(const IsingModel& model, const PinningVector& q, double beta,
                                                    double epsilon_tv) {
  return mixing_time_bound(contraction_rate(model, q, beta), model.size(), epsilon_tv);
}

// E^SCA = sum_x 1 / (e^{beta (h~_x s_x + q_x)} + 1)
inline double expected_flips_sca(const IsingModel& model, const PinningVector& q, double beta,
                                 const SpinConfiguration& s) {
  model.check_config(s);
  check_pinning(model, q);
  double e = 0.0;
  for (Vertex x = 0; x < model.size(); ++x)
    e += numeric::logistic(-beta * (cavity_field_unchecked(model, s, x) * s[x] + q[x]));
  return e;
}

// E^G = (1/n) sum_x 1 / (e^{2 beta h~_x s_x} + 1)
inline double expected_flips_glauber(const IsingModel& model, double beta, const SpinConfiguration& s) {
  model.check_config(s);
  double e = 0.0;
  for (Vertex x = 0; x < model.size(); ++x)
    e += numeric::logistic(-2.0 * beta * cavity_field_unchecked(model, s, x) * s[x]);
  return e / static_cast<double>(model.size());
}

// max_x beta/2 (q_x + |h_x| + sum_y |J_xy|) <= log sqrt(n)
inline bool more_flips_condition(const IsingModel& model, const PinningVector& q, double beta) {
  check_pinning(model, q);
  double lhs = 0.0;
  for (Vertex x = 0; x < model.size(); ++x)
    lhs = std::max(lhs, 0.5 * beta * (q[x] + std::abs(model.field(x)) + model.abs_coupling_sum(x)));
  return lhs <= 0.5 * std::log(static_cast<double>(model.size()));
}

}  // namespace sca

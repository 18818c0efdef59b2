#pragma once

// Cooling schedules and the annealing driver.
//
// The logarithmic schedule beta_t = log(t + t0 - 1) / Gamma with
//   Gamma = sum_x Gamma_x,  Gamma_x = q_x + |h_x| + sum_y |J_xy|
// is the one under which annealed SCA converges to the uniform law on the
// ground states. The exponential schedule is the usual engineering heuristic
// and comes with no such guarantee.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sca/dynamics.hpp"
#include "sca/errors.hpp"
#include "sca/model.hpp"
#include "sca/rng.hpp"

namespace sca {

struct GammaInfo {
  double total = 0.0;
  std::vector<double> per_vertex;
};

inline GammaInfo gamma_constant(const IsingModel& model, const PinningVector& q) {
  check_pinning(model, q);
  GammaInfo g;
  g.per_vertex.resize(model.size());
  for (Vertex x = 0; x < model.size(); ++x) {
    g.per_vertex[x] = q[x] + std::abs(model.field(x)) + model.abs_coupling_sum(x);
    g.total += g.per_vertex[x];
  }
  return g;
}

struct FixedSchedule {
  double beta = 0.0;
};
struct LogarithmicSchedule {
  double gamma = 1.0;
  std::uint64_t t0 = 1;
};
struct ExponentialSchedule {
  double beta0 = 0.1;
  double ratio = 0.999;
  double beta_max = 50.0;
};

class Schedule {
 public:
  using Kind = std::variant<FixedSchedule, LogarithmicSchedule, ExponentialSchedule>;

  Schedule(Kind kind, std::uint64_t horizon) : kind_(kind), horizon_(horizon) {
    if (horizon_ < 1) throw ConfigError("schedule horizon must be >= 1");
    if (const auto* f = std::get_if<FixedSchedule>(&kind_)) {
      if (!(f->beta >= 0.0) || !std::isfinite(f->beta)) throw ConfigError("fixed beta must be finite and >= 0");
    } else if (const auto* l = std::get_if<LogarithmicSchedule>(&kind_)) {
      if (!(l->gamma > 0.0) || !std::isfinite(l->gamma))
        throw ConfigError("logarithmic schedule needs Gamma > 0");
      if (l->t0 < 1) throw ConfigError("logarithmic schedule needs t0 >= 1");
    } else {
      const auto& e = std::get<ExponentialSchedule>(kind_);
      if (!(e.beta0 > 0.0)) throw ConfigError("exponential schedule needs beta0 > 0");
      if (!(e.ratio > 0.0 && e.ratio < 1.0)) throw ConfigError("exponential schedule needs ratio in (0, 1)");
      if (!(e.beta_max >= e.beta0) || !std::isfinite(e.beta_max))
        throw ConfigError("exponential schedule needs finite beta_max >= beta0");
    }
  }

  static Schedule fixed(double beta, std::uint64_t horizon) { return {FixedSchedule{beta}, horizon}; }

  // Gamma from the model and pinning; an explicit override replaces it.
  static Schedule logarithmic(const IsingModel& model, const PinningVector& q, std::uint64_t horizon,
                              std::uint64_t t0 = 1, std::optional<double> gamma_override = std::nullopt) {
    const double gamma = gamma_override ? *gamma_override : gamma_constant(model, q).total;
    if (!(gamma > 0.0)) throw ConfigError("Gamma = 0: the logarithmic schedule is undefined for this instance");
    return {LogarithmicSchedule{gamma, t0}, horizon};
  }

  static Schedule exponential(std::uint64_t horizon, ExponentialSchedule params = {}) { return {params, horizon}; }

  std::uint64_t horizon() const noexcept { return horizon_; }
  const Kind& kind() const noexcept { return kind_; }

  double beta_at(std::uint64_t t) const {
    if (t < 1 || t > horizon_)
      throw IndexError("step " + std::to_string(t) + " outside [1, " + std::to_string(horizon_) + "]");
    return std::visit(
        [t](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, FixedSchedule>) {
            return k.beta;
          } else if constexpr (std::is_same_v<K, LogarithmicSchedule>) {
            return std::log(static_cast<double>(t + k.t0 - 1)) / k.gamma;
          } else {
            const double log_beta = std::log(k.beta0) - static_cast<double>(t - 1) * std::log(k.ratio);
            return log_beta >= std::log(k.beta_max) ? k.beta_max : std::min(k.beta_max, std::exp(log_beta));
          }
        },
        kind_);
  }

  std::string describe() const {
    return std::visit(
        [this](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          const std::string h = ",T=" + std::to_string(horizon_);
          if constexpr (std::is_same_v<K, FixedSchedule>)
            return "fixed(beta=" + format_real(k.beta) + h + ")";
          else if constexpr (std::is_same_v<K, LogarithmicSchedule>)
            return "log(gamma=" + format_real(k.gamma) + ",t0=" + std::to_string(k.t0) + h + ")";
          else
            return "exp(beta0=" + format_real(k.beta0) + ",ratio=" + format_real(k.ratio) +
                   ",beta_max=" + format_real(k.beta_max) + h + ")";
        },
        kind_);
  }

 private:
  static std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  Kind kind_;
  std::uint64_t horizon_;
};

// sum_{t=1}^{T} exp(-beta_t Gamma): the lower bound on sum_t (1 - delta(P_t))
// used for weak ergodicity. Under the logarithmic schedule with t0 = 1 it is
// the harmonic number H_T for every Gamma.
inline double contact_sum(const Schedule& schedule, double gamma) {
  double s = 0.0;
  for (std::uint64_t t = 1; t <= schedule.horizon(); ++t) s += std::exp(-schedule.beta_at(t) * gamma);
  return s;
}

struct TrajectoryRecord {
  std::uint64_t t;
  double beta;
  double energy;
  std::size_t flips;
};

struct AnnealOptions {
  std::optional<SpinConfiguration> start;
  // Record every k-th step (plus t = 0); 0 disables recording.
  std::uint64_t trajectory_stride = 0;
  unsigned threads = 1;
};

struct AnnealResult {
  SpinConfiguration best_config;
  double best_energy = 0.0;
  SpinConfiguration final_config;
  double final_energy = 0.0;
  std::vector<TrajectoryRecord> trajectory;
  std::uint64_t seed = 0;
  std::string schedule;
  std::string sampler;
};

// Runs T = schedule.horizon() steps, step t at beta_t, from options.start or
// a uniform random configuration drawn from the seed. Deterministic in seed.
inline AnnealResult anneal(const IsingModel& model, const Schedule& schedule, const SamplerKind& kind,
                           std::uint64_t seed, const AnnealOptions& options = {}) {
  const CounterRng rng(seed);
  SpinConfiguration start = options.start ? *options.start : random_configuration(model.size(), rng);
  model.check_config(start);

  AnnealResult result;
  result.seed = seed;
  result.schedule = schedule.describe();
  result.sampler = sampler_name(kind);
  result.best_config = start;
  result.best_energy = energy(model, start);
  if (options.trajectory_stride > 0) result.trajectory.push_back({0, 0.0, result.best_energy, 0});

  Chain chain(model, SamplerConfig{schedule.beta_at(1), seed, kind}, std::move(start), options.threads);
  for (std::uint64_t t = 1; t <= schedule.horizon(); ++t) {
    const double beta = schedule.beta_at(t);
    chain.set_beta(beta);
    const StepStats stats = chain.step();
    if (stats.energy_after < result.best_energy) {
      result.best_energy = stats.energy_after;
      result.best_config = chain.state();
    }
    if (options.trajectory_stride > 0 && t % options.trajectory_stride == 0)
      result.trajectory.push_back({t, beta, stats.energy_after, stats.flips});
    if (t == schedule.horizon()) result.final_energy = stats.energy_after;
  }
  result.final_config = chain.state();
  return result;
}

// Independent replicas, one per seed, run concurrently on up to `workers`
// threads. Results come back in seed-list order.
inline std::vector<AnnealResult> anneal_replicas(const IsingModel& model, const Schedule& schedule,
                                                 const SamplerKind& kind, const std::vector<std::uint64_t>& seeds,
                                                 const AnnealOptions& options = {}, unsigned workers = 1) {
  std::vector<AnnealResult> results(seeds.size());
  workers = std::max(1u, workers);
  for (std::size_t base = 0; base < seeds.size(); base += workers) {
    std::vector<std::future<AnnealResult>> batch;
    const std::size_t end = std::min(seeds.size(), base + workers);
    for (std::size_t i = base; i < end; ++i)
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                 [&, i] { return anneal(model, schedule, kind, seeds[i], options); }));
    for (std::size_t i = base; i < end; ++i) results[i] = batch[i - base].get();
  }
  return results;
}

inline constexpr std::size_t kHistogramLimit = 6;

// Empirical law over Omega of the annealed chain at each checkpoint, one
// replica per seed. Checkpoint t means "after t steps"; t = 0 is the initial
// configuration.
inline std::vector<std::vector<double>> empirical_state_distribution(const IsingModel& model,
                                                                     const Schedule& schedule,
                                                                     const SamplerKind& kind,
                                                                     const std::vector<std::uint64_t>& seeds,
                                                                     const std::vector<std::uint64_t>& checkpoints) {
  if (model.size() > kHistogramLimit)
    throw SizeError("empirical_state_distribution supports n <= " + std::to_string(kHistogramLimit));
  if (seeds.empty()) throw ConfigError("need at least one replica seed");
  std::uint64_t last = 0;
  for (auto c : checkpoints) {
    if (c > schedule.horizon()) throw IndexError("checkpoint beyond schedule horizon");
    last = std::max(last, c);
  }
  const std::size_t states = std::size_t{1} << model.size();
  std::vector<std::vector<double>> hist(checkpoints.size(), std::vector<double>(states, 0.0));
  const double w = 1.0 / static_cast<double>(seeds.size());

  for (auto seed : seeds) {
    const CounterRng rng(seed);
    auto start = random_configuration(model.size(), rng);
    auto record = [&](std::uint64_t t, const SpinConfiguration& s) {
      for (std::size_t c = 0; c < checkpoints.size(); ++c)
        if (checkpoints[c] == t) hist[c][s.index()] += w;
    };
    record(0, start);
    if (last == 0) continue;
    Chain chain(model, SamplerConfig{schedule.beta_at(1), seed, kind}, std::move(start));
    for (std::uint64_t t = 1; t <= last; ++t) {
      chain.set_beta(schedule.beta_at(t));
      chain.step();
      record(t, chain.state());
    }
  }
  return hist;
}

}  // namespace sca

#pragma once

// Brute-force oracles over all 2^n configurations: stationary laws, transition
// matrices, total-variation distances, mixing times and the two-replica joint
// measure. Configurations are indexed by bit pattern (bit x <=> s_x = +1).
// Everything is computed in log space with a max shift, so beta up to ~1e6 is
// safe.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sca/dynamics.hpp"
#include "sca/errors.hpp"
#include "sca/model.hpp"
#include "sca/numeric.hpp"

namespace sca {

inline constexpr std::size_t kDistributionLimit = 14;
inline constexpr std::size_t kKernelLimit = 10;
inline constexpr std::size_t kJointLimit = 7;
inline constexpr double kGroundStateTolerance = 1e-9;

namespace detail {

inline void require_size(const IsingModel& model, std::size_t limit, const char* what) {
  if (model.size() > limit)
    throw SizeError(std::string(what) + " supports n <= " + std::to_string(limit) + ", got n=" +
                    std::to_string(model.size()));
}

inline StateIndex state_count(std::size_t n) { return StateIndex{1} << n; }

}  // namespace detail

class ExactDistribution {
 public:
  ExactDistribution() = default;
  ExactDistribution(std::size_t n, std::vector<double> log_weights)
      : n_(n), log_weights_(std::move(log_weights)) {
    if (log_weights_.size() != detail::state_count(n)) throw DimensionError("log-weight table has wrong length");
    log_normalizer_ = numeric::log_sum_exp(log_weights_);
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t states() const noexcept { return log_weights_.size(); }
  std::span<const double> log_weights() const noexcept { return log_weights_; }
  double log_normalizer() const noexcept { return log_normalizer_; }

  double log_probability(StateIndex i) const { return log_weights_[i] - log_normalizer_; }
  double probability(StateIndex i) const { return std::exp(log_probability(i)); }

  // Shifted weights divided by their sum: sums to 1 to rounding, exact for ties.
  std::vector<double> probabilities() const {
    std::vector<double> p(states());
    if (p.empty()) return p;
    const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
    double sum = 0.0;
    for (StateIndex i = 0; i < p.size(); ++i) sum += p[i] = std::exp(log_weights_[i] - top);
    for (double& v : p) v /= sum;
    return p;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> log_weights_;
  double log_normalizer_ = 0.0;
};

// Row-stochastic 2^n x 2^n matrix, row-major.
class ExactKernel {
 public:
  ExactKernel() = default;
  ExactKernel(std::size_t n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    const auto s = detail::state_count(n);
    if (entries_.size() != s * s) throw DimensionError("kernel table has wrong size");
  }

  static ExactKernel identity(std::size_t n) {
    const auto s = detail::state_count(n);
    std::vector<double> e(s * s, 0.0);
    for (StateIndex i = 0; i < s; ++i) e[i * s + i] = 1.0;
    return ExactKernel(n, std::move(e));
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t states() const noexcept { return detail::state_count(n_); }
  double operator()(StateIndex from, StateIndex to) const noexcept { return entries_[from * states() + to]; }
  std::span<const double> row(StateIndex from) const noexcept {
    return {entries_.data() + from * states(), states()};
  }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

// Energies H(s) for every configuration.
inline std::vector<double> all_energies(const IsingModel& model) {
  detail::require_size(model, kDistributionLimit, "energy enumeration");
  const auto s = detail::state_count(model.size());
  std::vector<double> e(s);
  for (StateIndex i = 0; i < s; ++i) e[i] = energy(model, SpinConfiguration::from_index(model.size(), i));
  return e;
}

// R_H = max H - min H
inline double energy_range(const IsingModel& model) {
  const auto e = all_energies(model);
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  return *hi - *lo;
}

struct GroundStates {
  double energy = 0.0;
  std::vector<StateIndex> states;
};

inline GroundStates ground_states(const IsingModel& model, double tolerance = kGroundStateTolerance) {
  const auto e = all_energies(model);
  GroundStates gs;
  gs.energy = *std::min_element(e.begin(), e.end());
  for (StateIndex i = 0; i < e.size(); ++i)
    if (e[i] <= gs.energy + tolerance) gs.states.push_back(i);
  return gs;
}

// log w^G = -beta H
inline ExactDistribution gibbs_distribution(const IsingModel& model, double beta) {
  auto lw = all_energies(model);
  for (double& v : lw) v *= -beta;
  return ExactDistribution(model.size(), std::move(lw));
}

// log w^SCA(s) = sum_x [log 2 + beta/2 h_x s_x + log cosh(beta/2 (h~_x(s) + q_x s_x))]
inline ExactDistribution sca_distribution(const IsingModel& model, const PinningVector& q, double beta) {
  detail::require_size(model, kDistributionLimit, "sca_distribution");
  check_pinning(model, q);
  const std::size_t n = model.size();
  std::vector<double> lw(detail::state_count(n));
  for (StateIndex i = 0; i < lw.size(); ++i) {
    const auto s = SpinConfiguration::from_index(n, i);
    double acc = 0.0;
    for (Vertex x = 0; x < n; ++x)
      acc += std::numbers::ln2 + 0.5 * beta * model.field(x) * s[x] +
             numeric::log_cosh(0.5 * beta * (cavity_field_unchecked(model, s, x) + q[x] * s[x]));
    lw[i] = acc;
  }
  return ExactDistribution(n, std::move(lw));
}

// Uniform law on the ground states (ties within kGroundStateTolerance).
inline ExactDistribution uniform_gs(const IsingModel& model) {
  const auto gs = ground_states(model);
  std::vector<double> lw(detail::state_count(model.size()), -std::numeric_limits<double>::infinity());
  for (StateIndex i : gs.states) lw[i] = 0.0;
  return ExactDistribution(model.size(), std::move(lw));
}

// log P^SCA(s, t) = sum_x log logistic(2 a_x t_x), a_x = beta/2 (h~_x(s) + q_x s_x)
inline std::vector<double> sca_log_kernel(const IsingModel& model, const PinningVector& q, double beta) {
  detail::require_size(model, kKernelLimit, "sca_kernel");
  check_pinning(model, q);
  const std::size_t n = model.size();
  const auto states = detail::state_count(n);
  std::vector<double> out(states * states);
  std::vector<double> log_up(n), log_down(n);
  for (StateIndex i = 0; i < states; ++i) {
    const auto s = SpinConfiguration::from_index(n, i);
    for (Vertex x = 0; x < n; ++x) {
      const double a2 = beta * (cavity_field_unchecked(model, s, x) + q[x] * s[x]);
      log_up[x] = numeric::log_logistic(a2);
      log_down[x] = numeric::log_logistic(-a2);
    }
    for (StateIndex j = 0; j < states; ++j) {
      double acc = 0.0;
      for (Vertex x = 0; x < n; ++x) acc += ((j >> x) & 1u) ? log_up[x] : log_down[x];
      out[i * states + j] = acc;
    }
  }
  return out;
}

inline ExactKernel sca_kernel(const IsingModel& model, const PinningVector& q, double beta) {
  auto e = sca_log_kernel(model, q, beta);
  for (double& v : e) v = std::exp(v);
  return ExactKernel(model.size(), std::move(e));
}

inline ExactKernel glauber_kernel(const IsingModel& model, double beta) {
  detail::require_size(model, kKernelLimit, "glauber_kernel");
  const std::size_t n = model.size();
  const auto states = detail::state_count(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> e(states * states, 0.0);
  for (StateIndex i = 0; i < states; ++i) {
    const auto s = SpinConfiguration::from_index(n, i);
    double stay = 0.0;
    for (Vertex x = 0; x < n; ++x) {
      const double z = 2.0 * beta * cavity_field_unchecked(model, s, x) * s[x];
      e[i * states + (i ^ (StateIndex{1} << x))] = inv_n * numeric::logistic(-z);
      stay += inv_n * numeric::logistic(z);
    }
    e[i * states + i] = stay;
  }
  return ExactKernel(n, std::move(e));
}

// Constant-epsilon binomial-subset chain:
//   P(s, t) = prod_{x in D} eps p_x(s) prod_{y not in D} (1 - eps p_y(s)).
inline ExactKernel binomial_kernel(const IsingModel& model, double epsilon, double beta) {
  detail::require_size(model, kKernelLimit, "binomial_kernel");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("binomial epsilon must lie in (0, 1)");
  const std::size_t n = model.size();
  const auto states = detail::state_count(n);
  std::vector<double> e(states * states);
  std::vector<double> move(n);
  for (StateIndex i = 0; i < states; ++i) {
    const auto s = SpinConfiguration::from_index(n, i);
    for (Vertex x = 0; x < n; ++x)
      move[x] = epsilon * numeric::logistic(-beta * cavity_field_unchecked(model, s, x) * s[x]);
    for (StateIndex j = 0; j < states; ++j) {
      const StateIndex d = i ^ j;
      double p = 1.0;
      for (Vertex x = 0; x < n; ++x) p *= ((d >> x) & 1u) ? move[x] : 1.0 - move[x];
      e[i * states + j] = p;
    }
  }
  return ExactKernel(n, std::move(e));
}

// eps_x(s) = e^{-beta q_x/2} cosh(beta/2 h~_x(s)) / cosh(beta/2 (h~_x(s) + q_x s_x)),
// the factor with P^SCA(s, t) = prod_{x in D} eps_x p_x prod_{y not in D} (1 - eps_y p_y).
inline double sca_epsilon_factor(const IsingModel& model, const PinningVector& q, double beta,
                                 const SpinConfiguration& s, Vertex x) {
  model.check_config(s);
  model.check_vertex(x);
  check_pinning(model, q);
  const double hx = cavity_field_unchecked(model, s, x);
  return std::exp(-0.5 * beta * q[x] + numeric::log_cosh(0.5 * beta * hx) -
                  numeric::log_cosh(0.5 * beta * (hx + q[x] * s[x])));
}

inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// 1 - sum_i min(p_i, q_i); equal to tv_distance for probability vectors.
inline double tv_distance_overlap(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("distributions differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::min(p[i], q[i]);
  return 1.0 - s;
}

inline double tv_distance(const ExactDistribution& p, const ExactDistribution& q) {
  return tv_distance(p.probabilities(), q.probabilities());
}

// delta(P) = max over row pairs of the TV distance between rows.
inline double dobrushin(const ExactKernel& kernel) {
  double delta = 0.0;
  for (StateIndex i = 0; i < kernel.states(); ++i)
    for (StateIndex j = i + 1; j < kernel.states(); ++j) delta = std::max(delta, tv_distance(kernel.row(i), kernel.row(j)));
  return delta;
}

// Largest relative violation of pi(s) P(s, t) = pi(t) P(t, s) over all pairs.
inline double detailed_balance_defect(const ExactKernel& kernel, std::span<const double> pi) {
  double worst = 0.0;
  for (StateIndex i = 0; i < kernel.states(); ++i)
    for (StateIndex j = i + 1; j < kernel.states(); ++j) {
      const double a = pi[i] * kernel(i, j);
      const double b = pi[j] * kernel(j, i);
      const double scale = std::max(std::abs(a), std::abs(b));
      if (scale > 0.0) worst = std::max(worst, std::abs(a - b) / scale);
    }
  return worst;
}

inline double max_row_sum_error(const ExactKernel& kernel) {
  double worst = 0.0;
  for (StateIndex i = 0; i < kernel.states(); ++i) {
    double s = 0.0;
    for (double v : kernel.row(i)) s += v;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline RowMatrix to_matrix(const ExactKernel& kernel) {
  const auto s = static_cast<Eigen::Index>(kernel.states());
  return Eigen::Map<const RowMatrix>(kernel.entries().data(), s, s);
}

// max_s TV(M(s, .), pi)
inline double worst_row_tv(const RowMatrix& m, std::span<const double> pi) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += std::abs(m(i, j) - pi[static_cast<std::size_t>(j)]);
    worst = std::max(worst, 0.5 * s);
  }
  return worst;
}

}  // namespace detail

// d(t) = max_s TV(P^t(s, .), pi) for t = 0..t_max.
inline std::vector<double> worst_case_tv_curve(const ExactKernel& kernel, std::span<const double> pi,
                                               std::size_t t_max) {
  if (pi.size() != kernel.states()) throw DimensionError("stationary vector has wrong length");
  const auto p = detail::to_matrix(kernel);
  detail::RowMatrix m = detail::RowMatrix::Identity(p.rows(), p.cols());
  std::vector<double> curve;
  curve.reserve(t_max + 1);
  curve.push_back(detail::worst_row_tv(m, pi));
  for (std::size_t t = 1; t <= t_max; ++t) {
    m = m * p;
    curve.push_back(detail::worst_row_tv(m, pi));
  }
  return curve;
}

inline constexpr std::size_t kMixingTimeCap = 1'000'000;

// Smallest t with max_s TV(P^t(s, .), pi) <= eps. d(t) is non-increasing, so
// the search doubles via repeated squaring and then bisects over the binary
// expansion of t. Throws ConvergenceError past `cap`.
inline std::size_t exact_mixing_time(const ExactKernel& kernel, std::span<const double> pi, double epsilon_tv,
                                     std::size_t cap = kMixingTimeCap) {
  if (pi.size() != kernel.states()) throw DimensionError("stationary vector has wrong length");
  if (!(epsilon_tv >= 0.0 && epsilon_tv <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  const auto p = detail::to_matrix(kernel);
  const auto id = detail::RowMatrix::Identity(p.rows(), p.cols());
  if (detail::worst_row_tv(id, pi) <= epsilon_tv) return 0;

  std::vector<detail::RowMatrix> powers{p};  // powers[k] = P^{2^k}
  std::size_t k = 0;
  double d = detail::worst_row_tv(powers[0], pi);
  while (d > epsilon_tv) {
    if ((std::size_t{1} << k) >= cap)
      throw ConvergenceError("mixing time exceeds cap " + std::to_string(cap), d);
    powers.push_back(powers[k] * powers[k]);
    ++k;
    d = detail::worst_row_tv(powers[k], pi);
  }
  if (k == 0) return 1;
  std::size_t lo = std::size_t{1} << (k - 1);  // d(lo) > eps >= d(2 lo)
  detail::RowMatrix m_lo = powers[k - 1];
  for (std::size_t bit = k - 1; bit-- > 0;) {
    detail::RowMatrix candidate = m_lo * powers[bit];
    if (detail::worst_row_tv(candidate, pi) > epsilon_tv) {
      lo += std::size_t{1} << bit;
      m_lo = std::move(candidate);
    }
  }
  if (lo + 1 > cap) throw ConvergenceError("mixing time exceeds cap " + std::to_string(cap), epsilon_tv);
  return lo + 1;
}

// mu_beta(s, t) proportional to exp(-beta (H~(s, t) - m)), m = min H~.
struct JointMeasure {
  std::size_t n = 0;
  double min_extended_energy = 0.0;
  std::vector<double> probabilities;  // 4^n entries, row s, column t

  std::size_t states() const noexcept { return detail::state_count(n); }
  double operator()(StateIndex s, StateIndex t) const noexcept { return probabilities[s * states() + t]; }

  std::vector<double> row_marginal() const {
    std::vector<double> m(states(), 0.0);
    for (StateIndex i = 0; i < states(); ++i)
      for (StateIndex j = 0; j < states(); ++j) m[i] += (*this)(i, j);
    return m;
  }
};

inline JointMeasure joint_measure(const IsingModel& model, const PinningVector& q, double beta) {
  detail::require_size(model, kJointLimit, "joint_measure");
  check_pinning(model, q);
  const std::size_t n = model.size();
  const auto states = detail::state_count(n);
  std::vector<SpinConfiguration> configs;
  configs.reserve(states);
  for (StateIndex i = 0; i < states; ++i) configs.push_back(SpinConfiguration::from_index(n, i));

  JointMeasure mu;
  mu.n = n;
  mu.probabilities.resize(states * states);
  for (StateIndex i = 0; i < states; ++i)
    for (StateIndex j = 0; j < states; ++j) mu.probabilities[i * states + j] = extended_energy(model, q, configs[i], configs[j]);
  mu.min_extended_energy = *std::min_element(mu.probabilities.begin(), mu.probabilities.end());
  double z = 0.0;
  for (double& v : mu.probabilities) {
    v = std::exp(-beta * (v - mu.min_extended_energy));
    z += v;
  }
  for (double& v : mu.probabilities) v /= z;
  return mu;
}

struct OrderViolation {
  StateIndex sigma;
  StateIndex tau;
  double log_weight_sigma;
  double log_weight_tau;
  double energy_sigma;
  double energy_tau;
};

struct OrderPreservationReport {
  bool holds = true;
  bool trivial = false;  // constant Hamiltonian, R_H = 0
  double energy_range = 0.0;
  std::size_t violation_count = 0;
  std::vector<OrderViolation> violations;  // first kMaxReportedViolations
};

inline constexpr std::size_t kMaxReportedViolations = 100;
inline constexpr std::size_t kOrderCheckLimit = 10;

// Checks pi^SCA(s) >= pi^SCA(t)  =>  H(s) <= H(t) + eps R_H over all ordered
// pairs. Weights within a relative 1e-12 of each other count as ties, so
// both directions are checked for them.
inline OrderPreservationReport order_preservation_check(const IsingModel& model, const PinningVector& q,
                                                        double beta, double epsilon) {
  detail::require_size(model, kOrderCheckLimit, "order_preservation_check");
  const auto dist = sca_distribution(model, q, beta);
  const auto e = all_energies(model);
  OrderPreservationReport report;
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  report.energy_range = *hi - *lo;
  if (report.energy_range == 0.0) {
    report.trivial = true;
    return report;
  }
  const double allowance = epsilon * report.energy_range;
  const auto lw = dist.log_weights();
  for (StateIndex i = 0; i < lw.size(); ++i)
    for (StateIndex j = 0; j < lw.size(); ++j) {
      if (i == j) continue;
      const double tie = 1e-12 * (1.0 + std::max(std::abs(lw[i]), std::abs(lw[j])));
      if (lw[i] + tie < lw[j]) continue;
      if (e[i] <= e[j] + allowance) continue;
      report.holds = false;
      ++report.violation_count;
      if (report.violations.size() < kMaxReportedViolations)
        report.violations.push_back({i, j, lw[i], lw[j], e[i], e[j]});
    }
  return report;
}

// Minimal q with q_x >= a_x + (1/beta) log(2 n a_x / (eps R_H)),
// a_x = |h_x| + sum_y |J_xy|; clamped at 0. Vertices with a_x = 0 do not
// interact and get q_x = 0.
inline PinningVector epsilon_close_pinning(const IsingModel& model, double beta, double epsilon,
                                           std::optional<double> range = std::nullopt) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("epsilon_close_pinning needs finite beta > 0");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  const double r_h = range ? *range : energy_range(model);
  if (!(epsilon * r_h > 0.0)) throw ConfigError("epsilon * R_H = 0: the pinning bound is undefined");
  const double n = static_cast<double>(model.size());
  std::vector<double> q(model.size(), 0.0);
  for (Vertex x = 0; x < model.size(); ++x) {
    const double a = std::abs(model.field(x)) + model.abs_coupling_sum(x);
    if (a > 0.0) q[x] = std::max(0.0, a + std::log(2.0 * n * a / (epsilon * r_h)) / beta);
  }
  return PinningVector(std::move(q), EpsilonCloseProvenance{beta, epsilon});
}

}  // namespace sca

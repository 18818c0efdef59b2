#pragma once

// Pinning parameters q for which the two-replica energy H~(s, t) attains its
// minimum on the diagonal s == t:
//
//   q_x >= sum_y |J_xy| - 1/2 sum_{y in C} |J_xy|   for x in C,
//   q_x >= lambda / 2                               for x not in C,
//
// with lambda the largest eigenvalue of [-J_xy] and C any vertex subset.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sca/errors.hpp"
#include "sca/model.hpp"

namespace sca {

enum class EigenMethod { kAuto, kDenseExact, kPowerIteration };

struct SpectralInfo {
  double lambda = 0.0;
  EigenMethod method = EigenMethod::kDenseExact;
  double tolerance = 0.0;
};

inline constexpr std::size_t kDenseEigenLimit = 64;

namespace detail {

inline SpectralInfo dense_largest_eigenvalue(const IsingModel& model) {
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::MatrixXd minus_j = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : model.couplings()) {
    minus_j(static_cast<Eigen::Index>(c.a), static_cast<Eigen::Index>(c.b)) = -c.J;
    minus_j(static_cast<Eigen::Index>(c.b), static_cast<Eigen::Index>(c.a)) = -c.J;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(minus_j, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0);
  const double norm = minus_j.cwiseAbs().rowwise().sum().maxCoeff();
  return {solver.eigenvalues().maxCoeff(), EigenMethod::kDenseExact,
          static_cast<double>(n) * std::numeric_limits<double>::epsilon() * (1.0 + norm)};
}

// y = (-J + shift I) v
inline void apply_shifted(const IsingModel& model, double shift, const std::vector<double>& v,
                          std::vector<double>& y) {
  for (Vertex x = 0; x < model.size(); ++x) {
    double acc = shift * v[x];
    for (const auto& nb : model.neighbors(x)) acc -= nb.J * v[nb.vertex];
    y[x] = acc;
  }
}

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

}  // namespace detail

// Power iteration on -J + sI, s = max_x sum_y |J_xy| (Gershgorin), which is
// positive semidefinite with top eigenvalue lambda + s. The reported
// tolerance is the residual norm ||Av - rho v||, which bounds the distance
// from rho to the spectrum.
inline SpectralInfo power_iteration_largest_eigenvalue(const IsingModel& model,
                                                       std::size_t max_iterations = 0) {
  const std::size_t n = model.size();
  double shift = 0.0;
  for (Vertex x = 0; x < n; ++x) shift = std::max(shift, model.abs_coupling_sum(x));
  if (shift == 0.0) return {0.0, EigenMethod::kPowerIteration, 0.0};
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(100 * n, 1000);

  std::vector<double> v(n), w(n);
  for (Vertex x = 0; x < n; ++x) v[x] = 1.0 + 0.25 * std::sin(static_cast<double>(x) + 1.0);
  double nv = detail::norm2(v);
  for (double& e : v) e /= nv;

  const double tol = 1e-10 * (1.0 + shift);
  double rayleigh = 0.0;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    detail::apply_shifted(model, shift, v, w);
    rayleigh = 0.0;
    for (Vertex x = 0; x < n; ++x) rayleigh += v[x] * w[x];
    double residual = 0.0;
    for (Vertex x = 0; x < n; ++x) residual += (w[x] - rayleigh * v[x]) * (w[x] - rayleigh * v[x]);
    residual = std::sqrt(residual);
    const double nw = detail::norm2(w);
    if (nw == 0.0) return {-shift, EigenMethod::kPowerIteration, residual};
    for (Vertex x = 0; x < n; ++x) v[x] = w[x] / nw;
    if (std::abs(rayleigh - previous) <= tol)
      return {rayleigh - shift, EigenMethod::kPowerIteration, residual};
    previous = rayleigh;
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iterations) +
                             " iterations",
                         rayleigh - shift);
}

inline SpectralInfo largest_eigenvalue(const IsingModel& model, EigenMethod method = EigenMethod::kAuto) {
  if (method == EigenMethod::kAuto)
    method = model.size() <= kDenseEigenLimit ? EigenMethod::kDenseExact : EigenMethod::kPowerIteration;
  if (!model.has_couplings()) return {0.0, method, 0.0};
  if (method == EigenMethod::kDenseExact) return detail::dense_largest_eigenvalue(model);
  return power_iteration_largest_eigenvalue(model);
}

inline std::vector<Vertex> all_vertices(const IsingModel& model) {
  std::vector<Vertex> v(model.size());
  for (Vertex x = 0; x < model.size(); ++x) v[x] = x;
  return v;
}

// Minimal pinning satisfying the diagonal-minimum condition for the subset C,
// multiplied by slack >= 1. lambda is only computed when C != V.
inline PinningVector build_pinning(const IsingModel& model, const std::vector<Vertex>& C,
                                   double slack = 1.0) {
  if (!(slack >= 1.0)) throw ConfigError("pinning slack must be >= 1");
  const std::size_t n = model.size();
  std::vector<bool> in_c(n, false);
  for (Vertex x : C) {
    model.check_vertex(x);
    in_c[x] = true;
  }
  std::vector<Vertex> members;
  for (Vertex x = 0; x < n; ++x)
    if (in_c[x]) members.push_back(x);

  std::optional<double> lambda;
  if (members.size() < n) lambda = largest_eigenvalue(model).lambda;

  std::vector<double> q(n);
  for (Vertex x = 0; x < n; ++x) {
    if (in_c[x]) {
      double total = 0.0, inside = 0.0;
      for (const auto& nb : model.neighbors(x)) {
        total += std::abs(nb.J);
        if (in_c[nb.vertex]) inside += std::abs(nb.J);
      }
      q[x] = total - 0.5 * inside;
    } else {
      // lambda >= 0 up to round-off for a traceless symmetric matrix.
      q[x] = std::max(0.0, 0.5 * *lambda);
    }
    q[x] *= slack;
  }
  return PinningVector(std::move(q), SpectralProvenance{std::move(members)});
}

struct MinDiagonalReport {
  bool holds = false;
  double min_pair = 0.0;      // min over all (s, t) of H~(s, t)
  double min_diagonal = 0.0;  // min over s of H~(s, s)
  bool diagonal_argmin_is_gs = false;
  std::optional<std::pair<SpinConfiguration, SpinConfiguration>> witness;
};

inline constexpr std::size_t kMinDiagonalLimit = 14;

// Exhaustive over s; for fixed s the minimum over t of
//   H~(s, t) = -1/2 sum_x (h~_x(s) + q_x s_x) t_x - 1/2 sum_x h_x s_x
// is separable and attained at t_x = sign(h~_x(s) + q_x s_x), so the scan
// over all 4^n pairs reduces to 2^n exact inner minimizations.
inline MinDiagonalReport verify_min_diagonal(const IsingModel& model, const PinningVector& q,
                                             double tolerance = 1e-9) {
  check_pinning(model, q);
  const std::size_t n = model.size();
  if (n > kMinDiagonalLimit)
    throw SizeError("verify_min_diagonal supports n <= " + std::to_string(kMinDiagonalLimit) +
                    ", got " + std::to_string(n));

  double q_half_sum = 0.0;
  for (Vertex x = 0; x < n; ++x) q_half_sum += 0.5 * q[x];

  const StateIndex states = StateIndex{1} << n;
  MinDiagonalReport report;
  report.min_pair = std::numeric_limits<double>::infinity();
  report.min_diagonal = std::numeric_limits<double>::infinity();
  double min_energy = std::numeric_limits<double>::infinity();
  std::vector<double> energies(states), diag(states);
  SpinConfiguration best_s, best_t;

  for (StateIndex i = 0; i < states; ++i) {
    const auto s = SpinConfiguration::from_index(n, i);
    double inner = 0.0;
    SpinConfiguration t(n);
    for (Vertex x = 0; x < n; ++x) {
      const double a = cavity_field_unchecked(model, s, x) + q[x] * s[x];
      inner -= 0.5 * std::abs(a) + 0.5 * model.field(x) * s[x];
      t.set(x, a >= 0.0 ? 1 : -1);
    }
    if (inner < report.min_pair) {
      report.min_pair = inner;
      best_s = s;
      best_t = std::move(t);
    }
    energies[i] = energy(model, s);
    diag[i] = energies[i] - q_half_sum;
    report.min_diagonal = std::min(report.min_diagonal, diag[i]);
    min_energy = std::min(min_energy, energies[i]);
  }

  const double slack = tolerance * (1.0 + std::abs(report.min_diagonal));
  report.diagonal_argmin_is_gs = true;
  for (StateIndex i = 0; i < states; ++i) {
    const bool diag_min = diag[i] <= report.min_diagonal + slack;
    const bool ground = energies[i] <= min_energy + tolerance;
    if (diag_min != ground) report.diagonal_argmin_is_gs = false;
  }
  const bool pair_ok = report.min_pair >= report.min_diagonal - slack;
  report.holds = pair_ok && report.diagonal_argmin_is_gs;
  if (!pair_ok) report.witness = std::make_pair(std::move(best_s), std::move(best_t));
  return report;
}

}  // namespace sca

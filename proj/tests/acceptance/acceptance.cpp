// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sca/sca.hpp"
#include "support/battery.hpp"
#include "support/oracles.hpp"

using namespace sca;
using sca::testing::battery;
using sca::testing::random_model;
using sca::testing::within_sigma;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Inverse temperatures with r < 1: beta_k = k/8 * beta_1 where r(beta_1) = 1/2.
std::vector<double> contracting_betas(const IsingModel& m, const PinningVector& q) {
  double lo = 0.0, hi = 1.0;
  while (contraction_rate(m, q, hi) < 0.5) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (contraction_rate(m, q, mid) < 0.5 ? lo : hi) = mid;
  }
  std::vector<double> betas;
  for (int k = 1; k <= 12; ++k) {
    const double b = lo * k / 8.0;
    if (contraction_rate(m, q, b) < 1.0) betas.push_back(b);
  }
  return betas;
}

// 1. Detailed balance, n <= 4, beta in {0.2, 1, 5}.
Outcome reversibility() {
  double worst = 0.0;
  std::size_t checks = 0;
  for (const auto& m : battery(1, 4)) {
    const auto q = build_pinning(m, all_vertices(m));
    for (double beta : {0.2, 1.0, 5.0}) {
      worst = std::max(worst, detailed_balance_defect(sca_kernel(m, q, beta), sca_distribution(m, q, beta).probabilities()));
      worst = std::max(worst, detailed_balance_defect(glauber_kernel(m, beta), gibbs_distribution(m, beta).probabilities()));
      checks += 2;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu kernels, worst relative defect %.3g", checks, worst);
  return {worst <= 1e-10, buf};
}

// 2. One-step expected disagreement from adjacent pairs <= r.
Outcome contraction() {
  std::size_t pairs = 0;
  double worst_ratio = 0.0;
  bool ok = true;
  for (const auto& m : battery(2, 6)) {
    const auto q = build_pinning(m, all_vertices(m));
    for (double beta : contracting_betas(m, q)) {
      const double r = contraction_rate(m, q, beta);
      for (StateIndex i = 0; i < (StateIndex{1} << m.size()); ++i) {
        const auto s = SpinConfiguration::from_index(m.size(), i);
        for (Vertex x = 0; x < m.size(); ++x) {
          const double d = coupled_expected_disagreement(m, q, beta, s, flip(s, x));
          ++pairs;
          if (r > 0.0) worst_ratio = std::max(worst_ratio, d / r);
          if (d > r + 1e-12) ok = false;
        }
      }
    }
  }
  return {ok, std::to_string(pairs) + " adjacent pairs, max E|D|/r = " + std::to_string(worst_ratio)};
}

// 3. Exact mixing time <= bound, and d(t) <= r^t n up to mixing.
Outcome mixing() {
  const double eps = 0.01;
  std::size_t cases = 0, worst_exact = 0, worst_bound = 0;
  bool ok = true;
  for (const auto& m : battery(2, 6)) {
    const auto q = build_pinning(m, all_vertices(m));
    for (double beta : contracting_betas(m, q)) {
      const double r = contraction_rate(m, q, beta);
      const auto bound = mixing_time_bound(r, m.size(), eps);
      const auto k = sca_kernel(m, q, beta);
      const auto pi = sca_distribution(m, q, beta).probabilities();
      const auto t_mix = exact_mixing_time(k, pi, eps);
      ++cases;
      if (!bound || t_mix > *bound) ok = false;
      if (bound && t_mix > worst_exact) {
        worst_exact = t_mix;
        worst_bound = *bound;
      }
      const auto curve = worst_case_tv_curve(k, pi, t_mix);
      for (std::size_t t = 0; t <= t_mix; ++t)
        if (curve[t] > std::pow(r, static_cast<double>(t)) * static_cast<double>(m.size()) + 1e-12) ok = false;
    }
  }
  return {ok, std::to_string(cases) + " (instance, beta) cases; slowest exact " + std::to_string(worst_exact) +
                  " vs bound " + std::to_string(worst_bound)};
}

// 4. Min-diagonal property on 200 instances with random C.
Outcome min_diagonal() {
  std::mt19937_64 gen(4242);
  std::size_t held = 0;
  const std::size_t total = 200;
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t n = 3 + i % 6;
    const auto m = random_model({n, 0.5}, 10'000 + i);
    const auto q = build_pinning(m, sca::testing::random_subset(n, gen));
    held += verify_min_diagonal(m, q).holds;
  }
  return {held == total, std::to_string(held) + "/" + std::to_string(total) + " hold"};
}

// 5. TV(pi^SCA_beta, uniform over GS) < 1e-3 somewhere on a grid up to 1e4, non-increasing afterwards.
Outcome annealing_limit() {
  std::vector<double> grid;
  for (int k = 0; k <= 24; ++k) grid.push_back(std::pow(10.0, -2.0 + k / 4.0));
  bool ok = true;
  double worst_final = 0.0;
  std::size_t instances = 0;
  for (const auto& m : battery(2, 6)) {
    const auto q = build_pinning(m, all_vertices(m));
    const auto target = uniform_gs(m).probabilities();
    std::vector<double> tv;
    for (double beta : grid) tv.push_back(tv_distance(sca_distribution(m, q, beta).probabilities(), target));
    std::size_t first = grid.size();
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (tv[k] < 1e-3) {
        first = k;
        break;
      }
    ++instances;
    worst_final = std::max(worst_final, tv.back());
    if (first == grid.size()) {
      ok = false;
      continue;
    }
    for (std::size_t k = first + 1; k < grid.size(); ++k)
      if (tv[k] > tv[k - 1] + 1e-15) ok = false;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu instances, worst TV at beta=1e4: %.3g", instances, worst_final);
  return {ok, buf};
}

// 6. sum_{t <= 1e6} exp(-beta_t Gamma) under beta_t = log t / Gamma.
Outcome divergence() {
  bool ok = true;
  std::string detail;
  for (double gamma : {0.5, 4.5, 120.0}) {
    const double s = contact_sum(Schedule(LogarithmicSchedule{gamma, 1}, 1'000'000), gamma);
    ok = ok && s >= 13.8 && s <= 14.4;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%sGamma=%g: %.6f", detail.empty() ? "" : ", ", gamma, s);
    detail += buf;
  }
  return {ok, detail};
}

// Compares an empirical row (counts over `draws`) with an exact row at k sigma.
bool row_within(const std::vector<double>& counts, std::span<const double> exact, double draws, double k) {
  for (std::size_t j = 0; j < counts.size(); ++j)
    if (!within_sigma(counts[j] / draws, exact[j], draws, k)) return false;
  return true;
}

// 7. Empirical one-step kernels (1e6 draws per row) vs exact, 4 sigma per entry.
Outcome sampler_agreement() {
  const auto m = random_model({3, 1.0}, 77);
  const auto q = build_pinning(m, all_vertices(m));
  const double beta = 1.0, eps = 0.5;
  const std::uint64_t draws = 1'000'000;
  const auto k_sca = sca_kernel(m, q, beta);
  const auto k_gl = glauber_kernel(m, beta);
  const auto k_bin = binomial_kernel(m, eps, beta);
  const CounterRng rng(2024);
  std::size_t bad_rows = 0, rows = 0;
  for (StateIndex i = 0; i < 8; ++i) {
    const auto s = SpinConfiguration::from_index(3, i);
    const auto t = SpinConfiguration::from_index(3, i ^ 7u);
    std::vector<double> c_sca(8), c_gl(8), c_bin(8), c_x(8), c_y(8);
    for (std::uint64_t k = 1; k <= draws; ++k) {
      const std::uint64_t step = i * draws + k;
      c_sca[sca_step(m, q, beta, s, rng, step).next.index()] += 1;
      c_gl[glauber_step(m, beta, s, rng, step).next.index()] += 1;
      c_bin[binomial_step(m, eps, beta, s, rng, step).next.index()] += 1;
      const auto [x, y] = coupled_sca_step(m, q, beta, s, t, CounterRng(99), step);
      c_x[x.index()] += 1;
      c_y[y.index()] += 1;
    }
    const double d = static_cast<double>(draws);
    bad_rows += !row_within(c_sca, k_sca.row(i), d, 4.0);
    bad_rows += !row_within(c_gl, k_gl.row(i), d, 4.0);
    bad_rows += !row_within(c_bin, k_bin.row(i), d, 4.0);
    bad_rows += !row_within(c_x, k_sca.row(i), d, 4.0);
    bad_rows += !row_within(c_y, k_sca.row(i ^ 7u), d, 4.0);
    rows += 5;
  }
  return {bad_rows == 0, std::to_string(rows - bad_rows) + "/" + std::to_string(rows) +
                             " rows within 4 sigma (sca, glauber, binomial, coupled X, coupled Y)"};
}

// 8. Flip-count formulas vs Monte Carlo (3 sigma), and E^SCA >= E^G under the high-temperature condition.
Outcome flip_counts() {
  bool ok = true;
  const std::uint64_t steps = 1'000'000;
  const CounterRng rng(31337);
  std::string detail;
  struct Case {
    IsingModel m;
    PinningVector q;
    double beta;
    SpinConfiguration s;
  };
  const auto bond = sca::testing::single_bond();
  const auto m5 = random_model({5}, 55);
  const std::vector<Case> cases{{bond, PinningVector({1.0, 1.0}), 1.0, SpinConfiguration{+1, +1}},
                                {m5, build_pinning(m5, all_vertices(m5)), 0.7, SpinConfiguration::from_index(5, 0b10110)}};
  double worst_z = 0.0;
  for (const auto& c : cases) {
    double sum_s = 0, sq_s = 0, sum_g = 0, sq_g = 0;
    for (std::uint64_t k = 1; k <= steps; ++k) {
      const double fs = static_cast<double>(sca_step(c.m, c.q, c.beta, c.s, rng, k).stats.flips);
      const double fg = static_cast<double>(glauber_step(c.m, c.beta, c.s, rng, k).stats.flips);
      sum_s += fs;
      sq_s += fs * fs;
      sum_g += fg;
      sq_g += fg * fg;
    }
    const double n = static_cast<double>(steps);
    const double mean_s = sum_s / n, mean_g = sum_g / n;
    const double se_s = std::sqrt((sq_s / n - mean_s * mean_s) / n);
    const double se_g = std::sqrt((sq_g / n - mean_g * mean_g) / n);
    const double z_s = std::abs(mean_s - expected_flips_sca(c.m, c.q, c.beta, c.s)) / se_s;
    const double z_g = std::abs(mean_g - expected_flips_glauber(c.m, c.beta, c.s)) / se_g;
    worst_z = std::max({worst_z, z_s, z_g});
    if (z_s > 3.0 || z_g > 3.0) ok = false;
  }

  std::size_t scanned = 0;
  for (const auto& m : battery(2, 6)) {
    const auto q = build_pinning(m, all_vertices(m));
    for (double beta : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      if (!more_flips_condition(m, q, beta)) continue;
      for (StateIndex i = 0; i < (StateIndex{1} << m.size()); ++i) {
        const auto s = SpinConfiguration::from_index(m.size(), i);
        ++scanned;
        if (expected_flips_sca(m, q, beta, s) < expected_flips_glauber(m, beta, s)) ok = false;
      }
    }
  }
  if (scanned == 0) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Monte Carlo worst |z| = %.2f; E^SCA >= E^G on %zu configurations under the condition",
                worst_z, scanned);
  return {ok, buf};
}

// 9. epsilon-close pinning (eps = 0.1) preserves order on the n <= 6 battery.
Outcome order_preservation() {
  std::size_t held = 0, total = 0, violations = 0;
  for (const auto& m : battery(2, 6))
    for (double beta : {0.5, 1.0, 2.0, 5.0}) {
      const auto q = epsilon_close_pinning(m, beta, 0.1);
      const auto r = order_preservation_check(m, q, beta, 0.1);
      ++total;
      held += r.holds;
      violations += r.violation_count;
    }
  return {held == total, std::to_string(held) + "/" + std::to_string(total) + " (instance, beta) cases hold, " +
                             std::to_string(violations) + " violating pairs"};
}

// 10. Annealed SCA reaches the optimum in >= 95% of 20 seeds; identical seeds reproduce identical records.
Outcome end_to_end() {
  struct Instance {
    std::string name;
    IsingModel model;
  };
  std::vector<Instance> instances;
  instances.push_back({"triangle", sca::testing::triangle()});
  instances.push_back({"gset-triangle", parse_model("3 3\n1 2 1\n2 3 1\n1 3 1", ModelFormat::kGset).model});
  {
    std::mt19937_64 gen(5150);
    std::string text;
    std::size_t m = 0;
    std::string edges;
    for (int x = 1; x <= 5; ++x)
      for (int y = x + 1; y <= 5; ++y)
        if (gen() % 10 < 6) {
          edges += std::to_string(x) + " " + std::to_string(y) + " " + std::to_string(1 + gen() % 3) + "\n";
          ++m;
        }
    instances.push_back({"maxcut-5", parse_model(std::to_string(5) + " " + std::to_string(m) + "\n" + edges,
                                                 ModelFormat::kGset).model});
  }
  bool ok = true;
  std::string detail;
  std::vector<std::uint64_t> seeds(20);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 1000 + i;
  for (const auto& inst : instances) {
    const auto& m = inst.model;
    const auto q = build_pinning(m, all_vertices(m));
    const auto schedule = Schedule::logarithmic(m, q, 100'000);
    const double gs = ground_states(m).energy;
    const auto first = anneal_replicas(m, schedule, ScaSampler{q}, seeds, {}, 4);
    const auto again = anneal_replicas(m, schedule, ScaSampler{q}, seeds, {}, 1);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      hits += first[i].best_energy <= gs + kGroundStateTolerance;
      const auto a = format_run_record(make_run_record(m, first[i], 100'000, 0.0));
      const auto b = format_run_record(make_run_record(m, again[i], 100'000, 0.0));
      if (a != b || first[i].final_config != again[i].final_config) ok = false;
    }
    if (hits * 100 < 95 * seeds.size()) ok = false;
    detail += (detail.empty() ? "" : ", ") + inst.name + " " + std::to_string(hits) + "/20";
  }
  return {ok, detail + "; repeat runs byte-identical: " + (ok ? "yes" : "see above")};
}

// 11. Binomial kernel normalization and equivalence to P^SCA when J = 0, h = 0, q uniform.
Outcome binomial_chain() {
  double worst_row = 0.0;
  for (const auto& m : battery(2, 6))
    for (double eps : {0.1, 0.5, 0.9})
      for (double beta : {0.2, 1.0, 5.0}) worst_row = std::max(worst_row, max_row_sum_error(binomial_kernel(m, eps, beta)));
  double worst_diff = 0.0;
  const IsingModel free_pair(2, {}, {});
  for (double qv : {0.1, 1.0, 3.0})
    for (double beta : {0.2, 1.0, 5.0}) {
      const auto q = PinningVector::uniform(2, qv);
      const double eps = sca_epsilon_factor(free_pair, q, beta, SpinConfiguration(2), 0);
      const auto b = binomial_kernel(free_pair, eps, beta);
      const auto s = sca_kernel(free_pair, q, beta);
      for (std::size_t k = 0; k < 16; ++k) worst_diff = std::max(worst_diff, std::abs(b.entries()[k] - s.entries()[k]));
    }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max row-sum error %.3g, max |P_binomial - P_SCA| %.3g", worst_row, worst_diff);
  return {worst_row <= 1e-10 && worst_diff <= 1e-12, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 reversibility", reversibility},
      {"AC2 coupling contraction", contraction},
      {"AC3 mixing-time bound", mixing},
      {"AC4 min-diagonal", min_diagonal},
      {"AC5 annealing limit", annealing_limit},
      {"AC6 divergence surrogate", divergence},
      {"AC7 sampler/oracle agreement", sampler_agreement},
      {"AC8 flip counts", flip_counts},
      {"AC9 epsilon order preservation", order_preservation},
      {"AC10 end-to-end solve", end_to_end},
      {"AC11 binomial chain", binomial_chain},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    std::printf("%s  %-32s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), took.count());
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#pragma once

// Seeded random instances shared by the unit and acceptance suites.

#include <cstdint>
#include <random>
#include <vector>

#include "sca/model.hpp"

namespace sca::testing {

struct InstanceSpec {
  std::size_t n;
  double edge_probability = 0.6;
  double coupling_scale = 1.0;  // J uniform in [-scale, scale]
  double field_scale = 1.0;     // h uniform in [-scale, scale]
};

inline IsingModel random_model(const InstanceSpec& spec, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Coupling> couplings;
  for (Vertex x = 0; x < spec.n; ++x)
    for (Vertex y = x + 1; y < spec.n; ++y)
      if (unit(gen) < spec.edge_probability)
        couplings.push_back({x, y, spec.coupling_scale * (2.0 * unit(gen) - 1.0)});
  if (couplings.empty() && spec.n >= 2) couplings.push_back({0, 1, spec.coupling_scale * (2.0 * unit(gen) - 1.0)});
  std::vector<double> fields(spec.n);
  for (auto& h : fields) h = spec.field_scale * (2.0 * unit(gen) - 1.0);
  return IsingModel(spec.n, std::move(couplings), std::move(fields));
}

// The fixed 20-instance battery: n cycles through [n_min, n_max].
inline std::vector<IsingModel> battery(std::size_t n_min, std::size_t n_max, std::size_t count = 20,
                                       std::uint64_t seed_base = 2024) {
  std::vector<IsingModel> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = n_min + i % (n_max - n_min + 1);
    out.push_back(random_model({n}, seed_base + i));
  }
  return out;
}

inline IsingModel triangle(double j = 1.0, double h = 0.0) {
  return IsingModel(3, {{0, 1, j}, {1, 2, j}, {0, 2, j}}, {h, h, h});
}

inline IsingModel single_bond(double j = 1.0) { return IsingModel(2, {{0, 1, j}}, {0.0, 0.0}); }

inline std::vector<Vertex> random_subset(std::size_t n, std::mt19937_64& gen) {
  std::vector<Vertex> c;
  for (Vertex x = 0; x < n; ++x)
    if (gen() & 1u) c.push_back(x);
  return c;
}

}  // namespace sca::testing

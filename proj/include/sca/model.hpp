#pragma once

// Ising problem instances, spin configurations and pinning vectors.
//
//   H(s)      = - sum_{edges {x,y}} J_xy s_x s_y - sum_x h_x s_x
//   h~_x(s)   = sum_y J_xy s_y + h_x                       (cavity field)
//   H~(s, t)  = -1/2 sum_{x,y} J_xy s_x t_y - 1/2 sum_x h_x (s_x + t_x)
//               -1/2 sum_x q_x s_x t_x                      (two-replica energy)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sca/errors.hpp"

namespace sca {

using Vertex = std::size_t;

// Index of a configuration in Omega = {+1,-1}^n: bit x set <=> s_x = +1.
using StateIndex = std::uint64_t;

struct Coupling {
  Vertex a;
  Vertex b;
  double J;
};

struct Neighbor {
  Vertex vertex;
  double J;
};

class SpinConfiguration {
 public:
  SpinConfiguration() = default;

  // All spins up.
  explicit SpinConfiguration(std::size_t n) : spins_(n, 1) {}

  explicit SpinConfiguration(std::span<const int> spins) : spins_(spins.size()) {
    for (std::size_t x = 0; x < spins.size(); ++x) {
      if (spins[x] != 1 && spins[x] != -1)
        throw ModelError("spin at vertex " + std::to_string(x) + " is " +
                         std::to_string(spins[x]) + ", expected +1 or -1");
      spins_[x] = static_cast<std::int8_t>(spins[x]);
    }
  }

  SpinConfiguration(std::initializer_list<int> spins)
      : SpinConfiguration(std::span<const int>(spins.begin(), spins.size())) {}

  static SpinConfiguration from_index(std::size_t n, StateIndex index) {
    if (n > 63) throw SizeError("state index supports at most 63 vertices");
    SpinConfiguration s;
    s.spins_.resize(n);
    for (std::size_t x = 0; x < n; ++x)
      s.spins_[x] = ((index >> x) & 1u) ? 1 : -1;
    return s;
  }

  // Parses the compact form "+-+", one character per vertex.
  static SpinConfiguration from_string(std::string_view text) {
    SpinConfiguration s;
    s.spins_.reserve(text.size());
    for (char c : text) {
      if (c == '+')
        s.spins_.push_back(1);
      else if (c == '-')
        s.spins_.push_back(-1);
      else
        throw ModelError(std::string("invalid spin character '") + c + "'");
    }
    return s;
  }

  StateIndex index() const {
    if (spins_.size() > 63) throw SizeError("state index supports at most 63 vertices");
    StateIndex idx = 0;
    for (std::size_t x = 0; x < spins_.size(); ++x)
      if (spins_[x] > 0) idx |= StateIndex{1} << x;
    return idx;
  }

  std::string to_string() const {
    std::string out(spins_.size(), '+');
    for (std::size_t x = 0; x < spins_.size(); ++x)
      if (spins_[x] < 0) out[x] = '-';
    return out;
  }

  std::size_t size() const noexcept { return spins_.size(); }
  int operator[](Vertex x) const noexcept { return spins_[x]; }
  int at(Vertex x) const {
    if (x >= spins_.size()) throw IndexError("vertex " + std::to_string(x) + " out of range");
    return spins_[x];
  }

  // Unchecked setter for hot loops; value must be +1 or -1.
  void set(Vertex x, int value) noexcept { spins_[x] = static_cast<std::int8_t>(value); }
  void flip_in_place(Vertex x) noexcept { spins_[x] = static_cast<std::int8_t>(-spins_[x]); }

  std::span<const std::int8_t> spins() const noexcept { return spins_; }

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

 private:
  std::vector<std::int8_t> spins_;
};

class IsingModel {
 public:
  IsingModel() = default;

  // Validates and canonicalizes: pairs stored with a < b, sorted; zero
  // couplings dropped; self-loops, duplicates and out-of-range vertices throw.
  IsingModel(std::size_t n, std::vector<Coupling> couplings, std::vector<double> fields)
      : n_(n), fields_(std::move(fields)) {
    if (n_ == 0) throw ModelError("model needs at least one vertex");
    if (fields_.empty()) fields_.assign(n_, 0.0);
    if (fields_.size() != n_)
      throw DimensionError("field vector has length " + std::to_string(fields_.size()) +
                           ", expected " + std::to_string(n_));
    for (double h : fields_)
      if (!std::isfinite(h)) throw ModelError("non-finite field");

    for (auto& c : couplings) {
      if (c.a >= n_ || c.b >= n_)
        throw IndexError("coupling (" + std::to_string(c.a) + "," + std::to_string(c.b) +
                         ") out of range for n=" + std::to_string(n_));
      if (c.a == c.b) throw ModelError("self-coupling at vertex " + std::to_string(c.a));
      if (!std::isfinite(c.J)) throw ModelError("non-finite coupling");
      if (c.a > c.b) std::swap(c.a, c.b);
    }
    std::sort(couplings.begin(), couplings.end(), [](const Coupling& l, const Coupling& r) {
      return std::pair(l.a, l.b) < std::pair(r.a, r.b);
    });
    for (std::size_t i = 1; i < couplings.size(); ++i)
      if (couplings[i].a == couplings[i - 1].a && couplings[i].b == couplings[i - 1].b)
        throw ModelError("duplicate coupling (" + std::to_string(couplings[i].a) + "," +
                         std::to_string(couplings[i].b) + ")");
    std::erase_if(couplings, [](const Coupling& c) { return c.J == 0.0; });
    edges_ = std::move(couplings);

    std::vector<std::size_t> degree(n_, 0);
    for (const auto& e : edges_) {
      ++degree[e.a];
      ++degree[e.b];
    }
    offsets_.assign(n_ + 1, 0);
    for (std::size_t x = 0; x < n_; ++x) offsets_[x + 1] = offsets_[x] + degree[x];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.a]++] = {e.b, e.J};
      adjacency_[fill[e.b]++] = {e.a, e.J};
    }
    for (std::size_t x = 0; x < n_; ++x)
      std::sort(adjacency_.begin() + offsets_[x], adjacency_.begin() + offsets_[x + 1],
                [](const Neighbor& l, const Neighbor& r) { return l.vertex < r.vertex; });
  }

  std::size_t size() const noexcept { return n_; }
  std::span<const double> fields() const noexcept { return fields_; }
  double field(Vertex x) const noexcept { return fields_[x]; }
  std::span<const Coupling> couplings() const noexcept { return edges_; }

  std::span<const Neighbor> neighbors(Vertex x) const noexcept {
    return {adjacency_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }

  // J_xy, zero when {x,y} is not an edge.
  double coupling(Vertex x, Vertex y) const {
    check_vertex(x);
    check_vertex(y);
    auto nb = neighbors(x);
    auto it = std::lower_bound(nb.begin(), nb.end(), y,
                               [](const Neighbor& l, Vertex v) { return l.vertex < v; });
    return (it != nb.end() && it->vertex == y) ? it->J : 0.0;
  }

  // sum_y |J_xy|
  double abs_coupling_sum(Vertex x) const noexcept {
    double s = 0.0;
    for (const auto& nb : neighbors(x)) s += std::abs(nb.J);
    return s;
  }

  bool has_couplings() const noexcept { return !edges_.empty(); }

  void check_vertex(Vertex x) const {
    if (x >= n_)
      throw IndexError("vertex " + std::to_string(x) + " out of range for n=" + std::to_string(n_));
  }

  void check_config(const SpinConfiguration& s) const {
    if (s.size() != n_)
      throw DimensionError("configuration has length " + std::to_string(s.size()) +
                           ", model has " + std::to_string(n_) + " vertices");
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> fields_;
  std::vector<Coupling> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

// How a pinning vector was obtained.
struct SpectralProvenance {
  std::vector<Vertex> C;
};
struct UniformProvenance {
  double value;
};
struct ExplicitProvenance {};
struct EpsilonCloseProvenance {
  double beta;
  double epsilon;
};
using PinningProvenance =
    std::variant<SpectralProvenance, UniformProvenance, ExplicitProvenance, EpsilonCloseProvenance>;

struct PinningVector {
  std::vector<double> q;
  PinningProvenance provenance = ExplicitProvenance{};

  PinningVector() = default;
  PinningVector(std::vector<double> values, PinningProvenance from = ExplicitProvenance{})
      : q(std::move(values)), provenance(std::move(from)) {
    for (double v : q)
      if (!(v >= 0.0) || !std::isfinite(v)) throw ModelError("pinning parameters must be finite and >= 0");
  }

  static PinningVector uniform(std::size_t n, double value) {
    return PinningVector(std::vector<double>(n, value), UniformProvenance{value});
  }
  static PinningVector zero(std::size_t n) { return uniform(n, 0.0); }

  std::size_t size() const noexcept { return q.size(); }
  double operator[](Vertex x) const noexcept { return q[x]; }
};

inline void check_pinning(const IsingModel& model, const PinningVector& q) {
  if (q.size() != model.size())
    throw DimensionError("pinning vector has length " + std::to_string(q.size()) +
                         ", model has " + std::to_string(model.size()) + " vertices");
}

inline double energy(const IsingModel& model, const SpinConfiguration& s) {
  model.check_config(s);
  double e = 0.0;
  for (const auto& c : model.couplings()) e -= c.J * s[c.a] * s[c.b];
  for (Vertex x = 0; x < model.size(); ++x) e -= model.field(x) * s[x];
  return e;
}

// Unchecked cavity field for hot loops.
inline double cavity_field_unchecked(const IsingModel& model, const SpinConfiguration& s, Vertex x) {
  double f = model.field(x);
  for (const auto& nb : model.neighbors(x)) f += nb.J * s[nb.vertex];
  return f;
}

inline double cavity_field(const IsingModel& model, const SpinConfiguration& s, Vertex x) {
  model.check_config(s);
  model.check_vertex(x);
  return cavity_field_unchecked(model, s, x);
}

inline double extended_energy(const IsingModel& model, const PinningVector& q,
                              const SpinConfiguration& s, const SpinConfiguration& t) {
  model.check_config(s);
  model.check_config(t);
  check_pinning(model, q);
  double e = 0.0;
  // Each unordered edge contributes J (s_a t_b + s_b t_a) to sum_{x,y} J s_x t_y.
  for (const auto& c : model.couplings()) e -= 0.5 * c.J * (s[c.a] * t[c.b] + s[c.b] * t[c.a]);
  for (Vertex x = 0; x < model.size(); ++x) {
    e -= 0.5 * model.field(x) * (s[x] + t[x]);
    e -= 0.5 * q[x] * s[x] * t[x];
  }
  return e;
}

inline SpinConfiguration flip(const SpinConfiguration& s, Vertex x) {
  if (x >= s.size()) throw IndexError("vertex " + std::to_string(x) + " out of range");
  SpinConfiguration out = s;
  out.flip_in_place(x);
  return out;
}

inline std::vector<Vertex> disagreement(const SpinConfiguration& s, const SpinConfiguration& t) {
  if (s.size() != t.size()) throw DimensionError("configurations differ in length");
  std::vector<Vertex> d;
  for (Vertex x = 0; x < s.size(); ++x)
    if (s[x] != t[x]) d.push_back(x);
  return d;
}

inline std::size_t hamming(const SpinConfiguration& s, const SpinConfiguration& t) {
  return disagreement(s, t).size();
}

}  // namespace sca

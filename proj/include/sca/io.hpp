#pragma once

// Model files, pinning specs and run records.
//
// Native format (line oriented, '#' starts a comment, blank lines ignored):
//
//   ising <n>
//   c <x> <y> <J>     coupling, 0-based, x != y, each unordered pair once
//   f <x> <h>         field
//
// Gset format: a header "<n> <m>" followed by m lines "<x> <y> <w>" with
// 1-based vertices. Edges map to J_xy = -w and h = 0, so H = sum w s_x s_y
// and cut(s) = (W - H(s)) / 2: ground states are maximum cuts.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sca/annealing.hpp"
#include "sca/errors.hpp"
#include "sca/model.hpp"
#include "sca/pinning.hpp"

namespace sca {

enum class ModelFormat { kNative, kGset };

struct ParsedModel {
  IsingModel model;
  // original_labels[x] is the label vertex x carried in the input file.
  std::vector<long long> original_labels;
  ModelFormat format = ModelFormat::kNative;
};

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline long long parse_integer(std::string_view token, std::size_t line) {
  const std::string s(token);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ParseError(line, "malformed integer '" + s + "'");
  return v;
}

inline double parse_real(std::string_view token, std::size_t line) {
  const std::string s(token);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError(line, "malformed number '" + s + "'");
  return v;
}

inline std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return hash == std::string_view::npos ? line : line.substr(0, hash);
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Vertex checked_vertex(long long v, std::size_t n, std::size_t line) {
  if (v < 0 || static_cast<unsigned long long>(v) >= n)
    throw ParseError(line, "vertex " + std::to_string(v) + " out of range [0, " + std::to_string(n) + ")");
  return static_cast<Vertex>(v);
}

}  // namespace detail

inline ParsedModel parse_native_model(std::string_view text) {
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Coupling> couplings;
  std::vector<double> fields;
  std::set<std::pair<Vertex, Vertex>> seen_pairs;
  std::set<Vertex> seen_fields;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto tokens = detail::split_tokens(detail::strip_comment(raw));
    if (tokens.empty()) continue;

    if (tokens[0] == "ising") {
      if (have_header) throw ParseError(line_no, "duplicate 'ising' header");
      if (tokens.size() != 2) throw ParseError(line_no, "expected 'ising <n>'");
      const auto v = detail::parse_integer(tokens[1], line_no);
      if (v < 1) throw ParseError(line_no, "vertex count must be positive");
      n = static_cast<std::size_t>(v);
      fields.assign(n, 0.0);
      have_header = true;
    } else if (tokens[0] == "c") {
      if (!have_header) throw ParseError(line_no, "'c' line before 'ising <n>' header");
      if (tokens.size() != 4) throw ParseError(line_no, "expected 'c <x> <y> <J>'");
      const Vertex x = detail::checked_vertex(detail::parse_integer(tokens[1], line_no), n, line_no);
      const Vertex y = detail::checked_vertex(detail::parse_integer(tokens[2], line_no), n, line_no);
      const double j = detail::parse_real(tokens[3], line_no);
      if (x == y) throw ParseError(line_no, "self-loop at vertex " + std::to_string(x));
      if (!seen_pairs.insert(std::minmax(x, y)).second)
        throw ParseError(line_no, "duplicate pair (" + std::to_string(x) + "," + std::to_string(y) + ")");
      couplings.push_back({x, y, j});
    } else if (tokens[0] == "f") {
      if (!have_header) throw ParseError(line_no, "'f' line before 'ising <n>' header");
      if (tokens.size() != 3) throw ParseError(line_no, "expected 'f <x> <h>'");
      const Vertex x = detail::checked_vertex(detail::parse_integer(tokens[1], line_no), n, line_no);
      if (!seen_fields.insert(x).second) throw ParseError(line_no, "duplicate field for vertex " + std::to_string(x));
      fields[x] = detail::parse_real(tokens[2], line_no);
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(tokens[0]) + "'");
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'ising <n>' header");

  ParsedModel parsed;
  parsed.model = IsingModel(n, std::move(couplings), std::move(fields));
  parsed.original_labels.resize(n);
  for (std::size_t x = 0; x < n; ++x) parsed.original_labels[x] = static_cast<long long>(x);
  parsed.format = ModelFormat::kNative;
  return parsed;
}

inline ParsedModel parse_gset_model(std::string_view text) {
  std::size_t n = 0, m = 0, edges_read = 0;
  bool have_header = false;
  std::vector<Coupling> couplings;
  std::set<std::pair<Vertex, Vertex>> seen_pairs;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto tokens = detail::split_tokens(detail::strip_comment(raw));
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() != 2) throw ParseError(line_no, "expected Gset header '<n> <m>'");
      const auto nv = detail::parse_integer(tokens[0], line_no);
      const auto mv = detail::parse_integer(tokens[1], line_no);
      if (nv < 1 || mv < 0) throw ParseError(line_no, "invalid Gset header");
      n = static_cast<std::size_t>(nv);
      m = static_cast<std::size_t>(mv);
      have_header = true;
      continue;
    }
    if (edges_read == m) throw ParseError(line_no, "more edge lines than declared (" + std::to_string(m) + ")");
    if (tokens.size() != 3) throw ParseError(line_no, "expected '<x> <y> <w>'");
    const auto xv = detail::parse_integer(tokens[0], line_no);
    const auto yv = detail::parse_integer(tokens[1], line_no);
    const double w = detail::parse_real(tokens[2], line_no);
    const Vertex x = detail::checked_vertex(xv - 1, n, line_no);
    const Vertex y = detail::checked_vertex(yv - 1, n, line_no);
    if (x == y) throw ParseError(line_no, "self-loop at vertex " + std::to_string(xv));
    if (!seen_pairs.insert(std::minmax(x, y)).second)
      throw ParseError(line_no, "duplicate pair (" + std::to_string(xv) + "," + std::to_string(yv) + ")");
    couplings.push_back({x, y, -w});
    ++edges_read;
  }
  if (!have_header) throw ParseError(line_no, "missing Gset header");
  if (edges_read != m)
    throw ParseError(line_no, "expected " + std::to_string(m) + " edges, found " + std::to_string(edges_read));

  ParsedModel parsed;
  parsed.model = IsingModel(n, std::move(couplings), std::vector<double>(n, 0.0));
  parsed.original_labels.resize(n);
  for (std::size_t x = 0; x < n; ++x) parsed.original_labels[x] = static_cast<long long>(x) + 1;
  parsed.format = ModelFormat::kGset;
  return parsed;
}

inline ParsedModel parse_model(std::string_view text, ModelFormat format = ModelFormat::kNative) {
  return format == ModelFormat::kGset ? parse_gset_model(text) : parse_native_model(text);
}

inline ParsedModel load_model(const std::string& path, ModelFormat format = ModelFormat::kNative) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), format);
}

// Canonical native text: sorted edges, zero fields omitted, 17 significant digits.
inline std::string serialize_model(const IsingModel& model) {
  std::string out = "ising " + std::to_string(model.size()) + "\n";
  for (const auto& c : model.couplings())
    out += "c " + std::to_string(c.a) + " " + std::to_string(c.b) + " " + detail::format_real(c.J) + "\n";
  for (Vertex x = 0; x < model.size(); ++x)
    if (model.field(x) != 0.0) out += "f " + std::to_string(x) + " " + detail::format_real(model.field(x)) + "\n";
  return out;
}

// FNV-1a 64 of the canonical serialization, as 16 hex digits.
inline std::string model_hash(const IsingModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : serialize_model(model)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Weight of edges cut by s when the model came from a Gset file (w = -J).
inline double cut_value(const IsingModel& model, const SpinConfiguration& s) {
  model.check_config(s);
  double cut = 0.0;
  for (const auto& c : model.couplings())
    if (s[c.a] != s[c.b]) cut += -c.J;
  return cut;
}

// "all", "none", or a comma-separated vertex list such as "0,2,5".
inline std::vector<Vertex> parse_vertex_set(std::string_view spec, std::size_t n) {
  if (spec == "all" || spec == "V") {
    std::vector<Vertex> v(n);
    for (Vertex x = 0; x < n; ++x) v[x] = x;
    return v;
  }
  if (spec == "none" || spec.empty()) return {};
  std::vector<Vertex> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const auto token = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto v = detail::parse_integer(token, 0);
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      throw ConfigError("vertex " + std::to_string(v) + " out of range in set '" + std::string(spec) + "'");
    out.push_back(static_cast<Vertex>(v));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Pinning specs:
//   spectral:<set>   build_pinning with C = <set> (see parse_vertex_set)
//   uniform:<v>      q_x = v
//   explicit:<a,b,..> one value per vertex
//   file:<path>      whitespace-separated values, one per vertex
inline PinningVector resolve_pinning(std::string_view spec, const IsingModel& model, double slack = 1.0) {
  const auto colon = spec.find(':');
  const auto kind = spec.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  const std::size_t n = model.size();
  if (kind == "spectral") return build_pinning(model, parse_vertex_set(arg.empty() ? "all" : arg, n), slack);
  if (kind == "uniform") {
    const double v = detail::parse_real(arg, 0) * slack;
    return PinningVector(std::vector<double>(n, v), UniformProvenance{v});
  }
  std::vector<double> values;
  if (kind == "explicit") {
    std::size_t pos = 0;
    while (pos <= arg.size()) {
      const auto comma = arg.find(',', pos);
      values.push_back(detail::parse_real(arg.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                                      : comma - pos),
                                          0));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  } else if (kind == "file") {
    std::ifstream in{std::string(arg)};
    if (!in) throw ConfigError("cannot open pinning file '" + std::string(arg) + "'");
    std::string token;
    while (in >> token) values.push_back(detail::parse_real(token, 0));
  } else {
    throw ConfigError("unknown pinning spec '" + std::string(spec) + "'");
  }
  if (values.size() != n)
    throw DimensionError("pinning spec gives " + std::to_string(values.size()) + " values for " +
                         std::to_string(n) + " vertices");
  for (double& v : values) v *= slack;
  return PinningVector(std::move(values));
}

inline std::string describe_provenance(const PinningVector& q) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SpectralProvenance>) {
          std::string s = "spectral(C={";
          for (std::size_t i = 0; i < p.C.size(); ++i) s += (i ? "," : "") + std::to_string(p.C[i]);
          return s + "})";
        } else if constexpr (std::is_same_v<P, UniformProvenance>) {
          return "uniform(" + detail::format_real(p.value) + ")";
        } else if constexpr (std::is_same_v<P, EpsilonCloseProvenance>) {
          return "epsilon_close(beta=" + detail::format_real(p.beta) + ",eps=" + detail::format_real(p.epsilon) + ")";
        } else {
          return "explicit";
        }
      },
      q.provenance);
}

struct RunRecord {
  std::string model_hash;
  std::string sampler;
  std::string schedule;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  double best_energy = 0.0;
  std::string best_config;
  double final_energy = 0.0;
  double wall_time_s = 0.0;
  std::vector<TrajectoryRecord> checkpoints;
};

inline RunRecord make_run_record(const IsingModel& model, const AnnealResult& r, std::uint64_t steps,
                                 double wall_time_s) {
  return {model_hash(model), r.sampler,          r.schedule,   r.seed,      steps, r.best_energy,
          r.best_config.to_string(), r.final_energy, wall_time_s, r.trajectory};
}

// One JSON object per line, fields in fixed order, reals with 17 significant digits.
inline std::string format_run_record(const RunRecord& r) {
  using detail::format_real;
  std::string out = "{\"model_hash\":\"" + r.model_hash + "\",\"sampler\":\"" + r.sampler + "\",\"schedule\":\"" +
                    r.schedule + "\",\"seed\":" + std::to_string(r.seed) + ",\"steps\":" + std::to_string(r.steps) +
                    ",\"best_energy\":" + format_real(r.best_energy) + ",\"best_config\":\"" + r.best_config +
                    "\",\"final_energy\":" + format_real(r.final_energy) +
                    ",\"wall_time_s\":" + format_real(r.wall_time_s) + ",\"checkpoints\":[";
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
    const auto& c = r.checkpoints[i];
    out += (i ? ",{" : "{");
    out += "\"t\":" + std::to_string(c.t) + ",\"beta\":" + format_real(c.beta) + ",\"energy\":" + format_real(c.energy) +
           ",\"flips\":" + std::to_string(c.flips) + "}";
  }
  return out + "]}";
}

}  // namespace sca

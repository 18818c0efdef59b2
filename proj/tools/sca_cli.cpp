// sca: command-line front end.
//
//   sca solve  <model> ...   annealing runs, one JSON record per replica
//   sca exact  <model> --beta B <what>
//   sca verify <model> ...   exit 1 if any applicable check fails
//   sca pin    <model> --C <set>
//   sca bench  <dir>  ...    batch solve + summary table
//
// Exit codes: 0 ok, 1 verify failure, 2 usage or invalid request, 3 unreadable
// or malformed input.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sca/sca.hpp"

namespace fs = std::filesystem;
using namespace sca;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;

// Intra-step threading only pays off on large instances.
constexpr std::size_t kParallelStepMinVertices = 4096;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string spins_of(StateIndex i, std::size_t n) { return SpinConfiguration::from_index(n, i).to_string(); }

ModelFormat parse_format(const std::string& f) { return f == "gset" ? ModelFormat::kGset : ModelFormat::kNative; }

ParsedModel read_model(const std::string& path, const std::string& format) {
  try {
    return load_model(path, parse_format(format));
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const ModelError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const IndexError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

// ---- solve / bench -------------------------------------------------------

struct SolveOptions {
  std::string sampler = "sca";
  std::string schedule = "log";
  std::uint64_t steps = 100000;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 0;
  std::string pinning = "spectral:all";
  double slack = 1.0;
  double eps = 0.5;
  double beta = 1.0;
  std::optional<double> gamma;
  std::uint64_t t0 = 1;
  double beta0 = 0.1;
  double ratio = 0.999;
  double beta_max = 50.0;
  std::uint64_t trajectory = 0;
  unsigned workers = 0;
};

void add_solve_flags(CLI::App* app, SolveOptions& o) {
  app->add_option("--sampler", o.sampler, "sca | glauber | binomial")
      ->check(CLI::IsMember({"sca", "glauber", "binomial"}))
      ->capture_default_str();
  app->add_option("--schedule", o.schedule, "log | exp | fixed")
      ->check(CLI::IsMember({"log", "exp", "fixed"}))
      ->capture_default_str();
  app->add_option("--steps", o.steps, "horizon T")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--seeds", o.seeds, "number of replicas")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--seed-base", o.seed_base, "replica i uses seed-base + i")->capture_default_str();
  app->add_option("--pinning", o.pinning, "spectral:<set> | uniform:<v> | explicit:<a,b,..> | file:<path>")
      ->capture_default_str();
  app->add_option("--slack", o.slack, "multiplicative pinning slack (>= 1)")->capture_default_str();
  app->add_option("--eps", o.eps, "binomial subset probability")->capture_default_str();
  app->add_option("--beta", o.beta, "beta for --schedule fixed")->capture_default_str();
  app->add_option("--gamma", o.gamma, "override Gamma of the log schedule");
  app->add_option("--t0", o.t0, "log schedule offset")->capture_default_str();
  app->add_option("--beta0", o.beta0, "exp schedule start")->capture_default_str();
  app->add_option("--ratio", o.ratio, "exp schedule ratio rho")->capture_default_str();
  app->add_option("--beta-max", o.beta_max, "exp schedule cap")->capture_default_str();
  app->add_option("--trajectory", o.trajectory, "record every k-th step (0 = off)")->capture_default_str();
  app->add_option("--workers", o.workers, "concurrent replicas (0 = hardware)")->capture_default_str();
}

Schedule make_schedule(const SolveOptions& o, const IsingModel& model, const PinningVector& q) {
  if (o.schedule == "fixed") return Schedule::fixed(o.beta, o.steps);
  if (o.schedule == "exp") return Schedule::exponential(o.steps, {o.beta0, o.ratio, o.beta_max});
  return Schedule::logarithmic(model, q, o.steps, o.t0, o.gamma);
}

SamplerKind make_sampler(const SolveOptions& o, const PinningVector& q) {
  if (o.sampler == "glauber") return GlauberSampler{};
  if (o.sampler == "binomial") return BinomialSampler{o.eps, q};
  return ScaSampler{q};
}

// One record per seed, in seed order.
std::vector<RunRecord> run_solve(const IsingModel& model, const SolveOptions& o) {
  const auto q = resolve_pinning(o.pinning, model, o.slack);
  const auto schedule = make_schedule(o, model, q);
  const auto kind = make_sampler(o, q);
  AnnealOptions ao;
  ao.trajectory_stride = o.trajectory;
  ao.threads = model.size() >= kParallelStepMinVertices ? thread_count() : 1;

  const unsigned workers =
      std::max(1u, o.workers ? o.workers : std::thread::hardware_concurrency());
  std::vector<RunRecord> records(o.seeds);
  for (std::size_t base = 0; base < o.seeds; base += workers) {
    std::vector<std::future<RunRecord>> batch;
    const std::size_t end = std::min<std::size_t>(o.seeds, base + workers);
    for (std::size_t i = base; i < end; ++i)
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, [&, i] {
        const auto t_start = std::chrono::steady_clock::now();
        const auto r = anneal(model, schedule, kind, o.seed_base + i, ao);
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t_start;
        return make_run_record(model, r, o.steps, wall.count());
      }));
    for (std::size_t i = base; i < end; ++i) records[i] = batch[i - base].get();
  }
  return records;
}

int cmd_solve(const std::string& path, const std::string& format, const SolveOptions& o,
              const std::string& out_path) {
  const auto parsed = read_model(path, format);
  const auto records = run_solve(parsed.model, o);
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::app);
    if (!file) throw InputError("cannot open output file '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  for (const auto& r : records) out << format_run_record(r) << '\n';
  return 0;
}

int cmd_bench(const std::string& dir, const SolveOptions& o) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".ising" || ext == ".gset")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::printf("%-28s %6s %14s %14s %14s %8s\n", "model", "n", "mean_best", "min_best", "exact_gs", "success");
  for (const auto& f : files) {
    const auto parsed = read_model(f.string(), f.extension() == ".gset" ? "gset" : "native");
    const auto& model = parsed.model;
    const auto records = run_solve(model, o);
    double mean = 0.0, best = records.front().best_energy;
    for (const auto& r : records) {
      mean += r.best_energy / static_cast<double>(records.size());
      best = std::min(best, r.best_energy);
    }
    std::string gs_col = "-", success_col = "-";
    if (model.size() <= kDistributionLimit) {
      const double gs = ground_states(model).energy;
      std::size_t hits = 0;
      for (const auto& r : records) hits += r.best_energy <= gs + kGroundStateTolerance;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", gs);
      gs_col = buf;
      std::snprintf(buf, sizeof buf, "%zu/%zu", hits, records.size());
      success_col = buf;
    }
    std::printf("%-28s %6zu %14.6g %14.6g %14s %8s\n", f.filename().string().c_str(), model.size(), mean, best,
                gs_col.c_str(), success_col.c_str());
  }
  return 0;
}

// ---- exact ---------------------------------------------------------------

int cmd_exact(const std::string& path, const std::string& format, double beta, const std::string& q_spec,
              double slack, double eps, const std::string& what) {
  const auto parsed = read_model(path, format);
  const auto& m = parsed.model;
  const std::size_t n = m.size();
  auto spins = [n](StateIndex i) { return SpinConfiguration::from_index(n, i).to_string(); };
  auto pinning = [&] { return resolve_pinning(q_spec, m, slack); };
  auto print_dist = [&](const ExactDistribution& d) {
    const auto p = d.probabilities();
    for (StateIndex i = 0; i < p.size(); ++i) std::cout << spins(i) << ' ' << real(p[i]) << '\n';
  };
  auto print_kernel = [&](const ExactKernel& k) {
    for (StateIndex i = 0; i < k.states(); ++i)
      for (StateIndex j = 0; j < k.states(); ++j) std::cout << spins(i) << ' ' << spins(j) << ' ' << real(k(i, j)) << '\n';
  };

  if (what == "gibbs") {
    print_dist(gibbs_distribution(m, beta));
  } else if (what == "sca-dist") {
    print_dist(sca_distribution(m, pinning(), beta));
  } else if (what == "sca-kernel") {
    print_kernel(sca_kernel(m, pinning(), beta));
  } else if (what == "glauber-kernel") {
    print_kernel(glauber_kernel(m, beta));
  } else if (what == "binomial-kernel") {
    print_kernel(binomial_kernel(m, eps, beta));
  } else if (what == "tv") {
    const auto sca = sca_distribution(m, pinning(), beta);
    const auto gibbs = gibbs_distribution(m, beta);
    const auto gs = uniform_gs(m);
    std::cout << "tv_sca_gibbs " << real(tv_distance(sca, gibbs)) << '\n'
              << "tv_sca_gs " << real(tv_distance(sca, gs)) << '\n'
              << "tv_gibbs_gs " << real(tv_distance(gibbs, gs)) << '\n';
  } else if (what == "dobrushin") {
    std::cout << "dobrushin_sca " << real(dobrushin(sca_kernel(m, pinning(), beta))) << '\n'
              << "dobrushin_glauber " << real(dobrushin(glauber_kernel(m, beta))) << '\n';
  } else if (what == "mixing") {
    const auto q = pinning();
    const double r = contraction_rate(m, q, beta);
    const auto bound = mixing_time_bound(r, n, eps);
    const auto t = exact_mixing_time(sca_kernel(m, q, beta), sca_distribution(m, q, beta).probabilities(), eps);
    std::cout << "contraction_rate " << real(r) << '\n'
              << "mixing_time " << t << '\n'
              << "mixing_bound " << (bound ? std::to_string(*bound) : "not-applicable") << '\n';
  } else if (what == "joint") {
    const auto mu = joint_measure(m, pinning(), beta);
    for (StateIndex i = 0; i < mu.states(); ++i)
      for (StateIndex j = 0; j < mu.states(); ++j) std::cout << spins(i) << ' ' << spins(j) << ' ' << real(mu(i, j)) << '\n';
  } else if (what == "gs") {
    const auto gs = ground_states(m);
    std::cout << "energy " << real(gs.energy) << '\n';
    for (StateIndex i : gs.states) std::cout << spins(i) << '\n';
  }
  return 0;
}

// ---- verify --------------------------------------------------------------

int cmd_verify(const std::string& path, const std::string& format, const std::string& q_spec, double slack,
               double beta, std::optional<double> order_eps, double mixing_eps) {
  const auto parsed = read_model(path, format);
  const auto& m = parsed.model;
  const std::size_t n = m.size();
  const auto q = resolve_pinning(q_spec, m, slack);
  bool ok = true;
  auto report = [&ok](const std::string& name, const char* status, const std::string& detail) {
    if (std::string(status) == "FAIL") ok = false;
    std::printf("%-20s %-4s %s\n", name.c_str(), status, detail.c_str());
  };

  std::printf("pinning %s\n", describe_provenance(q).c_str());

  if (n <= kMinDiagonalLimit) {
    const auto r = verify_min_diagonal(m, q);
    std::string detail = "min_pair=" + real(r.min_pair) + " min_diagonal=" + real(r.min_diagonal);
    if (r.witness) detail += " witness=" + r.witness->first.to_string() + "," + r.witness->second.to_string();
    if (!r.diagonal_argmin_is_gs) detail += " diagonal-argmin!=GS";
    report("min_diagonal", r.holds ? "PASS" : "FAIL", detail);
  } else {
    report("min_diagonal", "SKIP", "n > " + std::to_string(kMinDiagonalLimit));
  }

  if (n <= kKernelLimit) {
    const double sca_defect = detailed_balance_defect(sca_kernel(m, q, beta), sca_distribution(m, q, beta).probabilities());
    const double g_defect = detailed_balance_defect(glauber_kernel(m, beta), gibbs_distribution(m, beta).probabilities());
    report("detailed_balance", std::max(sca_defect, g_defect) <= 1e-10 ? "PASS" : "FAIL",
           "sca=" + real(sca_defect) + " glauber=" + real(g_defect));
  } else {
    report("detailed_balance", "SKIP", "n > " + std::to_string(kKernelLimit));
  }

  const double r = contraction_rate(m, q, beta);
  const auto bound = mixing_time_bound(r, n, mixing_eps);
  if (!bound) {
    report("mixing_bound", "SKIP", "contraction_rate=" + real(r) + " >= 1");
  } else if (n <= kKernelLimit) {
    const auto t = exact_mixing_time(sca_kernel(m, q, beta), sca_distribution(m, q, beta).probabilities(), mixing_eps);
    report("mixing_bound", t <= *bound ? "PASS" : "FAIL",
           "contraction_rate=" + real(r) + " exact=" + std::to_string(t) + " bound=" + std::to_string(*bound));
  } else {
    report("mixing_bound", "SKIP", "contraction_rate=" + real(r) + " bound=" + std::to_string(*bound));
  }

  if (!order_eps) {
    report("order_preservation", "SKIP", "no --eps");
  } else if (n <= kOrderCheckLimit) {
    const auto rep = order_preservation_check(m, q, beta, *order_eps);
    std::string detail = "violations=" + std::to_string(rep.violation_count);
    if (rep.trivial) detail += " (constant Hamiltonian)";
    if (!rep.violations.empty())
      detail += " first=" + spins_of(rep.violations.front().sigma, n) + "," + spins_of(rep.violations.front().tau, n);
    report("order_preservation", rep.holds ? "PASS" : "FAIL", detail);
  } else {
    report("order_preservation", "SKIP", "n > " + std::to_string(kOrderCheckLimit));
  }
  return ok ? 0 : kExitVerifyFailed;
}

// ---- pin -----------------------------------------------------------------

int cmd_pin(const std::string& path, const std::string& format, const std::string& c_spec, double slack) {
  const auto parsed = read_model(path, format);
  const auto& m = parsed.model;
  const auto info = largest_eigenvalue(m);
  const auto q = build_pinning(m, parse_vertex_set(c_spec, m.size()), slack);
  const auto gamma = gamma_constant(m, q);
  std::cout << "lambda " << real(info.lambda) << '\n'
            << "lambda_method " << (info.method == EigenMethod::kDenseExact ? "dense-exact" : "power-iteration") << '\n'
            << "lambda_tolerance " << real(info.tolerance) << '\n'
            << "pinning " << describe_provenance(q) << '\n'
            << "gamma " << real(gamma.total) << '\n';
  for (Vertex x = 0; x < m.size(); ++x)
    std::cout << "vertex " << parsed.original_labels[x] << " q " << real(q[x]) << " gamma " << real(gamma.per_vertex[x])
              << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic cellular automata annealing for Ising ground states"};
  app.require_subcommand(1);
  std::string model_path, format = "native", q_spec = "spectral:all", out_path, what, c_spec = "all";
  double beta = 1.0, slack = 1.0, eps = 0.01;
  std::optional<double> order_eps;
  SolveOptions solve;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("model", model_path, "model file")->required();
    sub->add_option("--format", format, "native | gset")->check(CLI::IsMember({"native", "gset"}))->capture_default_str();
  };

  auto* solve_cmd = app.add_subcommand("solve", "anneal and print one run record per seed");
  add_model(solve_cmd);
  add_solve_flags(solve_cmd, solve);
  solve_cmd->add_option("--out", out_path, "append records to this file instead of stdout");

  auto* exact_cmd = app.add_subcommand("exact", "brute-force quantities for small n");
  add_model(exact_cmd);
  exact_cmd->add_option("--beta", beta, "inverse temperature")->required();
  exact_cmd->add_option("--q", q_spec, "pinning spec")->capture_default_str();
  exact_cmd->add_option("--slack", slack, "pinning slack")->capture_default_str();
  exact_cmd->add_option("--eps", eps, "TV target for mixing, subset probability for binomial-kernel")
      ->capture_default_str();
  exact_cmd
      ->add_option("what", what, "gibbs | sca-dist | sca-kernel | glauber-kernel | binomial-kernel | tv | dobrushin | mixing | joint | gs")
      ->required()
      ->check(CLI::IsMember({"gibbs", "sca-dist", "sca-kernel", "glauber-kernel", "binomial-kernel", "tv", "dobrushin",
                             "mixing", "joint", "gs"}));

  auto* verify_cmd = app.add_subcommand("verify", "check min-diagonal, reversibility, mixing bound, order preservation");
  add_model(verify_cmd);
  verify_cmd->add_option("--q", q_spec, "pinning spec")->capture_default_str();
  verify_cmd->add_option("--slack", slack, "pinning slack")->capture_default_str();
  verify_cmd->add_option("--beta", beta, "inverse temperature for the checks")->capture_default_str();
  verify_cmd->add_option("--eps", order_eps, "order-preservation epsilon (check skipped when absent)");
  double mixing_eps = 0.01;
  verify_cmd->add_option("--mixing-eps", mixing_eps, "TV target for the mixing check")->capture_default_str();

  auto* pin_cmd = app.add_subcommand("pin", "print lambda, Gamma and the pinning vector");
  add_model(pin_cmd);
  pin_cmd->add_option("--C", c_spec, "vertex set: all | none | 0,2,...")->capture_default_str();
  pin_cmd->add_option("--slack", slack, "pinning slack")->capture_default_str();

  std::string bench_dir;
  auto* bench_cmd = app.add_subcommand("bench", "solve every .ising/.gset file in a directory");
  bench_cmd->add_option("dir", bench_dir, "model directory")->required();
  add_solve_flags(bench_cmd, solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(model_path, format, solve, out_path);
    if (*exact_cmd) return cmd_exact(model_path, format, beta, q_spec, slack, eps, what);
    if (*verify_cmd) return cmd_verify(model_path, format, q_spec, slack, beta, order_eps, mixing_eps);
    if (*pin_cmd) return cmd_pin(model_path, format, c_spec, slack);
    if (*bench_cmd) return cmd_bench(bench_dir, solve);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

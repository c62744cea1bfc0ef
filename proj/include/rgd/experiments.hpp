#pragma once

// Sweep drivers behind the CLI: exact scaling, subspace-dimension sweeps,
// Trotter vs qDRIFT comparison, bound calculators and depth reports. Every
// sweep job derives its RNG seed from (master_seed, n, dim, sample) and
// results are collected by index, so output does not depend on --jobs.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rgd/bounds.hpp"
#include "rgd/circuit_cost.hpp"
#include "rgd/engine.hpp"
#include "rgd/hamiltonian.hpp"
#include "rgd/io.hpp"

namespace rgd::experiments {

using io::Json;

// --- seeds ------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// seed = h(h(h(h(master) ^ n) ^ dim) ^ sample) with h = splitmix64.
inline std::uint64_t seed_for_run(std::uint64_t master, std::uint64_t n, std::uint64_t dim,
                                  std::uint64_t sample) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ n);
  s = splitmix64(s ^ dim);
  return splitmix64(s ^ sample);
}

// --- problems ---------------------------------------------------------------

struct Problem {
  enum class Kind { chain, complete, custom };
  Kind kind = Kind::chain;
  std::optional<Hamiltonian> fixed;  // custom: edge file or Pauli-sum file

  Hamiltonian build(int n) const {
    switch (kind) {
      case Kind::chain: return ising_from_graph(chain_graph(n));
      case Kind::complete: return ising_from_graph(complete_graph(n));
      case Kind::custom: {
        detail::require(fixed && fixed->n_qubits() == n,
                        "custom Hamiltonian has a fixed size; n must match");
        return *fixed;
      }
    }
    throw InvalidArgument("unknown problem kind");
  }

  std::string label() const {
    switch (kind) {
      case Kind::chain: return "chain";
      case Kind::complete: return "complete";
      case Kind::custom: return "custom";
    }
    return "?";
  }
};

// --- subspace dimension classes ---------------------------------------------

struct DimSpec {
  enum class Kind { linear, quadratic, cubic, explicit_k, full };
  Kind kind = Kind::cubic;
  std::uint64_t k = 0;

  static DimSpec parse(const std::string& s) {
    if (s == "n" || s == "linear") return {Kind::linear, 0};
    if (s == "n2" || s == "quadratic") return {Kind::quadratic, 0};
    if (s == "n3" || s == "cubic") return {Kind::cubic, 0};
    if (s == "full") return {Kind::full, 0};
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw InvalidArgument("invalid subspace dimension '" + s + "' (n|n2|n3|full|K)");
    }
    detail::require(pos == s.size() && v >= 1,
                    "invalid subspace dimension '" + s + "' (must be >= 1)");
    return {Kind::explicit_k, std::uint64_t(v)};
  }

  // nullopt means the full gradient.
  std::optional<std::uint64_t> resolve(int n) const {
    const auto un = std::uint64_t(n);
    switch (kind) {
      case Kind::linear: return un;
      case Kind::quadratic: return un * un;
      case Kind::cubic: return un * un * un;
      case Kind::explicit_k: return k;
      case Kind::full: return std::nullopt;
    }
    return std::nullopt;
  }

  std::string label() const {
    switch (kind) {
      case Kind::linear: return "n";
      case Kind::quadratic: return "n2";
      case Kind::cubic: return "n3";
      case Kind::explicit_k: return std::to_string(k);
      case Kind::full: return "full";
    }
    return "?";
  }
};

// --- statistics --------------------------------------------------------------

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  std::size_t count = 0;
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= double(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / double(xs.size() - 1));
  }
  return s;
}

inline double pooled_stddev(const Summary& a, const Summary& b) {
  const double dof = double(a.count + b.count) - 2.0;
  if (dof <= 0.0) return 0.0;
  return std::sqrt(((double(a.count) - 1.0) * a.stddev * a.stddev +
                    (double(b.count) - 1.0) * b.stddev * b.stddev) /
                   dof);
}

struct PolyFit {
  int degree = 1;
  std::vector<double> coeffs;  // ascending powers
  double rss = 0.0;
  double r2 = 0.0;
  double aic = 0.0;  // N ln(RSS/N) + 2 (degree + 1)
};

inline PolyFit fit_polynomial(std::span<const double> xs, std::span<const double> ys, int degree) {
  detail::require(xs.size() == ys.size(), "fit_polynomial: size mismatch");
  detail::require(degree >= 0 && xs.size() > std::size_t(degree) + 1,
                  "fit_polynomial: not enough points for the degree");
  const auto n = Eigen::Index(xs.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      a(i, d) = p;
      p *= xs[std::size_t(i)];
    }
    y(i) = ys[std::size_t(i)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd r = a * c - y;
  PolyFit fit;
  fit.degree = degree;
  fit.coeffs.assign(c.data(), c.data() + c.size());
  fit.rss = r.squaredNorm();
  const double mean = y.mean();
  const double tss = (y.array() - mean).square().sum();
  fit.r2 = tss > 0.0 ? 1.0 - fit.rss / tss : 1.0;
  const double rss_floor = std::max(fit.rss, 1e-300);
  fit.aic = double(n) * std::log(rss_floor / double(n)) + 2.0 * (degree + 1);
  return fit;
}

struct FitReport {
  PolyFit linear;
  PolyFit quadratic;
  int preferred_degree = 1;  // lower AIC
};

inline FitReport fit_scaling(std::span<const double> xs, std::span<const double> ys) {
  FitReport r;
  r.linear = fit_polynomial(xs, ys, 1);
  r.quadratic = fit_polynomial(xs, ys, 2);
  r.preferred_degree = r.quadratic.aic < r.linear.aic ? 2 : 1;
  return r;
}

// --- worker pool --------------------------------------------------------------

// Runs fn(i) for i in [0, count) on up to `jobs` threads. The first exception
// is rethrown after all workers stop.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::size_t(std::max(jobs, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// --- exact scaling -------------------------------------------------------------

struct ScalingRow {
  int n = 0;
  int steps = 0;
  bool reached = false;
  double final_ratio = 0.0;
};

struct ScalingExactResult {
  std::string graph;
  std::vector<ScalingRow> rows;
  FitReport fit;
};

inline constexpr int kExactScalingMaxQubits = 14;

inline ScalingExactResult scaling_exact(const Problem& problem, std::span<const int> ns,
                                        RGDConfig base, int jobs = 1) {
  detail::require(ns.size() >= 4, "scaling: need at least 4 sizes for the fits");
  base.step_method = StepMethod::exact;
  base.subspace_dim.reset();
  ScalingExactResult out;
  out.graph = problem.label();
  out.rows.resize(ns.size());
  parallel_for(ns.size(), jobs, [&](std::size_t i) {
    const int n = ns[i];
    detail::require(n >= 2 && n <= kExactScalingMaxQubits, "scaling: n outside desk-scale range");
    const Hamiltonian h = problem.build(n);
    const RunTrace t = run_rgd(h, base);
    out.rows[i] = {n, t.steps_taken(), t.halted_reason == HaltReason::target_reached,
                   t.final_ratio()};
  });
  std::sort(out.rows.begin(), out.rows.end(),
            [](const ScalingRow& a, const ScalingRow& b) { return a.n < b.n; });
  std::vector<double> xs, ys;
  for (const auto& r : out.rows) {
    xs.push_back(r.n);
    ys.push_back(r.steps);
  }
  out.fit = fit_scaling(xs, ys);
  return out;
}

// --- subspace sweep ------------------------------------------------------------

enum class CrossingMode { per_run, mean_curve };

inline const char* to_string(CrossingMode m) {
  return m == CrossingMode::per_run ? "per-run" : "mean-curve";
}

struct SubspaceRow {
  int n = 0;
  std::string dim_label;
  std::uint64_t dim = 0;
  double mean_steps = 0.0;
  double std_steps = 0.0;
  int samples = 0;
  int reached = 0;
};

struct SubspaceResult {
  CrossingMode mode = CrossingMode::per_run;
  std::string method;
  std::vector<SubspaceRow> rows;
  std::vector<ScalingRow> baseline;  // exact RGD per n
};

inline SubspaceResult scaling_subspace(const Problem& problem, std::span<const int> ns,
                                       std::span<const DimSpec> dims, int samples,
                                       std::uint64_t master_seed, RGDConfig base,
                                       CrossingMode mode = CrossingMode::per_run, int jobs = 1) {
  detail::require(samples >= 1, "subspace: samples must be >= 1");
  if (base.step_method == StepMethod::exact) base.step_method = StepMethod::trotter;
  SubspaceResult out;
  out.mode = mode;
  out.method = to_string(base.step_method);

  struct Job {
    std::size_t point;
    int n;
    std::uint64_t dim;
    int sample;
  };
  std::vector<Job> joblist;
  for (int n : ns) {
    detail::require(n >= 2, "subspace: n must be >= 2");
    for (const auto& d : dims) {
      const auto dim = d.resolve(n);
      detail::require(dim.has_value(), "subspace: dimension class 'full' is the exact baseline");
      out.rows.push_back({n, d.label(), *dim, 0.0, 0.0, samples, 0});
      for (int s = 0; s < samples; ++s) joblist.push_back({out.rows.size() - 1, n, *dim, s});
    }
  }
  std::vector<SpectralData> spectra;
  std::vector<Hamiltonian> hams;
  for (int n : ns) {
    hams.push_back(problem.build(n));
    spectra.push_back(exact_spectrum(hams.back()));
  }
  auto index_of = [&](int n) {
    return std::size_t(std::find(ns.begin(), ns.end(), n) - ns.begin());
  };

  std::vector<int> steps(joblist.size());
  std::vector<char> reached(joblist.size());
  parallel_for(joblist.size(), jobs, [&](std::size_t i) {
    const Job& j = joblist[i];
    RGDConfig cfg = base;
    cfg.subspace_dim = j.dim;
    cfg.seed = seed_for_run(master_seed, std::uint64_t(j.n), j.dim, std::uint64_t(j.sample));
    const std::size_t hi = index_of(j.n);
    const RunTrace t = run_rgd(hams[hi], cfg, spectra[hi]);
    steps[i] = t.steps_taken();
    reached[i] = t.halted_reason == HaltReason::target_reached;
  });

  for (std::size_t p = 0; p < out.rows.size(); ++p) {
    std::vector<double> xs;
    int hit = 0;
    for (std::size_t i = 0; i < joblist.size(); ++i) {
      if (joblist[i].point != p) continue;
      xs.push_back(steps[i]);
      hit += reached[i];
    }
    const Summary s = summarize(xs);
    out.rows[p].mean_steps = s.mean;
    out.rows[p].std_steps = s.stddev;
    out.rows[p].reached = hit;
  }

  if (mode == CrossingMode::mean_curve) {
    for (std::size_t p = 0; p < out.rows.size(); ++p) {
      auto& row = out.rows[p];
      int horizon = 0;
      for (std::size_t i = 0; i < joblist.size(); ++i) {
        if (joblist[i].point == p) horizon = std::max(horizon, steps[i]);
      }
      horizon *= 2;
      if (base.max_steps) horizon = std::min(horizon, *base.max_steps);
      std::vector<std::vector<double>> ratios(static_cast<std::size_t>(samples));
      const std::size_t hi = index_of(row.n);
      parallel_for(std::size_t(samples), jobs, [&](std::size_t s) {
        RGDConfig cfg = base;
        cfg.subspace_dim = row.dim;
        cfg.halt_on_target = false;
        cfg.max_steps = horizon;
        cfg.seed = seed_for_run(master_seed, std::uint64_t(row.n), row.dim, s);
        const RunTrace t = run_rgd(hams[hi], cfg, spectra[hi]);
        for (const auto& rec : t.steps) ratios[s].push_back(rec.ratio);
      });
      row.mean_steps = std::numeric_limits<double>::quiet_NaN();
      row.std_steps = 0.0;
      row.reached = 0;
      for (int k = 0; k <= horizon; ++k) {
        double acc = 0.0;
        for (const auto& r : ratios) acc += r[std::min<std::size_t>(std::size_t(k), r.size() - 1)];
        if (acc / samples >= base.target_ratio) {
          row.mean_steps = k;
          row.reached = samples;
          break;
        }
      }
    }
  }

  RGDConfig exact = base;
  exact.step_method = StepMethod::exact;
  exact.subspace_dim.reset();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const RunTrace t = run_rgd(hams[i], exact, spectra[i]);
    out.baseline.push_back({ns[i], t.steps_taken(),
                            t.halted_reason == HaltReason::target_reached, t.final_ratio()});
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const SubspaceRow& a, const SubspaceRow& b) {
    return a.n != b.n ? a.n < b.n : a.dim < b.dim;
  });
  return out;
}

// --- Trotter vs qDRIFT ---------------------------------------------------------

struct CompareRow {
  int n = 0;
  std::string method;
  std::uint64_t dim = 0;
  double mean_rotations = 0.0;
  double std_rotations = 0.0;
  double mean_depth = 0.0;
  double std_depth = 0.0;
  double mean_steps = 0.0;
  int samples = 0;
  int reached = 0;
};

inline std::vector<CompareRow> method_compare(const Problem& problem, std::span<const int> ns,
                                              DimSpec dim_spec, int samples,
                                              std::uint64_t master_seed, RGDConfig base,
                                              const GateCostModel& model = {}, int jobs = 1) {
  detail::require(samples >= 1, "compare: samples must be >= 1");
  std::vector<CompareRow> rows;
  const StepMethod methods[] = {StepMethod::trotter, StepMethod::qdrift};
  for (int n : ns) {
    const Hamiltonian h = problem.build(n);
    const SpectralData sd = exact_spectrum(h);
    const auto dim = dim_spec.resolve(n);
    detail::require(dim.has_value(), "compare: needs a finite subspace dimension");
    for (StepMethod m : methods) {
      const auto count = static_cast<std::size_t>(samples);
      std::vector<double> rot(count), depth(count), steps(count);
      std::vector<char> hit(count);
      parallel_for(std::size_t(samples), jobs, [&](std::size_t s) {
        RGDConfig cfg = base;
        cfg.step_method = m;
        cfg.subspace_dim = *dim;
        cfg.seed = seed_for_run(master_seed, std::uint64_t(n), *dim, s);
        const RunTrace t = run_rgd(h, cfg, sd);
        const DepthEstimate d = trace_depth(t.circuit, model);
        rot[s] = double(d.total_rotations);
        depth[s] = d.total_depth;
        steps[s] = t.steps_taken();
        hit[s] = t.halted_reason == HaltReason::target_reached;
      });
      const Summary r = summarize(rot);
      const Summary d = summarize(depth);
      rows.push_back({n, to_string(m), *dim, r.mean, r.stddev, d.mean, d.stddev,
                      summarize(steps).mean, samples,
                      int(std::count(hit.begin(), hit.end(), char(1)))});
    }
  }
  return rows;
}

// --- experiment configuration ----------------------------------------------------

struct ExperimentConfig {
  std::string experiment = "run";  // run|scaling|subspace|compare|bound|depth
  std::vector<int> n_range;
  std::optional<int> n;
  std::vector<DimSpec> dims;
  int samples = 100;
  std::uint64_t master_seed = 0;
  std::string graph = "chain";  // chain|complete
  std::string edges_file;
  std::string hamiltonian_file;
  std::string output_path;
  std::string format = "json";  // json|csv
  std::optional<StepMethod> method;
  std::optional<double> gamma;  // nullopt: auto
  double target_ratio = 0.99;
  std::optional<int> max_steps;
  int jobs = 1;
  int trotter_steps = 1;
  int qdrift_samples = 1;
  GeneratorNormalization normalization = GeneratorNormalization::hilbert_schmidt;
  CrossingMode crossing = CrossingMode::per_run;
  GateCostModel cost_model;
  InitialState initial_state;
  bool verbose = false;
  std::string trace_file;  // depth: read a verbose trace instead of running
  // bound calculator inputs
  std::optional<double> eps, c0, gap, h_norm, beta;
  std::optional<int> bound_steps;
};

// Accepts both the subcommand names and the long experiment names.
inline std::string canonical_experiment(const std::string& s) {
  static const std::pair<const char*, const char*> names[] = {
      {"single_run", "run"},       {"scaling_exact", "scaling"}, {"scaling_subspace", "subspace"},
      {"method_compare", "compare"}, {"bound_calc", "bound"},     {"depth_report", "depth"}};
  for (const auto& [long_name, short_name] : names) {
    if (s == long_name || s == short_name) return short_name;
  }
  throw InvalidArgument("unknown experiment '" + s + "'");
}

inline StepMethod parse_method(const std::string& s) {
  if (s == "exact") return StepMethod::exact;
  if (s == "trotter") return StepMethod::trotter;
  if (s == "qdrift") return StepMethod::qdrift;
  throw InvalidArgument("unknown method '" + s + "' (exact|trotter|qdrift)");
}

inline GeneratorNormalization parse_normalization(const std::string& s) {
  if (s == "hs" || s == "hilbert_schmidt") return GeneratorNormalization::hilbert_schmidt;
  if (s == "none" || s == "unnormalized") return GeneratorNormalization::unnormalized;
  throw InvalidArgument("unknown normalization '" + s + "' (hs|none)");
}

inline CrossingMode parse_crossing(const std::string& s) {
  if (s == "per-run") return CrossingMode::per_run;
  if (s == "mean-curve") return CrossingMode::mean_curve;
  throw InvalidArgument("unknown crossing mode '" + s + "' (per-run|mean-curve)");
}

// "A..B" inclusive, or a single integer.
inline std::vector<int> parse_n_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) return {std::stoi(s)};
    const int a = std::stoi(s.substr(0, dots));
    const int b = std::stoi(s.substr(dots + 2));
    detail::require(a <= b, "n-range: A must be <= B");
    std::vector<int> out;
    for (int n = a; n <= b; ++n) out.push_back(n);
    return out;
  } catch (const std::logic_error&) {
    throw InvalidArgument("invalid n-range '" + s + "' (expected A..B)");
  }
}

inline InitialState parse_initial_state(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "plus") return InitialState::plus_state();
    return InitialState::basis_state(s);
  }
  detail::require(j.is_array(), "initial_state: expected \"plus\", a bitstring or [[re, im], ...]");
  Amplitudes v;
  for (const auto& a : j) v.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  return InitialState::explicit_state(std::move(v));
}

inline ExperimentConfig config_from_json(const Json& j, ExperimentConfig c = {}) {
  try {
    if (j.contains("experiment")) c.experiment = canonical_experiment(j["experiment"].get<std::string>());
    if (j.contains("n_range")) {
      const auto& r = j["n_range"];
      c.n_range = r.is_string() ? parse_n_range(r.get<std::string>()) : r.get<std::vector<int>>();
    }
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("subspace_dims")) {
      c.dims.clear();
      for (const auto& d : j["subspace_dims"]) {
        c.dims.push_back(DimSpec::parse(d.is_string() ? d.get<std::string>()
                                                      : std::to_string(d.get<long long>())));
      }
    }
    if (j.contains("samples_per_point")) c.samples = j["samples_per_point"].get<int>();
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("graph")) c.graph = j["graph"].get<std::string>();
    if (j.contains("edges_file")) c.edges_file = j["edges_file"].get<std::string>();
    if (j.contains("hamiltonian_file")) c.hamiltonian_file = j["hamiltonian_file"].get<std::string>();
    if (j.contains("output_path")) c.output_path = j["output_path"].get<std::string>();
    if (j.contains("output_format")) c.format = j["output_format"].get<std::string>();
    if (j.contains("method")) c.method = parse_method(j["method"].get<std::string>());
    if (j.contains("gamma")) {
      const auto& g = j["gamma"];
      if (g.is_string()) {
        detail::require(g.get<std::string>() == "auto", "gamma: expected \"auto\" or a number");
        c.gamma.reset();
      } else {
        c.gamma = g.get<double>();
      }
    }
    if (j.contains("target_ratio")) c.target_ratio = j["target_ratio"].get<double>();
    if (j.contains("max_steps")) c.max_steps = j["max_steps"].get<int>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    if (j.contains("trotter_steps")) c.trotter_steps = j["trotter_steps"].get<int>();
    if (j.contains("qdrift_samples")) c.qdrift_samples = j["qdrift_samples"].get<int>();
    if (j.contains("normalization")) c.normalization = parse_normalization(j["normalization"].get<std::string>());
    if (j.contains("crossing")) c.crossing = parse_crossing(j["crossing"].get<std::string>());
    if (j.contains("cost_model")) c.cost_model = io::cost_model_from_json(j["cost_model"], c.cost_model);
    if (j.contains("initial_state")) c.initial_state = parse_initial_state(j["initial_state"]);
    if (j.contains("verbose")) c.verbose = j["verbose"].get<bool>();
    if (j.contains("trace_file")) c.trace_file = j["trace_file"].get<std::string>();
    if (j.contains("eps")) c.eps = j["eps"].get<double>();
    if (j.contains("c0")) c.c0 = j["c0"].get<double>();
    if (j.contains("gap")) c.gap = j["gap"].get<double>();
    if (j.contains("h_norm")) c.h_norm = j["h_norm"].get<double>();
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("N")) c.bound_steps = j["N"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

inline void validate(const ExperimentConfig& c) {
  for (int n : c.n_range) detail::require(n >= 2, "n_range entries must be >= 2");
  detail::require(c.samples >= 1, "samples_per_point must be >= 1");
  detail::require(c.format == "json" || c.format == "csv", "format must be json or csv");
  detail::require(c.jobs >= 1, "jobs must be >= 1");
  detail::require(c.graph == "chain" || c.graph == "complete",
                  "graph must be chain or complete (use --edges/--hamiltonian for custom)");
  detail::require(c.edges_file.empty() || c.hamiltonian_file.empty(),
                  "--edges and --hamiltonian are mutually exclusive");
}

inline Problem make_problem(const ExperimentConfig& c) {
  Problem p;
  if (!c.edges_file.empty()) {
    p.kind = Problem::Kind::custom;
    p.fixed = ising_from_graph(io::graph_from_json(io::parse_json(io::read_file(c.edges_file))));
  } else if (!c.hamiltonian_file.empty()) {
    p.kind = Problem::Kind::custom;
    p.fixed = io::hamiltonian_from_json(io::parse_json(io::read_file(c.hamiltonian_file)));
  } else {
    p.kind = c.graph == "complete" ? Problem::Kind::complete : Problem::Kind::chain;
  }
  return p;
}

inline RGDConfig base_run_config(const ExperimentConfig& c) {
  RGDConfig r;
  r.step_size = c.gamma;
  r.max_steps = c.max_steps;
  r.target_ratio = c.target_ratio;
  r.trotter_steps = c.trotter_steps;
  r.qdrift_samples = c.qdrift_samples;
  r.normalization = c.normalization;
  r.initial_state = c.initial_state;
  r.seed = c.master_seed;
  return r;
}

inline std::vector<int> sizes_or(const ExperimentConfig& c, int lo, int hi) {
  if (!c.n_range.empty()) return c.n_range;
  if (c.n) return {*c.n};
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

// --- renderers ---------------------------------------------------------------------

inline Json fit_json(const PolyFit& f) {
  Json coeffs = Json::array();
  for (double v : f.coeffs) coeffs.push_back(v);
  return Json{{"degree", f.degree}, {"coeffs", std::move(coeffs)}, {"r2", f.r2},
              {"rss", f.rss}, {"aic", f.aic}};
}

inline std::string render(const ScalingExactResult& r, const std::string& format) {
  if (format == "csv") {
    io::CsvTable t;
    t.comments.push_back("experiment=scaling graph=" + r.graph);
    t.comments.push_back("fit degree=1 r2=" + io::format_double(r.fit.linear.r2) +
                         " aic=" + io::format_double(r.fit.linear.aic));
    t.comments.push_back("fit degree=2 r2=" + io::format_double(r.fit.quadratic.r2) +
                         " aic=" + io::format_double(r.fit.quadratic.aic));
    t.comments.push_back("preferred_degree=" + std::to_string(r.fit.preferred_degree));
    t.columns = {"n", "steps", "reached", "final_ratio"};
    for (const auto& row : r.rows) {
      t.rows.push_back({std::to_string(row.n), std::to_string(row.steps),
                        row.reached ? "1" : "0", io::format_double(row.final_ratio)});
    }
    return t.render();
  }
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"n", row.n}, {"steps", row.steps}, {"reached", row.reached},
                        {"final_ratio", row.final_ratio}});
  }
  return io::dump(Json{{"experiment", "scaling"},
                       {"graph", r.graph},
                       {"rows", std::move(rows)},
                       {"fits", Json{{"linear", fit_json(r.fit.linear)},
                                     {"quadratic", fit_json(r.fit.quadratic)}}},
                       {"preferred_degree", r.fit.preferred_degree}});
}

inline std::string render(const SubspaceResult& r, const std::string& format) {
  if (format == "csv") {
    io::CsvTable t;
    t.comments.push_back(std::string("experiment=subspace crossing=") + to_string(r.mode) +
                         " method=" + r.method);
    t.columns = {"n", "dim_class", "dim", "mean_steps", "std_steps", "samples", "reached"};
    for (const auto& row : r.rows) {
      t.rows.push_back({std::to_string(row.n), row.dim_label, std::to_string(row.dim),
                        io::format_double(row.mean_steps), io::format_double(row.std_steps),
                        std::to_string(row.samples), std::to_string(row.reached)});
    }
    for (const auto& b : r.baseline) {
      t.rows.push_back({std::to_string(b.n), "exact", "full", std::to_string(b.steps), "0", "1",
                        b.reached ? "1" : "0"});
    }
    return t.render();
  }
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"n", row.n}, {"dim_class", row.dim_label}, {"dim", row.dim},
                        {"mean_steps", io::number_or_null(row.mean_steps)},
                        {"std_steps", row.std_steps}, {"samples", row.samples},
                        {"reached", row.reached}});
  }
  Json base = Json::array();
  for (const auto& b : r.baseline) {
    base.push_back(Json{{"n", b.n}, {"steps", b.steps}, {"reached", b.reached}});
  }
  return io::dump(Json{{"experiment", "subspace"},
                       {"crossing", to_string(r.mode)},
                       {"method", r.method},
                       {"rows", std::move(rows)},
                       {"exact_baseline", std::move(base)}});
}

inline std::string render(const std::vector<CompareRow>& rows, const std::string& format) {
  if (format == "csv") {
    io::CsvTable t;
    t.comments.push_back("experiment=compare");
    t.columns = {"n", "method", "dim", "mean_total_rotations", "std_total_rotations",
                 "mean_total_depth", "std_total_depth", "mean_steps", "samples", "reached"};
    for (const auto& r : rows) {
      t.rows.push_back({std::to_string(r.n), r.method, std::to_string(r.dim),
                        io::format_double(r.mean_rotations), io::format_double(r.std_rotations),
                        io::format_double(r.mean_depth), io::format_double(r.std_depth),
                        io::format_double(r.mean_steps), std::to_string(r.samples),
                        std::to_string(r.reached)});
    }
    return t.render();
  }
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"n", r.n}, {"method", r.method}, {"dim", r.dim},
                       {"mean_total_rotations", r.mean_rotations},
                       {"std_total_rotations", r.std_rotations},
                       {"mean_total_depth", r.mean_depth},
                       {"std_total_depth", r.std_depth},
                       {"mean_steps", r.mean_steps},
                       {"samples", r.samples},
                       {"reached", r.reached}});
  }
  return io::dump(Json{{"experiment", "compare"}, {"rows", std::move(out)}});
}

inline Json bound_json(const BoundValue& b) {
  return Json{{"value", io::number_or_null(b.value)}, {"log10", io::number_or_null(b.log10)},
              {"overflow", b.overflow}};
}

// --- entry points --------------------------------------------------------------------

inline RunTrace single_run(const ExperimentConfig& c) {
  const Problem problem = make_problem(c);
  int n = 0;
  if (problem.fixed) {
    n = problem.fixed->n_qubits();
  } else {
    detail::require(c.n.has_value() || c.n_range.size() == 1, "run: --n is required");
    n = c.n ? *c.n : c.n_range.front();
  }
  detail::require(n >= 1, "run: n must be >= 1");
  RGDConfig cfg = base_run_config(c);
  cfg.step_method = c.method.value_or(StepMethod::exact);
  if (!c.dims.empty()) {
    detail::require(c.dims.size() == 1, "run: exactly one --dim");
    cfg.subspace_dim = c.dims.front().resolve(n);
    if (cfg.subspace_dim && !c.method) cfg.step_method = StepMethod::trotter;
  }
  return run_rgd(problem.build(n), cfg);
}

inline std::string bound_report(const ExperimentConfig& c) {
  ExperimentConfig r = c;
  Json inputs;
  std::optional<Hamiltonian> h;
  if (c.n || !c.edges_file.empty() || !c.hamiltonian_file.empty()) {
    const Problem p = make_problem(c);
    h = p.fixed ? *p.fixed : p.build(*c.n);
    const SpectralData sd = exact_spectrum(*h);
    const StateVector psi0 = c.initial_state.prepare(h->n_qubits());
    if (!r.h_norm) r.h_norm = sd.spectral_norm;
    if (!r.gap) r.gap = sd.spectral_gap;
    if (!r.c0) r.c0 = ground_overlap(sd, psi0);
    inputs["n_qubits"] = h->n_qubits();
  }
  detail::require(r.eps && r.c0 && r.gap && r.h_norm,
                  "bound: missing argument (need --eps, --c0, --gap, --h-norm, or --n to derive "
                  "the spectral inputs)");
  const BoundInputs in{r.beta.value_or(0.0), r.bound_steps.value_or(1), *r.eps, *r.c0, *r.gap,
                       *r.h_norm};
  const double beta = r.beta ? *r.beta : beta_for_precision(in.precision, in.overlap, in.gap);
  inputs["eps"] = in.precision;
  inputs["c0"] = in.overlap;
  inputs["gap"] = in.gap;
  inputs["h_norm"] = in.h_norm;
  inputs["beta"] = beta;
  inputs["beta_source"] = r.beta ? "given" : "beta_for_precision";
  if (r.bound_steps) inputs["N"] = *r.bound_steps;
  Json out{{"experiment", "bound"},
           {"inputs", std::move(inputs)},
           {"xi", in.xi()},
           {"alpha", in.alpha()},
           {"beta_for_precision", beta_for_precision(in.precision, in.overlap, in.gap)},
           {"steps_bound", bound_json(steps_bound(in.precision, in.overlap, in.gap, in.h_norm))}};
  if (r.bound_steps) {
    out["error_bound"] = bound_json(error_bound(beta, *r.bound_steps, in.h_norm));
    if (h) {
      out["ite_vs_rgd_error"] =
          ite_vs_rgd_error(*h, beta, *r.bound_steps, c.initial_state.prepare(h->n_qubits()));
    }
  }
  return io::dump(out);
}

inline std::string depth_report(const ExperimentConfig& c) {
  CircuitRecord circuit;
  std::vector<int> sizes;
  Json source;
  if (!c.trace_file.empty()) {
    io::TraceCircuit tc = io::circuit_from_trace_json(io::parse_json(io::read_file(c.trace_file)));
    circuit = std::move(tc.circuit);
    sizes = std::move(tc.step_sizes);
    source = c.trace_file;
  } else {
    const RunTrace t = single_run(c);
    for (const auto& s : t.steps) sizes.push_back(s.n_rotations);
    circuit = t.circuit;
    source = "run";
  }
  const DepthEstimate d = trace_depth(circuit, sizes, c.cost_model);
  if (c.format == "csv") {
    io::CsvTable t;
    t.comments.push_back("experiment=depth total_depth=" + io::format_double(d.total_depth) +
                         " total_rotations=" + std::to_string(d.total_rotations) +
                         " total_cnots=" + std::to_string(d.total_cnots));
    t.columns = {"k", "depth", "n_rotations"};
    for (std::size_t k = 0; k < d.per_step_depth.size(); ++k) {
      t.rows.push_back({std::to_string(k), io::format_double(d.per_step_depth[k]),
                        std::to_string(sizes[k])});
    }
    return t.render();
  }
  return io::dump(Json{{"experiment", "depth"}, {"source", source},
                       {"cost_model", io::to_json(c.cost_model)}, {"estimate", io::to_json(d)}});
}

// Runs the configured experiment and returns the rendered output.
inline std::string execute(const ExperimentConfig& c) {
  validate(c);
  if (c.experiment == "run") {
    const RunTrace t = single_run(c);
    return c.format == "csv" ? io::trace_steps_csv(t).render() : io::dump(io::to_json(t, c.verbose));
  }
  if (c.experiment == "scaling") {
    RGDConfig base = base_run_config(c);
    const auto ns = sizes_or(c, 2, 10);
    return render(scaling_exact(make_problem(c), ns, base, c.jobs), c.format);
  }
  if (c.experiment == "subspace") {
    RGDConfig base = base_run_config(c);
    base.step_method = c.method.value_or(StepMethod::trotter);
    detail::require(base.step_method != StepMethod::exact, "subspace: method must be trotter or qdrift");
    std::vector<DimSpec> dims = c.dims;
    if (dims.empty()) dims = {DimSpec::parse("n"), DimSpec::parse("n2"), DimSpec::parse("n3")};
    const auto ns = sizes_or(c, 2, 8);
    return render(scaling_subspace(make_problem(c), ns, dims, c.samples, c.master_seed, base,
                                   c.crossing, c.jobs),
                  c.format);
  }
  if (c.experiment == "compare") {
    RGDConfig base = base_run_config(c);
    const DimSpec dim = c.dims.empty() ? DimSpec::parse("n3") : c.dims.front();
    const auto ns = sizes_or(c, 3, 8);
    return render(method_compare(make_problem(c), ns, dim, c.samples, c.master_seed, base,
                                 c.cost_model, c.jobs),
                  c.format);
  }
  if (c.experiment == "bound") return bound_report(c);
  if (c.experiment == "depth") return depth_report(c);
  throw InvalidArgument("unknown experiment '" + c.experiment + "'");
}

// Writes output atomically when output_path is set; never leaves partial files.
inline void execute_to(const ExperimentConfig& c, std::ostream& fallback) {
  const std::string out = execute(c);
  if (c.output_path.empty()) {
    fallback << out;
  } else {
    io::write_file_atomic(c.output_path, out);
  }
}

}  // namespace rgd::experiments

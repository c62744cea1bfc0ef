// rgd: experiment driver. Flags override --config values; RGD_SEED overrides --seed.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rgd/experiments.hpp"

namespace {

namespace ex = rgd::experiments;

struct Flags {
  std::string config_file;
  std::optional<std::string> graph, edges, hamiltonian, n_range, method, gamma, out, format,
      normalization, crossing, initial, trace;
  std::vector<std::string> dims;
  std::optional<int> n, samples, max_steps, jobs, trotter_steps, qdrift_samples, bound_steps;
  std::optional<std::uint64_t> seed;
  std::optional<double> target_ratio, eps, c0, gap, h_norm, beta;
  std::optional<double> cnot_depth, rz_depth, basis_depth;
  bool verbose = false;
};

void add_common(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_file, "JSON ExperimentConfig file")->check(CLI::ExistingFile);
  sub.add_option("--graph", f.graph, "chain|complete")->check(CLI::IsMember({"chain", "complete"}));
  sub.add_option("--edges", f.edges, "graph JSON {n, edges:[[i,j,w],...]}")->check(CLI::ExistingFile);
  sub.add_option("--hamiltonian", f.hamiltonian, "Pauli-sum JSON {n_qubits, terms}")
      ->check(CLI::ExistingFile);
  sub.add_option("--n", f.n, "number of qubits");
  sub.add_option("--n-range", f.n_range, "A..B inclusive");
  sub.add_option("--seed", f.seed, "master seed");
  sub.add_option("--gamma", f.gamma, "auto|FLOAT");
  sub.add_option("--target-ratio", f.target_ratio, "approximation ratio target");
  sub.add_option("--max-steps", f.max_steps, "step cap (default 10000 n)");
  sub.add_option("--out", f.out, "output file (default stdout)");
  sub.add_option("--format", f.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--jobs", f.jobs, "worker threads");
  sub.add_option("--normalization", f.normalization, "hs|none");
  sub.add_option("--initial", f.initial, "plus or a bitstring (qubit 0 first)");
}

void add_randomized(CLI::App& sub, Flags& f) {
  sub.add_option("--dim", f.dims, "n|n2|n3|full|K (repeatable for subspace)");
  sub.add_option("--method", f.method, "exact|trotter|qdrift")
      ->check(CLI::IsMember({"exact", "trotter", "qdrift"}));
  sub.add_option("--samples", f.samples, "runs per sweep point");
  sub.add_option("--trotter-steps", f.trotter_steps, "Trotter slices per step");
  sub.add_option("--qdrift-samples", f.qdrift_samples, "qDRIFT draws per step");
}

void add_cost_model(CLI::App& sub, Flags& f) {
  sub.add_option("--cnot-depth", f.cnot_depth, "depth per CNOT link");
  sub.add_option("--rz-depth", f.rz_depth, "depth of the Rz rotation");
  sub.add_option("--basis-depth", f.basis_depth, "depth of one basis-change layer");
}

ex::ExperimentConfig resolve(const std::string& experiment, const Flags& f) {
  ex::ExperimentConfig c;
  if (!f.config_file.empty()) c = ex::config_from_json(rgd::io::parse_json(rgd::io::read_file(f.config_file)));
  c.experiment = experiment;
  if (f.graph) c.graph = *f.graph;
  if (f.edges) c.edges_file = *f.edges;
  if (f.hamiltonian) c.hamiltonian_file = *f.hamiltonian;
  if (f.n) c.n = *f.n;
  if (f.n_range) c.n_range = ex::parse_n_range(*f.n_range);
  if (!f.dims.empty()) {
    if (f.dims.size() > 1 && experiment != "subspace") {
      throw rgd::InvalidArgument("--dim accepts several values only for subspace");
    }
    c.dims.clear();
    for (const auto& d : f.dims) c.dims.push_back(ex::DimSpec::parse(d));
  }
  if (f.method) c.method = ex::parse_method(*f.method);
  if (f.samples) c.samples = *f.samples;
  if (f.seed) c.master_seed = *f.seed;
  if (const char* env = std::getenv("RGD_SEED")) {
    try {
      c.master_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw rgd::InvalidArgument("RGD_SEED must be an unsigned integer");
    }
  }
  if (f.gamma) {
    if (*f.gamma == "auto") {
      c.gamma.reset();
    } else {
      try {
        c.gamma = std::stod(*f.gamma);
      } catch (const std::exception&) {
        throw rgd::InvalidArgument("--gamma must be 'auto' or a number");
      }
    }
  }
  if (f.target_ratio) c.target_ratio = *f.target_ratio;
  if (f.max_steps) c.max_steps = *f.max_steps;
  if (f.out) c.output_path = *f.out;
  if (f.format) c.format = *f.format;
  if (f.jobs) c.jobs = *f.jobs;
  if (f.trotter_steps) c.trotter_steps = *f.trotter_steps;
  if (f.qdrift_samples) c.qdrift_samples = *f.qdrift_samples;
  if (f.normalization) c.normalization = ex::parse_normalization(*f.normalization);
  if (f.crossing) c.crossing = ex::parse_crossing(*f.crossing);
  if (f.initial) c.initial_state = ex::parse_initial_state(rgd::io::Json(*f.initial));
  if (f.trace) c.trace_file = *f.trace;
  if (f.verbose) c.verbose = true;
  if (f.eps) c.eps = *f.eps;
  if (f.c0) c.c0 = *f.c0;
  if (f.gap) c.gap = *f.gap;
  if (f.h_norm) c.h_norm = *f.h_norm;
  if (f.beta) c.beta = *f.beta;
  if (f.bound_steps) c.bound_steps = *f.bound_steps;
  if (f.cnot_depth) c.cost_model.cnot_depth_per_link = *f.cnot_depth;
  if (f.rz_depth) c.cost_model.rz_depth = *f.rz_depth;
  if (f.basis_depth) c.cost_model.basis_change_depth = *f.basis_depth;
  c.cost_model.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian gradient descent ground-state experiments"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "single RGD run; writes the trace");
  add_common(*run, f);
  add_randomized(*run, f);
  run->add_flag("--verbose", f.verbose, "include every rotation in the trace");

  auto* scaling = app.add_subcommand("scaling", "exact-RGD steps to target vs n, with fits");
  add_common(*scaling, f);

  auto* subspace = app.add_subcommand("subspace", "randomized-subspace sweep over n and dim");
  add_common(*subspace, f);
  add_randomized(*subspace, f);
  subspace->add_option("--crossing", f.crossing, "per-run|mean-curve");

  auto* compare = app.add_subcommand("compare", "Trotter vs qDRIFT rotations and depth");
  add_common(*compare, f);
  add_randomized(*compare, f);
  add_cost_model(*compare, f);

  auto* bound = app.add_subcommand("bound", "step-count and ITE error bounds");
  add_common(*bound, f);
  bound->add_option("--eps", f.eps, "target precision");
  bound->add_option("--c0", f.c0, "ground-state overlap |C0|");
  bound->add_option("--gap", f.gap, "spectral gap");
  bound->add_option("--h-norm", f.h_norm, "spectral norm ||H||");
  bound->add_option("--beta", f.beta, "imaginary time");
  bound->add_option("--N", f.bound_steps, "number of RGD steps");

  auto* depth = app.add_subcommand("depth", "circuit depth of a run or a saved verbose trace");
  add_common(*depth, f);
  add_randomized(*depth, f);
  add_cost_model(*depth, f);
  depth->add_option("--trace", f.trace, "trace JSON written by 'run --verbose'")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    ex::execute_to(resolve(name, f), std::cout);
  } catch (const std::exception& e) {
    std::cerr << "rgd: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#pragma once

// Riemannian gradient descent on the unitary group for E(psi) = <psi|H|psi>.
//
// The Riemannian gradient at psi is the skew-Hermitian commutator
// [|psi><psi|, H]. An exact step exponentiates it; a randomized step projects
// it onto a sampled set of Pauli generators iP (coefficients g_P) and realizes
// the resulting unitary by a first-order Trotter product or by a qDRIFT-style
// sampled product.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "rgd/error.hpp"
#include "rgd/hamiltonian.hpp"
#include "rgd/pauli.hpp"

namespace rgd {

using Rng = std::mt19937_64;

enum class StepMethod { exact, trotter, qdrift };

// How the coefficients g_P = <grad J, iP> (unnormalized P) enter the applied
// generator. hilbert_schmidt uses normalized generators iP/sqrt(2^n), which
// scales every applied angle by 1/2^n; unnormalized exponentiates g_P iP as is.
enum class GeneratorNormalization { hilbert_schmidt, unnormalized };

enum class HaltReason { target_reached, max_steps, stalled };

inline const char* to_string(StepMethod m) {
  switch (m) {
    case StepMethod::exact: return "exact";
    case StepMethod::trotter: return "trotter";
    case StepMethod::qdrift: return "qdrift";
  }
  return "?";
}

inline const char* to_string(GeneratorNormalization g) {
  return g == GeneratorNormalization::hilbert_schmidt ? "hilbert_schmidt" : "unnormalized";
}

inline const char* to_string(HaltReason r) {
  switch (r) {
    case HaltReason::target_reached: return "target_reached";
    case HaltReason::max_steps: return "max_steps";
    case HaltReason::stalled: return "stalled";
  }
  return "?";
}

inline double generator_scale(GeneratorNormalization g, int n_qubits) {
  return g == GeneratorNormalization::hilbert_schmidt ? std::ldexp(1.0, -n_qubits) : 1.0;
}

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

// --- energy and exact gradient ---------------------------------------------

inline double energy_from_cached(const StateVector& psi, std::span<const cplx> h_psi) {
  detail::require_same_dim(psi.dim(), h_psi.size(), "energy");
  cplx e{0.0, 0.0};
  for (std::size_t b = 0; b < psi.dim(); ++b) e += std::conj(psi[b]) * h_psi[b];
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real()))) {
    throw Error("energy: imaginary residue exceeds 1e-10 (H not Hermitian?)");
  }
  return e.real();
}

inline double energy(const StateVector& psi, const Hamiltonian& h) {
  detail::require_same_dim(psi.dim(), h.dim(), "energy");
  if (h.is_diagonal()) {
    const auto& d = h.diagonal();
    double e = 0.0;
    for (std::size_t b = 0; b < psi.dim(); ++b) e += d[b] * std::norm(psi[b]);
    return e;
  }
  return energy_from_cached(psi, apply_hamiltonian(h, psi));
}

// [|psi><psi|, H] |psi> = <H> psi - H psi.
inline Amplitudes exact_gradient_action(const StateVector& psi, const Hamiltonian& h) {
  detail::require_same_dim(psi.dim(), h.dim(), "exact_gradient_action");
  Amplitudes phi = apply_hamiltonian(h, psi);
  const double e = energy_from_cached(psi, phi);
  for (std::size_t b = 0; b < phi.size(); ++b) phi[b] = e * psi[b] - phi[b];
  return phi;
}

namespace detail {

// Closed-form exponential of gamma [rho, H] restricted to span{psi, H psi}.
// With E = <H>, v = H psi - E psi, sigma = |v| and u = v / sigma, the generator
// acts as psi -> -sigma u, u -> sigma psi and annihilates the complement, so
//   e^{gamma [rho,H]} psi = cos(gamma sigma) psi - sin(gamma sigma) u.
inline bool exact_step_cached(StateVector& psi, std::span<const cplx> h_psi, double e,
                              double gamma, double eigen_tol = 1e-13) {
  Amplitudes& a = psi.mutable_amplitudes();
  double sigma2 = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) sigma2 += std::norm(h_psi[b] - e * a[b]);
  const double sigma = std::sqrt(sigma2);
  if (sigma < eigen_tol) return false;
  const double c = std::cos(gamma * sigma);
  const double s = std::sin(gamma * sigma) / sigma;
  for (std::size_t b = 0; b < a.size(); ++b) a[b] = c * a[b] - s * (h_psi[b] - e * a[b]);
  const double norm = StateVector::l2_norm(a);
  for (auto& x : a) x /= norm;
  return true;
}

}  // namespace detail

inline StateVector exact_rgd_step(const StateVector& psi, const Hamiltonian& h, double gamma) {
  detail::require(gamma > 0.0 && std::isfinite(gamma), "exact_rgd_step: gamma must be > 0");
  detail::require_same_dim(psi.dim(), h.dim(), "exact_rgd_step");
  const Amplitudes phi = apply_hamiltonian(h, psi);
  const double e = energy_from_cached(psi, phi);
  StateVector out = psi;
  detail::exact_step_cached(out, phi, e, gamma);
  return out;
}

// --- gradient components ----------------------------------------------------

// g_P = d/dtheta <psi| e^{i theta P} H e^{-i theta P} |psi> at 0
//     = -2 Im <psi|P|phi>, phi = H psi.
inline double gradient_component(const StateVector& psi, std::span<const cplx> h_psi,
                                 const PauliString& p) {
  detail::require_same_dim(psi.dim(), h_psi.size(), "gradient_component");
  return -2.0 * pauli_matrix_element(psi.amplitudes(), p, h_psi).imag();
}

inline std::uint64_t pauli_set_size(int n_qubits) {
  // 4^n - 1, saturating for n >= 32.
  return n_qubits >= 32 ? std::numeric_limits<std::uint64_t>::max()
                        : (std::uint64_t{1} << (2 * n_qubits)) - 1;
}

inline PauliString pauli_from_index(int n_qubits, std::uint64_t index) {
  const std::uint64_t mask = PauliString::mask_for(n_qubits);
  return {n_qubits, index & mask, (index >> n_qubits) & mask};
}

// All 4^n - 1 non-identity strings in index order.
inline std::vector<PauliString> full_pauli_set(int n_qubits) {
  detail::require(n_qubits >= 1 && n_qubits <= 10, "full_pauli_set: n must be in [1, 10]");
  std::vector<PauliString> out;
  const std::uint64_t total = pauli_set_size(n_qubits);
  out.reserve(total);
  for (std::uint64_t r = 1; r <= total; ++r) out.push_back(pauli_from_index(n_qubits, r));
  return out;
}

// dim distinct non-identity strings, uniform without replacement, in draw
// order. Rejection with a hash set; a partial Fisher-Yates shuffle once dim is
// more than half of the whole set.
inline std::vector<PauliString> sample_subspace(int n_qubits, std::uint64_t dim, Rng& rng) {
  const std::uint64_t total = pauli_set_size(n_qubits);
  detail::require(dim >= 1 && dim <= total, "sample_subspace: dim out of range [1, 4^n - 1]");
  std::vector<PauliString> out;
  out.reserve(dim);
  if (dim > total / 2) {
    detail::require(total <= (std::uint64_t{1} << 24), "sample_subspace: dense draw too large");
    std::vector<std::uint64_t> pool(total);
    for (std::uint64_t r = 0; r < total; ++r) pool[r] = r + 1;
    for (std::uint64_t i = 0; i < dim; ++i) {
      const std::uint64_t j = i + std::uint64_t(uniform01(rng) * double(total - i));
      std::swap(pool[i], pool[std::min(j, total - 1)]);
      out.push_back(pauli_from_index(n_qubits, pool[i]));
    }
    return out;
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(dim * 2);
  while (out.size() < dim) {
    const PauliString p = sample_random_pauli(n_qubits, rng);
    if (seen.insert(p.index()).second) out.push_back(p);
  }
  return out;
}

struct ApproxGradient {
  std::vector<PauliString> subspace;
  std::vector<double> coefficients;  // g_P, unnormalized-P convention
  std::vector<int> signs;            // sign(g_P) in {-1, 0, 1}
  double lambda = 0.0;               // sum |g_P|
  double scale = 1.0;                // generator normalization factor

  std::size_t size() const { return subspace.size(); }
};

inline ApproxGradient approximate_gradient(const StateVector& psi, std::span<const cplx> h_psi,
                                           std::vector<PauliString> subspace,
                                           GeneratorNormalization norm =
                                               GeneratorNormalization::hilbert_schmidt) {
  ApproxGradient g;
  g.scale = generator_scale(norm, psi.n_qubits());
  g.coefficients.reserve(subspace.size());
  g.signs.reserve(subspace.size());
  for (const auto& p : subspace) {
    detail::require(!p.is_identity(), "approximate_gradient: identity string in subspace");
    const double c = gradient_component(psi, h_psi, p);
    g.coefficients.push_back(c);
    g.signs.push_back((c > 0.0) - (c < 0.0));
    g.lambda += std::abs(c);
  }
  g.subspace = std::move(subspace);
  return g;
}

inline ApproxGradient approximate_gradient(const StateVector& psi, const Hamiltonian& h,
                                           std::vector<PauliString> subspace,
                                           GeneratorNormalization norm =
                                               GeneratorNormalization::hilbert_schmidt) {
  detail::require_same_dim(psi.dim(), h.dim(), "approximate_gradient");
  return approximate_gradient(psi, apply_hamiltonian(h, psi), std::move(subspace), norm);
}

// --- step realizations ------------------------------------------------------

inline constexpr double kDeadZone = 1e-12;

struct StepResult {
  StateVector state;
  std::vector<PauliRotation> rotations;
  bool stalled = false;
};

namespace detail {

inline void check_step_args(const StateVector& psi, const ApproxGradient& g, double gamma,
                            int m) {
  require(gamma > 0.0 && std::isfinite(gamma), "step: gamma must be > 0");
  require(m >= 1, "step: repetition count must be >= 1");
  for (const auto& p : g.subspace) {
    require_same_dim(std::size_t(p.n_qubits()), std::size_t(psi.n_qubits()), "step");
  }
}

inline void trotter_inplace(StateVector& psi, const ApproxGradient& g, double gamma, int m,
                            std::vector<PauliRotation>& applied) {
  for (int rep = 0; rep < m; ++rep) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (std::abs(g.coefficients[i]) < kDeadZone) continue;
      const double theta = gamma * g.scale * g.coefficients[i] / m;
      apply_pauli_rotation_inplace(g.subspace[i], theta, psi);
      applied.push_back({g.subspace[i], theta});
    }
  }
}

// Returns false (and leaves psi untouched) when lambda == 0.
inline bool qdrift_inplace(StateVector& psi, const ApproxGradient& g, double gamma, int m,
                           Rng& rng, std::vector<PauliRotation>& applied) {
  if (!(g.lambda > 0.0)) return false;
  const double angle = g.lambda * gamma * g.scale / m;
  for (int j = 0; j < m; ++j) {
    const double target = uniform01(rng) * g.lambda;
    double acc = 0.0;
    std::size_t pick = g.size() - 1;
    for (std::size_t i = 0; i < g.size(); ++i) {
      acc += std::abs(g.coefficients[i]);
      if (target < acc) {
        pick = i;
        break;
      }
    }
    // Guard against round-off landing on a zero-weight tail entry.
    while (g.signs[pick] == 0 && pick > 0) --pick;
    const double theta = angle * g.signs[pick];
    apply_pauli_rotation_inplace(g.subspace[pick], theta, psi);
    applied.push_back({g.subspace[pick], theta});
  }
  return true;
}

}  // namespace detail

// (prod_{P in A} e^{i gamma s g_P P / M})^M with s the generator scale, in
// subspace order; rotations with |g_P| < kDeadZone are skipped.
inline StepResult trotter_step(const StateVector& psi, const ApproxGradient& g, double gamma,
                               int m = 1) {
  detail::check_step_args(psi, g, gamma, m);
  StepResult r{psi, {}, false};
  detail::trotter_inplace(r.state, g, gamma, m, r.rotations);
  return r;
}

// M i.i.d. draws P_j ~ |g_P| / lambda, each applied as
// e^{i lambda gamma s sign(g_{P_j}) P_j / M}.
inline StepResult qdrift_step(const StateVector& psi, const ApproxGradient& g, double gamma,
                              int m, Rng& rng) {
  detail::check_step_args(psi, g, gamma, m);
  StepResult r{psi, {}, false};
  r.stalled = !detail::qdrift_inplace(r.state, g, gamma, m, rng, r.rotations);
  return r;
}

// --- step size and progress ------------------------------------------------

inline double default_step_size(const Hamiltonian& h, const SpectralCaps& caps = {}) {
  const NormEstimate norm = spectral_norm_bound(h, caps);
  if (!(norm.value > 0.0)) throw InvalidArgument("default_step_size: ||H|| = 0");
  return 1.0 / (4.0 * norm.value);
}

inline double approximation_ratio(double j, const SpectralData& sd) {
  if (sd.ground_energy >= 0.0) {
    throw UseResidualRule("approximation_ratio: E0 >= 0; use the normalized residual rule");
  }
  return j / sd.ground_energy;
}

// J/E0 when E0 < 0; otherwise 1 - (J - E0)/(Emax - E0). Both reach 1 at the
// ground energy.
inline double progress_ratio(double j, const SpectralData& sd) {
  if (sd.ground_energy < 0.0) return j / sd.ground_energy + 0.0;  // no -0
  return 1.0 - (j - sd.ground_energy) / (sd.max_energy - sd.ground_energy);
}

// --- full runs --------------------------------------------------------------

struct InitialState {
  enum class Kind { plus, basis, explicit_vector };
  Kind kind = Kind::plus;
  std::string bits;   // basis: qubit 0 leftmost
  Amplitudes vector;  // explicit_vector: normalized on preparation

  static InitialState plus_state() { return {}; }
  static InitialState basis_state(std::string b) { return {Kind::basis, std::move(b), {}}; }
  static InitialState explicit_state(Amplitudes v) {
    return {Kind::explicit_vector, {}, std::move(v)};
  }

  StateVector prepare(int n_qubits) const {
    switch (kind) {
      case Kind::plus: return StateVector::plus(n_qubits);
      case Kind::basis: {
        detail::require(int(bits.size()) == n_qubits,
                        "initial state: bitstring length != n_qubits");
        return StateVector::basis(bits);
      }
      case Kind::explicit_vector: {
        detail::require(vector.size() == (std::size_t{1} << n_qubits),
                        "initial state: explicit vector has wrong length");
        return StateVector::normalized(vector);
      }
    }
    throw InvalidArgument("initial state: unknown kind");
  }
};

struct RGDConfig {
  std::optional<double> step_size;            // nullopt: 1/(4 ||H||)
  std::optional<int> max_steps;               // nullopt: 10000 n
  double target_ratio = 0.99;
  std::optional<std::uint64_t> subspace_dim;  // nullopt: full
  StepMethod step_method = StepMethod::exact;
  int trotter_steps = 1;
  int qdrift_samples = 1;
  std::uint64_t seed = 0;
  InitialState initial_state;
  GeneratorNormalization normalization = GeneratorNormalization::hilbert_schmidt;
  bool halt_on_target = true;
  double stall_tolerance = 1e-9;  // relative to ||H||
};

struct StepRecord {
  int k = 0;
  double energy = 0.0;
  double ratio = 0.0;
  double lambda = 0.0;         // sum |g_P|; exact mode: ||[rho,H] psi||
  double gradient_norm = 0.0;  // ||[rho,H] psi|| before the step
  int n_rotations = 0;
  std::size_t first_rotation = 0;  // offset into RunTrace::circuit
};

struct RunTrace {
  RGDConfig config;
  double step_size = 0.0;
  int n_qubits = 0;
  std::vector<StepRecord> steps;  // steps[0] is the initial state (k = 0)
  StateVector final_state;
  CircuitRecord circuit;
  HaltReason halted_reason = HaltReason::max_steps;

  int steps_taken() const { return steps.empty() ? 0 : steps.back().k; }
  std::size_t total_rotations() const { return circuit.size(); }
  double final_energy() const { return steps.back().energy; }
  double final_ratio() const { return steps.back().ratio; }
};

inline void validate_config(const RGDConfig& c, int n_qubits) {
  detail::require(!c.step_size || (*c.step_size > 0.0 && std::isfinite(*c.step_size)),
                  "config: step size must be > 0");
  detail::require(!c.max_steps || *c.max_steps >= 0, "config: max_steps must be >= 0");
  detail::require(c.target_ratio > 0.0 && c.target_ratio <= 1.0,
                  "config: target_ratio must be in (0, 1]");
  detail::require(c.trotter_steps >= 1, "config: trotter_steps must be >= 1");
  detail::require(c.qdrift_samples >= 1, "config: qdrift_samples must be >= 1");
  if (c.subspace_dim) {
    detail::require(*c.subspace_dim >= 1 && *c.subspace_dim <= pauli_set_size(n_qubits),
                    "config: subspace_dim must be in [1, 4^n - 1]");
    detail::require(c.step_method != StepMethod::exact,
                    "config: exact step method requires the full gradient (no subspace_dim)");
  } else if (c.step_method != StepMethod::exact) {
    detail::require(n_qubits <= 6, "config: full Pauli subspace limited to n <= 6");
  }
}

inline RunTrace run_rgd(const Hamiltonian& h, const RGDConfig& config, const SpectralData& sd) {
  const int n = h.n_qubits();
  validate_config(config, n);
  RunTrace trace;
  trace.config = config;
  trace.n_qubits = n;
  trace.step_size = config.step_size ? *config.step_size : default_step_size(h);
  const int max_steps = config.max_steps ? *config.max_steps : 10000 * n;
  const double stall_tol = config.stall_tolerance * sd.spectral_norm;
  const double gamma = trace.step_size;

  Rng rng(config.seed);
  StateVector psi = config.initial_state.prepare(n);
  Amplitudes phi = apply_hamiltonian(h, psi);
  double e = energy_from_cached(psi, phi);
  trace.steps.push_back({0, e, progress_ratio(e, sd), 0.0, 0.0, 0, 0});

  const std::vector<PauliString> full_set =
      (config.step_method != StepMethod::exact && !config.subspace_dim) ? full_pauli_set(n)
                                                                        : std::vector<PauliString>{};
  std::vector<PauliRotation> applied;
  trace.halted_reason = HaltReason::max_steps;
  if (config.halt_on_target && trace.steps.back().ratio >= config.target_ratio) {
    trace.halted_reason = HaltReason::target_reached;
  }
  for (int k = 1; k <= max_steps && trace.halted_reason != HaltReason::target_reached; ++k) {
    double sigma2 = 0.0;
    for (std::size_t b = 0; b < phi.size(); ++b) sigma2 += std::norm(phi[b] - e * psi[b]);
    const double sigma = std::sqrt(sigma2);
    if (sigma < stall_tol) {
      trace.halted_reason = HaltReason::stalled;
      break;
    }
    StepRecord rec{k, 0.0, 0.0, 0.0, sigma, 0, trace.circuit.size()};
    applied.clear();
    if (config.step_method == StepMethod::exact) {
      detail::exact_step_cached(psi, phi, e, gamma);
      rec.lambda = sigma;
    } else {
      std::vector<PauliString> subspace =
          config.subspace_dim ? sample_subspace(n, *config.subspace_dim, rng) : full_set;
      const ApproxGradient g = approximate_gradient(psi, phi, std::move(subspace),
                                                    config.normalization);
      rec.lambda = g.lambda;
      if (config.step_method == StepMethod::trotter) {
        detail::trotter_inplace(psi, g, gamma, config.trotter_steps, applied);
      } else {
        detail::qdrift_inplace(psi, g, gamma, config.qdrift_samples, rng, applied);
      }
      for (auto& r : applied) trace.circuit.append(r);
    }
    rec.n_rotations = static_cast<int>(applied.size());
    phi = apply_hamiltonian(h, psi);
    e = energy_from_cached(psi, phi);
    rec.energy = e;
    rec.ratio = progress_ratio(e, sd);
    trace.steps.push_back(rec);
    if (config.halt_on_target && rec.ratio >= config.target_ratio) {
      trace.halted_reason = HaltReason::target_reached;
    }
  }
  trace.final_state = std::move(psi);
  return trace;
}

inline RunTrace run_rgd(const Hamiltonian& h, const RGDConfig& config,
                        const SpectralCaps& caps = {}) {
  return run_rgd(h, config, exact_spectrum(h, caps));
}

}  // namespace rgd

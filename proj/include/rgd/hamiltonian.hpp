#pragma once

// Problem Hamiltonians as real-weighted Pauli sums, plus exact spectral data
// for desk-scale system sizes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rgd/error.hpp"
#include "rgd/pauli.hpp"

namespace rgd {

struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
};

class Graph {
 public:
  Graph(int n_vertices, std::vector<Edge> edges)
      : n_(n_vertices), edges_(std::move(edges)) {
    detail::require(n_ >= 1, "Graph: n_vertices must be positive");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges_) {
      detail::require(e.i >= 0 && e.i < n_ && e.j >= 0 && e.j < n_,
                      "Graph: vertex index out of range");
      detail::require(e.i != e.j, "Graph: self-loop");
      detail::require(std::isfinite(e.weight), "Graph: non-finite weight");
      const auto key = std::minmax(e.i, e.j);
      detail::require(seen.insert(key).second, "Graph: duplicate edge");
    }
  }

  int n_vertices() const { return n_; }
  std::span<const Edge> edges() const { return edges_; }

 private:
  int n_;
  std::vector<Edge> edges_;
};

inline Graph chain_graph(int n) {
  detail::require(n >= 2, "chain_graph: n must be >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return {n, std::move(edges)};
}

inline Graph complete_graph(int n) {
  detail::require(n >= 2, "complete_graph: n must be >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  }
  return {n, std::move(edges)};
}

struct PauliTerm {
  double coeff = 0.0;
  PauliString pauli;
};

// H = sum_j c_j P_j with real c_j. Duplicate strings are merged (first
// occurrence keeps its position). Hamiltonians whose terms are all diagonal
// carry a precomputed diagonal; a diagonal-only Hamiltonian may also be built
// directly from its 2^n diagonal entries without materializing terms.
class Hamiltonian {
 public:
  static constexpr int kMaxDiagonalCacheQubits = 26;

  Hamiltonian(int n_qubits, std::vector<PauliTerm> terms) : n_(n_qubits) {
    detail::require(n_ >= 1 && n_ <= kMaxQubits,
                    "Hamiltonian: n_qubits out of range");
    std::unordered_map<PauliString, std::size_t, PauliStringHash> position;
    for (auto& t : terms) {
      detail::require(std::isfinite(t.coeff), "Hamiltonian: non-finite coefficient");
      detail::require_same_dim(std::size_t(t.pauli.n_qubits()), std::size_t(n_),
                               "Hamiltonian term");
      auto [it, inserted] = position.try_emplace(t.pauli, terms_.size());
      if (inserted) {
        terms_.push_back(t);
      } else {
        terms_[it->second].coeff += t.coeff;
      }
    }
    const bool all_diag = std::all_of(terms_.begin(), terms_.end(),
                                      [](const PauliTerm& t) { return t.pauli.is_diagonal(); });
    if (all_diag && n_ <= kMaxDiagonalCacheQubits) diagonal_ = build_diagonal();
  }

  static Hamiltonian from_diagonal(std::vector<double> diagonal) {
    const std::size_t dim = diagonal.size();
    detail::require(dim >= 2 && std::has_single_bit(dim),
                    "Hamiltonian: diagonal length must be 2^n");
    for (double d : diagonal) {
      detail::require(std::isfinite(d), "Hamiltonian: non-finite diagonal entry");
    }
    Hamiltonian h;
    h.n_ = std::countr_zero(dim);
    h.diagonal_only_ = true;
    h.diagonal_ = std::move(diagonal);
    return h;
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  bool is_diagonal() const { return diagonal_.has_value(); }
  bool is_diagonal_only() const { return diagonal_only_; }
  const std::vector<double>& diagonal() const {
    detail::require(diagonal_.has_value(), "Hamiltonian: not diagonal");
    return *diagonal_;
  }

  // Stored terms; empty for a diagonal-only Hamiltonian (see expanded_terms).
  std::span<const PauliTerm> terms() const { return terms_; }

  // Pauli expansion; for diagonal-only storage this runs a Walsh-Hadamard
  // transform of the diagonal and drops coefficients below 1e-15.
  std::vector<PauliTerm> expanded_terms() const {
    if (!diagonal_only_) return terms_;
    std::vector<double> c = *diagonal_;
    for (std::size_t h = 1; h < c.size(); h <<= 1) {
      for (std::size_t i = 0; i < c.size(); i += 2 * h) {
        for (std::size_t j = i; j < i + h; ++j) {
          const double a = c[j];
          const double b = c[j + h];
          c[j] = a + b;
          c[j + h] = a - b;
        }
      }
    }
    std::vector<PauliTerm> out;
    const double scale = 1.0 / double(c.size());
    for (std::uint64_t z = 0; z < c.size(); ++z) {
      const double coeff = c[z] * scale;
      if (std::abs(coeff) > 1e-15) out.push_back({coeff, PauliString(n_, 0, z)});
    }
    return out;
  }

  // Sum of |c_j|: an upper bound on the spectral norm.
  double coefficient_l1() const {
    double s = 0.0;
    if (diagonal_only_) {
      for (const auto& t : expanded_terms()) s += std::abs(t.coeff);
    } else {
      for (const auto& t : terms_) s += std::abs(t.coeff);
    }
    return s;
  }

 private:
  Hamiltonian() = default;

  std::vector<double> build_diagonal() const {
    std::vector<double> d(dim(), 0.0);
    for (const auto& t : terms_) {
      const std::uint64_t z = t.pauli.z_mask();
      for (std::uint64_t b = 0; b < d.size(); ++b) {
        d[b] += t.coeff * detail::parity_sign(b & z);
      }
    }
    return d;
  }

  int n_ = 1;
  bool diagonal_only_ = false;
  std::vector<PauliTerm> terms_;
  std::optional<std::vector<double>> diagonal_;
};

inline Hamiltonian ising_from_graph(const Graph& g) {
  std::vector<PauliTerm> terms;
  for (const auto& e : g.edges()) {
    const std::uint64_t z = (std::uint64_t{1} << e.i) | (std::uint64_t{1} << e.j);
    terms.push_back({e.weight, PauliString(g.n_vertices(), 0, z)});
  }
  return {g.n_vertices(), std::move(terms)};
}

inline constexpr int kGroverMaxTermQubits = 6;

// H = 1 - |w><w| for a bitstring w (qubit 0 leftmost).
inline Hamiltonian grover_hamiltonian(std::string_view omega) {
  detail::require(!omega.empty() && omega.size() <= kMaxQubits,
                  "grover_hamiltonian: bitstring length out of range");
  const int n = static_cast<int>(omega.size());
  std::uint64_t target = 0;
  for (int j = 0; j < n; ++j) {
    const char c = omega[static_cast<std::size_t>(j)];
    detail::require(c == '0' || c == '1', "grover_hamiltonian: bitstring must be 0/1");
    if (c == '1') target |= std::uint64_t{1} << j;
  }
  const std::size_t dim = std::size_t{1} << n;
  if (n > kGroverMaxTermQubits) {
    std::vector<double> diag(dim, 1.0);
    diag[target] = 0.0;
    return Hamiltonian::from_diagonal(std::move(diag));
  }
  // |w><w| = prod_j (1 + s_j Z_j)/2 with s_j = (-1)^{w_j}.
  std::vector<PauliTerm> terms;
  const double scale = 1.0 / double(dim);
  for (std::uint64_t z = 0; z < dim; ++z) {
    const double sign = detail::parity_sign(z & target);
    const double coeff = (z == 0 ? 1.0 : 0.0) - scale * sign;
    terms.push_back({coeff, PauliString(n, 0, z)});
  }
  return {n, std::move(terms)};
}

// H v for an unnormalized vector.
inline Amplitudes apply_hamiltonian(const Hamiltonian& h, std::span<const cplx> v) {
  detail::require_same_dim(h.dim(), v.size(), "apply_hamiltonian");
  Amplitudes out(v.size(), cplx{0.0, 0.0});
  if (h.is_diagonal()) {
    const auto& d = h.diagonal();
    for (std::size_t b = 0; b < v.size(); ++b) out[b] = d[b] * v[b];
    return out;
  }
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.pauli.x_mask();
    const std::uint64_t z = t.pauli.z_mask();
    const cplx global = t.coeff * detail::i_power(t.pauli.y_count());
    for (std::uint64_t b = 0; b < v.size(); ++b) {
      out[b ^ x] += global * detail::parity_sign(b & z) * v[b];
    }
  }
  return out;
}

inline Amplitudes apply_hamiltonian(const Hamiltonian& h, const StateVector& psi) {
  return apply_hamiltonian(h, psi.amplitudes());
}

struct SpectralCaps {
  int max_diagonal_qubits = 14;
  int max_dense_qubits = 12;
};

inline bool spectrum_affordable(const Hamiltonian& h, const SpectralCaps& caps = {}) {
  return h.is_diagonal() ? h.n_qubits() <= caps.max_diagonal_qubits
                         : h.n_qubits() <= caps.max_dense_qubits;
}

inline Eigen::MatrixXcd to_dense(const Hamiltonian& h) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  if (h.is_diagonal()) {
    const auto& d = h.diagonal();
    for (Eigen::Index b = 0; b < n; ++b) m(b, b) = d[static_cast<std::size_t>(b)];
    return m;
  }
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.pauli.x_mask();
    const std::uint64_t z = t.pauli.z_mask();
    const cplx global = t.coeff * detail::i_power(t.pauli.y_count());
    for (std::uint64_t b = 0; b < h.dim(); ++b) {
      m(Eigen::Index(b ^ x), Eigen::Index(b)) += global * detail::parity_sign(b & z);
    }
  }
  return m;
}

// Full eigendecomposition: ascending eigenvalues with matching orthonormal
// eigenvectors as columns. Diagonal Hamiltonians yield basis vectors.
struct Eigensystem {
  std::vector<double> values;
  Eigen::MatrixXcd vectors;  // empty for diagonal Hamiltonians
  std::vector<std::uint64_t> basis_order;  // diagonal only: index of each value
  bool diagonal = false;
};

inline Eigensystem eigensystem(const Hamiltonian& h, const SpectralCaps& caps = {}) {
  if (!spectrum_affordable(h, caps)) {
    throw SizeCapExceeded("exact spectrum: n_qubits = " + std::to_string(h.n_qubits()) +
                          " exceeds the configured cap");
  }
  Eigensystem es;
  if (h.is_diagonal()) {
    const auto& d = h.diagonal();
    es.diagonal = true;
    es.basis_order.resize(d.size());
    for (std::size_t b = 0; b < d.size(); ++b) es.basis_order[b] = b;
    std::stable_sort(es.basis_order.begin(), es.basis_order.end(),
                     [&](std::uint64_t a, std::uint64_t b) { return d[a] < d[b]; });
    es.values.reserve(d.size());
    for (auto b : es.basis_order) es.values.push_back(d[b]);
    return es;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_dense(h));
  if (solver.info() != Eigen::Success) throw Error("exact spectrum: eigensolver failed");
  es.values.assign(solver.eigenvalues().data(),
                   solver.eigenvalues().data() + solver.eigenvalues().size());
  es.vectors = solver.eigenvectors();
  return es;
}

struct SpectralData {
  double ground_energy = 0.0;
  double max_energy = 0.0;
  double spectral_gap = 0.0;
  double spectral_norm = 0.0;
  int ground_degeneracy = 1;
  StateVector ground_state;                // one representative
  std::vector<StateVector> ground_space;   // orthonormal basis
  std::vector<double> eigenvalues;         // ascending, full spectrum
};

inline double degeneracy_tolerance(double spectral_norm) { return 1e-9 * spectral_norm; }

inline SpectralData exact_spectrum(const Hamiltonian& h, const SpectralCaps& caps = {}) {
  Eigensystem es = eigensystem(h, caps);
  SpectralData sd;
  sd.ground_energy = es.values.front();
  sd.max_energy = es.values.back();
  sd.spectral_norm = std::max(std::abs(sd.ground_energy), std::abs(sd.max_energy));
  const double tol = degeneracy_tolerance(sd.spectral_norm);
  auto above = std::find_if(es.values.begin(), es.values.end(),
                            [&](double v) { return v > sd.ground_energy + tol; });
  if (above == es.values.end()) {
    throw ZeroGap("exact spectrum: H is proportional to the identity (zero gap)");
  }
  sd.spectral_gap = *above - sd.ground_energy;
  sd.ground_degeneracy = static_cast<int>(above - es.values.begin());
  for (int k = 0; k < sd.ground_degeneracy; ++k) {
    if (es.diagonal) {
      sd.ground_space.push_back(StateVector::basis(h.n_qubits(), es.basis_order[std::size_t(k)]));
    } else {
      const auto col = es.vectors.col(k);
      sd.ground_space.push_back(
          StateVector::normalized(Amplitudes(col.data(), col.data() + col.size())));
    }
  }
  sd.ground_state = sd.ground_space.front();
  sd.eigenvalues = std::move(es.values);
  return sd;
}

struct NormEstimate {
  double value = 0.0;
  bool exact = false;  // false: triangle bound sum |c_j|
};

inline NormEstimate spectral_norm_bound(const Hamiltonian& h, const SpectralCaps& caps = {}) {
  if (h.is_diagonal()) {
    double m = 0.0;
    for (double d : h.diagonal()) m = std::max(m, std::abs(d));
    return {m, true};
  }
  if (spectrum_affordable(h, caps)) {
    const auto es = eigensystem(h, caps);
    return {std::max(std::abs(es.values.front()), std::abs(es.values.back())), true};
  }
  return {h.coefficient_l1(), false};
}

// Norm of the projection of psi0 onto the ground eigenspace; equals
// |<E0|psi0>| when the ground state is nondegenerate.
inline double ground_overlap(const SpectralData& sd, const StateVector& psi0) {
  double s = 0.0;
  for (const auto& g : sd.ground_space) {
    detail::require_same_dim(g.dim(), psi0.dim(), "ground_overlap");
    cplx ip{0.0, 0.0};
    for (std::size_t b = 0; b < g.dim(); ++b) ip += std::conj(g[b]) * psi0[b];
    s += std::norm(ip);
  }
  return std::sqrt(s);
}

inline double ground_overlap(const Hamiltonian& h, const StateVector& psi0,
                             const SpectralCaps& caps = {}) {
  detail::require_same_dim(h.dim(), psi0.dim(), "ground_overlap");
  return ground_overlap(exact_spectrum(h, caps), psi0);
}

}  // namespace rgd

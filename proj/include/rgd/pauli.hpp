#pragma once

// Pauli strings in symplectic bitmask form and their action on dense
// statevectors.
//
// Conventions:
//   * basis index b stores qubit j in bit j (qubit 0 is the least
//     significant bit);
//   * a PauliString P with masks (x, z) is the operator
//       P = i^{popcount(x & z)} X^x Z^z,
//     so P|b> = i^{popcount(x & z)} (-1)^{popcount(b & z)} |b ^ x>;
//   * text form lists qubit 0 first: "ZZI" is Z_0 Z_1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgd/error.hpp"

namespace rgd {

using cplx = std::complex<double>;
using Amplitudes = std::vector<cplx>;

inline constexpr int kMaxQubits = 30;

class PauliString {
 public:
  PauliString() = default;
  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
      : n_qubits_(n_qubits), x_(x_mask), z_(z_mask) {
    detail::require(n_qubits >= 1 && n_qubits <= 32,
                    "PauliString: n_qubits must be in [1, 32]");
    const std::uint64_t full = mask_for(n_qubits);
    detail::require((x_mask & ~full) == 0 && (z_mask & ~full) == 0,
                    "PauliString: mask has bits beyond n_qubits");
  }

  static PauliString identity(int n_qubits) { return {n_qubits, 0, 0}; }

  // Parses "IXYZ"-style text; qubit 0 is the leftmost letter.
  static PauliString from_text(std::string_view text) {
    detail::require(!text.empty() && text.size() <= 32,
                    "PauliString: text length must be in [1, 32]");
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    for (std::size_t j = 0; j < text.size(); ++j) {
      const std::uint64_t bit = std::uint64_t{1} << j;
      switch (text[j]) {
        case 'I': break;
        case 'X': x |= bit; break;
        case 'Y': x |= bit; z |= bit; break;
        case 'Z': z |= bit; break;
        default:
          throw InvalidArgument("PauliString: invalid letter '" +
                                std::string(1, text[j]) + "'");
      }
    }
    return {static_cast<int>(text.size()), x, z};
  }

  // Single-letter string on one qubit.
  static PauliString single(int n_qubits, int qubit, char letter) {
    detail::require(qubit >= 0 && qubit < n_qubits,
                    "PauliString: qubit out of range");
    std::string text(static_cast<std::size_t>(n_qubits), 'I');
    text[static_cast<std::size_t>(qubit)] = letter;
    return from_text(text);
  }

  std::string text() const {
    std::string out(static_cast<std::size_t>(n_qubits_), 'I');
    for (int j = 0; j < n_qubits_; ++j) out[static_cast<std::size_t>(j)] = letter(j);
    return out;
  }

  char letter(int qubit) const {
    const bool xb = (x_ >> qubit) & 1U;
    const bool zb = (z_ >> qubit) & 1U;
    if (xb && zb) return 'Y';
    if (xb) return 'X';
    if (zb) return 'Z';
    return 'I';
  }

  int n_qubits() const { return n_qubits_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  int weight() const { return std::popcount(x_ | z_); }
  int y_count() const { return std::popcount(x_ & z_); }
  bool is_identity() const { return (x_ | z_) == 0; }
  bool is_diagonal() const { return x_ == 0; }

  bool commutes_with(const PauliString& other) const {
    return (std::popcount((x_ & other.z_) ^ (z_ & other.x_)) & 1) == 0;
  }

  // Packs (x, z) into one integer in [0, 4^n); used for hashing and sorting.
  std::uint64_t index() const { return x_ | (z_ << n_qubits_); }

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString& a, const PauliString& b) {
    if (a.n_qubits_ != b.n_qubits_) return a.n_qubits_ <=> b.n_qubits_;
    return a.index() <=> b.index();
  }

  static std::uint64_t mask_for(int n_qubits) {
    return n_qubits >= 64 ? ~std::uint64_t{0}
                          : (std::uint64_t{1} << n_qubits) - 1;
  }

 private:
  int n_qubits_ = 1;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept {
    return std::hash<std::uint64_t>{}(p.index() ^
                                      (std::uint64_t(p.n_qubits()) << 58));
  }
};

// Normalized amplitude vector of length 2^n.
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-10;

  StateVector() = default;

  // Takes amplitudes that are already normalized (within kNormTolerance).
  static StateVector from_amplitudes(Amplitudes amps) {
    const int n = qubits_for_size(amps.size());
    const double norm = l2_norm(amps);
    detail::require(std::abs(norm - 1.0) <= kNormTolerance,
                    "StateVector: amplitudes are not normalized");
    return StateVector(n, std::move(amps));
  }

  // Rescales arbitrary nonzero amplitudes to unit norm.
  static StateVector normalized(Amplitudes amps) {
    const int n = qubits_for_size(amps.size());
    const double norm = l2_norm(amps);
    detail::require(norm > 0.0 && std::isfinite(norm),
                    "StateVector: cannot normalize a zero or non-finite vector");
    for (auto& a : amps) a /= norm;
    return StateVector(n, std::move(amps));
  }

  static StateVector basis(int n_qubits, std::uint64_t index) {
    check_qubits(n_qubits);
    const std::size_t dim = std::size_t{1} << n_qubits;
    detail::require(index < dim, "StateVector: basis index out of range");
    Amplitudes amps(dim, cplx{0.0, 0.0});
    amps[index] = 1.0;
    return StateVector(n_qubits, std::move(amps));
  }

  // Bitstring text with qubit 0 leftmost, e.g. "010".
  static StateVector basis(std::string_view bits) {
    detail::require(!bits.empty() && bits.size() <= kMaxQubits,
                    "StateVector: bitstring length out of range");
    std::uint64_t index = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      detail::require(bits[j] == '0' || bits[j] == '1',
                      "StateVector: bitstring must contain only 0/1");
      if (bits[j] == '1') index |= std::uint64_t{1} << j;
    }
    return basis(static_cast<int>(bits.size()), index);
  }

  // |+>^{(x) n}.
  static StateVector plus(int n_qubits) {
    check_qubits(n_qubits);
    const std::size_t dim = std::size_t{1} << n_qubits;
    return StateVector(n_qubits,
                       Amplitudes(dim, cplx{1.0 / std::sqrt(double(dim)), 0.0}));
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  double norm() const { return l2_norm(amps_); }

  // Mutable access for in-place unitary kernels; callers own the invariant.
  Amplitudes& mutable_amplitudes() { return amps_; }

  static double l2_norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return std::sqrt(s);
  }

  static int qubits_for_size(std::size_t size) {
    detail::require(size >= 2 && std::has_single_bit(size),
                    "StateVector: length must be 2^n with n >= 1");
    const int n = std::countr_zero(size);
    check_qubits(n);
    return n;
  }

 private:
  StateVector(int n, Amplitudes amps) : n_qubits_(n), amps_(std::move(amps)) {}

  static void check_qubits(int n) {
    detail::require(n >= 1 && n <= kMaxQubits,
                    "StateVector: n_qubits out of range");
  }

  int n_qubits_ = 0;
  Amplitudes amps_;
};

struct PauliRotation {
  PauliString pauli;
  double angle = 0.0;  // full exponent: e^{i angle P}
};

// Ordered, append-only record of applied rotations.
class CircuitRecord {
 public:
  void append(PauliRotation r) { rotations_.push_back(std::move(r)); }
  void append(const CircuitRecord& other) {
    rotations_.insert(rotations_.end(), other.rotations_.begin(),
                      other.rotations_.end());
  }
  std::span<const PauliRotation> rotations() const { return rotations_; }
  std::size_t size() const { return rotations_.size(); }
  bool empty() const { return rotations_.empty(); }

 private:
  std::vector<PauliRotation> rotations_;
};

namespace detail {

// i^k for k mod 4.
inline cplx i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline double parity_sign(std::uint64_t v) {
  return (std::popcount(v) & 1) ? -1.0 : 1.0;
}

inline void check_pauli_dim(const PauliString& p, std::size_t dim,
                            const char* what) {
  require_same_dim(std::size_t{1} << p.n_qubits(), dim, what);
}

}  // namespace detail

// out = P v for an arbitrary (unnormalized) vector.
inline Amplitudes apply_pauli(const PauliString& p, std::span<const cplx> v) {
  detail::check_pauli_dim(p, v.size(), "apply_pauli");
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  const cplx global = detail::i_power(p.y_count());
  Amplitudes out(v.size());
  for (std::uint64_t b = 0; b < v.size(); ++b) {
    out[b ^ x] = global * detail::parity_sign(b & z) * v[b];
  }
  return out;
}

inline StateVector apply_pauli(const PauliString& p, const StateVector& psi) {
  detail::require_same_dim(std::size_t(p.n_qubits()), std::size_t(psi.n_qubits()),
                           "apply_pauli");
  return StateVector::from_amplitudes(apply_pauli(p, psi.amplitudes()));
}

// <u|P|v>.
inline cplx pauli_matrix_element(std::span<const cplx> u, const PauliString& p,
                                 std::span<const cplx> v) {
  detail::check_pauli_dim(p, v.size(), "pauli_matrix_element");
  detail::require_same_dim(u.size(), v.size(), "pauli_matrix_element");
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  // Split the +/- parity sums so the hot loop carries no multiplications.
  cplx plus{0.0, 0.0};
  cplx minus{0.0, 0.0};
  for (std::uint64_t b = 0; b < v.size(); ++b) {
    const cplx term = std::conj(u[b ^ x]) * v[b];
    if (std::popcount(b & z) & 1) {
      minus += term;
    } else {
      plus += term;
    }
  }
  return detail::i_power(p.y_count()) * (plus - minus);
}

inline double pauli_expectation(const StateVector& psi, const PauliString& p) {
  detail::require_same_dim(std::size_t(p.n_qubits()), std::size_t(psi.n_qubits()),
                           "pauli_expectation");
  const double value =
      pauli_matrix_element(psi.amplitudes(), p, psi.amplitudes()).real();
  return std::clamp(value, -1.0, 1.0);
}

// In place: psi <- e^{i theta P} psi = cos(theta) psi + i sin(theta) P psi.
inline void apply_pauli_rotation_inplace(const PauliString& p, double theta,
                                         StateVector& psi) {
  detail::require(std::isfinite(theta), "apply_pauli_rotation: non-finite angle");
  detail::require_same_dim(std::size_t(p.n_qubits()), std::size_t(psi.n_qubits()),
                           "apply_pauli_rotation");
  if (theta == 0.0) return;
  Amplitudes& a = psi.mutable_amplitudes();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  // i sin(theta) * i^{ny}
  const cplx is_global = cplx{0.0, s} * detail::i_power(p.y_count());
  if (x == 0) {
    const cplx up = c + is_global;
    const cplx down = c - is_global;
    for (std::uint64_t b = 0; b < a.size(); ++b) {
      a[b] *= (std::popcount(b & z) & 1) ? down : up;
    }
    return;
  }
  // Pairs (b, b ^ x) mix; visit each pair once via its lower member.
  const std::uint64_t top = std::uint64_t{1} << (std::bit_width(x) - 1);
  for (std::uint64_t b = 0; b < a.size(); ++b) {
    if (b & top) continue;
    const std::uint64_t bp = b ^ x;
    const cplx ab = a[b];
    const cplx abp = a[bp];
    // (P psi)[b] = phase(bp) psi[bp], phase(c) = i^{ny} (-1)^{|c & z|}
    a[b] = c * ab + is_global * detail::parity_sign(bp & z) * abp;
    a[bp] = c * abp + is_global * detail::parity_sign(b & z) * ab;
  }
}

inline StateVector apply_pauli_rotation(const PauliString& p, double theta,
                                        const StateVector& psi) {
  StateVector out = psi;
  apply_pauli_rotation_inplace(p, theta, out);
  return out;
}

struct PauliProduct {
  PauliString pauli;
  cplx phase;  // one of {1, i, -1, -i}
};

// P Q = phase * R.
inline PauliProduct pauli_product(const PauliString& p, const PauliString& q) {
  detail::require_same_dim(std::size_t(p.n_qubits()), std::size_t(q.n_qubits()),
                           "pauli_product");
  const PauliString r(p.n_qubits(), p.x_mask() ^ q.x_mask(),
                      p.z_mask() ^ q.z_mask());
  // X^a Z^b X^c Z^d = (-1)^{|b & c|} X^{a^c} Z^{b^d}
  const int k = p.y_count() + q.y_count() - r.y_count() +
                2 * (std::popcount(p.z_mask() & q.x_mask()) & 1);
  return {r, detail::i_power(((k % 4) + 4) % 4)};
}

// Uniform over the 4^n - 1 non-identity strings (2n random bits, reject 0).
template <class Rng>
PauliString sample_random_pauli(int n_qubits, Rng& rng) {
  detail::require(n_qubits >= 1 && n_qubits <= 32,
                  "sample_random_pauli: n must be in [1, 32]");
  static_assert(Rng::min() == 0 && Rng::max() == ~std::uint64_t{0},
                "sample_random_pauli needs a full 64-bit generator");
  const std::uint64_t mask = PauliString::mask_for(n_qubits);
  for (;;) {
    const std::uint64_t bits = rng();
    const std::uint64_t x = bits & mask;
    const std::uint64_t z = (bits >> 32) & mask;
    if ((x | z) != 0) return {n_qubits, x, z};
  }
}

}  // namespace rgd

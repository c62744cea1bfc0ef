#pragma once

// Gate-count model for Pauli rotations e^{i theta P}: basis change into Z on
// every X/Y qubit, a CNOT ladder folding the parity of the support onto one
// qubit, a single Rz, then the inverse ladder and basis change. Depth is the
// summed per-gate depth (no scheduling).

#include <cstdint>
#include <vector>

#include "rgd/error.hpp"
#include "rgd/pauli.hpp"

namespace rgd {

struct GateCostModel {
  double cnot_depth_per_link = 1.0;
  double rz_depth = 1.0;
  double basis_change_depth = 1.0;  // per side, when any X/Y letter is present

  void validate() const {
    detail::require(cnot_depth_per_link >= 0.0 && rz_depth >= 0.0 && basis_change_depth >= 0.0,
                    "GateCostModel: costs must be nonnegative");
  }
};

struct RotationCost {
  double depth = 0.0;
  std::int64_t cnots = 0;
};

inline RotationCost rotation_depth(const PauliString& p, const GateCostModel& model = {}) {
  detail::require(!p.is_identity(), "rotation_depth: identity string has no rotation");
  const int w = p.weight();
  const bool basis_change = p.x_mask() != 0;
  RotationCost c;
  c.cnots = 2 * (w - 1);
  c.depth = 2.0 * (w - 1) * model.cnot_depth_per_link + model.rz_depth +
            (basis_change ? 2.0 * model.basis_change_depth : 0.0);
  return c;
}

struct DepthEstimate {
  double total_depth = 0.0;
  std::int64_t total_rotations = 0;
  std::int64_t total_cnots = 0;
  std::vector<double> per_step_depth;  // filled when step offsets are given

  DepthEstimate& operator+=(const DepthEstimate& o) {
    total_depth += o.total_depth;
    total_rotations += o.total_rotations;
    total_cnots += o.total_cnots;
    per_step_depth.insert(per_step_depth.end(), o.per_step_depth.begin(), o.per_step_depth.end());
    return *this;
  }
};

inline DepthEstimate trace_depth(const CircuitRecord& circuit, const GateCostModel& model = {}) {
  model.validate();
  DepthEstimate d;
  for (const auto& r : circuit.rotations()) {
    const RotationCost c = rotation_depth(r.pauli, model);
    d.total_depth += c.depth;
    d.total_cnots += c.cnots;
    ++d.total_rotations;
  }
  return d;
}

// Same totals plus a per-step depth series; step_sizes[k] is the number of
// rotations recorded in step k, in order.
inline DepthEstimate trace_depth(const CircuitRecord& circuit, std::span<const int> step_sizes,
                                 const GateCostModel& model = {}) {
  DepthEstimate d = trace_depth(circuit, model);
  std::size_t pos = 0;
  const auto rots = circuit.rotations();
  for (int count : step_sizes) {
    detail::require(count >= 0 && pos + std::size_t(count) <= rots.size(),
                    "trace_depth: step sizes exceed circuit length");
    double depth = 0.0;
    for (int i = 0; i < count; ++i) depth += rotation_depth(rots[pos++].pauli, model).depth;
    d.per_step_depth.push_back(depth);
  }
  detail::require(pos == rots.size(), "trace_depth: step sizes do not cover the circuit");
  return d;
}

}  // namespace rgd

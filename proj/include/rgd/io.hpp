#pragma once

// JSON/CSV schemas for Hamiltonians, graphs, run traces and cost models.
// Output is canonical: fixed key order, shortest round-trip float text, so
// re-reading and re-serializing any emitted file is byte-identical.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rgd/circuit_cost.hpp"
#include "rgd/engine.hpp"
#include "rgd/error.hpp"
#include "rgd/hamiltonian.hpp"

namespace rgd::io {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Non-finite doubles become null (JSON has no inf/nan).
inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to a sibling temp file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid JSON: ") + e.what());
  }
}

// --- Hamiltonian / Graph ----------------------------------------------------

inline Json to_json(const Hamiltonian& h) {
  Json terms = Json::array();
  for (const auto& t : h.expanded_terms()) {
    terms.push_back(Json{{"coeff", t.coeff}, {"pauli", t.pauli.text()}});
  }
  return Json{{"n_qubits", h.n_qubits()}, {"terms", std::move(terms)}};
}

inline Hamiltonian hamiltonian_from_json(const Json& j) {
  try {
    const int n = j.at("n_qubits").get<int>();
    std::vector<PauliTerm> terms;
    for (const auto& t : j.at("terms")) {
      const PauliString p = PauliString::from_text(t.at("pauli").get<std::string>());
      detail::require_same_dim(std::size_t(p.n_qubits()), std::size_t(n), "Hamiltonian JSON pauli");
      terms.push_back({t.at("coeff").get<double>(), p});
    }
    return {n, std::move(terms)};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("Hamiltonian JSON: ") + e.what());
  }
}

inline Json to_json(const Graph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back(Json::array({e.i, e.j, e.weight}));
  return Json{{"n", g.n_vertices()}, {"edges", std::move(edges)}};
}

inline Graph graph_from_json(const Json& j) {
  try {
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      detail::require(e.is_array() && (e.size() == 2 || e.size() == 3),
                      "Graph JSON: edge must be [i, j] or [i, j, weight]");
      edges.push_back({e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0});
    }
    return {j.at("n").get<int>(), std::move(edges)};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("Graph JSON: ") + e.what());
  }
}

// --- cost model -------------------------------------------------------------

inline GateCostModel cost_model_from_json(const Json& j, GateCostModel base = {}) {
  if (j.contains("cnot_depth")) base.cnot_depth_per_link = j["cnot_depth"].get<double>();
  if (j.contains("rz_depth")) base.rz_depth = j["rz_depth"].get<double>();
  if (j.contains("basis_change_depth")) base.basis_change_depth = j["basis_change_depth"].get<double>();
  base.validate();
  return base;
}

inline Json to_json(const GateCostModel& m) {
  return Json{{"cnot_depth", m.cnot_depth_per_link},
              {"rz_depth", m.rz_depth},
              {"basis_change_depth", m.basis_change_depth}};
}

inline Json to_json(const DepthEstimate& d) {
  Json per_step = Json::array();
  for (double v : d.per_step_depth) per_step.push_back(v);
  return Json{{"total_depth", d.total_depth},
              {"total_rotations", d.total_rotations},
              {"total_cnots", d.total_cnots},
              {"per_step_depth", std::move(per_step)}};
}

// --- run traces -------------------------------------------------------------

inline Json to_json(const RGDConfig& c, double resolved_step_size) {
  Json init;
  switch (c.initial_state.kind) {
    case InitialState::Kind::plus: init = "plus"; break;
    case InitialState::Kind::basis: init = c.initial_state.bits; break;
    case InitialState::Kind::explicit_vector: {
      init = Json::array();
      for (const auto& a : c.initial_state.vector) init.push_back(Json::array({a.real(), a.imag()}));
      break;
    }
  }
  return Json{{"step_size", resolved_step_size},
              {"step_size_mode", c.step_size ? "fixed" : "auto"},
              {"max_steps", c.max_steps ? Json(*c.max_steps) : Json("default")},
              {"target_ratio", c.target_ratio},
              {"subspace_dim", c.subspace_dim ? Json(*c.subspace_dim) : Json("full")},
              {"step_method", to_string(c.step_method)},
              {"trotter_steps", c.trotter_steps},
              {"qdrift_samples", c.qdrift_samples},
              {"seed", c.seed},
              {"normalization", to_string(c.normalization)},
              {"initial_state", std::move(init)}};
}

inline Json to_json(const RunTrace& t, bool include_rotations = false) {
  Json steps = Json::array();
  const auto rots = t.circuit.rotations();
  for (const auto& s : t.steps) {
    Json row{{"k", s.k},
             {"energy", s.energy},
             {"ratio", s.ratio},
             {"lambda", s.lambda},
             {"gradient_norm", s.gradient_norm},
             {"n_rotations", s.n_rotations}};
    if (include_rotations) {
      Json list = Json::array();
      for (int i = 0; i < s.n_rotations; ++i) {
        const auto& r = rots[s.first_rotation + std::size_t(i)];
        list.push_back(Json{{"pauli", r.pauli.text()}, {"angle", r.angle}});
      }
      row["rotations"] = std::move(list);
    }
    steps.push_back(std::move(row));
  }
  return Json{{"config", to_json(t.config, t.step_size)},
              {"n_qubits", t.n_qubits},
              {"steps", std::move(steps)},
              {"halted_reason", to_string(t.halted_reason)},
              {"total_rotations", t.total_rotations()}};
}

// Rebuilds the circuit and per-step rotation counts from a trace written with
// include_rotations = true.
struct TraceCircuit {
  CircuitRecord circuit;
  std::vector<int> step_sizes;
};

inline TraceCircuit circuit_from_trace_json(const Json& j) {
  TraceCircuit out;
  try {
    for (const auto& s : j.at("steps")) {
      if (!s.contains("rotations")) {
        detail::require(s.at("n_rotations").get<int>() == 0,
                        "trace JSON: rotations missing (write the trace with --verbose)");
        out.step_sizes.push_back(0);
        continue;
      }
      int count = 0;
      for (const auto& r : s["rotations"]) {
        out.circuit.append({PauliString::from_text(r.at("pauli").get<std::string>()),
                            r.at("angle").get<double>()});
        ++count;
      }
      out.step_sizes.push_back(count);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("trace JSON: ") + e.what());
  }
  return out;
}

// --- CSV ----------------------------------------------------------------------

inline constexpr std::string_view kCsvSchemaLine = "# schema=1";

struct CsvTable {
  std::vector<std::string> comments;  // extra "# ..." lines after the schema line
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render() const {
    std::string out(kCsvSchemaLine);
    out += '\n';
    for (const auto& c : comments) out += "# " + c + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(columns);
    for (const auto& r : rows) line(r);
    return out;
  }
};

inline CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool saw_schema = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (!saw_schema) {
      detail::require(line == kCsvSchemaLine, "CSV: missing '# schema=1' header");
      saw_schema = true;
      continue;
    }
    if (line.rfind("# ", 0) == 0) {
      t.comments.push_back(line.substr(2));
    } else if (t.columns.empty()) {
      t.columns = split(line);
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

inline CsvTable trace_steps_csv(const RunTrace& t) {
  CsvTable table;
  table.comments.push_back(std::string("halted_reason=") + to_string(t.halted_reason));
  table.columns = {"k", "energy", "ratio", "lambda", "gradient_norm", "n_rotations"};
  for (const auto& s : t.steps) {
    table.rows.push_back({std::to_string(s.k), format_double(s.energy), format_double(s.ratio),
                          format_double(s.lambda), format_double(s.gradient_norm),
                          std::to_string(s.n_rotations)});
  }
  return table;
}

}  // namespace rgd::io

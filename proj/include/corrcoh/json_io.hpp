#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "corrcoh/correlated.hpp"
#include "corrcoh/quantifiers.hpp"
#include "corrcoh/state.hpp"
#include "corrcoh/testbench.hpp"

namespace corrcoh::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Reading

inline json parse_text(const std::string& text, const std::string& source = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // The library message carries the line and column of the offending byte.
    throw ParseError(source + ": " + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

namespace detail {

inline const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
  return j.at(name);
}

inline Complex complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("complex entries must be numbers or [re, im] pairs, got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Vector vector_from(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of complex entries");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
  return v;
}

inline Matrix matrix_from(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ParseError("matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from(j[r][c]);
  }
  return m;
}

inline Dims dims_from(const json& j) {
  const json& d = field(j, "dims");
  if (!d.is_array()) throw ParseError("dims must be an array of integers");
  Dims out;
  for (const auto& x : d) {
    if (!x.is_number_integer()) throw ParseError("dims must be an array of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

inline Labels labels_from(const json& j) {
  if (!j.contains("labels")) return {};
  Labels out;
  for (const auto& x : j.at("labels")) {
    if (!x.is_string()) throw ParseError("labels must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

/// Files written by `sample` wrap the state as {"state": ..., "decomposition": ...}.
inline const json& unwrap(const json& j, const char* key) { return j.is_object() && j.contains(key) ? j.at(key) : j; }

inline json complex_to(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

inline Ket ket_from_json(const json& j) {
  return Ket(detail::vector_from(detail::field(j, "vector")), detail::dims_from(j), detail::labels_from(j));
}

/// Accepts a density matrix {"matrix": ...} or a ket {"vector": ...}.
inline DensityMatrix state_from_json(const json& input) {
  const json& j = detail::unwrap(input, "state");
  if (j.is_object() && j.contains("vector")) return DensityMatrix(ket_from_json(j));
  try {
    return DensityMatrix(detail::matrix_from(detail::field(j, "matrix")), detail::dims_from(j), detail::labels_from(j));
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }
}

inline Ensemble ensemble_from_json(const json& input) {
  const json& j = detail::unwrap(input, "decomposition");
  Ensemble e;
  for (const auto& w : detail::field(j, "weights")) e.weights.push_back(w.get<double>());
  for (const auto& s : detail::field(j, "states")) e.states.push_back(ket_from_json(s));
  e.validate();
  return e;
}

/// {"basis_A": [v_0, v_1, ...], "basis_B": [...]} with vectors as lists of complex entries.
inline LocalBasisPair basis_pair_from_json(const json& j) {
  auto side = [&](const char* name) {
    const json& vs = detail::field(j, name);
    if (!vs.is_array() || vs.empty()) throw ParseError(std::string(name) + " must be a list of vectors");
    Matrix m(static_cast<Eigen::Index>(vs.size()), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t c = 0; c < vs.size(); ++c) {
      const Vector v = detail::vector_from(vs[c]);
      if (v.size() != m.rows()) throw ParseError(std::string(name) + " vectors must have one entry per basis vector");
      m.col(static_cast<Eigen::Index>(c)) = v;
    }
    return Basis(m);
  };
  return {side("basis_A"), side("basis_B")};
}

// ---------------------------------------------------------------------------
// Writing

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(detail::complex_to(v(i)));
  return a;
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(detail::complex_to(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const DensityMatrix& rho) {
  return {{"dims", rho.dims()}, {"labels", rho.labels()}, {"matrix", to_json(rho.matrix())}};
}

inline json to_json(const Ket& psi) {
  return {{"dims", psi.dims()}, {"labels", psi.labels()}, {"vector", to_json(psi.amplitudes())}};
}

inline json to_json(const Ensemble& e) {
  json states = json::array();
  for (const Ket& k : e.states) states.push_back(to_json(k));
  return {{"weights", e.weights}, {"states", std::move(states)}};
}

inline json basis_vectors(const Basis& b) {
  json a = json::array();
  for (Eigen::Index c = 0; c < b.matrix().cols(); ++c) a.push_back(to_json(Vector(b.matrix().col(c))));
  return a;
}

inline json to_json(const LocalBasisPair& p) { return {{"basis_A", basis_vectors(p.alice)}, {"basis_B", basis_vectors(p.bob)}}; }

inline json to_json(const SchmidtForm& sf) {
  std::vector<double> c(sf.coefficients.data(), sf.coefficients.data() + sf.coefficients.size());
  return {{"type", "schmidt"}, {"coefficients", c}, {"bases", to_json(sf.bases())}};
}

inline json to_json(const CminResult& r, std::uint64_t seed) {
  return {{"value", r.value},
          {"converged", r.converged},
          {"restarts_used", r.restarts_used},
          {"evaluations", r.evaluations},
          {"search_dimension", r.search_dimension},
          {"seed", seed},
          {"argmin_basis", to_json(r.argmin_basis)}};
}

inline json to_json(const ExtensionCandidate& c) {
  json j = {{"type", "extension"},
            {"ancilla_dims", {c.ancilla_dims.first, c.ancilla_dims.second}},
            {"marginal_residual", c.marginal_residual},
            {"labels", c.state.labels()},
            {"dims", c.state.dims()},
            {"witness_basis", to_json(c.witness)}};
  j["symmetry_residual"] = c.symmetry_residual ? json(*c.symmetry_residual) : json(nullptr);
  j["alignment_side"] = c.alignment_side.empty() ? json(nullptr) : json(c.alignment_side);
  return j;
}

inline json to_json(const BoundReport& r) {
  json witness = std::visit(
      [](const auto& w) -> json {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<W, Ensemble>) {
          json e = to_json(w);
          e["type"] = "ensemble";
          return e;
        } else {
          return to_json(w);
        }
      },
      r.witness);
  std::pair<int, int> anc{1, 1};
  if (const auto* c = std::get_if<ExtensionCandidate>(&r.witness)) anc = c->ancilla_dims;
  json tried = json::array();
  for (const auto& [a, b] : r.diagnostics.ancilla_dims_tried) tried.push_back({a, b});
  return {{"value", r.value},
          {"kind", to_string(r.kind)},
          {"ancilla_dims", {anc.first, anc.second}},
          {"restarts", r.diagnostics.restarts},
          {"seed", r.diagnostics.seed},
          {"diagnostics",
           {{"source", r.diagnostics.source},
            {"candidates", r.diagnostics.candidates},
            {"converged", r.diagnostics.converged},
            {"ancilla_dims_tried", std::move(tried)}}},
          {"witness", std::move(witness)}};
}

inline json to_json(const Classification& c) {
  return {{"label", to_string(c.label)},
          {"cc", {{"is_cc", c.cc.is_cc}, {"c_min", c.cc.value}, {"converged", c.cc.converged}, {"witness", to_json(c.cc.witness)}}},
          {"cq",
           {{"is_cq", c.cq.is_cq},
            {"residual", c.cq.residual},
            {"converged", c.cq.converged},
            {"witness", {{"basis_A", basis_vectors(c.cq.witness)}}}}}};
}

inline json to_json(const Check& c) {
  return {{"name", c.name}, {"relation", c.relation}, {"observed", c.observed}, {"required", c.required}, {"tolerance", c.tolerance}};
}

/// Wall time is left out so reports from identical runs are byte-identical.
inline json to_json(const PropertySuiteReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures)
    failures.push_back({{"trial", f.trial}, {"seed", f.seed}, {"inputs", json::parse(f.inputs)}, {"check", to_json(f.check)}});
  return {{"suite", r.suite},       {"measure", r.measure},     {"seed", r.seed},
          {"trials", r.trials},     {"checks", r.checks},       {"passed", r.passed()},
          {"tolerances", r.tolerances}, {"failures", std::move(failures)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace corrcoh::io

#pragma once
//
// JSON encoding of spaces, families, tuples, paths and equations.
//
// Scalars are a bare number or an [re, im] pair; complex values are rejected
// over R. Output uses ordered objects so field order is fixed, and doubles are
// written in shortest round-trip form.
//

#include <nlohmann/json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "cframe/error.hpp"
#include "cframe/measure.hpp"
#include "cframe/solvers.hpp"
#include "cframe/stiefel.hpp"

namespace cframe::json {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1.0.0";

[[noreturn]] inline void malformed(const std::string& what) { throw Error(ErrorCode::MalformedInput, what); }

inline const Json& member(const Json& j, const char* key) {
  if (!j.is_object()) malformed(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

inline const Json& array_member(const Json& j, const char* key) {
  const Json& a = member(j, key);
  if (!a.is_array()) malformed(std::string("field '") + key + "' must be an array");
  return a;
}

inline double number(const Json& j, const std::string& what) {
  if (!j.is_number()) malformed(what + " must be a number");
  return j.get<double>();
}

// ---------------------------------------------------------------------------
// Scalars, vectors, matrices
// ---------------------------------------------------------------------------

inline Scalar parse_scalar(const Json& j, Field field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    const Scalar z{j[0].get<double>(), j[1].get<double>()};
    if (field == Field::Real && z.imag() != 0.0) throw Error(ErrorCode::FieldMismatch, "complex value over R");
    return z;
  }
  malformed("scalar must be a number or an [re, im] pair");
}

inline std::vector<Scalar> parse_vector(const Json& j, Field field) {
  if (!j.is_array()) malformed("vector must be an array of scalars");
  std::vector<Scalar> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(parse_scalar(e, field));
  return v;
}

inline Matrix parse_rows(const Json& j, Field field, std::size_t cols_hint = 0) {
  if (!j.is_array()) malformed("matrix must be an array of rows");
  std::vector<std::vector<Scalar>> rows;
  for (const auto& r : j) rows.push_back(parse_vector(r, field));
  if (rows.empty()) return Matrix(0, cols_hint);
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) malformed("matrix rows must have equal length");
  return Matrix::from_rows(rows);
}

// Adding 0.0 turns -0.0 into 0.0 so equal values print identically.
inline Json scalar(const Scalar& z, Field field) {
  if (field == Field::Real) return z.real() + 0.0;
  return Json::array({z.real() + 0.0, z.imag() + 0.0});
}

inline Json vector(std::span<const Scalar> v, Field field) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(scalar(z, field));
  return a;
}

inline Json rows(const Matrix& m, Field field) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vector(m.row(i), field));
  return a;
}

inline std::vector<std::string> parse_labels(const Json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const Json& a = j.at(key);
  if (!a.is_array()) malformed(std::string("field '") + key + "' must be an array of labels");
  for (const auto& l : a) {
    if (!l.is_string()) malformed(std::string("field '") + key + "' must hold strings");
    out.push_back(l.get<std::string>());
  }
  return out;
}

inline Json labels(const std::vector<std::string>& l) { return Json(l); }

// ---------------------------------------------------------------------------
// Spaces, families, tuples
// ---------------------------------------------------------------------------

inline SpacePtr parse_space(const Json& j) {
  const Json& f = member(j, "field");
  if (!f.is_string() || (f != "R" && f != "C")) malformed("field must be \"R\" or \"C\"");
  const Field field = f == "R" ? Field::Real : Field::Complex;
  std::vector<Atom> atoms;
  for (const auto& a : array_member(j, "atoms")) {
    const Json& label = member(a, "label");
    if (!label.is_string()) malformed("atom label must be a string");
    atoms.push_back({label.get<std::string>(), number(member(a, "weight"), "atom weight")});
  }
  if (atoms.empty()) malformed("space needs at least one atom");
  return std::make_shared<const MeasureSpace>(field, std::move(atoms));
}

inline Json space(const MeasureSpace& s) {
  Json atoms = Json::array();
  for (const auto& a : s.atoms()) atoms.push_back(Json{{"label", a.label}, {"weight", a.weight}});
  return Json{{"field", to_string(s.field())}, {"atoms", std::move(atoms)}};
}

/// {"n": int, "vectors": [phi_x ...]} aligned with atom order.
inline FrameFamily parse_family(const Json& j, const SpacePtr& s) {
  const Json& n = member(j, "n");
  if (!n.is_number_integer() || n.get<long long>() < 1) malformed("family n must be a positive integer");
  const auto cols = static_cast<std::size_t>(n.get<long long>());
  Matrix v = parse_rows(array_member(j, "vectors"), s->field(), cols);
  if (v.rows() != s->size()) malformed("family needs one vector per atom");
  if (v.cols() != cols) malformed("family vectors must have length n");
  return FrameFamily(s, std::move(v));
}

inline Json family(const FrameFamily& f) {
  return Json{{"n", f.n()}, {"vectors", rows(f.vectors(), f.space()->field())}};
}

/// {"n": int, "components": [U^1 ...]}, each component one value per atom.
inline StiefelTuple parse_tuple(const Json& j, const SpacePtr& s) {
  const Json& n = member(j, "n");
  if (!n.is_number_integer() || n.get<long long>() < 1) malformed("tuple n must be a positive integer");
  const auto count = static_cast<std::size_t>(n.get<long long>());
  const Json& comps = array_member(j, "components");
  if (comps.size() != count) malformed("tuple needs n components");
  Matrix m(s->size(), count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto c = parse_vector(comps[k], s->field());
    if (c.size() != s->size()) malformed("tuple components need one value per atom");
    m.set_column(k, c);
  }
  return StiefelTuple(s, std::move(m));
}

inline Json tuple(const StiefelTuple& t) {
  Json comps = Json::array();
  for (std::size_t k = 0; k < t.n(); ++k) comps.push_back(vector(t.component(k), t.space()->field()));
  return Json{{"n", t.n()}, {"components", std::move(comps)}};
}

inline PolynomialPath parse_path(const Json& j, const SpacePtr& s) {
  double a = 0.0, b = 1.0;
  if (j.contains("interval")) {
    const Json& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2) malformed("interval must be [a, b]");
    a = number(iv[0], "interval start");
    b = number(iv[1], "interval end");
  }
  std::vector<StiefelTuple> coeffs;
  for (const auto& c : array_member(j, "coefficients")) coeffs.push_back(parse_tuple(c, s));
  if (coeffs.empty()) malformed("path needs at least one coefficient");
  return PolynomialPath(std::move(coeffs), a, b);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json report(const FrameReport& r, Field field) {
  return Json{{"is_parseval", r.is_parseval},
              {"bounds", Json::array({r.lower, r.upper})},
              {"is_bessel", r.is_bessel},
              {"is_frame", r.is_frame},
              {"is_tight", r.is_tight},
              {"tight_constant", r.tight_constant},
              {"det_gram", r.det_gram},
              {"gram", rows(r.gram, field)}};
}

inline Json certificate(const Certificate& c) {
  Json checks = Json::object();
  for (const auto& [name, ok] : c.checks) checks[name] = ok;
  Json values = Json::object();
  for (const auto& [name, v] : c.values) values[name] = v;
  return Json{{"all_passed", c.all_passed()}, {"checks", std::move(checks)}, {"values", std::move(values)}};
}

// ---------------------------------------------------------------------------
// Equations and targets
// ---------------------------------------------------------------------------

inline EquationSpec parse_equation(const Json& j, const MeasureSpace& s) {
  const Json& kind = member(j, "kind");
  if (!kind.is_string()) malformed("equation kind must be a string");
  const auto k = kind.get<std::string>();
  const Field f = s.field();
  if (k == "generic") {
    Matrix w = parse_rows(array_member(j, "weights"), f);
    if (w.rows() != s.size()) malformed("generic weights need one row per atom");
    return GenericLinearSpec{std::move(w)};
  }
  if (k == "coordinatewise") return CoordinatewiseSpec{parse_vector(member(j, "coefficients"), f)};
  if (k == "integral") return IntegralSpec{parse_vector(member(j, "h"), f), parse_labels(j, "y")};
  if (k == "partitioned") {
    PartitionedSpec p{parse_vector(member(j, "h"), f), {}};
    for (const auto& b : array_member(j, "blocks")) p.blocks.push_back({parse_labels(b, "atoms"), parse_labels(b, "y")});
    return p;
  }
  if (k == "quadratic") {
    QuadraticSpec q;
    q.b = parse_vector(member(j, "b"), f);
    q.h = parse_vector(member(j, "h"), f);
    q.epsilon = j.contains("epsilon") ? number(j.at("epsilon"), "epsilon") : 1.0;
    q.y = parse_labels(j, "y");
    q.b1 = parse_labels(j, "b1");
    q.b2 = parse_labels(j, "b2");
    q.b3 = parse_labels(j, "b3");
    return q;
  }
  malformed("unknown equation kind '" + k + "'");
}

inline Json equation(const EquationSpec& spec, Field f) {
  return std::visit(
      [&](const auto& s) -> Json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GenericLinearSpec>) {
          return Json{{"kind", "generic"}, {"weights", rows(s.weights, f)}};
        } else if constexpr (std::is_same_v<S, CoordinatewiseSpec>) {
          return Json{{"kind", "coordinatewise"}, {"coefficients", vector(s.coefficients, f)}};
        } else if constexpr (std::is_same_v<S, IntegralSpec>) {
          return Json{{"kind", "integral"}, {"h", vector(s.h, f)}, {"y", labels(s.y)}};
        } else if constexpr (std::is_same_v<S, PartitionedSpec>) {
          Json blocks = Json::array();
          for (const auto& b : s.blocks) blocks.push_back(Json{{"atoms", labels(b.atoms)}, {"y", labels(b.y)}});
          return Json{{"kind", "partitioned"}, {"h", vector(s.h, f)}, {"blocks", std::move(blocks)}};
        } else {
          return Json{{"kind", "quadratic"}, {"b", vector(s.b, f)},  {"h", vector(s.h, f)},
                      {"epsilon", s.epsilon}, {"y", labels(s.y)},     {"b1", labels(s.b1)},
                      {"b2", labels(s.b2)},   {"b3", labels(s.b3)}};
        }
      },
      spec);
}

/// Targets: a scalar for the generic form, one vector per block for the
/// partitioned form, a single vector otherwise.
inline EquationValue parse_target(const Json& j, const EquationSpec& spec, Field f) {
  if (std::holds_alternative<GenericLinearSpec>(spec)) return {{parse_scalar(j, f)}};
  if (std::holds_alternative<PartitionedSpec>(spec)) {
    if (!j.is_array()) malformed("partitioned target must be an array of vectors");
    EquationValue out;
    for (const auto& v : j) out.push_back(parse_vector(v, f));
    return out;
  }
  return {parse_vector(j, f)};
}

inline Json target(const EquationValue& v, const EquationSpec& spec, Field f) {
  if (std::holds_alternative<GenericLinearSpec>(spec)) return scalar(v.at(0).at(0), f);
  if (std::holds_alternative<PartitionedSpec>(spec)) {
    Json a = Json::array();
    for (const auto& block : v) a.push_back(vector(block, f));
    return a;
  }
  return vector(v.at(0), f);
}

inline Json solve_result(const SolveResult& r, const EquationSpec& spec, const EquationValue& value) {
  const Field f = r.frame.space()->field();
  return Json{{"kind", kind_name(spec)},
              {"frame", family(r.frame)},
              {"value", target(value, spec, f)},
              {"residual", r.residual},
              {"report", report(r.report, f)},
              {"certificate", certificate(r.certificate)}};
}

inline Json error(const Error& e) {
  return Json{{"error", Json{{"code", to_string(e.code())}, {"clause", e.clause()}, {"message", e.detail()}}}};
}

/// Single-line serialization used for every CLI result.
inline std::string dump(const Json& j) { return j.dump(); }

}  // namespace cframe::json

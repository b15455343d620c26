#pragma once
//
// Command-line front end. Every command reads one JSON problem file and
// writes one JSON document on stdout; diagnostics go to stderr.
//
// Exit codes: 0 success, 1 malformed input or numerical failure,
// 2 violated mathematical hypothesis.
//

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cframe/error.hpp"
#include "cframe/fixtures.hpp"
#include "cframe/json_io.hpp"
#include "cframe/measure.hpp"
#include "cframe/solvers.hpp"
#include "cframe/stiefel.hpp"

namespace cframe::cli {

using json::Json;

enum ExitCode : int { kOk = 0, kFailure = 1, kHypothesis = 2 };

struct Options {
  std::string command;
  std::string input = "-";
  double tol_frame = 1e-10;
  double tol_tight = 1e-9;
  std::size_t samples = 101;
  double epsilon = 1e-6;
  std::uint64_t seed = 0;

  Tolerances tolerances() const { return {tol_frame, tol_tight}; }
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"analyze", "solve",      "connect", "probe",   "decompose",
                                          "retract", "star-check", "densify", "selftest"};
  return c;
}

namespace detail {

inline Json read_problem(const Options& opt, std::istream& in) {
  std::string text;
  if (opt.input == "-") {
    text.assign(std::istreambuf_iterator<char>(in), {});
  } else {
    std::ifstream file(opt.input, std::ios::binary);
    if (!file) throw Error(ErrorCode::MalformedInput, "cannot open input file", opt.input);
    text.assign(std::istreambuf_iterator<char>(file), {});
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedInput, "input is not valid JSON", e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedInput, "problem file must be a JSON object");
  const Json& version = json::member(doc, "version");
  static const std::regex supported(R"(1\.[0-9]+\.[0-9]+)");
  if (!version.is_string() || !std::regex_match(version.get<std::string>(), supported))
    throw Error(ErrorCode::MalformedInput, "unsupported problem file version", version.dump());
  if (doc.contains("task")) {
    const Json& task = doc.at("task");
    if (!task.is_string() || task.get<std::string>() != opt.command)
      throw Error(ErrorCode::MalformedInput, "problem file task does not match the command", task.dump());
  }
  return doc;
}

// Smallest det Gram over the sampled points of every segment, shifted by
// each translation (or unshifted when there are none).
struct SegmentScan {
  double min_det_gram = INFINITY;
  bool all_free = true;
};

inline SegmentScan scan_segments(const PolygonalPath& path, const std::vector<StiefelTuple>& shifts,
                                 std::size_t samples) {
  SegmentScan s;
  const std::size_t count = std::max<std::size_t>(samples, 2);
  for (std::size_t k = 0; k < path.segments(); ++k)
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(count - 1);
      const StiefelTuple p = path.segment_point(k, t);
      auto visit = [&](const StiefelTuple& q) {
        s.min_det_gram = std::min(s.min_det_gram, gram_determinant(q));
        s.all_free = s.all_free && in_stiefel(q);
      };
      if (shifts.empty()) visit(p);
      for (const auto& u : shifts) visit(p - u);
    }
  return s;
}

inline Json analyze_json(const FrameFamily& f, const Tolerances& tol) {
  const FrameReport r = analyze(f, tol);
  Json out = json::report(r, f.space()->field());
  out["stability_radius"] = r.is_frame ? Json(std::sqrt(r.lower)) : Json(nullptr);
  return out;
}

inline Json cmd_analyze(const Options& opt, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  return analyze_json(json::parse_family(json::member(doc, "family"), space), opt.tolerances());
}

inline Json cmd_solve(const Options& opt, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  const EquationSpec spec = json::parse_equation(json::member(doc, "equation"), *space);
  const EquationValue target = json::parse_target(json::member(doc, "target"), spec, space->field());
  SolveResult r = solve(space, spec, target);
  r.report = analyze(r.frame, opt.tolerances());
  return json::solve_result(r, spec, evaluate_equation(spec, r.frame));
}

inline Json cmd_connect(const Options& opt, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  const StiefelTuple x = json::parse_tuple(json::member(doc, "x"), space);
  const StiefelTuple y = json::parse_tuple(json::member(doc, "y"), space);
  std::vector<StiefelTuple> us;
  if (doc.contains("translations"))
    for (const auto& u : json::array_member(doc, "translations")) us.push_back(json::parse_tuple(u, space));
  const Connection c = polygonal_connect(x, y, us);
  const SegmentScan scan = scan_segments(c.path, us, opt.samples);
  Json breakpoints = Json::array();
  for (const auto& b : c.path.breakpoints()) breakpoints.push_back(json::tuple(b));
  const bool exact = c.path.segment_point(0, 0.0) == x && c.path.segment_point(c.path.segments() - 1, 1.0) == y &&
                     c.path.segment_point(0, 1.0) == c.path.segment_point(1, 0.0);
  return Json{{"segments", c.path.segments()},
              {"breakpoints", std::move(breakpoints)},
              {"complement_dimension", c.complement_dimension},
              {"translation_codimension", c.translation_codimension},
              {"sufficient_bound_holds", c.sufficient_bound_holds},
              {"samples_per_segment", std::max<std::size_t>(opt.samples, 2)},
              {"min_det_gram", scan.min_det_gram},
              {"all_samples_free", scan.all_free},
              {"endpoints_exact", exact}};
}

inline Json cmd_probe(const Options& opt, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  const PolynomialPath path = json::parse_path(json::member(doc, "path"), space);
  const double witness = json::number(json::member(doc, "witness_t"), "witness_t");
  const double target = json::number(json::member(doc, "target_t"), "target_t");
  const ProbeResult p = density_probe(path, witness, target, opt.epsilon);
  const GammaPolynomial g = gamma_polynomial(path);
  return Json{{"t", p.t},
              {"attempts", p.attempts},
              {"distance", distance(p.point, path.at(target))},
              {"epsilon", opt.epsilon},
              {"free", in_stiefel(p.point)},
              {"point", json::tuple(p.point)},
              {"gamma", Json{{"degree_bound", g.degree_bound}, {"coefficients", g.coefficients}}}};
}

inline Json cmd_decompose(const Options&, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  const StiefelTuple x = json::parse_tuple(json::member(doc, "tuple"), space);
  const Decomposition d = decompose_into_free_systems(x);
  Json parts = Json::array();
  StiefelTuple sum = StiefelTuple::zero(space, x.n());
  for (const auto& p : d.parts) {
    parts.push_back(json::tuple(p));
    sum += p;
  }
  return Json{{"e", d.parts.size()},
              {"rank", d.rank},
              {"independent_slots", d.independent_slots},
              {"completion_atoms", d.completion_atoms},
              {"parts", std::move(parts)},
              {"sum_exact", sum == x}};
}

inline Json cmd_retract(const Options& opt, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  const StiefelTuple h = json::parse_tuple(json::member(doc, "tuple"), space);
  const GramSchmidtFactor f = gram_schmidt_factor(h);
  const SegmentScan scan = scan_segments(PolygonalPath({h, f.q}), {}, opt.samples);
  return Json{{"q", json::tuple(f.q)},
              {"r", json::rows(f.r, space->field())},
              {"orthonormal", in_orthonormal_stiefel(f.q)},
              {"samples", std::max<std::size_t>(opt.samples, 2)},
              {"segment_min_det_gram", scan.min_det_gram},
              {"segment_free", scan.all_free}};
}

inline Json cmd_star_check(const Options& opt, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  const EquationSpec spec = json::parse_equation(json::member(doc, "equation"), *space);
  const auto* q = std::get_if<QuadraticSpec>(&spec);
  if (q == nullptr) throw Error(ErrorCode::MalformedInput, "star-check needs a quadratic equation");
  const FrameFamily phi = json::parse_family(json::member(doc, "phi"), space);
  const FrameFamily u = doc.contains("u") ? json::parse_family(doc.at("u"), space) : phi;
  std::size_t trials = 100;
  if (doc.contains("trials")) {
    const Json& t = doc.at("trials");
    if (!t.is_number_unsigned()) throw Error(ErrorCode::MalformedInput, "trials must be a non-negative integer");
    trials = t.get<std::size_t>();
  }
  const bool passed = quadratic_star_check(*q, phi, u, trials, opt.seed);
  return Json{{"passed", passed}, {"trials", trials}, {"seed", opt.seed}};
}

inline Json cmd_densify(const Options& opt, const Json& doc) {
  const SpacePtr space = json::parse_space(json::member(doc, "space"));
  const EquationSpec spec = json::parse_equation(json::member(doc, "equation"), *space);
  const EquationValue target = json::parse_target(json::member(doc, "target"), spec, space->field());
  const FrameFamily f = json::parse_family(json::member(doc, "family"), space);
  const DensifyResult r = densify_solution_set(space, spec, target, f, opt.epsilon);
  return Json{{"frame", json::family(r.frame)},
              {"t", r.t},
              {"distance", r.distance},
              {"residual", r.residual},
              {"epsilon", opt.epsilon},
              {"already_free", r.already_free},
              {"free", in_stiefel(transpose_isometry(r.frame))},
              {"report", json::report(analyze(r.frame, opt.tolerances()), space->field())}};
}

inline Json cmd_selftest(const Options& opt, bool& passed) {
  Json checks = Json::array();
  passed = true;
  auto record = [&](const char* name, bool ok, Json detail) {
    passed = passed && ok;
    checks.push_back(Json{{"name", name}, {"passed", ok}, {"detail", std::move(detail)}});
  };

  constexpr double kBasel = 1.6449341;
  const FrameReport series = analyze(phase_series_family(100000, 0.25, 0.0), opt.tolerances());
  const double s11 = series.gram(0, 0).real();
  const double s22 = series.gram(1, 1).real();
  record("phase series diagonal near pi^2/6",
         std::abs(s11 - kBasel) <= 1e-4 && std::abs(s22 - kBasel) <= 1e-4 && series.is_frame && !series.is_tight,
         Json{{"terms", 100000}, {"s11", s11}, {"s22", s22}, {"is_frame", series.is_frame},
              {"is_tight", series.is_tight}});

  const FrameReport id = analyze(identity_family(2), opt.tolerances());
  record("identity family is Parseval", id.is_parseval && id.lower == 1.0 && id.upper == 1.0,
         Json{{"bounds", Json::array({id.lower, id.upper})}, {"is_parseval", id.is_parseval}});

  const FrameReport diag = analyze(repeated_basis_family(), opt.tolerances());
  record("repeated basis has bounds (1, 2)",
         diag.is_frame && !diag.is_tight && std::abs(diag.lower - 1.0) <= 1e-12 && std::abs(diag.upper - 2.0) <= 1e-12,
         Json{{"bounds", Json::array({diag.lower, diag.upper})}, {"is_tight", diag.is_tight}});

  return Json{{"passed", passed}, {"checks", std::move(checks)}};
}

}  // namespace detail

/// Runs one command; returns the process exit code.
inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Continuous frames on discretized measure spaces"};
  app.add_option("command", opt.command, "Command to run")->required()->check(CLI::IsMember(commands()));
  app.add_option("--input", opt.input, "Problem file (- for stdin)")->capture_default_str();
  app.add_option("--tol-frame", opt.tol_frame, "Relative lower frame bound threshold")->capture_default_str();
  app.add_option("--tol-tight", opt.tol_tight, "Tightness tolerance")->capture_default_str();
  app.add_option("--samples", opt.samples, "Samples per path segment")->capture_default_str();
  app.add_option("--epsilon", opt.epsilon, "Approximation radius for probe and densify")->capture_default_str();
  app.add_option("--seed", opt.seed, "Seed for randomized checks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    out << json::dump(json::error(Error(ErrorCode::MalformedInput, "invalid command line", e.what()))) << '\n';
    return kFailure;
  }

  try {
    if (!(opt.tol_frame > 0.0) || !(opt.tol_tight > 0.0) || !(opt.epsilon > 0.0))
      throw Error(ErrorCode::MalformedInput, "tolerances and epsilon must be positive");
    if (opt.command == "selftest") {
      bool passed = false;
      out << json::dump(detail::cmd_selftest(opt, passed)) << '\n';
      return passed ? kOk : kFailure;
    }
    const Json doc = detail::read_problem(opt, in);
    Json result;
    if (opt.command == "analyze") result = detail::cmd_analyze(opt, doc);
    else if (opt.command == "solve") result = detail::cmd_solve(opt, doc);
    else if (opt.command == "connect") result = detail::cmd_connect(opt, doc);
    else if (opt.command == "probe") result = detail::cmd_probe(opt, doc);
    else if (opt.command == "decompose") result = detail::cmd_decompose(opt, doc);
    else if (opt.command == "retract") result = detail::cmd_retract(opt, doc);
    else if (opt.command == "star-check") result = detail::cmd_star_check(opt, doc);
    else result = detail::cmd_densify(opt, doc);
    out << json::dump(result) << '\n';
    return kOk;
  } catch (const Error& e) {
    err << e.what() << '\n';
    out << json::dump(json::error(e)) << '\n';
    return e.is_hypothesis_failure() ? kHypothesis : kFailure;
  } catch (const nlohmann::json::exception& e) {
    err << e.what() << '\n';
    out << json::dump(json::error(Error(ErrorCode::MalformedInput, "malformed problem file", e.what()))) << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    out << json::dump(Json{{"error", Json{{"code", "InternalError"}, {"clause", "unexpected failure"},
                                          {"message", e.what()}}}})
        << '\n';
    return kFailure;
  }
}

}  // namespace cframe::cli

#ifndef RICCATI_CONFIG_HPP
#define RICCATI_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "riccati/certify.hpp"
#include "riccati/error.hpp"
#include "riccati/integrate.hpp"
#include "riccati/matrix.hpp"
#include "riccati/problem.hpp"
#include "riccati/timefn.hpp"

namespace riccati {

// JSON run configuration.
//
//   complex      number | [re, im]
//   term         {"kind": "const"|"poly"|"sin"|"cos"|"exp", "params": [...], "coeff": complex}
//   entry        complex | term | [term, ...]
//   matrix fn    [[entry, ...], ...]  |  {"pieces": [{"start": t, "entries": [[entry]]}, ...]}
//   constant     [[complex, ...], ...]
//
// Top level: name, n, t0, horizon, P, Q, R, S (missing = zero), Z0,
// certificate {U, Lambda, mu, corollary, grid_density, tol}, integrator {...},
// output {dt}, scan {base, direction, values}.

struct CertificateSpec {
  bool corollary = false;  ///< U = P*
  std::optional<MatrixTimeFn> U;
  MatrixTimeFn Lambda;
  std::optional<MatrixTimeFn> mu;
  double grid_density = 64.0;
  double tol = kDefaultDefinitenessTol;
};

struct ScanSpec {
  CMatrix base;
  CMatrix direction;
  std::vector<double> values;
};

struct RunConfig {
  std::string name;
  RiccatiProblem problem;
  CMatrix z0;
  std::optional<CertificateSpec> certificate;
  IntegratorOptions integrator;
  double output_dt = 0.0;  ///< 0 writes accepted steps
  std::optional<ScanSpec> scan;
};

namespace config_detail {

using nlohmann::json;

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, field + ": " + what);
}

inline double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, "expected a number");
  return j.get<double>();
}

inline cplx parse_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  parse_fail(field, "expected a complex number (number or [re, im])");
}

inline bool looks_complex(const json& j) {
  return j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number());
}

inline ScalarBasisTerm parse_term(const json& j, const std::string& field) {
  if (!j.is_object()) parse_fail(field, "expected a basis term object");
  if (!j.contains("kind") || !j["kind"].is_string()) parse_fail(field + ".kind", "missing kind");
  const std::string kind = j["kind"].get<std::string>();
  const json params = j.value("params", json::array());
  if (!params.is_array()) parse_fail(field + ".params", "expected an array");
  const cplx coeff = j.contains("coeff") ? parse_complex(j["coeff"], field + ".coeff") : cplx{1.0, 0.0};
  auto param = [&](const char* what) {
    if (params.size() != 1) parse_fail(field + ".params", std::string("expected [") + what + "]");
    return get_number(params[0], field + ".params[0]");
  };
  ScalarBasisTerm t;
  if (kind == "const") {
    t = ScalarBasisTerm::constant(coeff);
  } else if (kind == "poly") {
    const double k = param("degree");
    if (k < 0 || k != std::floor(k)) parse_fail(field + ".params[0]", "degree must be a non-negative integer");
    t = ScalarBasisTerm::poly(static_cast<int>(k), coeff);
  } else if (kind == "sin") {
    t = ScalarBasisTerm::sin(param("omega"), coeff);
  } else if (kind == "cos") {
    t = ScalarBasisTerm::cos(param("omega"), coeff);
  } else if (kind == "exp") {
    t = ScalarBasisTerm::exp(param("rate"), coeff);
  } else {
    parse_fail(field + ".kind", "unknown basis kind '" + kind + "'");
  }
  try {
    t.validate();
  } catch (const Error& e) {
    parse_fail(field, e.what());
  }
  return t;
}

inline ScalarFn parse_entry(const json& j, const std::string& field) {
  if (looks_complex(j)) {
    const cplx c = parse_complex(j, field);
    return c == cplx{} ? ScalarFn{} : ScalarFn{ScalarBasisTerm::constant(c)};
  }
  if (j.is_object()) return {parse_term(j, field)};
  if (j.is_array()) {
    ScalarFn f;
    for (std::size_t k = 0; k < j.size(); ++k) f.push_back(parse_term(j[k], field + "[" + std::to_string(k) + "]"));
    return f;
  }
  parse_fail(field, "expected a complex number, a basis term or a list of terms");
}

inline std::vector<ScalarFn> parse_entries(const json& j, std::size_t n, const std::string& field) {
  if (!j.is_array()) parse_fail(field, "expected a list of rows");
  if (j.size() != n) {
    throw Error(ErrorCode::DimMismatch, field + ": has " + std::to_string(j.size()) +
                                            " rows, expected " + std::to_string(n));
  }
  std::vector<ScalarFn> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) parse_fail(row, "expected a row array");
    if (j[i].size() != n) {
      throw Error(ErrorCode::DimMismatch, row + ": has " + std::to_string(j[i].size()) +
                                              " columns, expected " + std::to_string(n));
    }
    for (std::size_t c = 0; c < n; ++c) out.push_back(parse_entry(j[i][c], row + "[" + std::to_string(c) + "]"));
  }
  return out;
}

inline MatrixTimeFn parse_matrix_fn(const json& j, std::size_t n, const std::string& field) {
  // a bare scalar or term list is accepted for 1x1 functions (e.g. mu)
  const bool scalar_form = looks_complex(j) || (j.is_object() && !j.contains("pieces")) ||
                           (j.is_array() && !j.empty() && j[0].is_object());
  if (n == 1 && scalar_form) {
    return MatrixTimeFn::from_entries(1, {parse_entry(j, field)});
  }
  if (j.is_object()) {
    if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty()) {
      parse_fail(field, "expected a non-empty 'pieces' array");
    }
    std::vector<MatrixTimeFn::Piece> pieces;
    for (std::size_t k = 0; k < j["pieces"].size(); ++k) {
      const std::string pf = field + ".pieces[" + std::to_string(k) + "]";
      const json& p = j["pieces"][k];
      if (!p.is_object()) parse_fail(pf, "expected an object");
      double start = 0.0;
      if (k > 0) {
        if (!p.contains("start")) parse_fail(pf + ".start", "missing breakpoint");
        start = get_number(p["start"], pf + ".start");
      }
      if (!p.contains("entries")) parse_fail(pf + ".entries", "missing entries");
      pieces.push_back({start, parse_entries(p["entries"], n, pf + ".entries")});
    }
    try {
      return MatrixTimeFn(n, std::move(pieces));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DimMismatch) throw;
      parse_fail(field, e.what());
    }
  }
  return MatrixTimeFn::from_entries(n, parse_entries(j, n, field));
}

inline CMatrix parse_constant(const json& j, std::size_t n, const std::string& field) {
  if (n == 1 && looks_complex(j)) return CMatrix{{parse_complex(j, field)}};
  if (!j.is_array()) parse_fail(field, "expected a matrix of complex numbers");
  if (j.size() != n) {
    throw Error(ErrorCode::DimMismatch, field + ": has " + std::to_string(j.size()) +
                                            " rows, expected " + std::to_string(n));
  }
  CMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) parse_fail(row, "expected a row array");
    if (j[i].size() != n) {
      throw Error(ErrorCode::DimMismatch, row + ": has " + std::to_string(j[i].size()) +
                                              " columns, expected " + std::to_string(n));
    }
    for (std::size_t c = 0; c < n; ++c) m(i, c) = parse_complex(j[i][c], row + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline json term_to_json(const ScalarBasisTerm& t) {
  json j;
  j["kind"] = to_string(t.kind);
  switch (t.kind) {
    case BasisKind::Const: j["params"] = json::array(); break;
    case BasisKind::Poly: j["params"] = json::array({t.degree}); break;
    default: j["params"] = json::array({t.rate}); break;
  }
  j["coeff"] = complex_to_json(t.coeff);
  return j;
}

inline json matrix_fn_to_json(const MatrixTimeFn& f) {
  json pieces = json::array();
  for (std::size_t k = 0; k < f.pieces().size(); ++k) {
    const auto& p = f.pieces()[k];
    json rows = json::array();
    for (std::size_t i = 0; i < f.n(); ++i) {
      json row = json::array();
      for (std::size_t c = 0; c < f.n(); ++c) {
        json terms = json::array();
        for (const auto& t : p.entries[i * f.n() + c]) terms.push_back(term_to_json(t));
        row.push_back(terms);
      }
      rows.push_back(row);
    }
    json piece;
    if (k > 0) piece["start"] = p.start;
    piece["entries"] = rows;
    pieces.push_back(piece);
  }
  return json{{"pieces", pieces}};
}

inline json constant_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.n(); ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < m.n(); ++c) row.push_back(complex_to_json(m(i, c)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace config_detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using namespace config_detail;
  if (!j.is_object()) parse_fail("<root>", "expected a JSON object");
  RunConfig cfg;
  cfg.name = j.value("name", std::string{});
  if (!j.contains("n")) parse_fail("n", "missing dimension");
  const double nd = get_number(j["n"], "n");
  if (nd < 1 || nd != std::floor(nd) || nd > 64) parse_fail("n", "dimension must be an integer in [1, 64]");
  const auto n = static_cast<std::size_t>(nd);
  RiccatiProblem& p = cfg.problem;
  p.n = n;
  p.t0 = j.contains("t0") ? get_number(j["t0"], "t0") : 0.0;
  if (!j.contains("horizon")) parse_fail("horizon", "missing horizon");
  p.horizon = get_number(j["horizon"], "horizon");
  if (!(p.horizon > p.t0)) parse_fail("horizon", "horizon must exceed t0");
  auto coefficient = [&](const char* key) {
    return j.contains(key) ? parse_matrix_fn(j[key], n, key) : MatrixTimeFn::zero(n);
  };
  p.P = coefficient("P");
  p.Q = coefficient("Q");
  p.R = coefficient("R");
  p.S = coefficient("S");
  cfg.z0 = j.contains("Z0") ? parse_constant(j["Z0"], n, "Z0") : CMatrix(n);

  if (j.contains("certificate")) {
    const json& c = j["certificate"];
    if (!c.is_object()) parse_fail("certificate", "expected an object");
    CertificateSpec spec;
    spec.corollary = c.value("corollary", false);
    if (c.contains("U")) spec.U = parse_matrix_fn(c["U"], n, "certificate.U");
    if (!spec.corollary && !spec.U) parse_fail("certificate.U", "missing U (or set corollary: true)");
    if (spec.corollary && spec.U) parse_fail("certificate.U", "U must be omitted when corollary is set");
    spec.Lambda = c.contains("Lambda") ? parse_matrix_fn(c["Lambda"], n, "certificate.Lambda")
                                       : MatrixTimeFn::zero(n);
    if (c.contains("mu")) {
      spec.mu = parse_matrix_fn(c["mu"], 1, "certificate.mu");
      if (!spec.mu->is_real_valued()) parse_fail("certificate.mu", "mu must be real-valued");
    }
    if (c.contains("grid_density")) spec.grid_density = get_number(c["grid_density"], "certificate.grid_density");
    if (c.contains("tol")) spec.tol = get_number(c["tol"], "certificate.tol");
    if (!(spec.grid_density > 0)) parse_fail("certificate.grid_density", "must be positive");
    if (!(spec.tol > 0)) parse_fail("certificate.tol", "must be positive");
    cfg.certificate = std::move(spec);
  }

  if (j.contains("integrator")) {
    const json& o = j["integrator"];
    if (!o.is_object()) parse_fail("integrator", "expected an object");
    IntegratorOptions& io = cfg.integrator;
    auto opt = [&](const char* key, double& slot, bool positive) {
      if (!o.contains(key)) return;
      slot = get_number(o[key], std::string("integrator.") + key);
      if (positive && !(slot > 0)) parse_fail(std::string("integrator.") + key, "must be positive");
    };
    opt("rtol", io.rtol, true);
    opt("atol", io.atol, true);
    opt("h_init", io.h_init, false);
    opt("h_max", io.h_max, true);
    opt("h_min", io.h_min, true);
    opt("blowup_threshold", io.blowup_threshold, true);
    opt("step_collapse", io.step_collapse, true);
    if (o.contains("max_steps")) {
      const double ms = get_number(o["max_steps"], "integrator.max_steps");
      if (ms < 1) parse_fail("integrator.max_steps", "must be positive");
      io.max_steps = static_cast<std::size_t>(ms);
    }
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) parse_fail("output", "expected an object");
    if (o.contains("dt")) cfg.output_dt = get_number(o["dt"], "output.dt");
    if (cfg.output_dt < 0) parse_fail("output.dt", "must be non-negative");
  }

  if (j.contains("scan")) {
    const json& s = j["scan"];
    if (!s.is_object()) parse_fail("scan", "expected an object");
    ScanSpec spec;
    spec.base = s.contains("base") ? parse_constant(s["base"], n, "scan.base") : CMatrix(n);
    spec.direction = s.contains("direction") ? parse_constant(s["direction"], n, "scan.direction")
                                             : CMatrix::identity(n);
    if (!s.contains("values") || !s["values"].is_array()) parse_fail("scan.values", "expected a list of numbers");
    for (std::size_t k = 0; k < s["values"].size(); ++k)
      spec.values.push_back(get_number(s["values"][k], "scan.values[" + std::to_string(k) + "]"));
    cfg.scan = std::move(spec);
  }
  return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return parse_config(j);
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

/// Canonical serialization; parse_config(to_json(c)) reproduces c.
inline nlohmann::json to_json(const RunConfig& cfg) {
  using namespace config_detail;
  json j;
  if (!cfg.name.empty()) j["name"] = cfg.name;
  const RiccatiProblem& p = cfg.problem;
  j["n"] = p.n;
  j["t0"] = p.t0;
  j["horizon"] = p.horizon;
  j["P"] = matrix_fn_to_json(p.P);
  j["Q"] = matrix_fn_to_json(p.Q);
  j["R"] = matrix_fn_to_json(p.R);
  j["S"] = matrix_fn_to_json(p.S);
  j["Z0"] = constant_to_json(cfg.z0);
  if (cfg.certificate) {
    const CertificateSpec& c = *cfg.certificate;
    json cj;
    cj["corollary"] = c.corollary;
    if (c.U) cj["U"] = matrix_fn_to_json(*c.U);
    cj["Lambda"] = matrix_fn_to_json(c.Lambda);
    if (c.mu) cj["mu"] = matrix_fn_to_json(*c.mu);
    cj["grid_density"] = c.grid_density;
    cj["tol"] = c.tol;
    j["certificate"] = cj;
  }
  const IntegratorOptions& o = cfg.integrator;
  json oj{{"rtol", o.rtol},        {"atol", o.atol},
          {"h_init", o.h_init},    {"h_min", o.h_min},
          {"blowup_threshold", o.blowup_threshold},
          {"step_collapse", o.step_collapse},
          {"max_steps", o.max_steps}};
  if (std::isfinite(o.h_max)) oj["h_max"] = o.h_max;
  j["integrator"] = oj;
  j["output"] = json{{"dt", cfg.output_dt}};
  if (cfg.scan) {
    json values = json::array();
    for (double v : cfg.scan->values) values.push_back(v);
    j["scan"] = json{{"base", constant_to_json(cfg.scan->base)},
                     {"direction", constant_to_json(cfg.scan->direction)},
                     {"values", values}};
  }
  return j;
}

/// Resolves the certificate of a config (U = P* for corollary specs).
inline Certificate build_certificate(const RunConfig& cfg) {
  if (!cfg.certificate) throw Error(ErrorCode::InvalidArgument, "config has no certificate");
  const CertificateSpec& c = *cfg.certificate;
  if (c.corollary) {
    return corollary_certificate(cfg.problem, c.Lambda, c.mu, c.grid_density, c.tol);
  }
  return Certificate{*c.U, c.Lambda, c.mu, c.grid_density, c.tol};
}

}  // namespace riccati

#endif  // RICCATI_CONFIG_HPP

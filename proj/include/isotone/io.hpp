#pragma once

// Problem files, analysis reports and their serialized forms.
//
// Documents are JSON; every real is written with 17 significant digits so
// that a parse recovers the exact double. CSV output uses ',' and '.'.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isotone/circuit.hpp"
#include "isotone/errors.hpp"
#include "isotone/iteration.hpp"
#include "isotone/steady_state.hpp"

namespace isotone::io {

using json = nlohmann::json;

/// Malformed or inconsistent input; the message names the offending field.
class InputError : public std::invalid_argument {
public:
  InputError(const std::string& field, const std::string& what)
      : std::invalid_argument("invalid field '" + field + "': " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// ---------------------------------------------------------------------------
// Formatting

inline std::string format_real(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_json(std::ostream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_json(os, it.value(), indent, depth + 1);
      }
      os << nl << close << '}';
      return;
    }
    case json::value_t::array: {
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[' << (flat ? "" : nl);
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << ',' << (flat ? (indent > 0 ? " " : "") : nl);
        first = false;
        if (!flat) os << pad;
        write_json(os, e, indent, depth + 1);
      }
      os << (flat ? "" : nl) << (flat ? "" : close) << ']';
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x))
        os << format_real(x);
      else
        os << "null";
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Serializes with every real at 17 significant digits.
inline void write_json(std::ostream& os, const json& j, int indent = 2) {
  detail::write_json(os, j, indent, 0);
  if (indent > 0) os << '\n';
}

inline std::string to_text(const json& j, int indent = 2) {
  std::ostringstream os;
  write_json(os, j, indent);
  return os.str();
}

inline json to_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

// ---------------------------------------------------------------------------
// Problem files

struct ProblemFile {
  Problem problem;
  std::optional<double> tol;
  std::optional<std::size_t> budget;
};

namespace detail {

inline std::vector<double> reals(const json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw InputError(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  if (out.empty()) throw InputError(field, "must not be empty");
  return out;
}

inline std::vector<std::vector<double>> rows(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError(field, "expected a non-empty array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(reals(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

inline double real(const json& obj, const std::string& key, const std::string& field) {
  if (!obj.contains(key)) throw InputError(field, "missing");
  if (!obj[key].is_number()) throw InputError(field, "expected a number");
  return obj[key].get<double>();
}

template <class F>
auto guarded(const std::string& field, F&& build) {
  try {
    return build();
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InputError(field, e.what());
  }
}

}  // namespace detail

/// Parses one of
///   {"k": [...], "M": [[...]]}
///   {"circuit": {"E": e, "r": [r1, r2], "P": [P1, P2]}}
///   {"general": {"Mbar": [[...]], "P": [...], "k": [...]}}
/// with optional top-level "tol" and "budget".
inline ProblemFile parse_problem(const json& doc) {
  if (!doc.is_object()) throw InputError("<root>", "expected an object");
  const bool direct = doc.contains("k") || doc.contains("M");
  const int forms = int(direct) + int(doc.contains("circuit")) + int(doc.contains("general"));
  if (forms != 1)
    throw InputError("<root>", "exactly one of {k, M}, circuit, general must be present");

  auto problem = [&]() -> Problem {
    if (direct) {
      if (!doc.contains("k")) throw InputError("k", "missing");
      if (!doc.contains("M")) throw InputError("M", "missing");
      const auto k = detail::reals(doc["k"], "k");
      const auto m = detail::rows(doc["M"], "M");
      Vector kv = detail::guarded("k", [&] { return Vector(k); });
      NonnegMatrix mm = detail::guarded("M", [&] { return NonnegMatrix(m); });
      return detail::guarded("M", [&] { return Problem(std::move(kv), std::move(mm)); });
    }
    if (doc.contains("circuit")) {
      const auto& c = doc["circuit"];
      if (!c.is_object()) throw InputError("circuit", "expected an object");
      CircuitSpec spec;
      spec.e = detail::real(c, "E", "circuit.E");
      if (!c.contains("r")) throw InputError("circuit.r", "missing");
      if (!c.contains("P")) throw InputError("circuit.P", "missing");
      spec.resistances = detail::reals(c["r"], "circuit.r");
      spec.powers = detail::reals(c["P"], "circuit.P");
      if (spec.resistances.size() != 2) throw InputError("circuit.r", "expected [r1, r2]");
      if (spec.powers.size() != 2) throw InputError("circuit.P", "expected [P1, P2]");
      try {
        return spec.to_problem();
      } catch (const std::invalid_argument& e) {
        // Name the parameter reported by the builder.
        const std::string msg = e.what();
        std::string field = "circuit";
        if (msg.rfind("E ", 0) == 0) field = "circuit.E";
        else if (msg.rfind("r", 0) == 0) field = "circuit.r";
        else if (msg.rfind("P", 0) == 0) field = "circuit.P";
        throw InputError(field, msg);
      }
    }
    const auto& g = doc["general"];
    if (!g.is_object()) throw InputError("general", "expected an object");
    for (const char* key : {"Mbar", "P", "k"})
      if (!g.contains(key)) throw InputError(std::string("general.") + key, "missing");
    const auto mbar = detail::rows(g["Mbar"], "general.Mbar");
    Vector pw = detail::guarded("general.P", [&] { return Vector(detail::reals(g["P"], "general.P")); });
    Vector k = detail::guarded("general.k", [&] { return Vector(detail::reals(g["k"], "general.k")); });
    return detail::guarded("general.Mbar", [&] { return build_general(mbar, pw, k); });
  }();

  ProblemFile file{std::move(problem), std::nullopt, std::nullopt};
  if (doc.contains("tol")) {
    if (!doc["tol"].is_number() || !(doc["tol"].get<double>() > 0.0)) throw InputError("tol", "expected a number > 0");
    file.tol = doc["tol"].get<double>();
  }
  if (doc.contains("budget")) {
    if (!doc["budget"].is_number_integer() || doc["budget"].get<long long>() < 1)
      throw InputError("budget", "expected an integer >= 1");
    file.budget = static_cast<std::size_t>(doc["budget"].get<long long>());
  }
  return file;
}

inline ProblemFile parse_problem_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("<document>", e.what());
  }
  return parse_problem(doc);
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str());
}

/// Command-line values override file values, which override defaults.
inline IterationOptions resolve_options(const ProblemFile& f, std::optional<double> tol_flag,
                                        std::optional<std::size_t> budget_flag) {
  IterationOptions o;
  if (f.tol) o.tol = *f.tol;
  if (f.budget) o.budget = *f.budget;
  if (tol_flag) o.tol = *tol_flag;
  if (budget_flag) o.budget = *budget_flag;
  return o;
}

// ---------------------------------------------------------------------------
// Enumeration fragment

struct EnumeratedPoint {
  Vector y;
  double residual = 0.0;
  bool dominant = false;

  friend bool operator==(const EnumeratedPoint&, const EnumeratedPoint&) = default;
};

struct Enumeration {
  std::vector<EnumeratedPoint> points;
  /// comparability[i][j]: "=", "<" (strict in every component), "<=" (lneq),
  /// ">", ">=", or "||" (incomparable).
  std::vector<std::vector<std::string>> comparability;

  friend bool operator==(const Enumeration&, const Enumeration&) = default;
};

inline std::string relation(const Vector& a, const Vector& b) {
  if (a == b) return "=";
  if (lt_strict(a, b)) return "<";
  if (lt_strict(b, a)) return ">";
  if (leq(a, b)) return "<=";
  if (leq(b, a)) return ">=";
  return "||";
}

inline Enumeration enumerate(const Problem& p, std::size_t grid, double tol) {
  const auto roots = enumerate_small(p, grid, tol);
  Enumeration e;
  for (const auto& r : roots) {
    const bool dom = dominates_all(r, roots);
    e.points.push_back({r.vector(), residual(p, r), dom});
  }
  for (const auto& a : e.points) {
    std::vector<std::string> row;
    for (const auto& b : e.points) row.push_back(relation(a.y, b.y));
    e.comparability.push_back(std::move(row));
  }
  return e;
}

inline json to_json(const Enumeration& e) {
  json pts = json::array();
  for (const auto& p : e.points) pts.push_back({{"y", to_json(p.y)}, {"residual", p.residual}, {"dominant", p.dominant}});
  return {{"count", e.points.size()}, {"points", pts}, {"comparability", e.comparability}};
}

inline Enumeration enumeration_from_json(const json& j) {
  Enumeration e;
  for (const auto& p : j.at("points"))
    e.points.push_back({Vector(p.at("y").get<std::vector<double>>()), p.at("residual").get<double>(),
                        p.at("dominant").get<bool>()});
  e.comparability = j.at("comparability").get<std::vector<std::vector<std::string>>>();
  return e;
}

// ---------------------------------------------------------------------------
// Analysis report

struct Report {
  std::size_t dimension = 0;
  double tol = kDefaultTolerance;
  std::size_t budget = kDefaultBudget;
  Vector delta{0.0};
  bool necessary_ok = false;
  std::optional<Vector> y_min, y_max;
  Outcome outcome = Outcome::Indeterminate;
  std::ptrdiff_t witness_step = -1;
  std::optional<Vector> witness;
  std::size_t iterations = 0;
  std::optional<Vector> dominant;
  std::optional<double> dominant_residual;
  std::optional<double> rho;
  std::optional<Stability> stability;
  std::optional<Enumeration> enumeration;
  double elapsed_ms = 0.0;  // timing; ignored by equals_ignoring_timing

  bool equals_ignoring_timing(const Report& o) const {
    return dimension == o.dimension && tol == o.tol && budget == o.budget && delta == o.delta &&
           necessary_ok == o.necessary_ok && y_min == o.y_min && y_max == o.y_max && outcome == o.outcome &&
           witness_step == o.witness_step && witness == o.witness && iterations == o.iterations &&
           dominant == o.dominant && dominant_residual == o.dominant_residual && rho == o.rho &&
           stability == o.stability && enumeration == o.enumeration;
  }
};

struct AnalyzeOptions {
  IterationOptions iteration;
  std::size_t enumerate_grid = kEnumerateGrid;
  bool enumerate = true;  // only applies for n <= 3
};

/// Bounds, existence verdict, dominant point and certificate, and for n <= 3
/// the enumerated fixed points.
inline Report analyze(const Problem& p, const AnalyzeOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  r.dimension = p.size();
  r.tol = opts.iteration.tol;
  r.budget = opts.iteration.budget;
  auto verdict = decide_existence(p, opts.iteration);
  r.delta = verdict.bounds.delta;
  r.necessary_ok = verdict.bounds.necessary_ok;
  r.y_min = verdict.bounds.y_min;
  r.y_max = verdict.bounds.y_max;
  r.outcome = verdict.outcome;
  r.witness_step = verdict.witness_step;
  r.witness = verdict.witness;
  if (verdict.trace) r.iterations = verdict.trace->iterations;
  if (verdict.outcome == Outcome::Exists) {
    const auto& y = *verdict.dominant;
    r.dominant = y.vector();
    r.dominant_residual = residual(p, y);
    const auto cert = certify(p, y);
    r.rho = cert.rho;
    r.stability = cert.classification;
  }
  if (opts.enumerate && p.size() <= kEnumerateMaxDim) r.enumeration = enumerate(p, opts.enumerate_grid, opts.iteration.tol);
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace detail {

template <class T>
json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, Vector>)
    return to_json(*v);
  else
    return *v;
}

inline std::optional<Vector> opt_vector(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Vector(j.get<std::vector<double>>());
}

inline Outcome parse_outcome(const std::string& s) {
  for (auto o : {Outcome::Exists, Outcome::NotExists, Outcome::Indeterminate})
    if (to_string(o) == s) return o;
  throw InputError("verdict.outcome", "unknown outcome " + s);
}

inline Stability parse_stability(const std::string& s) {
  for (auto c : {Stability::AsymptoticallyStable, Stability::Marginal, Stability::Violation})
    if (to_string(c) == s) return c;
  throw InputError("certificate.classification", "unknown classification " + s);
}

}  // namespace detail

inline json to_json(const Report& r) {
  json j;
  j["dimension"] = r.dimension;
  j["settings"] = {{"tol", r.tol}, {"budget", r.budget}};
  j["bounds"] = {{"delta", to_json(r.delta)},
                 {"necessary_ok", r.necessary_ok},
                 {"y_min", detail::opt(r.y_min)},
                 {"y_max", detail::opt(r.y_max)}};
  j["verdict"] = {{"outcome", std::string(to_string(r.outcome))},
                  {"witness_step", r.witness_step},
                  {"witness", detail::opt(r.witness)},
                  {"iterations", r.iterations}};
  j["dominant"] = detail::opt(r.dominant);
  j["dominant_residual"] = detail::opt(r.dominant_residual);
  if (r.rho)
    j["certificate"] = {{"rho", *r.rho}, {"classification", std::string(to_string(*r.stability))}};
  else
    j["certificate"] = nullptr;
  j["enumeration"] = r.enumeration ? to_json(*r.enumeration) : json(nullptr);
  j["timing"] = {{"elapsed_ms", r.elapsed_ms}};
  return j;
}

inline Report report_from_json(const json& j) {
  Report r;
  r.dimension = j.at("dimension").get<std::size_t>();
  r.tol = j.at("settings").at("tol").get<double>();
  r.budget = j.at("settings").at("budget").get<std::size_t>();
  const auto& b = j.at("bounds");
  r.delta = Vector(b.at("delta").get<std::vector<double>>());
  r.necessary_ok = b.at("necessary_ok").get<bool>();
  r.y_min = detail::opt_vector(b.at("y_min"));
  r.y_max = detail::opt_vector(b.at("y_max"));
  const auto& v = j.at("verdict");
  r.outcome = detail::parse_outcome(v.at("outcome").get<std::string>());
  r.witness_step = v.at("witness_step").get<std::ptrdiff_t>();
  r.witness = detail::opt_vector(v.at("witness"));
  r.iterations = v.at("iterations").get<std::size_t>();
  r.dominant = detail::opt_vector(j.at("dominant"));
  if (!j.at("dominant_residual").is_null()) r.dominant_residual = j.at("dominant_residual").get<double>();
  if (!j.at("certificate").is_null()) {
    r.rho = j["certificate"].at("rho").get<double>();
    r.stability = detail::parse_stability(j["certificate"].at("classification").get<std::string>());
  }
  if (!j.at("enumeration").is_null()) r.enumeration = enumeration_from_json(j["enumeration"]);
  r.elapsed_ms = j.at("timing").at("elapsed_ms").get<double>();
  return r;
}

// ---------------------------------------------------------------------------
// CSV

/// step, y_1..y_n, step_size, in_domain; then a '#' status line.
inline void write_trace_csv(std::ostream& os, const IterationTrace& t) {
  const std::size_t n = t.start.size();
  os << "step";
  for (std::size_t i = 0; i < n; ++i) os << ",y" << (i + 1);
  os << ",step_size,in_domain\n";
  for (std::size_t s = 0; s < t.iterates.size(); ++s) {
    const auto& y = t.iterates[s];
    os << t.steps[s];
    for (double x : y) os << ',' << format_real(x);
    os << ',' << format_real(t.step_sizes[s]) << ',' << (PositiveVector::admits(y) ? 1 : 0) << '\n';
  }
  os << "# status=" << to_string(t.status) << " iterations=" << t.iterations
     << " monotonicity=" << to_string(t.monotonicity);
  if (t.status == TraceStatus::DomainExit) os << " exit_step=" << t.exit_step;
  os << '\n';
}

/// y1, y2, classification, iterations; one row per grid sample in index order.
inline void write_basin_csv(std::ostream& os, const std::vector<BasinSample>& samples) {
  os << "y1,y2,classification,iterations\n";
  for (const auto& s : samples)
    os << format_real(s.start[0]) << ',' << format_real(s.start[1]) << ',' << to_string(s.result.classification)
       << ',' << s.result.iterations << '\n';
}

/// Parses "a,b,c" into reals; `field` names the flag in diagnostics.
inline std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos)
        throw InputError(field, "malformed number '" + item + "'");
    } catch (const std::logic_error&) {
      throw InputError(field, "malformed number '" + item + "'");
    }
  }
  if (out.empty()) throw InputError(field, "expected a comma-separated list of numbers");
  return out;
}

}  // namespace isotone::io

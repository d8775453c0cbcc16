// Copyright 2026 The mixdiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Batch front end shared by the `mixdiv` executable and its tests.
//
//   mixdiv compute|verify|geometry|falsify --spec FILE [--out FILE]
//          [--format json|csv] [--seed N] [--trials N] [--emit-integrand]
//
// Exit status: 0 all checks pass, 1 some verdict unsatisfied, 2 bad input.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixdiv/convex_geometry.hpp"
#include "mixdiv/divergence_engine.hpp"
#include "mixdiv/error.hpp"
#include "mixdiv/falsify.hpp"
#include "mixdiv/inequality_lab.hpp"
#include "mixdiv/io.hpp"
#include "mixdiv/measure_space.hpp"

namespace mixdiv::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

struct Options {
  std::string command;
  std::string spec_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  bool emit_integrand = false;
};

// ---------------------------------------------------------------------------
// helpers

/// Runs `fn`, prefixing any error with `field`.
template <class Fn>
auto scoped(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw e.with_field(field);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what()).with_field(field);
  }
}

inline std::string indexed(const std::string& name, std::size_t i) {
  return name + "[" + std::to_string(i) + "]";
}

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline bool flag_or(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) throw Error(ErrorKind::InvalidSpec, std::string("'") + key + "' must be a boolean").with_field(key);
  return v.get<bool>();
}

inline int integer(const json& j, const char* key) {
  const double x = io::detail::number(j, key);
  if (x != std::floor(x) || std::abs(x) > 1e9) {
    throw Error(ErrorKind::InvalidSpec, std::string("'") + key + "' must be an integer").with_field(key);
  }
  return static_cast<int>(x);
}

inline int integer_or(const json& j, const char* key, int fallback) {
  return j.contains(key) ? integer(j, key) : fallback;
}

inline const json& array_member(const json& j, const char* key) {
  const json& v = io::detail::member(j, key);
  if (!v.is_array()) throw Error(ErrorKind::InvalidSpec, std::string("'") + key + "' must be an array").with_field(key);
  return v;
}

// ---------------------------------------------------------------------------
// tolerances

/// Parses "ineq=1e-9,eq=1e-7,norm=1e-12"; unknown keys and non-positive
/// values are input errors.
inline void apply_tolerance_text(Tolerances& tol, const std::string& text) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    const std::string key = item.substr(0, eq);
    if (eq == std::string::npos) fail(ErrorKind::InvalidSpec, "expected key=value, got '" + item + "'");
    const std::string val = item.substr(eq + 1);
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(val.c_str(), &end);
    if (end == val.c_str() || *end != '\0' || errno != 0 || !(x > 0.0) || !std::isfinite(x)) {
      fail(ErrorKind::InvalidSpec, "tolerance '" + key + "' must be a positive number");
    }
    if (key == "ineq") {
      tol.ineq = x;
    } else if (key == "eq") {
      tol.eq = x;
    } else if (key == "norm") {
      tol.norm = x;
    } else {
      fail(ErrorKind::InvalidSpec, "unknown tolerance '" + key + "'");
    }
  }
}

/// Defaults, then the environment override, then the spec file.
inline Tolerances resolve_tolerances(const json& spec, const char* env) {
  Tolerances tol;
  if (env != nullptr) scoped("MIXDIV_TOL_OVERRIDE", [&] { apply_tolerance_text(tol, env); });
  if (spec.contains("tolerances")) {
    scoped("tolerances", [&] {
      const json& t = spec.at("tolerances");
      if (!t.is_object()) fail(ErrorKind::InvalidSpec, "must be an object");
      for (const auto& [key, value] : t.items()) {
        if (key != "ineq" && key != "eq" && key != "norm") {
          throw Error(ErrorKind::InvalidSpec, "unknown tolerance '" + key + "'").with_field(key);
        }
        const double x = io::detail::number(t, key.c_str());
        if (!(x > 0.0) || !std::isfinite(x)) {
          throw Error(ErrorKind::InvalidSpec, "tolerances must be positive").with_field(key);
        }
        (key == "ineq" ? tol.ineq : key == "eq" ? tol.eq : tol.norm) = x;
      }
    });
  }
  return tol;
}

inline json tolerances_json(const Tolerances& t) {
  return {{"ineq", t.ineq}, {"eq", t.eq}, {"norm", t.norm}};
}

// ---------------------------------------------------------------------------
// measure and densities

/// The space plus the named densities of a compute/verify spec.
///
/// Densities must be strictly positive unless "allow_zero_atoms" is set,
/// and must have unit mass within tolerances.norm; they are then rescaled
/// to unit mass exactly. With "normalize": true any positive mass is
/// accepted and rescaled.
class DensityTable {
 public:
  DensityTable(const json& spec, const Tolerances& tol)
      : space_(scoped("weights", [&] {
          const json& w = array_member(spec, "weights");
          return MeasureSpace::make(w.get<std::vector<double>>());
        })),
        tol_(tol) {
    normalize_ = scoped("normalize", [&] { return flag_or(spec, "normalize", false); });
    const bool zeros = scoped("allow_zero_atoms", [&] { return flag_or(spec, "allow_zero_atoms", false); });
    flags_ = DensityFlags{.strictly_positive = !zeros, .probability = !normalize_};
    if (spec.contains("densities")) {
      scoped("densities", [&] {
        const json& d = spec.at("densities");
        if (!d.is_object()) fail(ErrorKind::InvalidSpec, "must be an object of name -> values");
        for (const auto& [name, values] : d.items()) {
          named_.emplace(name, scoped(name, [&] { return prepare(values); }));
        }
      });
    }
  }

  const MeasureSpace& space() const noexcept { return space_; }

  /// A density reference: a name from "densities" or an inline array.
  Density resolve(const json& ref) const {
    if (ref.is_string()) {
      const auto it = named_.find(ref.get<std::string>());
      if (it == named_.end()) fail(ErrorKind::InvalidSpec, "unknown density '" + ref.get<std::string>() + "'");
      return it->second;
    }
    return prepare(ref);
  }

  Density resolve(const json& task, const char* key) const {
    return scoped(key, [&] { return resolve(io::detail::member(task, key)); });
  }

  Density resolve_or_unit(const json& task, const char* key) const {
    return task.contains(key) ? resolve(task, key) : Density::unit(space_.size());
  }

  DensityBundle bundle(const json& task, const char* key) const {
    return scoped(key, [&] {
      const json& arr = array_member(task, key);
      std::vector<Density> out;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        out.push_back(scoped(indexed("", i), [&] { return resolve(arr[i]); }));
      }
      if (out.empty()) fail(ErrorKind::InvalidSpec, "needs at least one density");
      return DensityBundle(space_, std::move(out));
    });
  }

 private:
  Density prepare(const json& values) const {
    if (!values.is_array()) fail(ErrorKind::InvalidSpec, "density must be an array of numbers");
    Density d(values.get<std::vector<double>>());
    require_density(d, space_, flags_, tol_.norm);
    // Within tolerance already; make the mass exact for the engine's own check.
    if (normalize_ || std::abs(mass(d, space_) - 1.0) > kTolNorm) return normalize(d, space_);
    return d;
  }

  MeasureSpace space_;
  Tolerances tol_;
  bool normalize_ = false;
  DensityFlags flags_{};
  std::map<std::string, Density> named_;
};

inline FVector generators(const json& task, const char* key) {
  return scoped(key, [&] {
    const json& arr = array_member(task, key);
    FVector fv;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      fv.push_back(scoped(indexed("", i), [&] { return io::f_from_json(arr[i]); }));
    }
    if (fv.empty()) fail(ErrorKind::InvalidSpec, "needs at least one generator");
    return fv;
  });
}

inline FFunction generator(const json& task, const char* key) {
  return scoped(key, [&] { return io::f_from_json(io::detail::member(task, key)); });
}

inline const json& tasks_of(const json& spec) {
  return scoped("tasks", [&]() -> const json& {
    const json& t = array_member(spec, "tasks");
    return t;
  });
}

// ---------------------------------------------------------------------------
// reports

/// Accumulates the JSON report, CSV rows and optional per-node series.
class Report {
 public:
  Report(std::string command, std::vector<std::string> csv_header)
      : command_(std::move(command)), header_(std::move(csv_header)) {}

  void add(json result) { results_.push_back(std::move(result)); }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void series(std::size_t task, const std::string& name, std::span<const double> values) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      series_.push_back({std::to_string(task), name, std::to_string(j), csv_number(values[j])});
    }
  }
  void violation() { violated_ = true; }
  bool violated() const noexcept { return violated_; }

  json to_json(const Tolerances& tol) const {
    return {{"command", command_},
            {"status", violated_ ? "violation" : "ok"},
            {"tolerances", tolerances_json(tol)},
            {"results", results_}};
  }

  std::string csv() const { return table(header_, rows_); }
  std::string series_csv() const { return table({"task", "series", "index", "value"}, series_); }
  bool has_series() const noexcept { return !series_.empty(); }

 private:
  static std::string table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cells[i]);
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }

  std::string command_;
  std::vector<std::string> header_;
  std::vector<json> results_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::vector<std::string>> series_;
  bool violated_ = false;
};

inline std::string label_of(const json& task) {
  return task.contains("id") && task.at("id").is_string() ? task.at("id").get<std::string>() : "";
}

inline json task_header(std::size_t idx, const json& task) {
  json out = {{"task", idx}};
  if (task.contains("id")) out["id"] = task.at("id");
  return out;
}

inline void add_verdict_row(Report& rep, std::size_t idx, const json& task, const std::string& kind,
                            const InequalityVerdict& v) {
  rep.row({std::to_string(idx), label_of(task), kind, v.name, std::string(to_string(v.relation)),
           csv_number(v.lhs), csv_number(v.rhs), csv_number(v.slack), v.satisfied ? "1" : "0",
           v.equality ? "1" : "0",
           v.diagnosis ? (v.diagnosis->holds ? "1" : "0") : ""});
  if (!v.satisfied) rep.violation();
}

// ---------------------------------------------------------------------------
// compute

inline NamedFamily named_family(const std::string& s) {
  if (s == "mixed_tv") return NamedFamily::mixed_tv;
  if (s == "mixed_kl") return NamedFamily::mixed_kl;
  if (s == "mixed_hellinger") return NamedFamily::mixed_hellinger;
  if (s == "mixed_renyi") return NamedFamily::mixed_renyi;
  if (s == "bhattacharyya") return NamedFamily::bhattacharyya;
  throw Error(ErrorKind::InvalidSpec, "unknown family '" + s + "'").with_field("family");
}

inline DivergenceReport compute_task(const json& task, const DensityTable& dt) {
  const std::string op = io::detail::text(task, "op");
  const MeasureSpace& s = dt.space();
  if (op == "classical") {
    return classical_f_divergence(generator(task, "f"), dt.resolve(task, "p"), dt.resolve(task, "q"), s);
  }
  if (op == "mixed") return mixed_f_divergence(generators(task, "f"), dt.bundle(task, "P"), dt.bundle(task, "Q"));
  if (op == "k_form") {
    const int k = scoped("k", [&] { return integer(task, "k"); });
    if (k < 0) throw Error(ErrorKind::IndexOutOfRange, "k must be nonnegative").with_field("k");
    return mixed_k_form(generators(task, "f"), dt.bundle(task, "P"), dt.bundle(task, "Q"),
                        static_cast<std::size_t>(k));
  }
  if (op == "ith_mixed") {
    return ith_mixed(generator(task, "f1"), generator(task, "f2"), dt.resolve(task, "P1"),
                     dt.resolve(task, "Q1"), dt.resolve(task, "P2"), dt.resolve(task, "Q2"),
                     io::detail::number(task, "i"), integer(task, "n"), s);
  }
  if (op == "ith_mixed_reference") {
    return ith_mixed_reference(generator(task, "f1"), dt.resolve(task, "P1"), dt.resolve(task, "Q1"),
                               io::detail::number(task, "i"), generator(task, "f2"),
                               integer(task, "n"), s);
  }
  if (op == "named") {
    NamedParams params;
    const NamedFamily fam = named_family(io::detail::text(task, "family"));
    if (task.contains("alphas")) {
      params.alphas = scoped("alphas", [&] { return task.at("alphas").get<std::vector<double>>(); });
    }
    params.alpha = io::detail::number_or(task, "alpha", 0.5);
    if (task.contains("kl")) {
      const std::string kl = io::detail::text(task, "kl");
      if (kl == "reversed") {
        params.kl = KlOrientation::reversed;
      } else if (kl != "f_generated") {
        throw Error(ErrorKind::InvalidSpec, "kl must be f_generated or reversed").with_field("kl");
      }
    }
    return named_divergence(fam, params, dt.bundle(task, "P"), dt.bundle(task, "Q"));
  }
  throw Error(ErrorKind::InvalidSpec, "unknown op '" + op + "'").with_field("op");
}

inline Report run_compute(const json& spec, const Tolerances& tol, const Options& opt) {
  const DensityTable dt(spec, tol);
  Report rep("compute", {"task", "id", "op", "value", "convention_hits"});
  const json& tasks = tasks_of(spec);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const json& task = tasks[t];
    scoped(indexed("tasks", t), [&] {
      const DivergenceReport r = compute_task(task, dt);
      json out = task_header(t, task);
      out["op"] = task.at("op");
      out.update(io::report_to_json(r, opt.emit_integrand));
      rep.add(std::move(out));
      rep.row({std::to_string(t), label_of(task), task.at("op").get<std::string>(), csv_number(r.value),
               std::to_string(r.convention_hits)});
      if (opt.emit_integrand) rep.series(t, "integrand", r.integrand);
    });
  }
  return rep;
}

// ---------------------------------------------------------------------------
// verify

inline CorollaryCase corollary_case(const std::string& s) {
  for (CorollaryCase c : {CorollaryCase::concave_band, CorollaryCase::convex_concave_high,
                          CorollaryCase::concave_convex_low, CorollaryCase::reference_concave,
                          CorollaryCase::reference_convex_high, CorollaryCase::reference_concave_low}) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorKind::InvalidSpec, "unknown corollary case '" + s + "'").with_field("case");
}

inline TwoPairInstance two_pair(const json& task, const DensityTable& dt, bool reference) {
  return TwoPairInstance{generator(task, "f1"),
                         generator(task, "f2"),
                         dt.resolve(task, "P1"),
                         dt.resolve(task, "Q1"),
                         reference ? dt.resolve_or_unit(task, "P2") : dt.resolve(task, "P2"),
                         reference ? dt.resolve_or_unit(task, "Q2") : dt.resolve(task, "Q2"),
                         dt.space(),
                         integer(task, "n")};
}

inline std::vector<InequalityVerdict> verify_task(const json& task, const DensityTable& dt,
                                                  const Tolerances& tol) {
  const std::string check = io::detail::text(task, "check");
  if (check == "af") {
    const int m = integer(task, "m");
    if (m < 1) throw Error(ErrorKind::RangeMismatch, "m must be >= 1").with_field("m");
    return {af_check(generators(task, "f"), dt.bundle(task, "P"), dt.bundle(task, "Q"),
                     static_cast<std::size_t>(m), tol)};
  }
  if (check == "jensen") {
    return {jensen_bound_check(generator(task, "f"), dt.resolve(task, "p"), dt.resolve(task, "q"),
                               dt.space(), tol)};
  }
  if (check == "concave_chain") {
    const ChainVerdicts c = concave_chain_check(generators(task, "f"), dt.bundle(task, "P"), dt.bundle(task, "Q"), tol);
    return {c.mixed_vs_product, c.product_vs_one};
  }
  if (check == "interpolation") {
    return {interpolation_check(two_pair(task, dt, false), io::detail::number(task, "i"),
                                io::detail::number(task, "j"), io::detail::number(task, "k"), tol)};
  }
  if (check == "corollary") {
    const CorollaryCase c = corollary_case(io::detail::text(task, "case"));
    const bool reference = c == CorollaryCase::reference_concave ||
                           c == CorollaryCase::reference_convex_high ||
                           c == CorollaryCase::reference_concave_low;
    return {corollary_bound_check(c, two_pair(task, dt, reference), io::detail::number(task, "i"), tol)};
  }
  throw Error(ErrorKind::InvalidSpec, "unknown check '" + check + "'").with_field("check");
}

inline Report run_verify(const json& spec, const Tolerances& tol) {
  const DensityTable dt(spec, tol);
  Report rep("verify", {"task", "id", "check", "name", "relation", "lhs", "rhs", "slack", "satisfied",
                        "equality", "diagnosis_holds"});
  const json& tasks = tasks_of(spec);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const json& task = tasks[t];
    scoped(indexed("tasks", t), [&] {
      const auto verdicts = verify_task(task, dt, tol);
      json out = task_header(t, task);
      out["check"] = task.at("check");
      json arr = json::array();
      for (const auto& v : verdicts) {
        arr.push_back(io::verdict_to_json(v));
        add_verdict_row(rep, t, task, task.at("check").get<std::string>(), v);
      }
      out["verdicts"] = std::move(arr);
      rep.add(std::move(out));
    });
  }
  return rep;
}

// ---------------------------------------------------------------------------
// geometry

inline geometry::Orientation orientation_of(const json& task) {
  if (!task.contains("orientation")) return geometry::Orientation::PQ;
  const std::string o = io::detail::text(task, "orientation");
  if (o == "PQ") return geometry::Orientation::PQ;
  if (o == "QP") return geometry::Orientation::QP;
  throw Error(ErrorKind::InvalidSpec, "orientation must be PQ or QP").with_field("orientation");
}

inline Report run_geometry(const json& spec, const Tolerances& tol, const Options& opt) {
  const int nodes = scoped("nodes", [&] { return integer_or(spec, "nodes", 256); });
  if (nodes < 0) throw Error(ErrorKind::InvalidParameter, "nodes must be positive").with_field("nodes");
  const geometry::CircleGrid grid = scoped("nodes", [&] { return geometry::CircleGrid(static_cast<std::size_t>(nodes)); });

  std::map<std::string, geometry::ConvexBody2D> bodies;
  scoped("bodies", [&] {
    const json& b = io::detail::member(spec, "bodies");
    if (!b.is_object() || b.empty()) fail(ErrorKind::InvalidSpec, "must be a non-empty object of name -> body");
    for (const auto& [name, body] : b.items()) {
      bodies.emplace(name, scoped(name, [&] {
        geometry::ConvexBody2D K = io::body_from_json(body);
        geometry::body_eval(K, grid);  // admissibility on this grid
        return K;
      }));
    }
  });
  auto lookup = [&](const json& name) -> const geometry::ConvexBody2D& {
    if (!name.is_string()) fail(ErrorKind::InvalidSpec, "body reference must be a name");
    const auto it = bodies.find(name.get<std::string>());
    if (it == bodies.end()) fail(ErrorKind::InvalidSpec, "unknown body '" + name.get<std::string>() + "'");
    return it->second;
  };
  auto body = [&](const json& task, const char* key) -> const geometry::ConvexBody2D& {
    return scoped(key, [&]() -> const geometry::ConvexBody2D& { return lookup(io::detail::member(task, key)); });
  };

  json tasks = json::array();
  if (spec.contains("tasks")) {
    tasks = tasks_of(spec);
  } else {
    for (const auto& [name, K] : bodies) {
      tasks.push_back({{"op", "functionals"}, {"body", name}});
      tasks.push_back({{"op", "isoperimetric"}, {"body", name}});
    }
  }

  Report rep("geometry", {"task", "id", "op", "body", "quantity", "value"});
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const json& task = tasks[t];
    scoped(indexed("tasks", t), [&] {
      const std::string op = io::detail::text(task, "op");
      const std::string id = label_of(task);
      json out = task_header(t, task);
      out["op"] = op;
      auto row = [&](const std::string& bname, const std::string& q, double v) {
        rep.row({std::to_string(t), id, op, bname, q, csv_number(v)});
      };
      if (op == "functionals") {
        const std::string name = io::detail::text(task, "body");
        const auto f = geometry::body_functionals(body(task, "body"), grid);
        out["body"] = name;
        out["functionals"] = io::functionals_to_json(f);
        row(name, "volume", f.volume);
        row(name, "polar_volume", f.polar_volume);
        row(name, "boundary_length", f.boundary_length);
        row(name, "affine_surface_area", f.affine_surface_area);
      } else if (op == "densities") {
        const std::string name = io::detail::text(task, "body");
        const auto d = geometry::body_densities(body(task, "body"), grid);
        const MeasureSpace s = grid.space();
        auto summary = [&](const Density& x, const std::string& tag) {
          const auto v = x.values();
          const double lo = *std::min_element(v.begin(), v.end());
          const double hi = *std::max_element(v.begin(), v.end());
          const double m = mass(x, s);
          row(name, tag + "_min", lo);
          row(name, tag + "_max", hi);
          row(name, tag + "_mass", m);
          json j = {{"min", lo}, {"max", hi}, {"mass", m}};
          if (opt.emit_integrand) {
            j["values"] = std::vector<double>(v.begin(), v.end());
            rep.series(t, tag, v);
          }
          return j;
        };
        out["body"] = name;
        out["p"] = summary(d.p, "p");
        out["q"] = summary(d.q, "q");
      } else if (op == "mixed" || op == "ith_mixed") {
        DivergenceReport r;
        if (op == "mixed") {
          const FVector fv = generators(task, "f");
          const json& names = scoped("bodies", [&]() -> const json& { return array_member(task, "bodies"); });
          std::vector<geometry::ConvexBody2D> ks;
          for (std::size_t i = 0; i < names.size(); ++i) {
            ks.push_back(scoped(indexed("bodies", i), [&] { return lookup(names[i]); }));
          }
          r = geometry::mixed_body_divergence(fv, ks, orientation_of(task), grid);
        } else {
          r = geometry::ith_mixed_body_divergence(generator(task, "f1"), generator(task, "f2"),
                                                  body(task, "K1"), body(task, "K2"),
                                                  io::detail::number(task, "i"), orientation_of(task), grid);
        }
        out.update(io::report_to_json(r, opt.emit_integrand));
        row("", "value", r.value);
        if (opt.emit_integrand) rep.series(t, "integrand", r.integrand);
      } else if (op == "isoperimetric") {
        const std::string name = io::detail::text(task, "body");
        const auto v = geometry::isoperimetric_check(body(task, "body"), grid, tol);
        out["body"] = name;
        out["verdict"] = io::verdict_to_json(v);
        row(name, "lhs", v.lhs);
        row(name, "rhs", v.rhs);
        row(name, "slack", v.slack);
        row(name, "satisfied", v.satisfied ? 1.0 : 0.0);
        row(name, "equality", v.equality ? 1.0 : 0.0);
        if (!v.satisfied) rep.violation();
      } else if (op == "linear_map") {
        const std::string name = io::detail::text(task, "body");
        const geometry::Matrix2 T = scoped("matrix", [&] {
          const json& m = io::detail::member(task, "matrix");
          const auto rows = m.get<std::vector<std::vector<double>>>();
          if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
            fail(ErrorKind::InvalidSpec, "matrix must be 2x2");
          }
          return geometry::Matrix2{{{rows[0][0], rows[0][1]}, {rows[1][0], rows[1][1]}}};
        });
        const auto K = geometry::apply_linear_map(body(task, "body"), T);
        const auto f = geometry::body_functionals(K, grid);
        out["body"] = name;
        out["image"] = io::body_to_json(K);
        out["functionals"] = io::functionals_to_json(f);
        row(name, "volume", f.volume);
        row(name, "polar_volume", f.polar_volume);
        row(name, "boundary_length", f.boundary_length);
        row(name, "affine_surface_area", f.affine_surface_area);
      } else {
        throw Error(ErrorKind::InvalidSpec, "unknown op '" + op + "'").with_field("op");
      }
      rep.add(std::move(out));
    });
  }
  return rep;
}

// ---------------------------------------------------------------------------
// falsify

inline Report run_falsify(const json& spec, const Tolerances& tol, const Options& opt) {
  std::vector<InequalityId> ids;
  auto parse_id = [](const json& j) {
    if (!j.is_string()) fail(ErrorKind::InvalidSpec, "inequality names must be strings");
    const auto id = inequality_from_string(j.get<std::string>());
    if (!id) fail(ErrorKind::InvalidSpec, "unknown inequality '" + j.get<std::string>() + "'");
    return *id;
  };
  if (spec.contains("inequalities")) {
    scoped("inequalities", [&] {
      const json& arr = array_member(spec, "inequalities");
      for (std::size_t i = 0; i < arr.size(); ++i) ids.push_back(scoped(indexed("", i), [&] { return parse_id(arr[i]); }));
    });
  } else {
    ids.push_back(scoped("inequality", [&] { return parse_id(io::detail::member(spec, "inequality")); }));
  }

  FalsifyConfig cfg;
  cfg.tol = tol;
  cfg.max_atoms = scoped("max_atoms", [&] { return integer_or(spec, "max_atoms", cfg.max_atoms); });
  cfg.max_n = scoped("max_n", [&] { return integer_or(spec, "max_n", cfg.max_n); });
  const int nodes = scoped("grid_nodes", [&] { return integer_or(spec, "grid_nodes", static_cast<int>(cfg.grid_nodes)); });
  const int threads = scoped("threads", [&] { return integer_or(spec, "threads", 1); });
  if (nodes < 64 || threads < 0) fail(ErrorKind::InvalidParameter, "grid_nodes must be >= 64 and threads >= 0");
  cfg.grid_nodes = static_cast<std::size_t>(nodes);
  cfg.threads = static_cast<unsigned>(threads);

  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  scoped("seed", [&] {
    if (spec.contains("seed")) {
      const json& s = spec.at("seed");
      if (!s.is_number_unsigned()) fail(ErrorKind::InvalidSpec, "must be a nonnegative integer");
      seed = s.get<std::uint64_t>();
    }
  });
  scoped("trials", [&] {
    if (spec.contains("trials")) {
      const json& s = spec.at("trials");
      if (!s.is_number_unsigned() || s.get<std::uint64_t>() == 0) fail(ErrorKind::InvalidSpec, "must be a positive integer");
      trials = s.get<std::size_t>();
    }
  });
  if (opt.seed) seed = *opt.seed;
  if (opt.trials) trials = *opt.trials;
  if (trials == 0) throw Error(ErrorKind::InvalidSpec, "must be positive").with_field("--trials");

  Report rep("falsify", {"inequality", "seed", "trials", "violations", "equalities", "min_slack",
                         "min_relative_slack", "witness_trial"});
  for (InequalityId id : ids) {
    const FalsifyReport r = falsify(id, seed, trials, cfg);
    rep.add(r.to_json());
    rep.row({r.inequality, std::to_string(r.seed), std::to_string(r.trials), std::to_string(r.violations),
             std::to_string(r.equalities), csv_number(r.min_slack), csv_number(r.min_relative_slack),
             std::to_string(r.witness_trial)});
    if (r.violations > 0) rep.violation();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// entry point

inline json error_json(const std::string& command, const Error& e) {
  return {{"command", command},
          {"status", "error"},
          {"error", {{"kind", std::string(to_string(e.kind()))}, {"message", e.detail()}, {"field", e.field()}}}};
}

inline bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

inline json load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidSpec, "cannot open '" + path + "'").with_field("--spec");
  try {
    json spec = json::parse(in);
    if (!spec.is_object()) fail(ErrorKind::InvalidSpec, "top level must be an object");
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what()).with_field("--spec");
  }
}

/// Runs one invocation. `tol_env` is the value of MIXDIV_TOL_OVERRIDE.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               const char* tol_env) {
  CLI::App app{"Mixed f-divergence toolkit"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"compute", "verify", "geometry", "falsify"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " command");
    sub->add_option("--spec", opt.spec_path, "JSON problem spec")->required();
    sub->add_option("--out", opt.out_path, "write the report here instead of stdout");
    sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", opt.seed, "falsifier seed (overrides the spec)");
    sub->add_option("--trials", opt.trials, "falsifier trials (overrides the spec)");
    sub->add_flag("--emit-integrand", opt.emit_integrand, "include per-atom integrands");
    sub->callback([&opt, sub] { opt.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  auto emit = [&](const std::string& text) {
    if (opt.out_path.empty()) {
      out << text;
    } else if (!write_file(opt.out_path, text)) {
      err << "mixdiv: cannot write '" << opt.out_path << "'\n";
      return false;
    }
    return true;
  };

  try {
    const json spec = load_spec(opt.spec_path);
    const Tolerances tol = resolve_tolerances(spec, tol_env);
    if (opt.format == "csv" && opt.emit_integrand && opt.out_path.empty()) {
      throw Error(ErrorKind::InvalidSpec, "CSV integrand output needs --out").with_field("--emit-integrand");
    }
    Report rep = opt.command == "compute"    ? run_compute(spec, tol, opt)
                 : opt.command == "verify"   ? run_verify(spec, tol)
                 : opt.command == "geometry" ? run_geometry(spec, tol, opt)
                                             : run_falsify(spec, tol, opt);
    bool ok = true;
    if (opt.format == "csv") {
      ok = emit(rep.csv());
      if (ok && opt.emit_integrand) ok = write_file(opt.out_path + ".integrand.csv", rep.series_csv());
    } else {
      ok = emit(rep.to_json(tol).dump(2) + "\n");
    }
    if (!ok) return kExitInputError;
    return rep.violated() ? kExitViolation : kExitOk;
  } catch (const Error& e) {
    err << "mixdiv: " << e.what();
    if (!e.field().empty()) err << " (at " << e.field() << ")";
    err << "\n";
    emit(error_json(opt.command, e).dump(2) + "\n");
    return kExitInputError;
  } catch (const std::exception& e) {
    const Error wrapped(ErrorKind::InvalidSpec, e.what());
    err << "mixdiv: " << e.what() << "\n";
    emit(error_json(opt.command, wrapped).dump(2) + "\n");
    return kExitInputError;
  }
}

}  // namespace mixdiv::cli

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

// JSON encodings for generators, bodies, verdicts and reports.
//
//   generator: {"kind":"power","alpha":0.5} | {"kind":"tv"} | {"kind":"klplus"}
//              {"kind":"linear","a":1,"b":0}
//              {"kind":"scaled","lambda":2,"inner":{...}}
//              {"kind":"adjoint","inner":{...}}
//   body:      {"family":"ellipse","a":2,"b":0.5,"phi":0}
//              {"family":"trigball","eps":0.05,"k":2}

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "json.hpp"
#include "mixdiv/convex_geometry.hpp"
#include "mixdiv/divergence_engine.hpp"
#include "mixdiv/error.hpp"
#include "mixdiv/f_family.hpp"
#include "mixdiv/inequality_lab.hpp"

namespace mixdiv::io {

using json = nlohmann::json;

namespace detail {

inline const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::InvalidSpec, std::string("missing field '") + key + "'").with_field(key);
  }
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number()) {
    throw Error(ErrorKind::InvalidSpec, std::string("'") + key + "' must be a number").with_field(key);
  }
  return v.get<double>();
}

inline double number_or(const json& j, const char* key, double fallback) {
  return j.is_object() && j.contains(key) ? number(j, key) : fallback;
}

inline std::string text(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_string()) {
    throw Error(ErrorKind::InvalidSpec, std::string("'") + key + "' must be a string").with_field(key);
  }
  return v.get<std::string>();
}

// NaN and infinities are not representable in JSON.
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace detail

inline FFunction f_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidSpec, "generator spec must be an object");
  const std::string kind = detail::text(j, "kind");
  try {
    if (kind == "tv") return FFunction::total_variation();
    if (kind == "klplus") return FFunction::kl_plus();
    if (kind == "power") return FFunction::power(detail::number(j, "alpha"));
    if (kind == "linear") return FFunction::linear(detail::number(j, "a"), detail::number(j, "b"));
    if (kind == "scaled") {
      const double lambda = detail::number(j, "lambda");
      FFunction inner = [&] {
        try {
          return f_from_json(detail::member(j, "inner"));
        } catch (const Error& e) {
          throw e.with_field("inner");
        }
      }();
      return FFunction::scaled(lambda, std::move(inner));
    }
    if (kind == "adjoint") {
      try {
        return adjoint(f_from_json(detail::member(j, "inner")));
      } catch (const Error& e) {
        throw e.with_field("inner");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidSpec, e.what());
  }
  throw Error(ErrorKind::InvalidParameter, "unknown generator kind '" + kind + "'").with_field("kind");
}

inline json f_to_json(const FFunction& f) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, variant::TotalVariation>) {
          return {{"kind", "tv"}};
        } else if constexpr (std::is_same_v<T, variant::KLPlus>) {
          return {{"kind", "klplus"}};
        } else if constexpr (std::is_same_v<T, variant::Power>) {
          return {{"kind", "power"}, {"alpha", x.alpha}};
        } else if constexpr (std::is_same_v<T, variant::Linear>) {
          return {{"kind", "linear"}, {"a", x.a}, {"b", x.b}};
        } else if constexpr (std::is_same_v<T, variant::AdjointOf>) {
          return {{"kind", "adjoint"}, {"inner", f_to_json(*x.inner)}};
        } else {
          return {{"kind", "scaled"}, {"lambda", x.lambda}, {"inner", f_to_json(*x.inner)}};
        }
      },
      f.kind());
}

inline geometry::ConvexBody2D body_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidSpec, "body spec must be an object");
  const std::string family = detail::text(j, "family");
  if (family == "ellipse") {
    return geometry::ConvexBody2D::ellipse(detail::number(j, "a"), detail::number(j, "b"),
                                           detail::number_or(j, "phi", 0.0));
  }
  if (family == "disk") return geometry::ConvexBody2D::disk(detail::number_or(j, "r", 1.0));
  if (family == "trigball") {
    const double k = detail::number(j, "k");
    if (k != std::floor(k) || k < 2 || k > 1e6) {
      throw Error(ErrorKind::InvalidParameter, "k must be an integer >= 2").with_field("k");
    }
    return geometry::ConvexBody2D::trig_ball(detail::number(j, "eps"), static_cast<int>(k));
  }
  throw Error(ErrorKind::InvalidSpec, "unknown body family '" + family + "'").with_field("family");
}

inline json body_to_json(const geometry::ConvexBody2D& K) {
  return std::visit(
      [](const auto& b) -> json {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, geometry::Ellipse>) {
          return {{"family", "ellipse"}, {"a", b.a}, {"b", b.b}, {"phi", b.phi}};
        } else {
          return {{"family", "trigball"}, {"eps", b.eps}, {"k", b.k}};
        }
      },
      K.family());
}

inline json verdict_to_json(const InequalityVerdict& v) {
  json out = {{"name", v.name},
              {"relation", std::string(to_string(v.relation))},
              {"lhs", detail::finite_or_null(v.lhs)},
              {"rhs", detail::finite_or_null(v.rhs)},
              {"slack", detail::finite_or_null(v.slack)},
              {"satisfied", v.satisfied},
              {"equality", v.equality}};
  if (v.diagnosis) {
    json d = {{"condition", v.diagnosis->condition}, {"holds", v.diagnosis->holds}};
    if (v.diagnosis->ratio) d["ratio"] = detail::finite_or_null(*v.diagnosis->ratio);
    out["diagnosis"] = std::move(d);
  }
  return out;
}

inline json report_to_json(const DivergenceReport& r, bool with_integrand) {
  json out = {{"value", detail::finite_or_null(r.value)}, {"convention_hits", r.convention_hits}};
  if (with_integrand) {
    json arr = json::array();
    for (double x : r.integrand) arr.push_back(detail::finite_or_null(x));
    out["integrand"] = std::move(arr);
  }
  return out;
}

inline json functionals_to_json(const geometry::BodyFunctionals& f) {
  return {{"volume", f.volume},
          {"polar_volume", f.polar_volume},
          {"boundary_length", f.boundary_length},
          {"affine_surface_area", f.affine_surface_area}};
}

}  // namespace mixdiv::io

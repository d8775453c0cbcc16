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

// Divergence generators f: (0, inf) -> [0, inf).
//
// Generators form a closed set of parametric variants so that adjoints,
// f(1), the endpoint limits f(0+) and lim f(t)/t, and convexity tags are
// all exact. The adjoint is f*(t) = t f(1/t).

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mixdiv/error.hpp"

namespace mixdiv {

enum class Convexity { convex, strictly_convex, concave, strictly_concave, linear };

constexpr std::string_view to_string(Convexity c) noexcept {
  switch (c) {
    case Convexity::convex: return "convex";
    case Convexity::strictly_convex: return "strictly_convex";
    case Convexity::concave: return "concave";
    case Convexity::strictly_concave: return "strictly_concave";
    case Convexity::linear: return "linear";
  }
  return "unknown";
}

/// Linear generators count as both convex and concave.
constexpr bool is_convex(Convexity c) noexcept {
  return c == Convexity::convex || c == Convexity::strictly_convex || c == Convexity::linear;
}
constexpr bool is_concave(Convexity c) noexcept {
  return c == Convexity::concave || c == Convexity::strictly_concave || c == Convexity::linear;
}
constexpr bool is_strict(Convexity c) noexcept {
  return c == Convexity::strictly_convex || c == Convexity::strictly_concave;
}

class FFunction;

namespace variant {
struct TotalVariation {};
struct KLPlus {};
struct Power {
  double alpha;
};
struct Linear {
  double a;
  double b;
};
struct AdjointOf {
  std::shared_ptr<const FFunction> inner;
};
struct Scaled {
  double lambda;
  std::shared_ptr<const FFunction> inner;
};
}  // namespace variant

namespace detail {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Product under the 0 * inf = 0 convention.
inline double times(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}
}  // namespace detail

class FFunction {
 public:
  using Variant = std::variant<variant::TotalVariation, variant::KLPlus, variant::Power,
                               variant::Linear, variant::AdjointOf, variant::Scaled>;

  /// f(t) = |t - 1|
  static FFunction total_variation() { return FFunction(variant::TotalVariation{}); }

  /// f(t) = max(t ln t, 0)
  static FFunction kl_plus() { return FFunction(variant::KLPlus{}); }

  /// f(t) = t^alpha, any real alpha.
  static FFunction power(double alpha) {
    if (!std::isfinite(alpha)) fail(ErrorKind::InvalidParameter, "power exponent must be finite");
    return FFunction(variant::Power{alpha});
  }

  /// f(t) = a t + b. Nonnegative on (0, inf) iff a >= 0 and b >= 0.
  static FFunction linear(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
      std::ostringstream os;
      os << "linear(" << a << ", " << b << ") is negative somewhere on (0, inf)";
      fail(ErrorKind::InvalidParameter, os.str());
    }
    return FFunction(variant::Linear{a, b});
  }

  /// f(t) = lambda * inner(t), lambda >= 0.
  static FFunction scaled(double lambda, FFunction inner) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
      fail(ErrorKind::InvalidParameter, "scale factor must be finite and nonnegative");
    }
    return FFunction(variant::Scaled{lambda, std::make_shared<const FFunction>(std::move(inner))});
  }

  /// Unreduced adjoint node; prefer adjoint() which reduces known forms.
  static FFunction adjoint_of(FFunction inner) {
    return FFunction(variant::AdjointOf{std::make_shared<const FFunction>(std::move(inner))});
  }

  const Variant& kind() const noexcept { return v_; }
  Convexity convexity() const noexcept { return tag_; }
  double value_at_one() const noexcept { return at_one_; }
  /// lim_{t->0+} f(t), possibly +inf.
  double limit_at_zero() const noexcept { return at_zero_; }
  /// lim_{t->inf} f(t)/t, possibly +inf.
  double slope_at_infinity() const noexcept { return slope_inf_; }

  /// f(t) for t > 0.
  double operator()(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) {
      std::ostringstream os;
      os << "generator evaluated at t = " << t << ", needs 0 < t < inf";
      fail(ErrorKind::DomainError, os.str());
    }
    return eval(t);
  }

  /// Short human-readable form, e.g. "scaled(2, power(0.5))".
  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, variant::TotalVariation>) {
            os << "tv";
          } else if constexpr (std::is_same_v<T, variant::KLPlus>) {
            os << "klplus";
          } else if constexpr (std::is_same_v<T, variant::Power>) {
            os << "power(" << x.alpha << ")";
          } else if constexpr (std::is_same_v<T, variant::Linear>) {
            os << "linear(" << x.a << ", " << x.b << ")";
          } else if constexpr (std::is_same_v<T, variant::AdjointOf>) {
            os << "adjoint(" << x.inner->describe() << ")";
          } else {
            os << "scaled(" << x.lambda << ", " << x.inner->describe() << ")";
          }
        },
        v_);
    return os.str();
  }

 private:
  explicit FFunction(Variant v) : v_(std::move(v)) { derive(); }

  double eval(double t) const {
    return std::visit(
        [t](const auto& x) -> double {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, variant::TotalVariation>) {
            return std::abs(t - 1.0);
          } else if constexpr (std::is_same_v<T, variant::KLPlus>) {
            const double v = t * std::log(t);
            return v > 0.0 ? v : 0.0;
          } else if constexpr (std::is_same_v<T, variant::Power>) {
            return std::pow(t, x.alpha);
          } else if constexpr (std::is_same_v<T, variant::Linear>) {
            return x.a * t + x.b;
          } else if constexpr (std::is_same_v<T, variant::AdjointOf>) {
            return t * x.inner->eval(1.0 / t);
          } else {
            return x.lambda * x.inner->eval(t);
          }
        },
        v_);
  }

  void derive() {
    using detail::kInf;
    std::visit(
        [this](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, variant::TotalVariation>) {
            tag_ = Convexity::convex;
            at_one_ = 0.0;
            at_zero_ = 1.0;
            slope_inf_ = 1.0;
          } else if constexpr (std::is_same_v<T, variant::KLPlus>) {
            tag_ = Convexity::convex;
            at_one_ = 0.0;
            at_zero_ = 0.0;
            slope_inf_ = kInf;
          } else if constexpr (std::is_same_v<T, variant::Power>) {
            const double a = x.alpha;
            if (a == 0.0 || a == 1.0) {
              tag_ = Convexity::linear;
            } else if (a > 0.0 && a < 1.0) {
              tag_ = Convexity::strictly_concave;
            } else {
              tag_ = Convexity::strictly_convex;
            }
            at_one_ = 1.0;
            at_zero_ = a > 0.0 ? 0.0 : (a == 0.0 ? 1.0 : kInf);
            slope_inf_ = a > 1.0 ? kInf : (a == 1.0 ? 1.0 : 0.0);
          } else if constexpr (std::is_same_v<T, variant::Linear>) {
            tag_ = Convexity::linear;
            at_one_ = x.a + x.b;
            at_zero_ = x.b;
            slope_inf_ = x.a;
          } else if constexpr (std::is_same_v<T, variant::AdjointOf>) {
            tag_ = x.inner->tag_;
            at_one_ = x.inner->at_one_;
            // t f(1/t) -> lim f(s)/s as t -> 0+, and f*(t)/t = f(1/t) -> f(0+).
            at_zero_ = x.inner->slope_inf_;
            slope_inf_ = x.inner->at_zero_;
          } else {
            tag_ = x.lambda == 0.0 ? Convexity::linear : x.inner->tag_;
            at_one_ = x.lambda * x.inner->at_one_;
            at_zero_ = detail::times(x.lambda, x.inner->at_zero_);
            slope_inf_ = detail::times(x.lambda, x.inner->slope_inf_);
          }
        },
        v_);
  }

  Variant v_;
  Convexity tag_ = Convexity::linear;
  double at_one_ = 0.0;
  double at_zero_ = 0.0;
  double slope_inf_ = 0.0;
};

/// The *-adjoint t f(1/t), reduced to a closed form where one exists.
inline FFunction adjoint(const FFunction& f) {
  return std::visit(
      [&f](const auto& x) -> FFunction {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, variant::TotalVariation>) {
          return FFunction::total_variation();
        } else if constexpr (std::is_same_v<T, variant::Power>) {
          return FFunction::power(1.0 - x.alpha);
        } else if constexpr (std::is_same_v<T, variant::Linear>) {
          return FFunction::linear(x.b, x.a);
        } else if constexpr (std::is_same_v<T, variant::AdjointOf>) {
          return *x.inner;
        } else if constexpr (std::is_same_v<T, variant::Scaled>) {
          return FFunction::scaled(x.lambda, adjoint(*x.inner));
        } else {
          return FFunction::adjoint_of(f);
        }
      },
      f.kind());
}

/// q f(p/q) extended to p = 0 or q = 0 by the endpoint limits, with
/// 0 * inf = 0. Throws IndeterminateValue when an infinite limit meets a
/// nonzero cofactor.
inline double weighted_term(const FFunction& f, double p, double q) {
  if (!(p >= 0.0) || !(q >= 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    std::ostringstream os;
    os << "weighted term needs finite p, q >= 0, got p = " << p << ", q = " << q;
    fail(ErrorKind::DomainError, os.str());
  }
  if (q == 0.0) {
    if (p == 0.0) return 0.0;
    const double slope = f.slope_at_infinity();
    if (std::isinf(slope)) {
      fail(ErrorKind::IndeterminateValue,
           f.describe() + ": q = 0 with p > 0 needs lim f(t)/t, which is infinite");
    }
    return p * slope;
  }
  if (p == 0.0) {
    const double lim = f.limit_at_zero();
    if (std::isinf(lim)) {
      fail(ErrorKind::IndeterminateValue,
           f.describe() + ": p = 0 with q > 0 needs f(0+), which is infinite");
    }
    return q * lim;
  }
  return q * f(p / q);
}

/// The vector (f_1, ..., f_n).
using FVector = std::vector<FFunction>;

inline FVector adjoint(const FVector& fv) {
  FVector out;
  out.reserve(fv.size());
  for (const FFunction& f : fv) out.push_back(adjoint(f));
  return out;
}

/// Named parameters accepted by make_builtin.
struct FSpec {
  std::string kind;  ///< tv | klplus | power | linear | scaled | adjoint
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
  double lambda = 1.0;
  std::shared_ptr<const FSpec> inner;
};

inline FFunction make_builtin(const FSpec& spec) {
  if (spec.kind == "tv") return FFunction::total_variation();
  if (spec.kind == "klplus") return FFunction::kl_plus();
  if (spec.kind == "power") return FFunction::power(spec.alpha);
  if (spec.kind == "linear") return FFunction::linear(spec.a, spec.b);
  if (spec.kind == "scaled" || spec.kind == "adjoint") {
    if (!spec.inner) fail(ErrorKind::InvalidParameter, spec.kind + " needs an inner generator");
    FFunction inner = make_builtin(*spec.inner);
    return spec.kind == "scaled" ? FFunction::scaled(spec.lambda, std::move(inner))
                                 : adjoint(inner);
  }
  fail(ErrorKind::InvalidParameter, "unknown generator kind '" + spec.kind + "'");
}

}  // namespace mixdiv

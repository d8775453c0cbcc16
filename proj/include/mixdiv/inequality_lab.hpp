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

// Numerical checks for the inequalities satisfied by mixed divergences:
// the Alexandrov-Fenchel type product bound, Jensen bounds, the concave
// chain, Hoelder interpolation in the mixing index, and its corollaries.
// Each check evaluates both sides, reports the slack, and attaches an
// equality diagnosis when one is known.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "mixdiv/divergence_engine.hpp"
#include "mixdiv/error.hpp"
#include "mixdiv/f_family.hpp"
#include "mixdiv/measure_space.hpp"

namespace mixdiv {

/// `ineq` bounds how far below zero a slack may go, `eq` how close to zero
/// it must be to count as equality; both scale with (1 + |rhs|).
struct Tolerances {
  double norm = kTolNorm;
  double ineq = 1e-10;
  double eq = 1e-8;
};

enum class Relation { le, ge };

constexpr std::string_view to_string(Relation r) noexcept { return r == Relation::le ? "<=" : ">="; }

struct EqualityDiagnosis {
  std::string condition;  ///< the characterization being tested
  bool holds = false;     ///< whether the instance meets it
  std::optional<double> ratio;
};

struct InequalityVerdict {
  std::string name;
  Relation relation = Relation::le;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  ///< rhs - lhs for <=, lhs - rhs for >=
  bool satisfied = false;
  bool equality = false;
  std::optional<EqualityDiagnosis> diagnosis;

  /// slack / (1 + |rhs|), the quantity the tolerances are applied to.
  double relative_slack() const { return slack / (1.0 + std::abs(rhs)); }
};

inline InequalityVerdict make_verdict(std::string name, double lhs, double rhs, Relation rel,
                                      const Tolerances& tol = {}) {
  InequalityVerdict v;
  v.name = std::move(name);
  v.relation = rel;
  v.lhs = lhs;
  v.rhs = rhs;
  v.slack = rel == Relation::le ? rhs - lhs : lhs - rhs;
  const double scale = 1.0 + std::abs(rhs);
  v.satisfied = v.slack >= -tol.ineq * scale;
  v.equality = v.satisfied && std::abs(v.slack) <= tol.eq * scale;
  return v;
}

// ---------------------------------------------------------------------------
// Effective proportionality

struct Proportionality {
  bool proportional = false;
  std::optional<double> ratio;  ///< h = ratio * g when defined
};

inline bool is_null(std::span<const double> g) {
  return std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; });
}

/// a g = b h for some (a, b) != (0, 0), tested atom by atom to `rel_tol`.
/// A null vector is proportional to anything.
inline Proportionality effective_proportionality(std::span<const double> g,
                                                 std::span<const double> h, const MeasureSpace& s,
                                                 double rel_tol = 1e-10) {
  if (g.size() != s.size() || h.size() != s.size()) {
    fail(ErrorKind::LengthMismatch, "proportionality test needs one value per atom");
  }
  Proportionality out;
  if (is_null(g)) {
    out.proportional = true;
    return out;
  }
  if (is_null(h)) {
    out.proportional = true;
    out.ratio = 0.0;
    return out;
  }
  std::size_t pivot = 0;
  for (std::size_t j = 1; j < g.size(); ++j) {
    if (std::abs(g[j]) > std::abs(g[pivot])) pivot = j;
  }
  const double r = h[pivot] / g[pivot];
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double expect = r * g[j];
    if (std::abs(h[j] - expect) > rel_tol * std::max(std::abs(h[j]), std::abs(expect))) {
      return out;
    }
  }
  out.proportional = true;
  out.ratio = r;
  return out;
}

namespace detail {

/// True when one member is null or every member is proportional to the first.
inline bool all_effectively_proportional(const std::vector<std::vector<double>>& fs,
                                         const MeasureSpace& s) {
  for (const auto& f : fs) {
    if (is_null(f)) return true;
  }
  for (std::size_t i = 1; i < fs.size(); ++i) {
    if (!effective_proportionality(fs[0], fs[i], s).proportional) return false;
  }
  return true;
}

inline bool same_density(const Density& a, const Density& b, double rel_tol = 1e-12) {
  double scale = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) scale = std::max({scale, a[j], b[j]});
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) > rel_tol * scale) return false;
  }
  return true;
}

inline std::vector<double> weighted_terms(const FFunction& f, const Density& p, const Density& q) {
  std::vector<double> w(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) w[j] = weighted_term(f, p[j], q[j]);
  return w;
}

/// (a, b) with f(t) = a t + b, for generators tagged linear.
inline std::pair<double, double> affine_coefficients(const FFunction& f) {
  return std::visit(
      [](const auto& x) -> std::pair<double, double> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, variant::Linear>) {
          return {x.a, x.b};
        } else if constexpr (std::is_same_v<T, variant::Power>) {
          return x.alpha == 1.0 ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
        } else if constexpr (std::is_same_v<T, variant::AdjointOf>) {
          auto [a, b] = affine_coefficients(*x.inner);
          return {b, a};
        } else if constexpr (std::is_same_v<T, variant::Scaled>) {
          if (x.lambda == 0.0) return {0.0, 0.0};
          auto [a, b] = affine_coefficients(*x.inner);
          return {x.lambda * a, x.lambda * b};
        } else {
          fail(ErrorKind::TagMismatch, "generator is not linear");
        }
      },
      f.kind());
}

/// a/(a+b) p + b/(a+b) q, the convex combination whose equality across
/// pairs characterizes equality for linear generators.
inline std::vector<double> convex_combination(const FFunction& f, const Density& p,
                                              const Density& q) {
  auto [a, b] = affine_coefficients(f);
  std::vector<double> c(p.size(), 0.0);
  if (a + b == 0.0) return c;
  for (std::size_t j = 0; j < p.size(); ++j) c[j] = (a * p[j] + b * q[j]) / (a + b);
  return c;
}

inline bool same_values(std::span<const double> a, std::span<const double> b,
                        double rel_tol = 1e-12) {
  double scale = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) scale = std::max({scale, std::abs(a[j]), std::abs(b[j])});
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) > rel_tol * scale) return false;
  }
  return true;
}

inline double pow_or_one(double base, double e) { return e == 0.0 ? 1.0 : std::pow(base, e); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Alexandrov-Fenchel type inequality

/// g0 collects the first n - m slots of the mixed integrand, g[j] the slot
/// n - j (1-based), each raised to 1/n.
struct FactorDecomposition {
  std::vector<double> g0;
  std::vector<std::vector<double>> g;
};

inline FactorDecomposition factor_decomposition(const FVector& fv, const DensityBundle& P,
                                                const DensityBundle& Q, std::size_t m) {
  detail::require_bundles(fv, P, Q);
  const std::size_t n = fv.size();
  if (m < 1 || m > n) {
    std::ostringstream os;
    os << "m = " << m << " outside 1.." << n;
    fail(ErrorKind::RangeMismatch, os.str());
  }
  const double e = 1.0 / static_cast<double>(n);
  const std::size_t atoms = P.space().size();
  FactorDecomposition out;
  out.g0.assign(atoms, 1.0);
  std::vector<double> bases;
  std::vector<double> exps;
  for (std::size_t j = 0; j < atoms; ++j) {
    bases.clear();
    for (std::size_t i = 0; i < n - m; ++i) bases.push_back(weighted_term(fv[i], P[i][j], Q[i][j]));
    exps.assign(bases.size(), e);
    out.g0[j] = detail::power_product(bases, exps);
  }
  for (std::size_t jj = 0; jj < m; ++jj) {
    const std::size_t slot = n - 1 - jj;
    std::vector<double> gi(atoms);
    for (std::size_t j = 0; j < atoms; ++j) {
      gi[j] = detail::pow_or_one(weighted_term(fv[slot], P[slot][j], Q[slot][j]), e);
    }
    out.g.push_back(std::move(gi));
  }
  return out;
}

/// [D(P, Q)]^m <= prod_{k=n-m+1}^{n} D(P^{n,k}, Q^{n,k}), where the
/// superscript replaces the last m triples by copies of triple k.
inline InequalityVerdict af_check(const FVector& fv, const DensityBundle& P,
                                  const DensityBundle& Q, std::size_t m,
                                  const Tolerances& tol = {}) {
  detail::require_bundles(fv, P, Q);
  const std::size_t n = fv.size();
  if (m < 1 || m > n) {
    std::ostringstream os;
    os << "m = " << m << " outside 1.." << n;
    fail(ErrorKind::RangeMismatch, os.str());
  }
  const bool all_convex =
      std::all_of(fv.begin(), fv.end(), [](const FFunction& f) { return is_convex(f.convexity()); });
  const bool all_concave =
      std::all_of(fv.begin(), fv.end(), [](const FFunction& f) { return is_concave(f.convexity()); });
  if (!all_convex && !all_concave) {
    fail(ErrorKind::MixedConvexityTags, "generators must be all convex or all concave");
  }

  const double d = mixed_f_divergence(fv, P, Q).value;
  const double lhs = std::pow(d, static_cast<double>(m));
  double rhs = 1.0;
  for (std::size_t k = n - m; k < n; ++k) {
    FVector fk(fv.begin(), fv.begin() + static_cast<std::ptrdiff_t>(n - m));
    std::vector<Density> pk(P.densities().begin(), P.densities().begin() + static_cast<std::ptrdiff_t>(n - m));
    std::vector<Density> qk(Q.densities().begin(), Q.densities().begin() + static_cast<std::ptrdiff_t>(n - m));
    for (std::size_t r = 0; r < m; ++r) {
      fk.push_back(fv[k]);
      pk.push_back(P[k]);
      qk.push_back(Q[k]);
    }
    rhs *= mixed_f_divergence(fk, DensityBundle(P.space(), std::move(pk)),
                              DensityBundle(Q.space(), std::move(qk)))
               .value;
  }

  InequalityVerdict v = make_verdict("alexandrov_fenchel", lhs, rhs, Relation::le, tol);
  if (v.equality) {
    const FactorDecomposition fd = factor_decomposition(fv, P, Q, m);
    std::vector<std::vector<double>> us;
    const double inv_m = 1.0 / static_cast<double>(m);
    for (const auto& gi : fd.g) {
      std::vector<double> u(gi.size());
      for (std::size_t j = 0; j < gi.size(); ++j) u[j] = detail::pow_or_one(fd.g0[j], inv_m) * gi[j];
      us.push_back(std::move(u));
    }
    v.diagnosis = EqualityDiagnosis{
        "one of g0^(1/m) g_i is null or all are effectively proportional",
        detail::all_effectively_proportional(us, P.space()), std::nullopt};
  }
  return v;
}

// ---------------------------------------------------------------------------
// Jensen bounds

/// D_f(P, Q) >= f(1) for convex f, <= f(1) for concave f. Linear generators
/// are checked in the convex direction and always attain equality.
inline InequalityVerdict jensen_bound_check(const FFunction& f, const Density& p, const Density& q,
                                            const MeasureSpace& s, const Tolerances& tol = {}) {
  const double d = classical_f_divergence(f, p, q, s).value;
  const Convexity c = f.convexity();
  const Relation rel = is_convex(c) ? Relation::ge : Relation::le;
  InequalityVerdict v = make_verdict("jensen", d, f.value_at_one(), rel, tol);
  if (c == Convexity::linear) {
    v.diagnosis = EqualityDiagnosis{"linear generator: equality always", true, std::nullopt};
  } else if (is_strict(c)) {
    v.diagnosis = EqualityDiagnosis{"p = q mu-a.e.", detail::same_density(p, q), std::nullopt};
  }
  return v;
}

// ---------------------------------------------------------------------------
// Concave chain

struct ChainVerdicts {
  InequalityVerdict mixed_vs_product;  ///< [D]^n <= prod D_{f_i}(P_i, Q_i)
  InequalityVerdict product_vs_one;    ///< prod D_{f_i}(P_i, Q_i) <= prod f_i(1)
};

inline ChainVerdicts concave_chain_check(const FVector& fv, const DensityBundle& P,
                                         const DensityBundle& Q, const Tolerances& tol = {}) {
  detail::require_bundles(fv, P, Q);
  for (std::size_t i = 0; i < fv.size(); ++i) {
    if (!is_concave(fv[i].convexity())) {
      fail(ErrorKind::NonConcaveTag, "generator " + std::to_string(i) + " (" + fv[i].describe() +
                                         ") is not concave");
    }
  }
  const std::size_t n = fv.size();
  const MeasureSpace& s = P.space();
  const double d = mixed_f_divergence(fv, P, Q).value;
  double prod_div = 1.0;
  double prod_one = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    prod_div *= classical_f_divergence(fv[i], P[i], Q[i], s).value;
    prod_one *= fv[i].value_at_one();
  }
  ChainVerdicts out{
      make_verdict("concave_chain_left", std::pow(d, static_cast<double>(n)), prod_div,
                   Relation::le, tol),
      make_verdict("concave_chain_right", prod_div, prod_one, Relation::le, tol)};

  const bool all_strict = std::all_of(fv.begin(), fv.end(), [](const FFunction& f) {
    return f.convexity() == Convexity::strictly_concave;
  });
  const bool all_linear = std::all_of(fv.begin(), fv.end(), [](const FFunction& f) {
    return f.convexity() == Convexity::linear;
  });
  std::optional<EqualityDiagnosis> diag;
  if (all_strict) {
    bool holds = true;
    for (std::size_t i = 0; i < n && holds; ++i) {
      holds = detail::same_density(P[i], Q[i]) && detail::same_density(P[i], P[0]);
    }
    diag = EqualityDiagnosis{"p_i = q_i = p for a common density p", holds, std::nullopt};
  } else if (all_linear) {
    const std::vector<double> c0 = detail::convex_combination(fv[0], P[0], Q[0]);
    bool holds = true;
    for (std::size_t i = 1; i < n && holds; ++i) {
      holds = detail::same_values(c0, detail::convex_combination(fv[i], P[i], Q[i]));
    }
    diag = EqualityDiagnosis{"a_i/(a_i+b_i) p_i + b_i/(a_i+b_i) q_i agree for all i", holds,
                             std::nullopt};
  }
  out.mixed_vs_product.diagnosis = diag;
  out.product_vs_one.diagnosis = diag;
  return out;
}

// ---------------------------------------------------------------------------
// i-th mixed divergence: interpolation and corollaries

/// Two triples (f1, P1, Q1), (f2, P2, Q2) over one space, mixed with
/// weights i/n and (n-i)/n. Reference-form checks ignore p2 and q2.
struct TwoPairInstance {
  FFunction f1;
  FFunction f2;
  Density p1;
  Density q1;
  Density p2;
  Density q2;
  MeasureSpace space;
  int n;

  double divergence(double i) const { return ith_mixed(f1, f2, p1, q1, p2, q2, i, n, space).value; }
  double reference(double i) const {
    return ith_mixed_reference(f1, p1, q1, i, f2, n, space).value;
  }
};

/// D(i) <= D(j)^{(k-i)/(k-j)} D(k)^{(i-j)/(k-j)} for i between j and k.
inline InequalityVerdict interpolation_check(const TwoPairInstance& x, double i, double j, double k,
                                             const Tolerances& tol = {}) {
  if (i < std::min(j, k) || i > std::max(j, k)) {
    std::ostringstream os;
    os << "i = " << i << " is not between j = " << j << " and k = " << k;
    fail(ErrorKind::BadOrdering, os.str());
  }
  const double di = x.divergence(i);
  double rhs = 0.0;
  if (j == k) {
    rhs = x.divergence(j);
  } else {
    const double ej = (k - i) / (k - j);
    const double ek = (i - j) / (k - j);
    rhs = detail::pow_or_one(x.divergence(j), ej) * detail::pow_or_one(x.divergence(k), ek);
  }
  InequalityVerdict v = make_verdict("interpolation", di, rhs, Relation::le, tol);
  if (i == j || i == k) {
    v.diagnosis = EqualityDiagnosis{"i is an endpoint: equality holds trivially", true, std::nullopt};
  } else {
    const std::vector<double> w1 = detail::weighted_terms(x.f1, x.p1, x.q1);
    const std::vector<double> w2 = detail::weighted_terms(x.f2, x.p2, x.q2);
    const Proportionality pr = effective_proportionality(w1, w2, x.space);
    v.diagnosis = EqualityDiagnosis{
        "f1(p1/q1) q1 or f2(p2/q2) q2 is null, or they are effectively proportional",
        pr.proportional, pr.ratio};
  }
  return v;
}

enum class CorollaryCase {
  concave_band,
  convex_concave_high,
  concave_convex_low,
  reference_concave,
  reference_convex_high,
  reference_concave_low,
};

constexpr std::string_view to_string(CorollaryCase c) noexcept {
  switch (c) {
    case CorollaryCase::concave_band: return "concave_band";
    case CorollaryCase::convex_concave_high: return "convex_concave_high";
    case CorollaryCase::concave_convex_low: return "concave_convex_low";
    case CorollaryCase::reference_concave: return "reference_concave";
    case CorollaryCase::reference_convex_high: return "reference_convex_high";
    case CorollaryCase::reference_concave_low: return "reference_concave_low";
  }
  return "unknown";
}

/// Bounds on [D(i)]^n (or the reference form) by f1(1)^i f2(1)^{n-i}.
///
///   concave_band           f1, f2 concave, 0 <= i <= n        <=
///   convex_concave_high    f1 convex, f2 concave, i >= n       >=
///   concave_convex_low     f1 concave, f2 convex, i <= 0       >=
///   reference_concave      f1 concave, 0 <= i <= n             <=
///   reference_convex_high  f1 convex, i >= n                   >=
///   reference_concave_low  f1 concave, i <= 0                  >=
///
/// Both generators must be positive at 1.
inline InequalityVerdict corollary_bound_check(CorollaryCase c, const TwoPairInstance& x, double i,
                                               const Tolerances& tol = {}) {
  const Convexity t1 = x.f1.convexity();
  const Convexity t2 = x.f2.convexity();
  const double n = static_cast<double>(x.n);
  const bool reference = c == CorollaryCase::reference_concave ||
                         c == CorollaryCase::reference_convex_high ||
                         c == CorollaryCase::reference_concave_low;

  bool tags_ok = false;
  bool range_ok = false;
  Relation rel = Relation::le;
  switch (c) {
    case CorollaryCase::concave_band:
      tags_ok = is_concave(t1) && is_concave(t2);
      range_ok = 0.0 <= i && i <= n;
      break;
    case CorollaryCase::convex_concave_high:
      tags_ok = is_convex(t1) && is_concave(t2);
      range_ok = i >= n;
      rel = Relation::ge;
      break;
    case CorollaryCase::concave_convex_low:
      tags_ok = is_concave(t1) && is_convex(t2);
      range_ok = i <= 0.0;
      rel = Relation::ge;
      break;
    case CorollaryCase::reference_concave:
      tags_ok = is_concave(t1);
      range_ok = 0.0 <= i && i <= n;
      break;
    case CorollaryCase::reference_convex_high:
      tags_ok = is_convex(t1);
      range_ok = i >= n;
      rel = Relation::ge;
      break;
    case CorollaryCase::reference_concave_low:
      tags_ok = is_concave(t1);
      range_ok = i <= 0.0;
      rel = Relation::ge;
      break;
  }
  if (!tags_ok) {
    fail(ErrorKind::TagMismatch, std::string(to_string(c)) + " does not accept f1 = " +
                                     x.f1.describe() + ", f2 = " + x.f2.describe());
  }
  if (!range_ok) {
    std::ostringstream os;
    os << to_string(c) << " does not accept i = " << i << " with n = " << x.n;
    fail(ErrorKind::RangeMismatch, os.str());
  }
  if (!(x.f1.value_at_one() > 0.0) || !(x.f2.value_at_one() > 0.0)) {
    fail(ErrorKind::InvalidParameter, "corollary bounds need f1(1) > 0 and f2(1) > 0");
  }

  const double d = reference ? x.reference(i) : x.divergence(i);
  const double lhs = std::pow(d, n);
  const double rhs = detail::pow_or_one(x.f1.value_at_one(), i) *
                     detail::pow_or_one(x.f2.value_at_one(), n - i);
  InequalityVerdict v = make_verdict(std::string(to_string(c)), lhs, rhs, rel, tol);

  if (reference) {
    if (is_strict(t1)) {
      const Density unit = Density::unit(x.space.size());
      v.diagnosis = EqualityDiagnosis{
          "P1 = Q1 = mu", detail::same_density(x.p1, unit) && detail::same_density(x.q1, unit),
          std::nullopt};
    } else if (t1 == Convexity::linear) {
      auto [a, b] = detail::affine_coefficients(x.f1);
      std::vector<double> lhs_c(x.space.size());
      const std::vector<double> rhs_c(x.space.size(), a + b);
      for (std::size_t j = 0; j < lhs_c.size(); ++j) lhs_c[j] = a * x.p1[j] + b * x.q1[j];
      v.diagnosis =
          EqualityDiagnosis{"a p1 + b q1 = a + b mu-a.e.", detail::same_values(lhs_c, rhs_c),
                            std::nullopt};
    }
    return v;
  }

  const bool strict_pair = is_strict(t1) && is_strict(t2);
  if (strict_pair) {
    const bool holds = detail::same_density(x.p1, x.q1) && detail::same_density(x.p2, x.q2) &&
                       detail::same_density(x.p1, x.p2);
    v.diagnosis = EqualityDiagnosis{"p1 = p2 = q1 = q2 mu-a.e.", holds, std::nullopt};
  } else if (t1 == Convexity::linear && t2 == Convexity::linear) {
    v.diagnosis = EqualityDiagnosis{
        "a1/(a1+b1) p1 + b1/(a1+b1) q1 = a2/(a2+b2) p2 + b2/(a2+b2) q2 mu-a.e.",
        detail::same_values(detail::convex_combination(x.f1, x.p1, x.q1),
                            detail::convex_combination(x.f2, x.p2, x.q2)),
        std::nullopt};
  }
  return v;
}

}  // namespace mixdiv

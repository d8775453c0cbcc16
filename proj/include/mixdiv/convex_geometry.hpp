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

// Planar convex bodies given by closed-form support functions, sampled on
// an equispaced grid of the unit circle.
//
// For a body of class C^2_+ in the plane the curvature function (radius of
// curvature as a function of the outer normal) is f_K = h + h''. With
// d(sigma) = d(theta):
//   |K|      = 1/2 int h f_K
//   |K polar| = 1/2 int h^-2
//   |dK|     = int f_K
//   as(K)    = int f_K^(2/3)
// All integrands are smooth and 2 pi periodic, so the trapezoid rule on
// the grid converges geometrically.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mixdiv/divergence_engine.hpp"
#include "mixdiv/error.hpp"
#include "mixdiv/f_family.hpp"
#include "mixdiv/inequality_lab.hpp"
#include "mixdiv/measure_space.hpp"

namespace mixdiv::geometry {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Origin-centred ellipse with semi-axes a, b, major axis rotated by phi:
/// h(theta) = sqrt(a^2 cos^2(theta - phi) + b^2 sin^2(theta - phi)).
struct Ellipse {
  double a;
  double b;
  double phi = 0.0;
};

/// h(theta) = 1 + eps cos(k theta); C^2_+ iff |eps| (k^2 - 1) < 1.
struct TrigBall {
  double eps;
  int k;
};

struct SupportSample {
  double h;
  double dh;
  double d2h;
};

class ConvexBody2D {
 public:
  using Family = std::variant<Ellipse, TrigBall>;

  static ConvexBody2D ellipse(double a, double b, double phi = 0.0) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(phi)) {
      std::ostringstream os;
      os << "ellipse semi-axes must be positive and finite, got a = " << a << ", b = " << b;
      fail(ErrorKind::InvalidParameter, os.str());
    }
    return ConvexBody2D(Ellipse{a, b, phi});
  }

  static ConvexBody2D disk(double r = 1.0) { return ellipse(r, r, 0.0); }

  static ConvexBody2D trig_ball(double eps, int k) {
    if (k < 2) fail(ErrorKind::InvalidParameter, "trig ball needs an integer frequency k >= 2");
    if (!std::isfinite(eps) || !(std::abs(eps) * (k * k - 1.0) < 1.0)) {
      std::ostringstream os;
      os << "trig ball eps = " << eps << ", k = " << k << " violates |eps|(k^2 - 1) < 1";
      fail(ErrorKind::NotC2Plus, os.str());
    }
    return ConvexBody2D(TrigBall{eps, k});
  }

  const Family& family() const noexcept { return family_; }

  SupportSample support(double theta) const {
    return std::visit(
        [theta](const auto& b) -> SupportSample {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, Ellipse>) {
            // A = h^2 = c0 + c1 cos(2 psi)
            const double psi = theta - b.phi;
            const double c0 = 0.5 * (b.a * b.a + b.b * b.b);
            const double c1 = 0.5 * (b.a * b.a - b.b * b.b);
            const double A = c0 + c1 * std::cos(2.0 * psi);
            const double dA = -2.0 * c1 * std::sin(2.0 * psi);
            const double d2A = -4.0 * c1 * std::cos(2.0 * psi);
            const double h = std::sqrt(A);
            return {h, dA / (2.0 * h), d2A / (2.0 * h) - dA * dA / (4.0 * A * h)};
          } else {
            const double kt = b.k * theta;
            const double kk = static_cast<double>(b.k);
            return {1.0 + b.eps * std::cos(kt), -b.eps * kk * std::sin(kt),
                    -b.eps * kk * kk * std::cos(kt)};
          }
        },
        family_);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, Ellipse>) {
            os << "ellipse(" << b.a << ", " << b.b << ", " << b.phi << ")";
          } else {
            os << "trigball(" << b.eps << ", " << b.k << ")";
          }
        },
        family_);
    return os.str();
  }

 private:
  explicit ConvexBody2D(Family f) : family_(f) {}
  Family family_;
};

/// N equispaced nodes 2 pi j / N with weights 2 pi / N.
class CircleGrid {
 public:
  explicit CircleGrid(std::size_t nodes) : nodes_(nodes) {
    if (nodes < 64 || nodes % 2 != 0) {
      fail(ErrorKind::InvalidParameter,
           "circle grid needs an even node count >= 64, got " + std::to_string(nodes));
    }
  }

  std::size_t size() const noexcept { return nodes_; }
  double node(std::size_t j) const { return kTwoPi * static_cast<double>(j) / static_cast<double>(nodes_); }
  double weight() const noexcept { return kTwoPi / static_cast<double>(nodes_); }

  /// The grid as a measure space approximating arc length on the circle.
  MeasureSpace space() const { return MeasureSpace::make(std::vector<double>(nodes_, weight())); }

 private:
  std::size_t nodes_;
};

struct BodySamples {
  std::vector<double> h;
  std::vector<double> dh;
  std::vector<double> d2h;
  std::vector<double> curvature;  ///< f_K = h + h''
};

inline BodySamples body_eval(const ConvexBody2D& K, const CircleGrid& grid) {
  BodySamples out;
  const std::size_t n = grid.size();
  out.h.resize(n);
  out.dh.resize(n);
  out.d2h.resize(n);
  out.curvature.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const SupportSample s = K.support(grid.node(j));
    out.h[j] = s.h;
    out.dh[j] = s.dh;
    out.d2h[j] = s.d2h;
    out.curvature[j] = s.h + s.d2h;
    if (!(s.h > 0.0) || !(out.curvature[j] > 0.0)) {
      std::ostringstream os;
      os << K.describe() << ": h = " << s.h << ", h + h'' = " << out.curvature[j] << " at node " << j;
      fail(ErrorKind::NotC2Plus, os.str());
    }
  }
  return out;
}

struct BodyFunctionals {
  double volume;
  double polar_volume;
  double boundary_length;
  double affine_surface_area;
};

inline BodyFunctionals body_functionals(const ConvexBody2D& K, const CircleGrid& grid) {
  const BodySamples s = body_eval(K, grid);
  const double w = grid.weight();
  double vol = 0.0;
  double polar = 0.0;
  double length = 0.0;
  double as = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    vol += s.h[j] * s.curvature[j];
    polar += 1.0 / (s.h[j] * s.h[j]);
    length += s.curvature[j];
    as += std::cbrt(s.curvature[j] * s.curvature[j]);
  }
  return {0.5 * vol * w, 0.5 * polar * w, length * w, as * w};
}

struct BodyDensities {
  Density p;  ///< 1 / (2 |K polar| h^2)
  Density q;  ///< f_K h / (2 |K|)
};

inline BodyDensities body_densities(const ConvexBody2D& K, const CircleGrid& grid) {
  const BodySamples s = body_eval(K, grid);
  const std::size_t n = grid.size();
  // Same values as 1/(2|K polar| h^2) and f_K h/(2|K|), but each is formed
  // relative to node 0 and normalized by its own quadrature sum, so a disk
  // gives p == q bitwise instead of only up to rounding.
  std::vector<double> p(n);
  std::vector<double> q(n);
  double sp = 0.0;
  double sq = 0.0;
  const double h0 = s.h[0];
  const double v0 = s.curvature[0] * s.h[0];
  for (std::size_t j = 0; j < n; ++j) {
    const double r = h0 / s.h[j];
    p[j] = r * r;
    q[j] = s.curvature[j] * s.h[j] / v0;
    sp += p[j];
    sq += q[j];
  }
  sp *= grid.weight();
  sq *= grid.weight();
  for (std::size_t j = 0; j < n; ++j) {
    p[j] /= sp;
    q[j] /= sq;
  }
  return {Density(std::move(p)), Density(std::move(q))};
}

/// PQ integrates [f_i(p_i/q_i) q_i]^{1/n}; QP swaps the roles of p and q.
enum class Orientation { PQ, QP };

inline DivergenceReport mixed_body_divergence(const FVector& fv,
                                              const std::vector<ConvexBody2D>& bodies,
                                              Orientation orientation, const CircleGrid& grid) {
  if (fv.size() != bodies.size()) {
    std::ostringstream os;
    os << fv.size() << " generators for " << bodies.size() << " bodies";
    fail(ErrorKind::LengthMismatch, os.str());
  }
  const MeasureSpace space = grid.space();
  std::vector<Density> ps;
  std::vector<Density> qs;
  for (const ConvexBody2D& K : bodies) {
    BodyDensities d = body_densities(K, grid);
    ps.push_back(std::move(d.p));
    qs.push_back(std::move(d.q));
  }
  DensityBundle P(space, std::move(ps));
  DensityBundle Q(space, std::move(qs));
  return orientation == Orientation::PQ ? mixed_f_divergence(fv, P, Q)
                                        : mixed_f_divergence(fv, Q, P);
}

inline DivergenceReport ith_mixed_body_divergence(const FFunction& f1, const FFunction& f2,
                                                  const ConvexBody2D& K1, const ConvexBody2D& K2,
                                                  double i, Orientation orientation,
                                                  const CircleGrid& grid) {
  const MeasureSpace space = grid.space();
  const BodyDensities d1 = body_densities(K1, grid);
  const BodyDensities d2 = body_densities(K2, grid);
  if (orientation == Orientation::PQ) return ith_mixed(f1, f2, d1.p, d1.q, d2.p, d2.q, i, 2, space);
  return ith_mixed(f1, f2, d1.q, d1.p, d2.q, d2.p, i, 2, space);
}

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Image of an ellipse under x -> T x. The support function of T K is
/// h_K(T^t u), i.e. the quadratic form Sigma -> T Sigma T^t.
inline ConvexBody2D apply_linear_map(const ConvexBody2D& K, const Matrix2& T) {
  const auto* e = std::get_if<Ellipse>(&K.family());
  if (e == nullptr) fail(ErrorKind::UnsupportedFamily, K.describe() + " is not closed under linear maps");
  const double det = T[0][0] * T[1][1] - T[0][1] * T[1][0];
  if (!std::isfinite(det) || std::abs(det) < 1e-300) fail(ErrorKind::SingularMatrix, "det T = 0");

  const double c = std::cos(e->phi);
  const double s = std::sin(e->phi);
  const double a2 = e->a * e->a;
  const double b2 = e->b * e->b;
  // Sigma = R diag(a^2, b^2) R^t
  const double sxx = a2 * c * c + b2 * s * s;
  const double syy = a2 * s * s + b2 * c * c;
  const double sxy = (a2 - b2) * c * s;
  // M = T Sigma T^t
  const double txx = T[0][0], txy = T[0][1], tyx = T[1][0], tyy = T[1][1];
  const double mxx = txx * (txx * sxx + txy * sxy) + txy * (txx * sxy + txy * syy);
  const double myy = tyx * (tyx * sxx + tyy * sxy) + tyy * (tyx * sxy + tyy * syy);
  const double mxy = tyx * (txx * sxx + txy * sxy) + tyy * (txx * sxy + txy * syy);

  const double mean = 0.5 * (mxx + myy);
  const double half_diff = 0.5 * (mxx - myy);
  const double radius = std::hypot(half_diff, mxy);
  const double l1 = mean + radius;
  const double l2 = mean - radius;
  const double phi = 0.5 * std::atan2(2.0 * mxy, mxx - myy);
  return ConvexBody2D::ellipse(std::sqrt(l1), std::sqrt(l2), phi);
}

/// |dK| / (2 pi) >= (as(K) / (2 pi))^{3/2}, equality only for disks.
inline InequalityVerdict isoperimetric_check(const ConvexBody2D& K, const CircleGrid& grid,
                                             const Tolerances& tol = {}) {
  const BodyFunctionals fn = body_functionals(K, grid);
  const double lhs = fn.boundary_length / kTwoPi;
  const double rhs = std::pow(fn.affine_surface_area / kTwoPi, 1.5);
  InequalityVerdict v = make_verdict("isoperimetric", lhs, rhs, Relation::ge, tol);
  const BodySamples s = body_eval(K, grid);
  v.diagnosis = EqualityDiagnosis{"f_K constant (K is a disk)",
                                  detail::same_values(s.curvature, std::vector<double>(
                                                                       s.curvature.size(),
                                                                       s.curvature.front()),
                                                      1e-12),
                                  std::nullopt};
  return v;
}

}  // namespace mixdiv::geometry

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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mixdiv/f_family.hpp"
#include "mixdiv/random.hpp"

using namespace mixdiv;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(FFunction, BuiltinValues) {
  EXPECT_DOUBLE_EQ(FFunction::total_variation()(3.0), 2.0);
  EXPECT_DOUBLE_EQ(FFunction::kl_plus()(0.5), 0.0);
  EXPECT_DOUBLE_EQ(FFunction::kl_plus()(std::exp(1.0)), std::exp(1.0));
  EXPECT_DOUBLE_EQ(FFunction::power(0.5)(4.0), 2.0);
  EXPECT_DOUBLE_EQ(FFunction::linear(2.0, 3.0)(5.0), 13.0);
  EXPECT_DOUBLE_EQ(FFunction::scaled(2.5, FFunction::power(2.0))(2.0), 10.0);
}

TEST(FFunction, RejectsNonPositiveArgument) {
  EXPECT_THROW(FFunction::power(2.0)(0.0), Error);
  EXPECT_THROW(FFunction::power(2.0)(-1.0), Error);
}

TEST(FFunction, RejectsInvalidParameters) {
  EXPECT_THROW(FFunction::linear(-1.0, 1.0), Error);
  EXPECT_THROW(FFunction::scaled(-0.5, FFunction::total_variation()), Error);
  EXPECT_THROW(FFunction::power(std::nan("")), Error);
}

TEST(FFunction, ConvexityTags) {
  EXPECT_EQ(FFunction::power(2.0).convexity(), Convexity::strictly_convex);
  EXPECT_EQ(FFunction::power(-0.5).convexity(), Convexity::strictly_convex);
  EXPECT_EQ(FFunction::power(0.5).convexity(), Convexity::strictly_concave);
  EXPECT_EQ(FFunction::power(1.0).convexity(), Convexity::linear);
  EXPECT_EQ(FFunction::power(0.0).convexity(), Convexity::linear);
  EXPECT_EQ(FFunction::total_variation().convexity(), Convexity::convex);
  EXPECT_EQ(FFunction::kl_plus().convexity(), Convexity::convex);
  EXPECT_EQ(FFunction::scaled(0.0, FFunction::power(2.0)).convexity(), Convexity::linear);
  EXPECT_TRUE(is_convex(Convexity::linear));
  EXPECT_TRUE(is_concave(Convexity::linear));
  EXPECT_FALSE(is_strict(Convexity::linear));
}

TEST(FFunction, BoundaryLimits) {
  const FFunction p2 = FFunction::power(2.0);
  EXPECT_EQ(p2.limit_at_zero(), 0.0);
  EXPECT_EQ(p2.slope_at_infinity(), kInf);
  const FFunction pm = FFunction::power(-1.0);
  EXPECT_EQ(pm.limit_at_zero(), kInf);
  EXPECT_EQ(pm.slope_at_infinity(), 0.0);
  const FFunction tv = FFunction::total_variation();
  EXPECT_EQ(tv.limit_at_zero(), 1.0);
  EXPECT_EQ(tv.slope_at_infinity(), 1.0);
  const FFunction lin = FFunction::linear(2.0, 3.0);
  EXPECT_EQ(lin.limit_at_zero(), 3.0);
  EXPECT_EQ(lin.slope_at_infinity(), 2.0);
  const FFunction zero = FFunction::scaled(0.0, FFunction::power(-1.0));
  EXPECT_EQ(zero.limit_at_zero(), 0.0);
}

TEST(Adjoint, ClosedForms) {
  EXPECT_TRUE(std::holds_alternative<variant::TotalVariation>(adjoint(FFunction::total_variation()).kind()));
  const auto* pw = std::get_if<variant::Power>(&adjoint(FFunction::power(2.5)).kind());
  ASSERT_NE(pw, nullptr);
  EXPECT_DOUBLE_EQ(pw->alpha, -1.5);
  const auto* lin = std::get_if<variant::Linear>(&adjoint(FFunction::linear(2.0, 7.0)).kind());
  ASSERT_NE(lin, nullptr);
  EXPECT_DOUBLE_EQ(lin->a, 7.0);
  EXPECT_DOUBLE_EQ(lin->b, 2.0);
}

TEST(Adjoint, IsAnInvolutionPointwise) {
  const FFunction fs[] = {FFunction::kl_plus(), FFunction::power(1.7), FFunction::total_variation(),
                          FFunction::scaled(2.0, FFunction::kl_plus()),
                          FFunction::adjoint_of(FFunction::power(0.3))};
  for (const FFunction& f : fs) {
    const FFunction g = adjoint(adjoint(f));
    for (double t : {0.1, 0.7, 1.0, 2.3, 40.0}) {
      EXPECT_NEAR(g(t), f(t), 1e-13 * (1.0 + std::abs(f(t)))) << f.describe() << " t=" << t;
      EXPECT_NEAR(adjoint(f)(t), t * f(1.0 / t), 1e-13 * (1.0 + std::abs(f(t)))) << f.describe();
    }
  }
}

TEST(Adjoint, SwapsBoundaryLimits) {
  const FFunction f = adjoint(FFunction::kl_plus());
  EXPECT_EQ(f.limit_at_zero(), kInf);
  EXPECT_EQ(f.slope_at_infinity(), 0.0);
  EXPECT_EQ(f.convexity(), Convexity::convex);
  EXPECT_EQ(f.value_at_one(), 0.0);
}

TEST(WeightedTerm, Conventions) {
  const FFunction tv = FFunction::total_variation();
  EXPECT_DOUBLE_EQ(weighted_term(tv, 0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(weighted_term(tv, 0.3, 0.0), 0.3);  // p * slope
  EXPECT_DOUBLE_EQ(weighted_term(tv, 0.0, 0.4), 0.4);  // q * f(0+)
  EXPECT_DOUBLE_EQ(weighted_term(tv, 0.2, 0.4), 0.2);
  EXPECT_DOUBLE_EQ(weighted_term(FFunction::kl_plus(), 0.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(weighted_term(FFunction::power(-1.0), 0.5, 0.0), 0.0);
}

TEST(WeightedTerm, InfiniteLimitsAreIndeterminate) {
  try {
    weighted_term(FFunction::kl_plus(), 0.5, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndeterminateValue);
  }
  EXPECT_THROW(weighted_term(FFunction::power(-1.0), 0.0, 0.5), Error);
}

TEST(FSpec, BuildsNestedGenerators) {
  FSpec inner{.kind = "power", .alpha = 0.5};
  FSpec outer{.kind = "scaled", .lambda = 3.0, .inner = std::make_shared<FSpec>(inner)};
  const FFunction f = make_builtin(outer);
  EXPECT_DOUBLE_EQ(f(4.0), 6.0);
  EXPECT_THROW(make_builtin(FSpec{.kind = "nope"}), Error);
}

namespace {

std::vector<FFunction> every_builtin() {
  std::vector<FFunction> out = {FFunction::total_variation(), FFunction::kl_plus(),
                                FFunction::linear(0.7, 1.3),  FFunction::linear(0.0, 2.0)};
  for (double a : {-1.5, -0.5, 0.0, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0}) out.push_back(FFunction::power(a));
  const std::size_t base = out.size();
  for (std::size_t i = 0; i < base; ++i) {
    out.push_back(FFunction::adjoint_of(out[i]));
    out.push_back(FFunction::scaled(2.5, out[i]));
  }
  return out;
}

std::vector<double> log_grid() {
  std::vector<double> ts;
  for (int e = -60; e <= 60; ++e) ts.push_back(std::pow(10.0, e / 10.0));
  return ts;
}

}  // namespace

TEST(Adjoint, EvaluationIdentityOnLogGrid) {
  for (const FFunction& f : every_builtin()) {
    const FFunction g = adjoint(f);
    const FFunction gg = adjoint(g);
    for (double t : log_grid()) {
      const double want = t * f(1.0 / t);
      EXPECT_LE(std::abs(g(t) - want), 1e-12 * (1.0 + std::abs(want))) << f.describe() << " t=" << t;
      EXPECT_LE(std::abs(gg(t) - f(t)), 1e-12 * (1.0 + std::abs(f(t)))) << f.describe() << " t=" << t;
    }
  }
}

TEST(FFunction, TagsAreSound) {
  random::Rng rng(17);
  for (const FFunction& f : every_builtin()) {
    const Convexity c = f.convexity();
    for (int r = 0; r < 1000; ++r) {
      const double lam = rng.uniform();
      const double x = std::exp(rng.uniform(-4.0, 4.0));
      const double y = std::exp(rng.uniform(-4.0, 4.0));
      const double mid = f(lam * x + (1 - lam) * y);
      const double chord = lam * f(x) + (1 - lam) * f(y);
      const double slack = 1e-12 * (1.0 + std::abs(chord));
      if (is_convex(c)) {
        EXPECT_LE(mid, chord + slack) << f.describe();
      }
      if (is_concave(c)) {
        EXPECT_GE(mid, chord - slack) << f.describe();
      }
    }
  }
}

// For concave f the perspective y f(x/y) is concave, and so is its
// power k/n <= 1.
TEST(FFunction, MixedTermIsConcaveForConcaveGenerators) {
  random::Rng rng(23);
  const FFunction fs[] = {FFunction::power(0.4), FFunction::linear(1.0, 0.5),
                          FFunction::scaled(2.0, FFunction::power(0.8))};
  for (const FFunction& f : fs) {
    for (int n = 1; n <= 4; ++n) {
      for (int k = 1; k <= n; ++k) {
        const double e = static_cast<double>(k) / n;
        auto term = [&](double x, double y) { return std::pow(y * f(x / y), e); };
        for (int r = 0; r < 1000; ++r) {
          const double lam = rng.uniform();
          const double x1 = rng.uniform(1e-3, 10.0), y1 = rng.uniform(1e-3, 10.0);
          const double x2 = rng.uniform(1e-3, 10.0), y2 = rng.uniform(1e-3, 10.0);
          const double mid = term(lam * x1 + (1 - lam) * x2, lam * y1 + (1 - lam) * y2);
          const double chord = lam * term(x1, y1) + (1 - lam) * term(x2, y2);
          EXPECT_GE(mid, chord - 1e-12 * (1.0 + chord)) << f.describe() << " k/n=" << e;
        }
      }
    }
  }
}

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mixdiv/divergence_engine.hpp"
#include "mixdiv/random.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace mixdiv;
using testing_support::rel_err;

namespace {

const MeasureSpace kTwo = MeasureSpace::counting(2);
const Density kP({0.5, 0.5});
const Density kQ({0.25, 0.75});

DensityBundle bundle(std::vector<Density> d) { return DensityBundle(kTwo, std::move(d)); }

}  // namespace

TEST(Classical, TwoAtomTotalVariation) {
  const auto r = classical_f_divergence(FFunction::total_variation(), kP, kQ, kTwo);
  EXPECT_NEAR(r.value, 0.5, 1e-15);
  ASSERT_EQ(r.integrand.size(), 2u);
  EXPECT_EQ(r.convention_hits, 0u);
}

TEST(Classical, EqualDensitiesGiveValueAtOne) {
  const FFunction f = FFunction::linear(2.0, 0.5);
  EXPECT_NEAR(classical_f_divergence(f, kQ, kQ, kTwo).value, 2.5, 1e-15);
}

TEST(Classical, ZeroAtomsUseConventions) {
  const Density p({1.0, 0.0});
  const Density q({0.0, 1.0});
  const auto r = classical_f_divergence(FFunction::total_variation(), p, q, kTwo);
  EXPECT_DOUBLE_EQ(r.value, 2.0);
  EXPECT_EQ(r.convention_hits, 2u);
  EXPECT_THROW(classical_f_divergence(FFunction::kl_plus(), p, q, kTwo), Error);
}

TEST(Classical, RejectsUnnormalizedInput) {
  try {
    classical_f_divergence(FFunction::total_variation(), Density({0.45, 0.45}), kQ, kTwo);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NormalizationFailure);
    EXPECT_EQ(e.field(), "p");
  }
}

TEST(Mixed, TwoSlotPowerExampleMatchesFrozenOracle) {
  // Reference value from a 30-digit offline evaluation.
  const FVector fv(2, FFunction::power(2.0));
  const auto r = mixed_f_divergence(fv, bundle({kP, kQ}), bundle({kQ, kP}));
  EXPECT_NEAR(r.value, 0.965925826289068286749743199729, 1e-15);
}

TEST(Mixed, IdenticalPairsGiveProductOfValuesAtOne) {
  const FVector fv = {FFunction::linear(1.0, 3.0), FFunction::power(0.5), FFunction::linear(0.5, 0.5)};
  const auto P = bundle({kQ, kQ, kQ});
  EXPECT_NEAR(mixed_f_divergence(fv, P, P).value, std::cbrt(4.0), 1e-14);
}

TEST(Mixed, CollapsesToClassicalForRepeatedSlot) {
  const FFunction f = FFunction::power(1.7);
  const FVector fv(3, f);
  const auto P = bundle({kP, kP, kP});
  const auto Q = bundle({kQ, kQ, kQ});
  EXPECT_NEAR(mixed_f_divergence(fv, P, Q).value, classical_f_divergence(f, kP, kQ, kTwo).value,
              1e-14);
}

TEST(Mixed, RejectsMismatchedShapes) {
  const FVector fv(2, FFunction::power(2.0));
  EXPECT_THROW(mixed_f_divergence(fv, bundle({kP}), bundle({kQ})), Error);
  const DensityBundle other(MeasureSpace::make({0.5, 1.5}), {Density({1.0, 1.0 / 3.0}), Density({1.0, 1.0 / 3.0})});
  EXPECT_THROW(mixed_f_divergence(fv, bundle({kP, kQ}), other), Error);
}

TEST(KForm, EndpointsMatchDefinitions) {
  const FVector fv = {FFunction::kl_plus(), FFunction::power(2.5)};
  const auto P = bundle({kP, kQ});
  const auto Q = bundle({kQ, kP});
  const double d = mixed_f_divergence(fv, P, Q).value;
  EXPECT_DOUBLE_EQ(mixed_k_form(fv, P, Q, 2).value, d);
  EXPECT_NEAR(mixed_k_form(fv, P, Q, 0).value, mixed_f_divergence(adjoint(fv), Q, P).value, 1e-15);
  EXPECT_NEAR(mixed_k_form(fv, P, Q, 1).value, d, 1e-14);
  EXPECT_THROW(mixed_k_form(fv, P, Q, 3), Error);
}

TEST(KForm, ChangeOfOrderOnRandomInstances) {
  random::Rng rng(2024);
  for (int t = 0; t < 100; ++t) {
    const auto x = testing_support::random_instance(rng, 1, 5, 2, 20);
    const auto P = x.P();
    const auto Q = x.Q();
    const double d = mixed_f_divergence(x.fv, P, Q).value;
    for (std::size_t k = 0; k <= x.n(); ++k) {
      EXPECT_LE(std::abs(mixed_k_form(x.fv, P, Q, k).value - d), 1e-12 * std::abs(d)) << t;
    }
  }
}

TEST(Mixed, PermutationAndSymmetryOnRandomInstances) {
  random::Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    auto x = testing_support::random_instance(rng, 2, 5, 2, 20);
    const double d = mixed_f_divergence(x.fv, x.P(), x.Q()).value;
    std::vector<std::size_t> perm(x.n());
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[0], perm[perm.size() / 2]);
    auto y = x;
    for (std::size_t i = 0; i < x.n(); ++i) {
      y.fv[i] = x.fv[perm[i]];
      y.p[i] = x.p[perm[i]];
      y.q[i] = x.q[perm[i]];
    }
    EXPECT_LE(std::abs(mixed_f_divergence(y.fv, y.P(), y.Q()).value - d), 1e-12 * std::abs(d));
    EXPECT_LE(std::abs(mixed_f_divergence(adjoint(x.fv), x.Q(), x.P()).value - d),
              1e-12 * std::abs(d));
  }
}

TEST(Oracle, SmallInstancesAgreeWithDirectSummation) {
  random::Rng rng(5);
  for (int t = 0; t < 300; ++t) {
    const auto x = testing_support::random_instance(rng, 1, 3, 2, 4, /*positive=*/true);
    const auto mu = x.mu();
    const double want = oracle::mixed(x.ref, x.p, x.q, mu);
    EXPECT_LE(rel_err(mixed_f_divergence(x.fv, x.P(), x.Q()).value, want), 1e-13);
    for (std::size_t k = 0; k <= x.n(); ++k) {
      EXPECT_LE(rel_err(mixed_k_form(x.fv, x.P(), x.Q(), k).value,
                        oracle::k_form(x.ref, x.p, x.q, mu, k)),
                1e-13);
    }
  }
}

TEST(IthMixed, EndpointsAreClassical) {
  const FFunction f1 = FFunction::power(2.0);
  const FFunction f2 = FFunction::power(0.5);
  const Density r({0.7, 0.3});
  const double d1 = classical_f_divergence(f1, kP, kQ, kTwo).value;
  const double d2 = classical_f_divergence(f2, kQ, r, kTwo).value;
  EXPECT_NEAR(ith_mixed(f1, f2, kP, kQ, kQ, r, 0.0, 3, kTwo).value, d2, 1e-15);
  EXPECT_NEAR(ith_mixed(f1, f2, kP, kQ, kQ, r, 3.0, 3, kTwo).value, d1, 1e-15);
  const double want = oracle::ith([](double t) { return t * t; }, [](double t) { return std::sqrt(t); },
                                  {0.5, 0.5}, {0.25, 0.75}, {0.25, 0.75}, {0.7, 0.3}, {1.0, 1.0},
                                  -1.3, 3.0);
  EXPECT_LE(rel_err(ith_mixed(f1, f2, kP, kQ, kQ, r, -1.3, 3, kTwo).value, want), 1e-14);
}

TEST(IthMixed, ReferenceFormNeedsProbabilitySpace) {
  const FFunction f = FFunction::power(0.5);
  EXPECT_THROW(ith_mixed_reference(f, kP, kQ, 1.0, f, 2, kTwo), Error);
  const MeasureSpace s = MeasureSpace::make({0.5, 0.5});
  const Density p({1.0, 1.0});
  const Density q({0.5, 1.5});
  const FFunction g = FFunction::linear(1.0, 2.0);
  EXPECT_NEAR(ith_mixed_reference(f, p, q, 0.0, g, 2, s).value, 3.0, 1e-15);
  EXPECT_NEAR(ith_mixed_reference(f, p, q, 2.0, g, 2, s).value,
              classical_f_divergence(f, p, q, s).value, 1e-15);
  // Matches the general form with P2 = Q2 = unit density.
  const Density unit = Density::unit(2);
  EXPECT_NEAR(ith_mixed_reference(f, p, q, 0.7, g, 2, s).value,
              ith_mixed(f, g, p, q, unit, unit, 0.7, 2, s).value, 1e-15);
}

TEST(Named, Examples) {
  const auto P1 = bundle({kP});
  const auto Q1 = bundle({kQ});
  EXPECT_NEAR(named_divergence(NamedFamily::mixed_tv, {}, P1, Q1).value, 0.5, 1e-15);
  const auto P = bundle({kQ, kQ, kQ});
  EXPECT_NEAR(named_divergence(NamedFamily::bhattacharyya, {}, P, P).value, 1.0, 1e-15);
  EXPECT_NEAR(named_divergence(NamedFamily::mixed_renyi, {.alpha = 0.3}, P, P).value, 0.0, 1e-15);
  EXPECT_THROW(named_divergence(NamedFamily::mixed_renyi, {.alpha = 1.0}, P, P), Error);
  EXPECT_THROW(named_divergence(NamedFamily::mixed_hellinger, {.alphas = {0.5}}, P, P), Error);
  const auto h = named_divergence(NamedFamily::mixed_hellinger, {.alphas = {0.5, 0.5, 0.5}}, P, P);
  EXPECT_NEAR(h.value, 1.0, 1e-15);
}

TEST(Named, KlOrientations) {
  const auto P = bundle({kP});
  const auto Q = bundle({kQ});
  // f-generated: [p ln(p/q)]_+ -> only atom 0 contributes.
  const double fwd = 0.5 * std::log(2.0);
  // reversed: [p ln(q/p)]_+ -> only atom 1 contributes.
  const double rev = 0.5 * std::log(1.5);
  EXPECT_NEAR(named_divergence(NamedFamily::mixed_kl, {}, P, Q).value, fwd, 1e-15);
  EXPECT_NEAR(named_divergence(NamedFamily::mixed_kl, {.kl = KlOrientation::reversed}, P, Q).value,
              rev, 1e-15);
}

TEST(Mixed, StructuralIdentitiesOnRandomInstances) {
  random::Rng rng(313);
  for (int t = 0; t < 100; ++t) {
    const auto x = testing_support::random_instance(rng, 1, 5, 2, 30);
    const auto P = x.P();
    const auto Q = x.Q();
    const FVector adj = adjoint(x.fv);
    const double d = mixed_f_divergence(x.fv, P, Q).value;
    EXPECT_TRUE(std::isfinite(d));
    EXPECT_GE(d, 0.0);

    // symmetry in distributions
    const double lhs = d + mixed_f_divergence(adj, P, Q).value;
    const double rhs = mixed_f_divergence(x.fv, Q, P).value + mixed_f_divergence(adj, Q, P).value;
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(rhs)) << t;

    // replacing one triple by its adjoint triple
    const std::size_t i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(x.n()) - 1));
    auto y = x;
    y.fv[i] = adj[i];
    std::swap(y.p[i], y.q[i]);
    EXPECT_LE(std::abs(mixed_f_divergence(y.fv, y.P(), y.Q()).value - d), 1e-12 * std::abs(d)) << t;
  }
}

TEST(Named, RenyiIsLogOfHellinger) {
  random::Rng rng(29);
  for (int t = 0; t < 50; ++t) {
    const auto x = testing_support::random_instance(rng, 1, 4, 2, 20);
    const double a = rng.uniform(0.1, 3.0);
    if (std::abs(a - 1.0) < 1e-3) continue;
    const double r = named_divergence(NamedFamily::mixed_renyi, {.alpha = a}, x.P(), x.Q()).value;
    const double h = named_divergence(NamedFamily::mixed_hellinger,
                                      {.alphas = std::vector<double>(x.n(), a)}, x.P(), x.Q()).value;
    EXPECT_LE(rel_err(std::exp((a - 1.0) * r), h), 1e-12);
  }
}

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

// Shared fixtures: generator descriptions that can be realised both as
// library objects and as independent oracle callables.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mixdiv/f_family.hpp"
#include "mixdiv/measure_space.hpp"
#include "mixdiv/random.hpp"
#include "oracle.hpp"

namespace testing_support {

struct GenSpec {
  enum Kind { tv, klplus, power, linear } kind = power;
  double alpha = 2.0;
  double a = 1.0;
  double b = 1.0;
  double lambda = 1.0;
  bool adjoint = false;

  mixdiv::FFunction library() const {
    using mixdiv::FFunction;
    FFunction f = [&] {
      switch (kind) {
        case tv: return FFunction::total_variation();
        case klplus: return FFunction::kl_plus();
        case linear: return FFunction::linear(a, b);
        default: return FFunction::power(alpha);
      }
    }();
    if (adjoint) f = FFunction::adjoint_of(std::move(f));
    if (lambda != 1.0) f = FFunction::scaled(lambda, std::move(f));
    return f;
  }

  oracle::Fn reference() const {
    oracle::Fn f;
    switch (kind) {
      case tv: f = [](double t) { return std::fabs(t - 1.0); }; break;
      case klplus: f = [](double t) { return t > 1.0 ? t * std::log(t) : 0.0; }; break;
      case linear: f = [a = a, b = b](double t) { return a * t + b; }; break;
      default: f = [al = alpha](double t) { return std::pow(t, al); }; break;
    }
    if (adjoint) f = oracle::adjoint(f);
    const double lam = lambda;
    return [f, lam](double t) { return lam * f(t); };
  }
};

/// Draws from every builtin family. With `positive` the generator is
/// strictly positive on (0, inf).
inline GenSpec random_spec(mixdiv::random::Rng& rng, bool positive = false) {
  GenSpec g;
  const int pick = positive ? 2 + rng.integer(0, 1) : rng.integer(0, 3);
  g.kind = static_cast<GenSpec::Kind>(pick);
  g.alpha = rng.uniform(-1.0, 3.0);
  g.a = rng.uniform(0.1, 2.0);
  g.b = rng.uniform(0.1, 2.0);
  g.lambda = rng.coin() ? 1.0 : rng.uniform(0.2, 3.0);
  g.adjoint = rng.coin();
  return g;
}

struct Instance {
  mixdiv::MeasureSpace space;
  std::vector<GenSpec> specs;
  mixdiv::FVector fv;
  std::vector<oracle::Fn> ref;
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> q;

  mixdiv::DensityBundle bundle(const std::vector<std::vector<double>>& v) const {
    std::vector<mixdiv::Density> d;
    for (const auto& x : v) d.emplace_back(x);
    return mixdiv::DensityBundle(space, std::move(d));
  }
  mixdiv::DensityBundle P() const { return bundle(p); }
  mixdiv::DensityBundle Q() const { return bundle(q); }
  std::vector<double> mu() const { return {space.weights().begin(), space.weights().end()}; }
  std::size_t n() const { return fv.size(); }
};

inline std::vector<double> values(const mixdiv::Density& d) {
  return {d.values().begin(), d.values().end()};
}

inline Instance random_instance(mixdiv::random::Rng& rng, int min_n, int max_n, int min_atoms,
                                int max_atoms, bool positive = false) {
  const int n = rng.integer(min_n, max_n);
  const int atoms = rng.integer(min_atoms, max_atoms);
  Instance x{mixdiv::random::random_space(rng, static_cast<std::size_t>(atoms)), {}, {}, {}, {}, {}};
  for (int i = 0; i < n; ++i) {
    GenSpec g = random_spec(rng, positive);
    x.fv.push_back(g.library());
    x.ref.push_back(g.reference());
    x.specs.push_back(g);
    x.p.push_back(values(mixdiv::random::random_density(rng, x.space)));
    x.q.push_back(values(mixdiv::random::random_density(rng, x.space)));
  }
  return x;
}

inline double rel_err(double got, double want) {
  if (got == want) return 0.0;
  return std::fabs(got - want) / std::fabs(want);
}

}  // namespace testing_support

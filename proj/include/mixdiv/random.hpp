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

// Seeded random instances: spaces, strictly positive densities and
// generators drawn from a requested convexity class.
//
// Uniform variates are built from raw 64-bit engine output rather than
// std::uniform_real_distribution so that streams are identical across
// standard library implementations.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "mixdiv/f_family.hpp"
#include "mixdiv/measure_space.hpp"

namespace mixdiv::random {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for trial `t` of a run seeded with `seed`; independent of the order
/// in which trials execute.
inline constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  bool coin() { return (engine_() >> 63) != 0; }
  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
};

/// Weights uniform in [0.5, 2), optionally rescaled to total mass 1.
inline MeasureSpace random_space(Rng& rng, std::size_t atoms, bool probability = false) {
  std::vector<double> w(atoms);
  double total = 0.0;
  for (double& x : w) {
    x = rng.uniform(0.5, 2.0);
    total += x;
  }
  if (probability) {
    for (double& x : w) x /= total;
  }
  return MeasureSpace::make(std::move(w));
}

/// Exponential draws per atom, normalized to unit mass: strictly positive
/// with full support.
inline Density random_density(Rng& rng, const MeasureSpace& s) {
  std::vector<double> v(s.size());
  double m = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = rng.exponential();
    m += v[j] * s.weight(j);
  }
  for (double& x : v) x /= m;
  return Density(std::move(v));
}

enum class GenClass {
  any,               ///< every builtin variant, including vanishing ones
  convex,            ///< convex, may vanish (tv, klplus, ...)
  concave,
  strictly_convex,
  strictly_concave,
  positive_convex,   ///< convex and strictly positive on (0, inf)
  positive_concave,
  positive_any,
};

namespace detail {

inline FFunction maybe_scale(Rng& rng, FFunction f) {
  if (rng.integer(0, 3) == 0) return FFunction::scaled(rng.uniform(0.2, 3.0), std::move(f));
  return f;
}

inline FFunction positive_linear(Rng& rng) {
  return FFunction::linear(rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0));
}

inline FFunction strictly_convex_power(Rng& rng) {
  return rng.coin() ? FFunction::power(rng.uniform(1.05, 3.0))
                    : FFunction::power(rng.uniform(-1.0, -0.05));
}

inline FFunction strictly_concave_power(Rng& rng) {
  return FFunction::power(rng.uniform(0.05, 0.95));
}

}  // namespace detail

inline FFunction random_generator(Rng& rng, GenClass c) {
  using detail::maybe_scale;
  switch (c) {
    case GenClass::strictly_convex:
      return maybe_scale(rng, detail::strictly_convex_power(rng));
    case GenClass::strictly_concave:
      return maybe_scale(rng, detail::strictly_concave_power(rng));
    case GenClass::positive_convex:
      return maybe_scale(rng, rng.integer(0, 3) == 0 ? detail::positive_linear(rng)
                                                     : detail::strictly_convex_power(rng));
    case GenClass::positive_concave:
      return maybe_scale(rng, rng.integer(0, 3) == 0 ? detail::positive_linear(rng)
                                                     : detail::strictly_concave_power(rng));
    case GenClass::positive_any:
      return rng.coin() ? random_generator(rng, GenClass::positive_convex)
                        : random_generator(rng, GenClass::positive_concave);
    case GenClass::convex:
      switch (rng.integer(0, 4)) {
        case 0: return maybe_scale(rng, FFunction::total_variation());
        case 1: return maybe_scale(rng, FFunction::kl_plus());
        case 2: return maybe_scale(rng, adjoint(FFunction::kl_plus()));
        case 3: return maybe_scale(rng, detail::positive_linear(rng));
        default: return maybe_scale(rng, detail::strictly_convex_power(rng));
      }
    case GenClass::concave:
      return random_generator(rng, GenClass::positive_concave);
    case GenClass::any:
      switch (rng.integer(0, 5)) {
        case 0: return maybe_scale(rng, FFunction::total_variation());
        case 1: return maybe_scale(rng, FFunction::kl_plus());
        case 2: return maybe_scale(rng, adjoint(FFunction::kl_plus()));
        case 3: return maybe_scale(rng, detail::positive_linear(rng));
        case 4: return maybe_scale(rng, FFunction::power(rng.uniform(-1.0, 3.0)));
        default: return maybe_scale(rng, adjoint(FFunction::power(rng.uniform(-1.0, 3.0))));
      }
  }
  return FFunction::total_variation();
}

inline FVector random_generators(Rng& rng, GenClass c, std::size_t n) {
  FVector fv;
  fv.reserve(n);
  for (std::size_t i = 0; i < n; ++i) fv.push_back(random_generator(rng, c));
  return fv;
}

}  // namespace mixdiv::random

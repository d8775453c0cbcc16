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

// Classical, mixed, reordered (k-form), i-th mixed and named divergences
// over a finite measure space.
//
// Every functional here is an integral of a per-atom product
//   prod_i [ w_i ]^{e_i},   w_i = q_i f_i(p_i / q_i),
// so they all share integrate_slots() and power_product().

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixdiv/error.hpp"
#include "mixdiv/f_family.hpp"
#include "mixdiv/measure_space.hpp"

namespace mixdiv {

struct DivergenceReport {
  double value = 0.0;
  std::vector<double> integrand;     ///< per-atom value of the product inside the integral
  std::size_t convention_hits = 0;   ///< atoms where some p or q was zero
};

namespace detail {

/// prod_i base_i^{exp_i}. Log-space when every base exceeds 1e-300, direct
/// powers otherwise; a zero base keeps an exact zero (or 1 under exponent 0).
inline double power_product(std::span<const double> bases, std::span<const double> exps) {
  bool all_large = true;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (bases[i] == 0.0 && exps[i] < 0.0) {
      std::ostringstream os;
      os << "factor " << i << " is zero under exponent " << exps[i];
      fail(ErrorKind::DegenerateExponent, os.str());
    }
    if (!(bases[i] > 1e-300)) all_large = false;
  }
  if (all_large) {
    double log_sum = 0.0;
    for (std::size_t i = 0; i < bases.size(); ++i) log_sum += exps[i] * std::log(bases[i]);
    return std::exp(log_sum);
  }
  double prod = 1.0;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (exps[i] == 0.0) continue;
    prod *= std::pow(bases[i], exps[i]);
  }
  return prod;
}

/// One (generator, numerator density, denominator density) slot.
struct Slot {
  const FFunction* f;
  const Density* num;
  const Density* den;
  double exponent;
};

inline DivergenceReport integrate_slots(std::span<const Slot> slots, const MeasureSpace& s) {
  DivergenceReport rep;
  rep.integrand.resize(s.size());
  std::vector<double> bases(slots.size());
  std::vector<double> exps(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) exps[i] = slots[i].exponent;

  for (std::size_t j = 0; j < s.size(); ++j) {
    bool hit = false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const double p = (*slots[i].num)[j];
      const double q = (*slots[i].den)[j];
      if (p == 0.0 || q == 0.0) hit = true;
      try {
        bases[i] = weighted_term(*slots[i].f, p, q);
      } catch (const Error& e) {
        throw e.with_field("atom[" + std::to_string(j) + "]");
      }
    }
    if (hit) ++rep.convention_hits;
    try {
      rep.integrand[j] = power_product(bases, exps);
    } catch (const Error& e) {
      throw e.with_field("atom[" + std::to_string(j) + "]");
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) total += rep.integrand[j] * s.weight(j);
  rep.value = total;
  return rep;
}

inline void require_pair(const Density& p, const Density& q, const MeasureSpace& s,
                         std::string_view pname, std::string_view qname) {
  for (auto [d, name] : {std::pair{&p, pname}, std::pair{&q, qname}}) {
    if (d->size() != s.size()) {
      std::ostringstream os;
      os << name << " has " << d->size() << " values, space has " << s.size() << " atoms";
      fail(ErrorKind::SpaceMismatch, os.str());
    }
    try {
      require_density(*d, s, kProbability);
    } catch (const Error& e) {
      throw e.with_field(std::string(name));
    }
  }
}

inline void require_bundles(const FVector& fv, const DensityBundle& P, const DensityBundle& Q) {
  if (!(P.space() == Q.space())) {
    fail(ErrorKind::SpaceMismatch, "P and Q bundles live on different spaces");
  }
  if (fv.size() != P.size() || P.size() != Q.size()) {
    std::ostringstream os;
    os << "lengths differ: " << fv.size() << " generators, " << P.size() << " P densities, "
       << Q.size() << " Q densities";
    fail(ErrorKind::LengthMismatch, os.str());
  }
  try {
    P.require(kProbability);
  } catch (const Error& e) {
    throw e.with_field("P");
  }
  try {
    Q.require(kProbability);
  } catch (const Error& e) {
    throw e.with_field("Q");
  }
}

}  // namespace detail

/// D_f(P, Q) = sum_j q_j f(p_j / q_j) mu_j.
inline DivergenceReport classical_f_divergence(const FFunction& f, const Density& p,
                                               const Density& q, const MeasureSpace& s) {
  detail::require_pair(p, q, s, "p", "q");
  const detail::Slot slot{&f, &p, &q, 1.0};
  return detail::integrate_slots(std::span(&slot, 1), s);
}

/// D_{fv}(P, Q) = sum_j prod_i [q_ij f_i(p_ij / q_ij)]^{1/n} mu_j.
inline DivergenceReport mixed_f_divergence(const FVector& fv, const DensityBundle& P,
                                           const DensityBundle& Q) {
  detail::require_bundles(fv, P, Q);
  const std::size_t n = fv.size();
  std::vector<detail::Slot> slots;
  slots.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    slots.push_back({&fv[i], &P[i], &Q[i], 1.0 / static_cast<double>(n)});
  }
  return detail::integrate_slots(slots, P.space());
}

/// The first k slots use (f_i, p_i, q_i); the remaining n - k use
/// (f_i*, q_i, p_i). Equal to mixed_f_divergence for every k.
inline DivergenceReport mixed_k_form(const FVector& fv, const DensityBundle& P,
                                     const DensityBundle& Q, std::size_t k) {
  detail::require_bundles(fv, P, Q);
  const std::size_t n = fv.size();
  if (k > n) {
    std::ostringstream os;
    os << "k = " << k << " outside 0.." << n;
    fail(ErrorKind::IndexOutOfRange, os.str());
  }
  const FVector adj = adjoint(fv);
  std::vector<detail::Slot> slots;
  slots.reserve(n);
  const double e = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < k) {
      slots.push_back({&fv[i], &P[i], &Q[i], e});
    } else {
      slots.push_back({&adj[i], &Q[i], &P[i], e});
    }
  }
  return detail::integrate_slots(slots, P.space());
}

/// i-th mixed divergence, i any real:
///   sum_j [w1_j]^{i/n} [w2_j]^{(n-i)/n} mu_j.
inline DivergenceReport ith_mixed(const FFunction& f1, const FFunction& f2, const Density& p1,
                                  const Density& q1, const Density& p2, const Density& q2,
                                  double i, int n, const MeasureSpace& s) {
  if (n < 1) fail(ErrorKind::InvalidParameter, "n must be a positive integer");
  if (!std::isfinite(i)) fail(ErrorKind::InvalidParameter, "i must be finite");
  detail::require_pair(p1, q1, s, "P1", "Q1");
  detail::require_pair(p2, q2, s, "P2", "Q2");
  const double nd = static_cast<double>(n);
  const detail::Slot slots[2] = {{&f1, &p1, &q1, i / nd}, {&f2, &p2, &q2, (nd - i) / nd}};
  return detail::integrate_slots(slots, s);
}

/// The i-th mixed divergence with P2 = Q2 = mu on a probability space:
///   f2(1)^{1 - i/n} sum_j [w1_j]^{i/n} mu_j.
inline DivergenceReport ith_mixed_reference(const FFunction& f1, const Density& p1,
                                            const Density& q1, double i, const FFunction& f2,
                                            int n, const MeasureSpace& s) {
  if (!(std::abs(s.total_mass() - 1.0) <= kTolNorm)) {
    std::ostringstream os;
    os.precision(17);
    os << "reference form needs total mass 1, space has " << s.total_mass();
    fail(ErrorKind::NotProbabilitySpace, os.str());
  }
  if (n < 1) fail(ErrorKind::InvalidParameter, "n must be a positive integer");
  if (!std::isfinite(i)) fail(ErrorKind::InvalidParameter, "i must be finite");
  detail::require_pair(p1, q1, s, "P1", "Q1");
  const double nd = static_cast<double>(n);
  const detail::Slot slot{&f1, &p1, &q1, i / nd};
  DivergenceReport rep = detail::integrate_slots(std::span(&slot, 1), s);

  const double exp2 = 1.0 - i / nd;
  const double f2_one = f2.value_at_one();
  if (f2_one == 0.0 && exp2 < 0.0) {
    fail(ErrorKind::DegenerateExponent, "f2(1) = 0 under a negative exponent");
  }
  const double scale = exp2 == 0.0 ? 1.0 : std::pow(f2_one, exp2);
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    rep.integrand[j] *= scale;
    total += rep.integrand[j] * s.weight(j);
  }
  rep.value = total;
  return rep;
}

enum class NamedFamily { mixed_tv, mixed_kl, mixed_hellinger, mixed_renyi, bhattacharyya };

/// Which way round the mixed KL integrand is taken. `f_generated` is
/// [p ln(p/q)]_+, the form generated by f(t) = [t ln t]_+. `reversed` is
/// [p ln(q/p)]_+.
enum class KlOrientation { f_generated, reversed };

struct NamedParams {
  std::vector<double> alphas;  ///< mixed_hellinger: one per pair
  double alpha = 0.5;          ///< mixed_renyi
  KlOrientation kl = KlOrientation::f_generated;
};

inline DivergenceReport named_divergence(NamedFamily family, const NamedParams& params,
                                         const DensityBundle& P, const DensityBundle& Q) {
  const std::size_t n = P.size();
  auto all = [n](const FFunction& f) { return FVector(n, f); };
  switch (family) {
    case NamedFamily::mixed_tv:
      return mixed_f_divergence(all(FFunction::total_variation()), P, Q);
    case NamedFamily::mixed_kl: {
      if (params.kl == KlOrientation::f_generated) {
        return mixed_f_divergence(all(FFunction::kl_plus()), P, Q);
      }
      // [p ln(q/p)]_+ is not q f(p/q) for any builtin f, so it is summed directly.
      detail::require_bundles(all(FFunction::kl_plus()), P, Q);
      DivergenceReport rep;
      const MeasureSpace& s = P.space();
      rep.integrand.resize(s.size());
      std::vector<double> bases(n);
      const std::vector<double> exps(n, 1.0 / static_cast<double>(n));
      for (std::size_t j = 0; j < s.size(); ++j) {
        bool hit = false;
        for (std::size_t i = 0; i < n; ++i) {
          const double p = P[i][j];
          const double q = Q[i][j];
          if (p == 0.0 || q == 0.0) hit = true;
          if (p == 0.0) {
            bases[i] = 0.0;
          } else if (q == 0.0) {
            bases[i] = 0.0;  // ln(0) -> -inf, clipped
          } else {
            const double v = p * std::log(q / p);
            bases[i] = v > 0.0 ? v : 0.0;
          }
        }
        if (hit) ++rep.convention_hits;
        rep.integrand[j] = detail::power_product(bases, exps);
      }
      double total = 0.0;
      for (std::size_t j = 0; j < s.size(); ++j) total += rep.integrand[j] * s.weight(j);
      rep.value = total;
      return rep;
    }
    case NamedFamily::mixed_hellinger: {
      if (params.alphas.size() != n) {
        std::ostringstream os;
        os << "mixed Hellinger needs " << n << " exponents, got " << params.alphas.size();
        fail(ErrorKind::LengthMismatch, os.str());
      }
      FVector fv;
      for (double a : params.alphas) fv.push_back(FFunction::power(a));
      return mixed_f_divergence(fv, P, Q);
    }
    case NamedFamily::mixed_renyi: {
      if (params.alpha == 1.0) fail(ErrorKind::RenyiUndefined, "Renyi divergence needs alpha != 1");
      DivergenceReport rep = mixed_f_divergence(all(FFunction::power(params.alpha)), P, Q);
      if (!(rep.value > 0.0)) fail(ErrorKind::LogOfZero, "Hellinger integral is zero");
      // integrand stays the Hellinger integrand; only the value is transformed.
      rep.value = std::log(rep.value) / (params.alpha - 1.0);
      return rep;
    }
    case NamedFamily::bhattacharyya:
      return mixed_f_divergence(all(FFunction::power(0.5)), P, Q);
  }
  fail(ErrorKind::InvalidParameter, "unknown named family");
}

}  // namespace mixdiv

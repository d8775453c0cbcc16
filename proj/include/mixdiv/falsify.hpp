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

// Randomized search for counterexamples.
//
// Trial t draws its instance from trial_seed(seed, t), so a run is fully
// determined by (inequality, seed, trials, config) whatever the thread
// count. The report keeps the trial with the smallest relative slack and
// re-derives its instance as the witness.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixdiv/convex_geometry.hpp"
#include "mixdiv/error.hpp"
#include "mixdiv/inequality_lab.hpp"
#include "mixdiv/io.hpp"
#include "mixdiv/random.hpp"

namespace mixdiv {

enum class InequalityId {
  af,
  jensen,
  concave_chain,
  interpolation,
  interpolation_endpoint,
  concave_band,
  convex_concave_high,
  concave_convex_low,
  reference_concave,
  reference_convex_high,
  reference_concave_low,
  isoperimetric,
};

inline constexpr InequalityId kAllInequalities[] = {
    InequalityId::af,
    InequalityId::jensen,
    InequalityId::concave_chain,
    InequalityId::interpolation,
    InequalityId::interpolation_endpoint,
    InequalityId::concave_band,
    InequalityId::convex_concave_high,
    InequalityId::concave_convex_low,
    InequalityId::reference_concave,
    InequalityId::reference_convex_high,
    InequalityId::reference_concave_low,
    InequalityId::isoperimetric,
};

constexpr std::string_view to_string(InequalityId id) noexcept {
  switch (id) {
    case InequalityId::af: return "af";
    case InequalityId::jensen: return "jensen";
    case InequalityId::concave_chain: return "concave_chain";
    case InequalityId::interpolation: return "interpolation";
    case InequalityId::interpolation_endpoint: return "interpolation_endpoint";
    case InequalityId::concave_band: return "concave_band";
    case InequalityId::convex_concave_high: return "convex_concave_high";
    case InequalityId::concave_convex_low: return "concave_convex_low";
    case InequalityId::reference_concave: return "reference_concave";
    case InequalityId::reference_convex_high: return "reference_convex_high";
    case InequalityId::reference_concave_low: return "reference_concave_low";
    case InequalityId::isoperimetric: return "isoperimetric";
  }
  return "unknown";
}

inline std::optional<InequalityId> inequality_from_string(std::string_view s) {
  for (InequalityId id : kAllInequalities) {
    if (to_string(id) == s) return id;
  }
  return std::nullopt;
}

struct FalsifyConfig {
  int max_atoms = 12;
  int max_n = 4;
  std::size_t grid_nodes = 256;
  unsigned threads = 1;  ///< 0 picks hardware concurrency
  Tolerances tol{};
};

struct FalsifyReport {
  std::string inequality;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t equalities = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double min_relative_slack = std::numeric_limits<double>::infinity();
  std::size_t witness_trial = 0;
  nlohmann::json witness;

  nlohmann::json to_json() const {
    return {{"inequality", inequality},
            {"seed", seed},
            {"trials", trials},
            {"violations", violations},
            {"equalities", equalities},
            {"min_slack", io::detail::finite_or_null(min_slack)},
            {"min_relative_slack", io::detail::finite_or_null(min_relative_slack)},
            {"witness_trial", witness_trial},
            {"witness", witness}};
  }
};

namespace detail {

struct TrialOutcome {
  double slack = 0.0;
  double relative_slack = 0.0;
  bool violated = false;
  bool equality = false;
};

inline TrialOutcome outcome_of(const InequalityVerdict& v) {
  return {v.slack, v.relative_slack(), !v.satisfied, v.equality};
}

inline nlohmann::json density_json(const Density& d) {
  return nlohmann::json(std::vector<double>(d.values().begin(), d.values().end()));
}

inline nlohmann::json space_json(const MeasureSpace& s) {
  return nlohmann::json(std::vector<double>(s.weights().begin(), s.weights().end()));
}

inline nlohmann::json bundle_json(const DensityBundle& b) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Density& d : b.densities()) arr.push_back(density_json(d));
  return arr;
}

inline nlohmann::json fvector_json(const FVector& fv) {
  nlohmann::json arr = nlohmann::json::array();
  for (const FFunction& f : fv) arr.push_back(io::f_to_json(f));
  return arr;
}

inline nlohmann::json two_pair_json(const TwoPairInstance& x) {
  return {{"weights", space_json(x.space)},   {"n", x.n},
          {"f1", io::f_to_json(x.f1)},         {"f2", io::f_to_json(x.f2)},
          {"P1", density_json(x.p1)},          {"Q1", density_json(x.q1)},
          {"P2", density_json(x.p2)},          {"Q2", density_json(x.q2)}};
}

inline std::pair<DensityBundle, DensityBundle> random_bundles(random::Rng& rng,
                                                              const MeasureSpace& s,
                                                              std::size_t n) {
  std::vector<Density> ps;
  std::vector<Density> qs;
  for (std::size_t i = 0; i < n; ++i) {
    ps.push_back(random::random_density(rng, s));
    qs.push_back(random::random_density(rng, s));
  }
  return {DensityBundle(s, std::move(ps)), DensityBundle(s, std::move(qs))};
}

inline TwoPairInstance random_two_pair(random::Rng& rng, const FalsifyConfig& cfg,
                                       random::GenClass c1, random::GenClass c2,
                                       bool probability_space) {
  const int atoms = rng.integer(2, std::max(2, cfg.max_atoms));
  const int n = rng.integer(1, std::max(1, cfg.max_n));
  MeasureSpace s = random::random_space(rng, static_cast<std::size_t>(atoms), probability_space);
  FFunction f1 = random::random_generator(rng, c1);
  FFunction f2 = random::random_generator(rng, c2);
  Density p1 = random::random_density(rng, s);
  Density q1 = random::random_density(rng, s);
  Density p2 = random::random_density(rng, s);
  Density q2 = random::random_density(rng, s);
  return TwoPairInstance{std::move(f1), std::move(f2), std::move(p1), std::move(q1),
                         std::move(p2), std::move(q2), std::move(s),  n};
}

inline TrialOutcome run_trial(InequalityId id, std::uint64_t seed, const FalsifyConfig& cfg,
                              nlohmann::json* witness) {
  using random::GenClass;
  random::Rng rng(seed);
  const Tolerances& tol = cfg.tol;

  switch (id) {
    case InequalityId::af: {
      const int atoms = rng.integer(2, std::max(2, cfg.max_atoms));
      const auto n = static_cast<std::size_t>(rng.integer(1, std::max(1, cfg.max_n)));
      const auto m = static_cast<std::size_t>(rng.integer(1, static_cast<int>(n)));
      const GenClass c = rng.coin() ? GenClass::convex : GenClass::concave;
      const MeasureSpace s = random::random_space(rng, static_cast<std::size_t>(atoms));
      const FVector fv = random::random_generators(rng, c, n);
      auto [P, Q] = random_bundles(rng, s, n);
      if (witness) {
        *witness = {{"weights", space_json(s)}, {"m", m},          {"f", fvector_json(fv)},
                    {"P", bundle_json(P)},       {"Q", bundle_json(Q)}};
      }
      return outcome_of(af_check(fv, P, Q, m, tol));
    }
    case InequalityId::jensen: {
      const int atoms = rng.integer(2, std::max(2, cfg.max_atoms));
      const MeasureSpace s = random::random_space(rng, static_cast<std::size_t>(atoms));
      const FFunction f =
          random::random_generator(rng, rng.coin() ? GenClass::convex : GenClass::concave);
      const Density p = random::random_density(rng, s);
      const Density q = random::random_density(rng, s);
      if (witness) {
        *witness = {{"weights", space_json(s)}, {"f", io::f_to_json(f)}, {"p", density_json(p)},
                    {"q", density_json(q)}};
      }
      return outcome_of(jensen_bound_check(f, p, q, s, tol));
    }
    case InequalityId::concave_chain: {
      const int atoms = rng.integer(2, std::max(2, cfg.max_atoms));
      const auto n = static_cast<std::size_t>(rng.integer(1, std::max(1, cfg.max_n)));
      const MeasureSpace s = random::random_space(rng, static_cast<std::size_t>(atoms));
      const FVector fv = random::random_generators(rng, GenClass::concave, n);
      auto [P, Q] = random_bundles(rng, s, n);
      if (witness) {
        *witness = {{"weights", space_json(s)}, {"f", fvector_json(fv)}, {"P", bundle_json(P)},
                    {"Q", bundle_json(Q)}};
      }
      const ChainVerdicts cv = concave_chain_check(fv, P, Q, tol);
      TrialOutcome a = outcome_of(cv.mixed_vs_product);
      const TrialOutcome b = outcome_of(cv.product_vs_one);
      if (b.relative_slack < a.relative_slack) {
        a.slack = b.slack;
        a.relative_slack = b.relative_slack;
      }
      a.violated = a.violated || b.violated;
      a.equality = a.equality && b.equality;
      return a;
    }
    case InequalityId::interpolation:
    case InequalityId::interpolation_endpoint: {
      TwoPairInstance x =
          random_two_pair(rng, cfg, GenClass::positive_any, GenClass::positive_any, false);
      const double n = x.n;
      double pts[3] = {rng.uniform(-n, 2.0 * n), rng.uniform(-n, 2.0 * n),
                       rng.uniform(-n, 2.0 * n)};
      std::sort(std::begin(pts), std::end(pts));
      double j = pts[0];
      double i = pts[1];
      double k = pts[2];
      if (rng.coin()) std::swap(j, k);
      if (id == InequalityId::interpolation_endpoint) i = j;
      if (witness) {
        *witness = two_pair_json(x);
        (*witness)["i"] = i;
        (*witness)["j"] = j;
        (*witness)["k"] = k;
      }
      return outcome_of(interpolation_check(x, i, j, k, tol));
    }
    case InequalityId::concave_band:
    case InequalityId::convex_concave_high:
    case InequalityId::concave_convex_low:
    case InequalityId::reference_concave:
    case InequalityId::reference_convex_high:
    case InequalityId::reference_concave_low: {
      CorollaryCase cc = CorollaryCase::concave_band;
      GenClass c1 = GenClass::positive_concave;
      GenClass c2 = GenClass::positive_concave;
      bool ref = false;
      switch (id) {
        case InequalityId::convex_concave_high:
          cc = CorollaryCase::convex_concave_high;
          c1 = GenClass::positive_convex;
          break;
        case InequalityId::concave_convex_low:
          cc = CorollaryCase::concave_convex_low;
          c2 = GenClass::positive_convex;
          break;
        case InequalityId::reference_concave:
          cc = CorollaryCase::reference_concave;
          c2 = GenClass::positive_any;
          ref = true;
          break;
        case InequalityId::reference_convex_high:
          cc = CorollaryCase::reference_convex_high;
          c1 = GenClass::positive_convex;
          c2 = GenClass::positive_any;
          ref = true;
          break;
        case InequalityId::reference_concave_low:
          cc = CorollaryCase::reference_concave_low;
          c2 = GenClass::positive_any;
          ref = true;
          break;
        default:
          break;
      }
      TwoPairInstance x = random_two_pair(rng, cfg, c1, c2, ref);
      const double n = x.n;
      double i = 0.0;
      switch (cc) {
        case CorollaryCase::concave_band:
        case CorollaryCase::reference_concave: i = rng.uniform(0.0, n); break;
        case CorollaryCase::convex_concave_high:
        case CorollaryCase::reference_convex_high: i = rng.uniform(n, 3.0 * n); break;
        default: i = rng.uniform(-2.0 * n, 0.0); break;
      }
      if (witness) {
        *witness = two_pair_json(x);
        (*witness)["i"] = i;
        (*witness)["case"] = std::string(to_string(cc));
      }
      return outcome_of(corollary_bound_check(cc, x, i, tol));
    }
    case InequalityId::isoperimetric: {
      const geometry::CircleGrid grid(cfg.grid_nodes);
      const geometry::ConvexBody2D K = [&] {
        if (rng.coin()) {
          const double a = rng.uniform(0.3, 3.0);
          const double b = a * rng.uniform(0.3, 1.0);
          return geometry::ConvexBody2D::ellipse(a, b, rng.uniform(0.0, geometry::kTwoPi));
        }
        const int k = rng.integer(2, 6);
        const double bound = 1.0 / (k * k - 1.0);
        return geometry::ConvexBody2D::trig_ball(rng.uniform(-0.9, 0.9) * bound, k);
      }();
      if (witness) *witness = {{"body", io::body_to_json(K)}, {"nodes", cfg.grid_nodes}};
      return outcome_of(geometry::isoperimetric_check(K, grid, tol));
    }
  }
  fail(ErrorKind::InvalidParameter, "unknown inequality id");
}

struct Partial {
  std::size_t violations = 0;
  std::size_t equalities = 0;
  double best_rel = std::numeric_limits<double>::infinity();
  double best_slack = std::numeric_limits<double>::infinity();
  std::size_t best_trial = std::numeric_limits<std::size_t>::max();

  void absorb(std::size_t t, const TrialOutcome& o) {
    violations += o.violated ? 1 : 0;
    equalities += o.equality ? 1 : 0;
    if (o.relative_slack < best_rel || (o.relative_slack == best_rel && t < best_trial)) {
      best_rel = o.relative_slack;
      best_slack = o.slack;
      best_trial = t;
    }
  }

  void merge(const Partial& other) {
    violations += other.violations;
    equalities += other.equalities;
    if (other.best_rel < best_rel || (other.best_rel == best_rel && other.best_trial < best_trial)) {
      best_rel = other.best_rel;
      best_slack = other.best_slack;
      best_trial = other.best_trial;
    }
  }
};

}  // namespace detail

inline FalsifyReport falsify(InequalityId id, std::uint64_t seed, std::size_t trials,
                             const FalsifyConfig& cfg = {}) {
  if (trials == 0) fail(ErrorKind::InvalidParameter, "trials must be positive");
  if (cfg.max_atoms < 2 || cfg.max_n < 1) {
    fail(ErrorKind::InvalidParameter, "max_atoms must be >= 2 and max_n >= 1");
  }
  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));

  std::vector<detail::Partial> parts(threads);
  std::vector<std::exception_ptr> errors(threads);
  auto work = [&](unsigned tid) {
    try {
      for (std::size_t t = tid; t < trials; t += threads) {
        parts[tid].absorb(t, detail::run_trial(id, random::trial_seed(seed, t), cfg, nullptr));
      }
    } catch (...) {
      errors[tid] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned tid = 0; tid < threads; ++tid) pool.emplace_back(work, tid);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  detail::Partial total;
  for (const auto& p : parts) total.merge(p);

  FalsifyReport rep;
  rep.inequality = std::string(to_string(id));
  rep.seed = seed;
  rep.trials = trials;
  rep.violations = total.violations;
  rep.equalities = total.equalities;
  rep.min_slack = total.best_slack;
  rep.min_relative_slack = total.best_rel;
  rep.witness_trial = total.best_trial;
  detail::run_trial(id, random::trial_seed(seed, total.best_trial), cfg, &rep.witness);
  return rep;
}

}  // namespace mixdiv

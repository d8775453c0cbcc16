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

// Direct-summation reference values. Deliberately shares no code with the
// library: generators are plain callables and every density is assumed
// strictly positive, so no boundary conventions are needed.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;
using Vec = std::vector<double>;

inline Fn adjoint(Fn f) {
  return [f](double t) { return t * f(1.0 / t); };
}

/// sum_j mu_j prod_i (q_ij f_i(p_ij / q_ij))^(1/n)
inline double mixed(const std::vector<Fn>& f, const std::vector<Vec>& p, const std::vector<Vec>& q,
                    const Vec& mu) {
  const double n = static_cast<double>(f.size());
  double total = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    double prod = 1.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      prod *= std::pow(q[i][j] * f[i](p[i][j] / q[i][j]), 1.0 / n);
    }
    total += mu[j] * prod;
  }
  return total;
}

/// First k slots as given; the rest use the adjoint with p and q swapped.
inline double k_form(const std::vector<Fn>& f, const std::vector<Vec>& p, const std::vector<Vec>& q,
                     const Vec& mu, std::size_t k) {
  std::vector<Fn> g;
  std::vector<Vec> a;
  std::vector<Vec> b;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i < k) {
      g.push_back(f[i]);
      a.push_back(p[i]);
      b.push_back(q[i]);
    } else {
      g.push_back(adjoint(f[i]));
      a.push_back(q[i]);
      b.push_back(p[i]);
    }
  }
  return mixed(g, a, b, mu);
}

/// sum_j mu_j w1^(i/n) w2^((n-i)/n)
inline double ith(const Fn& f1, const Fn& f2, const Vec& p1, const Vec& q1, const Vec& p2,
                  const Vec& q2, const Vec& mu, double i, double n) {
  double total = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double w1 = q1[j] * f1(p1[j] / q1[j]);
    const double w2 = q2[j] * f2(p2[j] / q2[j]);
    total += mu[j] * std::pow(w1, i / n) * std::pow(w2, (n - i) / n);
  }
  return total;
}

inline double classical(const Fn& f, const Vec& p, const Vec& q, const Vec& mu) {
  double total = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) total += mu[j] * q[j] * f(p[j] / q[j]);
  return total;
}

}  // namespace oracle

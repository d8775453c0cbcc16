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

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mixdiv/error.hpp"

namespace mixdiv {

/// Relative tolerance on the total mass of a probability density.
inline constexpr double kTolNorm = 1e-12;

/// A finite set of atoms with strictly positive reference weights.
///
/// Copies share the weight storage, so two spaces built from the same
/// call compare equal in O(1).
class MeasureSpace {
 public:
  static MeasureSpace make(std::vector<double> weights) {
    if (weights.empty()) {
      fail(ErrorKind::NonPositiveWeight, "measure space needs at least one atom");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      const double w = weights[j];
      if (!std::isfinite(w) || w <= 0.0) {
        std::ostringstream os;
        os << "weight[" << j << "] = " << w << " is not strictly positive and finite";
        fail(ErrorKind::NonPositiveWeight, os.str());
      }
      total += w;
    }
    if (!std::isfinite(total)) {
      fail(ErrorKind::NonPositiveWeight, "total mass is not finite");
    }
    return MeasureSpace(std::make_shared<const std::vector<double>>(std::move(weights)), total);
  }

  /// Counting measure on `size` atoms.
  static MeasureSpace counting(std::size_t size) { return make(std::vector<double>(size, 1.0)); }

  std::size_t size() const noexcept { return weights_->size(); }
  std::span<const double> weights() const noexcept { return *weights_; }
  double weight(std::size_t j) const { return (*weights_)[j]; }
  double total_mass() const noexcept { return total_; }

  friend bool operator==(const MeasureSpace& a, const MeasureSpace& b) {
    return a.weights_ == b.weights_ || *a.weights_ == *b.weights_;
  }

 private:
  MeasureSpace(std::shared_ptr<const std::vector<double>> w, double total)
      : weights_(std::move(w)), total_(total) {}

  std::shared_ptr<const std::vector<double>> weights_;
  double total_;
};

/// Per-atom density values with respect to some MeasureSpace.
class Density {
 public:
  Density() = default;
  explicit Density(std::vector<double> values) : values_(std::move(values)) {}

  /// The constant density 1, i.e. the reference measure itself.
  static Density unit(std::size_t size) { return Density(std::vector<double>(size, 1.0)); }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

  friend bool operator==(const Density&, const Density&) = default;

 private:
  std::vector<double> values_;
};

struct DensityFlags {
  bool strictly_positive = false;
  bool probability = false;
};

inline constexpr DensityFlags kProbability{.strictly_positive = false, .probability = true};
inline constexpr DensityFlags kStrictProbability{.strictly_positive = true, .probability = true};

struct DensityCheck {
  std::optional<ErrorKind> failure;
  std::string message;
  double mass = 0.0;  ///< sum of value*weight, always reported

  bool ok() const noexcept { return !failure.has_value(); }
  explicit operator bool() const noexcept { return ok(); }
};

/// Mass of `d` under `s`: sum of d_j * mu_j in atom order.
inline double mass(const Density& d, const MeasureSpace& s) {
  double total = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) total += d[j] * s.weight(j);
  return total;
}

/// Checks the requested invariants without throwing. Negative or non-finite
/// entries always fail.
inline DensityCheck validate_density(const Density& d, const MeasureSpace& s, DensityFlags flags,
                                     double tol = kTolNorm) {
  DensityCheck out;
  if (d.size() != s.size()) {
    std::ostringstream os;
    os << "density has " << d.size() << " values but the space has " << s.size() << " atoms";
    out.failure = ErrorKind::LengthMismatch;
    out.message = os.str();
    return out;
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (!std::isfinite(d[j]) || d[j] < 0.0) {
      std::ostringstream os;
      os << "value[" << j << "] = " << d[j] << " is negative or not finite";
      out.failure = ErrorKind::DomainError;
      out.message = os.str();
      return out;
    }
  }
  out.mass = mass(d, s);
  if (flags.strictly_positive) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d[j] == 0.0) {
        std::ostringstream os;
        os << "value[" << j << "] is zero";
        out.failure = ErrorKind::ZeroDensityAtom;
        out.message = os.str();
        return out;
      }
    }
  }
  if (flags.probability && !(std::abs(out.mass - 1.0) <= tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "total mass is " << out.mass << ", expected 1";
    out.failure = ErrorKind::NormalizationFailure;
    out.message = os.str();
  }
  return out;
}

/// Throwing form of validate_density.
inline void require_density(const Density& d, const MeasureSpace& s, DensityFlags flags,
                            double tol = kTolNorm) {
  DensityCheck c = validate_density(d, s, flags, tol);
  if (!c) fail(*c.failure, c.message);
}

/// Rescales `d` to unit mass. Only called when the caller explicitly asks.
inline Density normalize(const Density& d, const MeasureSpace& s) {
  require_density(d, s, DensityFlags{});
  const double m = mass(d, s);
  if (!(m > 0.0)) fail(ErrorKind::NormalizationFailure, "cannot normalize a density of zero mass");
  std::vector<double> v(d.values().begin(), d.values().end());
  for (double& x : v) x /= m;
  return Density(std::move(v));
}

/// n densities over one shared space.
class DensityBundle {
 public:
  DensityBundle(MeasureSpace space, std::vector<Density> densities)
      : space_(std::move(space)), densities_(std::move(densities)) {
    if (densities_.empty()) fail(ErrorKind::LengthMismatch, "a bundle needs at least one density");
    for (std::size_t i = 0; i < densities_.size(); ++i) {
      if (densities_[i].size() != space_.size()) {
        std::ostringstream os;
        os << "density " << i << " has " << densities_[i].size() << " values, space has "
           << space_.size();
        fail(ErrorKind::LengthMismatch, os.str());
      }
    }
  }

  const MeasureSpace& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return densities_.size(); }
  const Density& operator[](std::size_t i) const { return densities_[i]; }
  const std::vector<Density>& densities() const noexcept { return densities_; }

  /// Validates every member against the given flags.
  void require(DensityFlags flags, double tol = kTolNorm) const {
    for (std::size_t i = 0; i < densities_.size(); ++i) {
      try {
        require_density(densities_[i], space_, flags, tol);
      } catch (const Error& e) {
        throw e.with_field("[" + std::to_string(i) + "]");
      }
    }
  }

 private:
  MeasureSpace space_;
  std::vector<Density> densities_;
};

}  // namespace mixdiv

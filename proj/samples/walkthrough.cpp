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

// A short tour of the library: a mixed divergence, one inequality check
// and one planar body.

#include <iostream>

#include "mixdiv/convex_geometry.hpp"
#include "mixdiv/divergence_engine.hpp"
#include "mixdiv/inequality_lab.hpp"

int main() {
  using namespace mixdiv;

  const MeasureSpace space = MeasureSpace::counting(2);
  const Density p({0.5, 0.5});
  const Density q({0.25, 0.75});

  const FVector fv(2, FFunction::power(2.0));
  const DensityBundle P(space, {p, q});
  const DensityBundle Q(space, {q, p});
  std::cout.precision(17);
  std::cout << "mixed divergence      " << mixed_f_divergence(fv, P, Q).value << "\n";

  const auto af = af_check(fv, P, Q, 2);
  std::cout << "af check              lhs " << af.lhs << " rhs " << af.rhs
            << (af.satisfied ? " (holds)" : " (VIOLATED)") << "\n";

  const geometry::CircleGrid grid(256);
  const auto K = geometry::ConvexBody2D::ellipse(2.0, 0.5);
  const auto f = geometry::body_functionals(K, grid);
  std::cout << "ellipse(2, 0.5) area  " << f.volume << "\n"
            << "affine surface area   " << f.affine_surface_area << "\n";
  const auto iso = geometry::isoperimetric_check(K, grid);
  std::cout << "isoperimetric         " << iso.lhs << " >= " << iso.rhs << "\n";
  return 0;
}

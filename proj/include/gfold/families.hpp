#pragma once

#include <string>
#include <vector>

#include "gfold/garage.hpp"

namespace gfold {

// Built-in garage catalog.  Triangles are normalized to unit shortest
// edge.  Supported names:
//   square              (n ignored)
//   rectangle <n>       1 x n rectangle
//   veech-isosceles <n> triangle (1/n, 1/n, (n-2)/n), n >= 3
//   veech-right <n>     triangle (1/2, 1/n, (n-2)/(2n)), n >= 4
//   ward <n>            triangle (1/(2n), 1/n, (2n-3)/(2n)), n >= 4
//   thm3 <n>            4 copies of veech-isosceles(n); n odd, 3|n, n >= 9
//   ward-stage <n> <q0|q1|q2>  2/4/6 copies of ward(n)
Garage make_family(const std::string& name, int n, const std::string& stage = "");

std::vector<std::string> family_names();

// Whether the named family generates polygons with a known lattice (Veech)
// group, per the documented catalog.  Callers feed this to the
// suitability screen; the tool never computes Veech groups.
bool lattice_catalog_contains(const std::string& name);

// The triangle with the given angles (units of pi), normalized so its
// shortest edge has length 1, base edge on the positive x axis.
BasePolygon normalized_triangle(const Frac& a0, const Frac& a1, const Frac& a2);

} // namespace gfold

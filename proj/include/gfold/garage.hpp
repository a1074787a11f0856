#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gfold/polygon.hpp"

namespace gfold {

// One reflected copy of the base polygon.  The copy is the image of the
// base under the composition of reflections named by `word` (indices of
// base edges, applied left to right as maps: word e1 e2 means the map
// R_{e1} after R_{e2} applied to the base, i.e. R_{e1} o R_{e2}).
// The linear part is tracked exactly as a dihedral element; coordinates
// are derived.
struct Tile {
    std::vector<int> word;
    DihedralElement lin;        // exact linear part, in D_n of the base
    Mat2 mat;                   // = matrix(lin)
    Vec2 shift;                 // affine part: x -> mat*x + shift
    std::vector<Vec2> verts;    // images of the base vertices

    Vec2 map(const Vec2& p) const { return apply(mat, p) + shift; }
    bool orientation_reversing() const { return lin.flip; }
};

struct Gluing {
    int t1, e1, t2, e2;
};

// A vertex class of the glued complex: corners identified across gluings.
// total_angle = k * (base angle), with k the number of corners.
struct VertexClass {
    Frac total_angle;
    int k = 0;
    int base_vertex = 0;
    bool boundary = true;
    Vec2 pos;
    std::vector<std::pair<int, int>> corners;  // (tile, base vertex)
};

// A reflection-tiling complex: copies of one polygon glued edge-to-edge,
// immersed in the plane.  Tiles may overlap (the complex need not embed);
// what is validated is the reflection compatibility of every gluing, that
// the complex is a connected surface with boundary, and that interior
// vertices close up to exactly 2*pi.
class Garage {
public:
    Garage(BasePolygon base, std::vector<std::vector<int>> words, std::vector<Gluing> gluings,
           const Tolerances& tol = {});

    const BasePolygon& base() const { return base_; }
    int tile_count() const { return static_cast<int>(tiles_.size()); }
    const std::vector<Tile>& tiles() const { return tiles_; }
    const std::vector<Gluing>& gluings() const { return gluings_; }
    const Tolerances& tol() const { return tol_; }

    // Partner of edge (t, e) under the gluing, or {-1, -1} if boundary.
    std::pair<int, int> glued_to(int t, int e) const { return partner_[t][e]; }
    bool is_boundary_edge(int t, int e) const { return partner_[t][e].first < 0; }

    const std::vector<VertexClass>& vertex_classes() const { return classes_; }
    int class_of_corner(int t, int v) const { return corner_class_[t][v]; }

    // Boundary vertex classes in cyclic order along each boundary loop.
    const std::vector<std::vector<int>>& boundary_cycles() const { return cycles_; }

    // D_N with N the lcm of the reduced denominators of the boundary
    // angles.  Agrees with the abstract type of reflection_subgroup().
    DihedralGroup garage_group() const;

    // The subgroup of the base polygon's D_n generated by the linear
    // reflections in the boundary edges of the complex.
    DihedralSubgroup reflection_subgroup() const;

    // Diagnostic: true if no two tile interiors overlap in the plane
    // (an embedded complex is an ordinary polygonal region).
    bool embedded() const;

    double tile_area() const { return polygon_area(base_.vertices()); }

    // Optional provenance for serialization comments ("family thm3 9").
    std::string family_note;

private:
    BasePolygon base_;
    std::vector<Tile> tiles_;
    std::vector<Gluing> gluings_;
    Tolerances tol_;
    std::vector<std::vector<std::pair<int, int>>> partner_;
    std::vector<std::vector<int>> corner_class_;
    std::vector<VertexClass> classes_;
    std::vector<std::vector<int>> cycles_;
};

Garage parse_garage(std::istream& in, const Tolerances& tol = {});
Garage parse_garage_file(const std::string& path, const Tolerances& tol = {});
std::string serialize_garage(const Garage& g);

} // namespace gfold

#pragma once

#include <utility>
#include <vector>

#include "gfold/garage.hpp"

namespace gfold {

// One face of a translation surface: a planar polygon stored
// counterclockwise.  Faces built by unfolding carry their provenance:
// tile index and the group element of the copy.  When the unfolding map
// reverses orientation the stored vertex order is the reversal of the
// mapped tile vertices; slot_vertex records which base vertex each stored
// slot came from.
struct Face {
    int tile = 0;
    DihedralElement g;
    bool reversed = false;
    std::vector<Vec2> verts;
    std::vector<int> slot_vertex;

    int size() const { return static_cast<int>(verts.size()); }
    int wrap(int i) const {
        int m = size(), r = i % m;
        return r < 0 ? r + m : r;
    }
    Vec2 vertex(int i) const { return verts[wrap(i)]; }
    Vec2 edge_vec(int e) const { return vertex(e + 1) - vertex(e); }
};

struct SurfaceVertexClass {
    Frac total_angle;   // units of pi; exact
    int turns = 1;      // cone angle = 2*pi*turns
    std::vector<std::pair<int, int>> corners;  // (face, slot)
    bool singular() const { return turns >= 2; }
};

struct Singularity {
    int class_id;
    int turns;
};

// A closed translation surface presented as planar faces with a pairing
// of oriented boundary edges by translations.  All topology (pairing,
// vertex classes, cone angles) is derived from exact group data when the
// surface comes from unfolding; coordinates only supply holonomy.
class TranslationSurface {
public:
    // Zemlyakov-Katok unfolding of a garage: one face per (tile, group
    // element) with the group running over the complex's reflection
    // subgroup; 2*N*l faces in total.
    static TranslationSurface unfold(const Garage& g);

    // Axis-aligned flat torus [0,w] x [0,h] with one marked point.
    static TranslationSurface torus(double w = 1.0, double h = 1.0);

    // Arbitrary face/pairing constructor; pairs maps (face, slot) pairs.
    TranslationSurface(std::vector<Face> faces,
                       std::vector<std::vector<std::pair<int, int>>> pairs,
                       std::vector<Frac> corner_angles_by_base_vertex, int base_group_order,
                       const Tolerances& tol = {});

    int face_count() const { return static_cast<int>(faces_.size()); }
    const Face& face(int f) const { return faces_[f]; }
    const std::vector<Face>& faces() const { return faces_; }

    std::pair<int, int> pair_of(int f, int slot) const { return pairs_[f][slot]; }

    // Crossing stored edge (f, p): the partner edge (f2, p2) and the
    // translation tau with x_partner = x + tau.
    struct Transition {
        int face, slot;
        Vec2 tau;
    };
    Transition transition(int f, int p) const;

    int class_of(int f, int slot) const { return corner_class_[f][slot]; }
    const std::vector<SurfaceVertexClass>& vertex_classes() const { return classes_; }
    int cone_turns(int class_id) const;
    std::vector<Singularity> singularities() const;
    bool has_singularity() const;

    // Next corner rotating counterclockwise around the vertex class.
    std::pair<int, int> next_corner_ccw(int f, int s) const;

    int chi() const { return chi_; }
    int genus() const;
    double total_area() const { return area_; }
    int base_group_order() const { return base_n_; }
    const Tolerances& tol() const { return tol_; }

    // Position of a vertex class in one of its face charts.
    std::pair<int, Vec2> class_position(int class_id) const;

private:
    std::vector<Face> faces_;
    std::vector<std::vector<std::pair<int, int>>> pairs_;
    std::vector<std::vector<int>> corner_class_;
    std::vector<SurfaceVertexClass> classes_;
    int chi_ = 0;
    int base_n_ = 1;
    double area_ = 0;
    Tolerances tol_;
};

} // namespace gfold

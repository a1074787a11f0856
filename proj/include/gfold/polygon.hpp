#pragma once

#include <vector>

#include "gfold/exact.hpp"
#include "gfold/geom.hpp"

namespace gfold {

// A simple polygon, listed counterclockwise, together with its interior
// angles declared as exact rational multiples of pi.  Edge i runs from
// vertex i to vertex i+1 (indices mod the vertex count); the angle at
// vertex i sits between edges i-1 and i.
//
// On construction the declared angles are checked against the coordinate
// geometry, the rational angle sum is checked exactly, and the direction
// index of every edge is computed: edge i points along angle k[i]*pi/n up
// to sign, where n is the least common order making all angles integral
// multiples of pi/n.
class BasePolygon {
public:
    BasePolygon(std::vector<Vec2> vertices, std::vector<Frac> angles,
                const Tolerances& tol = {});

    int size() const { return static_cast<int>(verts_.size()); }
    const std::vector<Vec2>& vertices() const { return verts_; }
    const std::vector<Frac>& angles() const { return angles_; }
    int group_order() const { return n_; }
    const std::vector<int>& edge_dirs() const { return k_; }

    Vec2 vertex(int i) const { return verts_[index(i)]; }
    Vec2 edge_start(int e) const { return verts_[index(e)]; }
    Vec2 edge_end(int e) const { return verts_[index(e + 1)]; }
    Vec2 edge_vec(int e) const { return edge_end(e) - edge_start(e); }
    double edge_len(int e) const { return edge_vec(e).norm(); }
    int edge_dir(int e) const { return k_[index(e)]; }

    int index(int i) const {
        int m = size();
        int r = i % m;
        return r < 0 ? r + m : r;
    }

private:
    std::vector<Vec2> verts_;
    std::vector<Frac> angles_;
    int n_ = 1;
    std::vector<int> k_;
};

} // namespace gfold

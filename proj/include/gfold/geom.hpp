#pragma once

#include <cmath>
#include <vector>

#include "gfold/exact.hpp"

namespace gfold {

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double norm() const { return std::hypot(x, y); }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Vec2 apply(const Mat2& m, const Vec2& v) {
    return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}
inline Vec2 rotate90(const Vec2& v) { return {-v.y, v.x}; }

// Numeric tolerances shared across the library.  Geometric coincidence and
// angular comparisons happen at scale ~1 throughout (shortest edges are
// normalized to unit length), so absolute epsilons are appropriate.
struct Tolerances {
    double eps_geom = 1e-9;    // point / segment coincidence
    double eps_angle = 1e-9;   // direction comparisons (radians)
    double eps_sing = 1e-9;    // distance at which a flow hits a vertex
    double eps_close = 1e-9;   // recurrence detection for closed orbits
    double eps_len = 1e-9;     // holonomy-vector dedup in searches
};

inline bool nearly_equal(const Vec2& a, const Vec2& b, double eps) {
    return (a - b).norm() <= eps;
}

double polygon_area(const std::vector<Vec2>& pts);

// Strict interior test (boundary counts as outside) for a simple polygon.
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly, double eps);

// Whether two closed convex-or-not simple polygons have overlapping
// interiors (shared boundary segments do not count).
bool polygons_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double eps);

// Clip a polygon to an axis-aligned rectangle (Sutherland-Hodgman).
std::vector<Vec2> clip_to_rect(const std::vector<Vec2>& poly, double x0, double y0, double x1,
                               double y1);

// Distance from point p to segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Transversal intersection at interior points of both segments.
bool segments_cross_properly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                             double eps);

} // namespace gfold

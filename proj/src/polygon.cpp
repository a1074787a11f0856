#include "gfold/polygon.hpp"

#include <cmath>
#include <string>

namespace gfold {

namespace {

// Interior angle (radians) at vertex i of a counterclockwise polygon,
// in (0, 2*pi): pi minus the signed turn between consecutive edges.
double geometric_angle(const std::vector<Vec2>& v, size_t i) {
    size_t m = v.size();
    Vec2 u = v[i] - v[(i + m - 1) % m];
    Vec2 w = v[(i + 1) % m] - v[i];
    double turn = std::atan2(cross(u, w), dot(u, w));
    return M_PI - turn;
}

} // namespace

BasePolygon::BasePolygon(std::vector<Vec2> vertices, std::vector<Frac> angles,
                         const Tolerances& tol)
    : verts_(std::move(vertices)), angles_(std::move(angles)) {
    size_t m = verts_.size();
    if (m < 3) throw parameter_constraint("polygon needs at least 3 vertices");
    if (angles_.size() != m)
        throw parameter_constraint("angle count does not match vertex count");

    for (const Frac& a : angles_) {
        if (a.num <= 0 || !(a < Frac(2)))
            throw invalid_angle("interior angle out of range (0, 2): " + a.str());
        if (a == Frac(1)) throw invalid_angle("straight interior angle not allowed");
    }
    // A simple polygon's interior angles sum to (m - 2) * pi, exactly.
    Frac sum(0);
    for (const Frac& a : angles_) sum = sum + a;
    if (sum != Frac(static_cast<long long>(m) - 2))
        throw invalid_angle("interior angles sum to " + sum.str() + ", expected " +
                            std::to_string(m - 2));

    if (polygon_area(verts_) <= 0)
        throw parameter_constraint("vertices must be listed counterclockwise");

    for (size_t i = 0; i < m; ++i) {
        if ((verts_[(i + 1) % m] - verts_[i]).norm() <= tol.eps_geom)
            throw parameter_constraint("degenerate edge " + std::to_string(i));
    }
    // Simplicity: non-adjacent edges may not touch.
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = i + 1; j < m; ++j) {
            if (j == i + 1 || (i == 0 && j == m - 1)) continue;
            Vec2 a = verts_[i], b = verts_[(i + 1) % m];
            Vec2 c = verts_[j], d = verts_[(j + 1) % m];
            if (segments_cross_properly(a, b, c, d, tol.eps_geom) ||
                point_segment_distance(c, a, b) <= tol.eps_geom ||
                point_segment_distance(d, a, b) <= tol.eps_geom ||
                point_segment_distance(a, c, d) <= tol.eps_geom ||
                point_segment_distance(b, c, d) <= tol.eps_geom)
                throw parameter_constraint("polygon is not simple: edges " + std::to_string(i) +
                                           " and " + std::to_string(j) + " touch");
        }
    }

    for (size_t i = 0; i < m; ++i) {
        double declared = angles_[i].value() * M_PI;
        double actual = geometric_angle(verts_, i);
        if (std::fabs(declared - actual) > tol.eps_angle)
            throw geometry_mismatch("declared angle " + angles_[i].str() + " at vertex " +
                                    std::to_string(i) + " does not match coordinates");
    }

    n_ = group_from_angles(angles_);
    k_ = direction_indices(angles_, n_);

    // Cross-check the exact direction indices against the coordinates.
    for (size_t e = 0; e < m; ++e) {
        Vec2 d0 = verts_[1] - verts_[0];
        Vec2 de = verts_[(e + 1) % m] - verts_[e];
        double rel = std::atan2(cross(d0, de), dot(d0, de)); // in (-pi, pi]
        double want = M_PI * k_[e] / n_;
        double diff = std::remainder(rel - want, M_PI);
        if (std::fabs(diff) > tol.eps_angle)
            throw geometry_mismatch("edge " + std::to_string(e) +
                                    " direction does not match declared angles");
    }
}

} // namespace gfold

#include "gfold/geom.hpp"

#include <algorithm>

namespace gfold {

double polygon_area(const std::vector<Vec2>& pts) {
    double s = 0;
    size_t m = pts.size();
    for (size_t i = 0; i < m; ++i) s += cross(pts[i], pts[(i + 1) % m]);
    return 0.5 * s;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0) return (p - a).norm();
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly, double eps) {
    size_t m = poly.size();
    for (size_t i = 0; i < m; ++i)
        if (point_segment_distance(p, poly[i], poly[(i + 1) % m]) <= eps) return false;
    // Crossing parity along the +x ray, half-open in y to avoid double
    // counting at vertices.
    bool inside = false;
    for (size_t i = 0; i < m; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % m];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (xint > p.x) inside = !inside;
        }
    }
    return inside;
}

bool segments_cross_properly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                             double eps) {
    double tol = eps * std::max({1.0, (b - a).norm(), (d - c).norm()});
    double d1 = cross(b - a, c - a);
    double d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c);
    double d4 = cross(d - c, b - c);
    bool s1 = (d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol);
    bool s2 = (d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol);
    return s1 && s2;
}

namespace {

Vec2 centroid(const std::vector<Vec2>& poly) {
    Vec2 c{0, 0};
    for (const Vec2& p : poly) c = c + p;
    return c * (1.0 / poly.size());
}

} // namespace

bool polygons_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b, double eps) {
    size_t ma = a.size(), mb = b.size();
    for (size_t i = 0; i < ma; ++i)
        for (size_t j = 0; j < mb; ++j)
            if (segments_cross_properly(a[i], a[(i + 1) % ma], b[j], b[(j + 1) % mb], eps)) return true;
    for (const Vec2& p : a)
        if (point_in_polygon(p, b, eps)) return true;
    for (const Vec2& p : b)
        if (point_in_polygon(p, a, eps)) return true;
    if (point_in_polygon(centroid(a), b, eps)) return true;
    if (point_in_polygon(centroid(b), a, eps)) return true;
    return false;
}

std::vector<Vec2> clip_to_rect(const std::vector<Vec2>& poly, double x0, double y0, double x1,
                               double y1) {
    // Sutherland-Hodgman against the four half planes of the rectangle.
    auto clip_half = [](const std::vector<Vec2>& in, auto inside, auto intersect) {
        std::vector<Vec2> out;
        size_t m = in.size();
        for (size_t i = 0; i < m; ++i) {
            const Vec2& cur = in[i];
            const Vec2& nxt = in[(i + 1) % m];
            bool ci = inside(cur), ni = inside(nxt);
            if (ci) out.push_back(cur);
            if (ci != ni) out.push_back(intersect(cur, nxt));
        }
        return out;
    };
    auto lerp_x = [](const Vec2& a, const Vec2& b, double x) {
        double t = (x - a.x) / (b.x - a.x);
        return Vec2{x, a.y + t * (b.y - a.y)};
    };
    auto lerp_y = [](const Vec2& a, const Vec2& b, double y) {
        double t = (y - a.y) / (b.y - a.y);
        return Vec2{a.x + t * (b.x - a.x), y};
    };
    std::vector<Vec2> r = poly;
    r = clip_half(r, [&](const Vec2& p) { return p.x >= x0; },
                  [&](const Vec2& a, const Vec2& b) { return lerp_x(a, b, x0); });
    if (r.empty()) return r;
    r = clip_half(r, [&](const Vec2& p) { return p.x <= x1; },
                  [&](const Vec2& a, const Vec2& b) { return lerp_x(a, b, x1); });
    if (r.empty()) return r;
    r = clip_half(r, [&](const Vec2& p) { return p.y >= y0; },
                  [&](const Vec2& a, const Vec2& b) { return lerp_y(a, b, y0); });
    if (r.empty()) return r;
    r = clip_half(r, [&](const Vec2& p) { return p.y <= y1; },
                  [&](const Vec2& a, const Vec2& b) { return lerp_y(a, b, y1); });
    return r;
}

} // namespace gfold

#include "gfold/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gfold/errors.hpp"

namespace gfold {

namespace {

struct Box {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    void add(const Vec2& p) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
};

std::string points_attr(const std::vector<Vec2>& poly, Vec2 off) {
    std::ostringstream s;
    for (size_t i = 0; i < poly.size(); ++i) {
        if (i) s << " ";
        s << poly[i].x + off.x << "," << -(poly[i].y + off.y);
    }
    return s.str();
}

std::string header(const Box& b) {
    double pad = 0.05 * std::max(b.x1 - b.x0, b.y1 - b.y0) + 0.1;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << b.x0 - pad << " "
      << -b.y1 - pad << " " << (b.x1 - b.x0) + 2 * pad << " " << (b.y1 - b.y0) + 2 * pad
      << "\">\n";
    return s.str();
}

void draw_polys(std::ostringstream& out, const std::vector<std::vector<Vec2>>& polys,
                const std::vector<Vec2>& offs, const std::vector<bool>& flipped) {
    double stroke = 0.01;
    for (size_t i = 0; i < polys.size(); ++i) {
        out << "<polygon points=\"" << points_attr(polys[i], offs[i]) << "\" fill=\""
            << (flipped[i] ? "#cfe0f5" : "#f5e6cf")
            << "\" stroke=\"#333\" stroke-width=\"" << stroke << "\"/>\n";
    }
}

void draw_traj(std::ostringstream& out, const std::vector<TrajectorySegment>& traj,
               const std::vector<Vec2>& off_by_face) {
    for (const auto& seg : traj) {
        if (seg.face < 0 || seg.face >= static_cast<int>(off_by_face.size())) continue;
        Vec2 o = off_by_face[seg.face];
        out << "<line x1=\"" << seg.entry.x + o.x << "\" y1=\"" << -(seg.entry.y + o.y)
            << "\" x2=\"" << seg.exit.x + o.x << "\" y2=\"" << -(seg.exit.y + o.y)
            << "\" stroke=\"#c0392b\" stroke-width=\"0.012\"/>\n";
    }
}

} // namespace

std::string svg_garage(const Garage& g, const std::vector<TrajectorySegment>* traj) {
    std::vector<std::vector<Vec2>> polys;
    std::vector<Vec2> offs;
    std::vector<bool> flipped;
    Box b;
    for (const Tile& t : g.tiles()) {
        polys.push_back(t.verts);
        offs.push_back({0, 0});
        flipped.push_back(t.orientation_reversing());
        for (const Vec2& p : t.verts) b.add(p);
    }
    std::ostringstream out;
    out << header(b);
    draw_polys(out, polys, offs, flipped);
    if (traj) draw_traj(out, *traj, std::vector<Vec2>(polys.size(), Vec2{0, 0}));
    out << "</svg>\n";
    return out.str();
}

std::string svg_surface(const TranslationSurface& s, const std::vector<TrajectorySegment>* traj) {
    // Ring layout: faces with the same group element share a slot on a
    // circle whose radius keeps neighbouring copies apart.
    std::map<DihedralElement, int> slot;
    for (const Face& f : s.faces())
        if (!slot.count(f.g)) slot[f.g] = static_cast<int>(slot.size());
    int n_slots = std::max<int>(1, static_cast<int>(slot.size()));

    double diam = 0;
    for (const Face& f : s.faces())
        for (const Vec2& p : f.verts) diam = std::max(diam, p.norm());
    double R = n_slots == 1 ? 0 : 2.5 * diam;

    std::vector<Vec2> off_by_face(s.face_count());
    std::vector<std::vector<Vec2>> polys;
    std::vector<Vec2> offs;
    std::vector<bool> flipped;
    Box b;
    for (int fi = 0; fi < s.face_count(); ++fi) {
        const Face& f = s.face(fi);
        double a = 2 * M_PI * slot[f.g] / n_slots;
        Vec2 off{R * std::cos(a), R * std::sin(a)};
        off_by_face[fi] = off;
        polys.push_back(f.verts);
        offs.push_back(off);
        flipped.push_back(f.reversed);
        for (const Vec2& p : f.verts) b.add(p + off);
    }
    std::ostringstream out;
    out << header(b);
    draw_polys(out, polys, offs, flipped);
    if (traj) draw_traj(out, *traj, off_by_face);
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw error("cannot open " + path + " for writing");
    f << content;
}

} // namespace gfold

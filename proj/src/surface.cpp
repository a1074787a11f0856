#include "gfold/surface.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace gfold {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

TranslationSurface::TranslationSurface(std::vector<Face> faces,
                                       std::vector<std::vector<std::pair<int, int>>> pairs,
                                       std::vector<Frac> corner_angles_by_base_vertex,
                                       int base_group_order, const Tolerances& tol)
    : faces_(std::move(faces)), pairs_(std::move(pairs)), base_n_(base_group_order), tol_(tol) {
    const int F = face_count();
    if (F == 0) throw parameter_constraint("surface needs at least one face");

    long long slot_total = 0;
    for (int f = 0; f < F; ++f) {
        const Face& fc = faces_[f];
        slot_total += fc.size();
        if (polygon_area(fc.verts) <= 0)
            throw geometry_mismatch("face " + std::to_string(f) + " is not counterclockwise");
        for (int p = 0; p < fc.size(); ++p) {
            auto [f2, p2] = pairs_[f][p];
            if (f2 < 0 || f2 >= F || p2 < 0 || p2 >= faces_[f2].size())
                throw index_error("edge pairing out of range");
            if (pairs_[f2][p2] != std::make_pair(f, p))
                throw gluing_mismatch("edge pairing is not an involution");
            if (f2 == f && p2 == p)
                throw gluing_mismatch("edge paired with itself");
            Vec2 hol = fc.edge_vec(p);
            Vec2 hol2 = faces_[f2].edge_vec(p2);
            if ((hol + hol2).norm() > tol_.eps_len)
                throw geometry_mismatch("paired edges do not have opposite holonomy");
        }
    }

    // Corner identification: (f, p) ~ (f2, p2+1) and (f, p+1) ~ (f2, p2)
    // across every pairing (paired edges are traversed oppositely).
    std::vector<int> offset(F + 1, 0);
    for (int f = 0; f < F; ++f) offset[f + 1] = offset[f] + faces_[f].size();
    auto cid = [&](int f, int s) { return offset[f] + faces_[f].wrap(s); };
    UnionFind uf(static_cast<int>(slot_total));
    for (int f = 0; f < F; ++f) {
        for (int p = 0; p < faces_[f].size(); ++p) {
            auto [f2, p2] = pairs_[f][p];
            uf.unite(cid(f, p), cid(f2, p2 + 1));
            uf.unite(cid(f, p + 1), cid(f2, p2));
        }
    }

    corner_class_.assign(F, {});
    std::vector<int> root_to_class(slot_total, -1);
    for (int f = 0; f < F; ++f) {
        corner_class_[f].assign(faces_[f].size(), -1);
        for (int s = 0; s < faces_[f].size(); ++s) {
            int r = uf.find(cid(f, s));
            if (root_to_class[r] < 0) {
                root_to_class[r] = static_cast<int>(classes_.size());
                classes_.push_back({});
            }
            int ci = root_to_class[r];
            corner_class_[f][s] = ci;
            classes_[ci].corners.push_back({f, s});
            classes_[ci].total_angle =
                classes_[ci].total_angle +
                corner_angles_by_base_vertex.at(faces_[f].slot_vertex[s]);
        }
    }
    for (auto& c : classes_) {
        Frac turns = c.total_angle * Frac(1, 2);
        if (turns.den != 1 || turns.num <= 0)
            throw non_integer_genus("vertex class has cone angle " + c.total_angle.str() +
                                    " pi, not a positive multiple of 2 pi");
        c.turns = static_cast<int>(turns.num);
    }

    int V = static_cast<int>(classes_.size());
    int E = static_cast<int>(slot_total / 2);
    chi_ = V - E + F;
    if ((2 - chi_) % 2 != 0) throw non_integer_genus("odd Euler characteristic");

    // Gauss-Bonnet as an exact integer identity.
    long long excess = 0;
    for (const auto& c : classes_) excess += c.turns - 1;
    if (excess != 2LL * genus() - 2)
        throw non_integer_genus("cone angles violate the Euler characteristic");

    area_ = 0;
    for (const Face& fc : faces_) area_ += polygon_area(fc.verts);
}

int TranslationSurface::genus() const { return (2 - chi_) / 2; }

int TranslationSurface::cone_turns(int class_id) const {
    if (class_id < 0 || class_id >= static_cast<int>(classes_.size()))
        throw index_error("unknown vertex class " + std::to_string(class_id));
    return classes_[class_id].turns;
}

std::vector<Singularity> TranslationSurface::singularities() const {
    std::vector<Singularity> out;
    for (int i = 0; i < static_cast<int>(classes_.size()); ++i)
        if (classes_[i].singular()) out.push_back({i, classes_[i].turns});
    std::sort(out.begin(), out.end(), [](const Singularity& a, const Singularity& b) {
        return a.turns != b.turns ? a.turns < b.turns : a.class_id < b.class_id;
    });
    return out;
}

bool TranslationSurface::has_singularity() const {
    for (const auto& c : classes_)
        if (c.singular()) return true;
    return false;
}

TranslationSurface::Transition TranslationSurface::transition(int f, int p) const {
    auto [f2, p2] = pairs_[f][p];
    Vec2 tau = faces_[f2].vertex(p2 + 1) - faces_[f].vertex(p);
    return {f2, p2, tau};
}

std::pair<int, int> TranslationSurface::next_corner_ccw(int f, int s) const {
    int p = faces_[f].wrap(s - 1);
    return pairs_[f][p];
}

std::pair<int, Vec2> TranslationSurface::class_position(int class_id) const {
    if (class_id < 0 || class_id >= static_cast<int>(classes_.size()))
        throw index_error("unknown vertex class " + std::to_string(class_id));
    auto [f, s] = classes_[class_id].corners.front();
    return {f, faces_[f].verts[s]};
}

TranslationSurface TranslationSurface::unfold(const Garage& g) {
    const BasePolygon& base = g.base();
    const int m = base.size();
    const int n = base.group_order();
    DihedralGroup G(n);
    DihedralSubgroup sub = g.reflection_subgroup();
    std::vector<DihedralElement> elems = sub.elements();
    std::map<DihedralElement, int> eidx;
    for (int i = 0; i < static_cast<int>(elems.size()); ++i) eidx[elems[i]] = i;
    const int ell = g.tile_count();

    auto face_id = [&](int t, int ui) { return ui * ell + t; };

    std::vector<Face> faces;
    faces.reserve(elems.size() * ell);
    for (int ui = 0; ui < static_cast<int>(elems.size()); ++ui) {
        const DihedralElement& u = elems[ui];
        Mat2 mu = G.matrix(u);
        for (int t = 0; t < ell; ++t) {
            const Tile& tile = g.tiles()[t];
            Face fc;
            fc.tile = t;
            fc.g = u;
            fc.reversed = u.flip != tile.lin.flip;
            fc.verts.resize(m);
            fc.slot_vertex.resize(m);
            for (int s = 0; s < m; ++s) {
                int v = fc.reversed ? (m - s) % m : s;
                fc.verts[s] = apply(mu, tile.verts[v]);
                fc.slot_vertex[s] = v;
            }
            faces.push_back(std::move(fc));
        }
    }

    auto slot_of_edge = [&](const Face& fc, int e) {
        return fc.reversed ? (m - 1 - e) % m : e;
    };

    std::vector<std::vector<std::pair<int, int>>> pairs(faces.size(),
                                                        std::vector<std::pair<int, int>>(m));
    for (int ui = 0; ui < static_cast<int>(elems.size()); ++ui) {
        const DihedralElement& u = elems[ui];
        for (int t = 0; t < ell; ++t) {
            int f = face_id(t, ui);
            for (int e = 0; e < m; ++e) {
                int f2, e2;
                if (!g.is_boundary_edge(t, e)) {
                    auto [t2, ee2] = g.glued_to(t, e);
                    f2 = face_id(t2, ui);
                    e2 = ee2;
                } else {
                    // Reflect the whole garage copy in the boundary edge:
                    // partner copy u * rho_d where d is the edge direction
                    // in the garage's own plane.
                    int d = G.apply_dir(g.tiles()[t].lin, base.edge_dir(e));
                    DihedralElement u2 = G.compose(u, G.reflection(d));
                    f2 = face_id(t, eidx.at(u2));
                    e2 = e;
                }
                pairs[f][slot_of_edge(faces[f], e)] = {f2, slot_of_edge(faces[f2], e2)};
            }
        }
    }

    return TranslationSurface(std::move(faces), std::move(pairs), base.angles(), n, g.tol());
}

TranslationSurface TranslationSurface::torus(double w, double h) {
    Face fc;
    fc.tile = 0;
    fc.g = {0, false};
    fc.verts = {{0, 0}, {w, 0}, {w, h}, {0, h}};
    fc.slot_vertex = {0, 1, 2, 3};
    std::vector<std::vector<std::pair<int, int>>> pairs = {
        {{0, 2}, {0, 3}, {0, 0}, {0, 1}}};
    return TranslationSurface({fc}, pairs,
                              {Frac(1, 2), Frac(1, 2), Frac(1, 2), Frac(1, 2)}, 2, {});
}

} // namespace gfold

#include "gfold/garage.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include "gfold/families.hpp"

namespace gfold {

namespace {

struct Affine {
    Mat2 m;
    Vec2 b;
    Vec2 operator()(const Vec2& p) const { return apply(m, p) + b; }
};

Affine affine_compose(const Affine& f, const Affine& g) {  // f o g
    return {f.m * g.m, apply(f.m, g.b) + f.b};
}

Affine line_reflection(const Vec2& a, const Vec2& b) {
    Vec2 u = b - a;
    double n2 = dot(u, u);
    Mat2 m{(u.x * u.x - u.y * u.y) / n2, 2 * u.x * u.y / n2, 2 * u.x * u.y / n2,
           (u.y * u.y - u.x * u.x) / n2};
    return {m, a - apply(m, a)};
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

Garage::Garage(BasePolygon base, std::vector<std::vector<int>> words, std::vector<Gluing> gluings,
               const Tolerances& tol)
    : base_(std::move(base)), gluings_(std::move(gluings)), tol_(tol) {
    const int m = base_.size();
    const int n = base_.group_order();
    DihedralGroup G(n);

    if (words.empty()) throw parameter_constraint("complex needs at least one tile");

    for (const auto& word : words) {
        Tile t;
        t.word = word;
        Affine A{{1, 0, 0, 1}, {0, 0}};
        DihedralElement lin = G.identity();
        for (int e : word) {
            if (e < 0 || e >= m)
                throw index_error("reflection word names edge " + std::to_string(e));
            A = affine_compose(A, line_reflection(base_.edge_start(e), base_.edge_end(e)));
            lin = G.compose(lin, G.reflection(base_.edge_dir(e)));
        }
        t.lin = lin;
        t.mat = G.matrix(lin);
        t.shift = A.b;
        for (int v = 0; v < m; ++v) t.verts.push_back(t.map(base_.vertex(v)));
        tiles_.push_back(std::move(t));
    }
    const int ell = tile_count();

    partner_.assign(ell, std::vector<std::pair<int, int>>(m, {-1, -1}));
    for (const Gluing& gl : gluings_) {
        if (gl.t1 < 0 || gl.t1 >= ell || gl.t2 < 0 || gl.t2 >= ell || gl.e1 < 0 || gl.e1 >= m ||
            gl.e2 < 0 || gl.e2 >= m)
            throw index_error("gluing references nonexistent tile or edge");
        if (partner_[gl.t1][gl.e1].first >= 0 || partner_[gl.t2][gl.e2].first >= 0)
            throw gluing_mismatch("edge glued more than once");
        if (gl.t1 == gl.t2 && gl.e1 == gl.e2)
            throw gluing_mismatch("edge glued to itself");

        if (std::fabs(base_.edge_len(gl.e1) - base_.edge_len(gl.e2)) > tol_.eps_len)
            throw edge_length_mismatch(
                "glued edges " + std::to_string(gl.e1) + " and " + std::to_string(gl.e2) +
                " have different lengths");

        // The two copies must differ exactly by the reflection in the
        // shared edge, seen from either side.
        DihedralElement rel = G.compose(G.inverse(tiles_[gl.t1].lin), tiles_[gl.t2].lin);
        if (!(rel == G.reflection(base_.edge_dir(gl.e1))) ||
            base_.edge_dir(gl.e1) != base_.edge_dir(gl.e2))
            throw gluing_mismatch("reflection condition fails at tiles " +
                                  std::to_string(gl.t1) + "." + std::to_string(gl.e1) + " / " +
                                  std::to_string(gl.t2) + "." + std::to_string(gl.e2));

        // And the planar images must coincide as segments.
        Vec2 a0 = tiles_[gl.t1].verts[gl.e1];
        Vec2 a1 = tiles_[gl.t1].verts[base_.index(gl.e1 + 1)];
        Vec2 b0 = tiles_[gl.t2].verts[gl.e2];
        Vec2 b1 = tiles_[gl.t2].verts[base_.index(gl.e2 + 1)];
        bool straight = nearly_equal(a0, b0, tol_.eps_len) && nearly_equal(a1, b1, tol_.eps_len);
        bool crossed = nearly_equal(a0, b1, tol_.eps_len) && nearly_equal(a1, b0, tol_.eps_len);
        if (!straight && !crossed)
            throw gluing_mismatch("glued edges are not coincident in the plane");

        partner_[gl.t1][gl.e1] = {gl.t2, gl.e2};
        partner_[gl.t2][gl.e2] = {gl.t1, gl.e1};
    }

    // Connectivity over tiles through gluings.
    {
        std::vector<char> seen(ell, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            int t = q.front();
            q.pop();
            for (int e = 0; e < m; ++e) {
                int t2 = partner_[t][e].first;
                if (t2 >= 0 && !seen[t2]) {
                    seen[t2] = 1;
                    q.push(t2);
                }
            }
        }
        if (std::count(seen.begin(), seen.end(), 1) != ell)
            throw disconnected_complex("glued complex is not connected");
    }

    // Corner identification: each gluing matches the endpoint corners of
    // the two edges, decided by planar coincidence.
    UnionFind uf(ell * m);
    auto cid = [m](int t, int v) { return t * m + v; };
    for (const Gluing& gl : gluings_) {
        int a0 = gl.e1, a1 = base_.index(gl.e1 + 1);
        int b0 = gl.e2, b1 = base_.index(gl.e2 + 1);
        if (nearly_equal(tiles_[gl.t1].verts[a0], tiles_[gl.t2].verts[b0], tol_.eps_len)) {
            uf.unite(cid(gl.t1, a0), cid(gl.t2, b0));
            uf.unite(cid(gl.t1, a1), cid(gl.t2, b1));
        } else {
            uf.unite(cid(gl.t1, a0), cid(gl.t2, b1));
            uf.unite(cid(gl.t1, a1), cid(gl.t2, b0));
        }
    }

    corner_class_.assign(ell, std::vector<int>(m, -1));
    std::vector<int> root_to_class(ell * m, -1);
    for (int t = 0; t < ell; ++t) {
        for (int v = 0; v < m; ++v) {
            int r = uf.find(cid(t, v));
            if (root_to_class[r] < 0) {
                root_to_class[r] = static_cast<int>(classes_.size());
                VertexClass c;
                c.base_vertex = v;
                c.total_angle = Frac(0);
                c.pos = tiles_[t].verts[v];
                classes_.push_back(c);
            }
            int ci = root_to_class[r];
            corner_class_[t][v] = ci;
            VertexClass& c = classes_[ci];
            if (c.base_vertex != v)
                throw gluing_mismatch("identified corners come from different base vertices");
            c.corners.push_back({t, v});
            c.total_angle = c.total_angle + base_.angles()[v];
            c.k += 1;
        }
    }

    // Boundary status and the interior 2*pi condition (the complex must
    // immerse in the plane: interior vertices close up exactly).
    int boundary_edges = 0;
    for (auto& c : classes_) c.boundary = false;
    for (int t = 0; t < ell; ++t) {
        for (int e = 0; e < m; ++e) {
            if (partner_[t][e].first < 0) {
                ++boundary_edges;
                classes_[corner_class_[t][e]].boundary = true;
                classes_[corner_class_[t][base_.index(e + 1)]].boundary = true;
            }
        }
    }
    if (boundary_edges == 0) throw gluing_mismatch("complex has no boundary");
    for (const auto& c : classes_) {
        if (!c.boundary && c.total_angle != Frac(2))
            throw gluing_mismatch("interior vertex has total angle " + c.total_angle.str() +
                                  " (expected exactly 2)");
    }

    // Boundary loops: walk unglued edges endpoint to endpoint.  Each
    // boundary class has exactly two unglued edge slots.
    {
        struct Slot {
            int t, e;
            int end;  // 0: corner (t,e), 1: corner (t,e+1)
        };
        std::vector<std::vector<Slot>> slots_by_class(classes_.size());
        for (int t = 0; t < ell; ++t)
            for (int e = 0; e < m; ++e)
                if (partner_[t][e].first < 0) {
                    slots_by_class[corner_class_[t][e]].push_back({t, e, 0});
                    slots_by_class[corner_class_[t][base_.index(e + 1)]].push_back({t, e, 1});
                }
        for (size_t c = 0; c < classes_.size(); ++c) {
            size_t want = classes_[c].boundary ? 2 : 0;
            if (slots_by_class[c].size() != want)
                throw gluing_mismatch("complex is not a surface with boundary at a vertex");
        }
        std::vector<std::vector<char>> visited(ell, std::vector<char>(m, 0));
        for (int t0 = 0; t0 < ell; ++t0) {
            for (int e0 = 0; e0 < m; ++e0) {
                if (partner_[t0][e0].first >= 0 || visited[t0][e0]) continue;
                std::vector<int> cycle;
                int t = t0, e = e0, arrive_end = 1;
                while (!visited[t][e]) {
                    visited[t][e] = 1;
                    int v = arrive_end == 1 ? base_.index(e + 1) : e;
                    int c = corner_class_[t][v];
                    cycle.push_back(c);
                    // leave through the class's other unglued slot
                    const auto& sl = slots_by_class[c];
                    for (const auto& s : sl) {
                        if (s.t == t && s.e == e && s.end == arrive_end) continue;
                        t = s.t;
                        e = s.e;
                        arrive_end = 1 - s.end;
                        break;
                    }
                }
                cycles_.push_back(std::move(cycle));
            }
        }
    }
}

DihedralGroup Garage::garage_group() const {
    long long l = 1;
    for (const auto& c : classes_)
        if (c.boundary) l = std::lcm(l, c.total_angle.den);
    return DihedralGroup(static_cast<int>(l));
}

DihedralSubgroup Garage::reflection_subgroup() const {
    const int n = base_.group_order();
    DihedralGroup G(n);
    std::vector<int> ks;
    for (int t = 0; t < tile_count(); ++t)
        for (int e = 0; e < base_.size(); ++e)
            if (partner_[t][e].first < 0)
                ks.push_back(G.apply_dir(tiles_[t].lin, base_.edge_dir(e)));
    DihedralSubgroup h = DihedralSubgroup::from_reflection_indices(n, ks);
    if (n / h.step != garage_group().n)
        throw error("internal: reflection subgroup order disagrees with boundary angles");
    return h;
}

bool Garage::embedded() const {
    for (int i = 0; i < tile_count(); ++i)
        for (int j = i + 1; j < tile_count(); ++j)
            if (polygons_overlap(tiles_[i].verts, tiles_[j].verts, tol_.eps_len)) return false;
    return true;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        if (tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

Frac parse_frac(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Frac(std::stoll(s), 1);
        return Frac(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw parse_error("bad fraction: " + s);
    }
}

std::pair<int, int> parse_slot(const std::string& s) {
    auto dotp = s.find('.');
    if (dotp == std::string::npos) throw parse_error("bad edge reference: " + s);
    try {
        return {std::stoi(s.substr(0, dotp)), std::stoi(s.substr(dotp + 1))};
    } catch (const std::exception&) {
        throw parse_error("bad edge reference: " + s);
    }
}

} // namespace

Garage parse_garage(std::istream& in, const Tolerances& tol) {
    std::string line;
    int lineno = 0;
    std::vector<Vec2> verts;
    std::vector<Frac> angles_sparse;
    std::vector<std::vector<int>> words;
    std::vector<Gluing> gluings;
    bool saw_base = false;

    auto fail = [&](const std::string& msg) -> void {
        throw parse_error("line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokenize(line);
        if (tok.empty()) continue;
        const std::string& kw = tok[0];
        if (kw == "family") {
            if (tok.size() < 3) fail("family needs a name and a parameter");
            int n = 0;
            try {
                n = std::stoi(tok[2]);
            } catch (const std::exception&) {
                fail("bad family parameter: " + tok[2]);
            }
            return make_family(tok[1], n, tok.size() > 3 ? tok[3] : "");
        } else if (kw == "base") {
            saw_base = true;
        } else if (kw == "v") {
            if (!saw_base) fail("vertex before 'base'");
            if (tok.size() != 3) fail("vertex needs two coordinates");
            try {
                verts.push_back({std::stod(tok[1]), std::stod(tok[2])});
            } catch (const std::exception&) {
                fail("bad coordinate");
            }
        } else if (kw == "angle") {
            if (tok.size() != 3) fail("angle needs an index and a value");
            size_t i = 0;
            try {
                i = static_cast<size_t>(std::stoul(tok[1]));
            } catch (const std::exception&) {
                fail("bad angle index");
            }
            if (angles_sparse.size() <= i) angles_sparse.resize(i + 1, Frac(0));
            angles_sparse[i] = parse_frac(tok[2]);
        } else if (kw == "tile") {
            if (tok.size() < 3 || tok[2] != "word") fail("expected: tile <id> word [edges...]");
            int id = 0;
            try {
                id = std::stoi(tok[1]);
            } catch (const std::exception&) {
                fail("bad tile id");
            }
            if (id != static_cast<int>(words.size())) fail("tile ids must be sequential from 0");
            std::vector<int> w;
            for (size_t i = 3; i < tok.size(); ++i) {
                try {
                    w.push_back(std::stoi(tok[i]));
                } catch (const std::exception&) {
                    fail("bad edge index in word");
                }
            }
            words.push_back(std::move(w));
        } else if (kw == "glue") {
            if (tok.size() != 3) fail("glue needs two tile.edge references");
            auto a = parse_slot(tok[1]);
            auto b = parse_slot(tok[2]);
            gluings.push_back({a.first, a.second, b.first, b.second});
        } else {
            fail("unknown keyword: " + kw);
        }
    }
    if (!saw_base) throw parse_error("file declares neither 'family' nor 'base'");
    if (verts.size() != angles_sparse.size())
        throw parse_error("angle count does not match vertex count");
    for (const Frac& a : angles_sparse)
        if (a.num == 0) throw parse_error("missing angle declaration");
    return Garage(BasePolygon(verts, angles_sparse, tol), words, gluings, tol);
}

Garage parse_garage_file(const std::string& path, const Tolerances& tol) {
    std::ifstream f(path);
    if (!f) throw parse_error("cannot open " + path);
    return parse_garage(f, tol);
}

std::string serialize_garage(const Garage& g) {
    std::ostringstream out;
    if (!g.family_note.empty()) out << "# family " << g.family_note << "\n";
    out << "base\n";
    char buf[64];
    for (const Vec2& v : g.base().vertices()) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x, v.y);
        out << buf;
    }
    for (int i = 0; i < g.base().size(); ++i)
        out << "angle " << i << " " << g.base().angles()[i].str() << "\n";
    for (int t = 0; t < g.tile_count(); ++t) {
        out << "tile " << t << " word";
        for (int e : g.tiles()[t].word) out << " " << e;
        out << "\n";
    }
    for (const Gluing& gl : g.gluings())
        out << "glue " << gl.t1 << "." << gl.e1 << " " << gl.t2 << "." << gl.e2 << "\n";
    return out.str();
}

} // namespace gfold

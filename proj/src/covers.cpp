#include "gfold/covers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gfold/errors.hpp"

namespace gfold {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 unit(Vec2 v) {
    double n = v.norm();
    if (n <= 0) throw parameter_constraint("zero direction vector");
    return {v.x / n, v.y / n};
}

double angle_ccw(const Vec2& a, const Vec2& b) {
    double ang = std::atan2(cross(a, b), dot(a, b));
    if (ang < 0) ang += 2 * kPi;
    return ang;
}

bool wedge_contains(const Face& fc, int s, const Vec2& d) {
    Vec2 lo = unit(fc.edge_vec(s));
    Vec2 hi = unit(-fc.edge_vec(s - 1));
    double span = angle_ccw(lo, hi);
    double phi = angle_ccw(lo, d);
    return phi < span - 1e-12 || phi >= 2 * kPi - 1e-12;
}

// Everything downstream of a certificate reuses the same derived data.
struct CoverCtx {
    TranslationSurface MP, MQ;
    DihedralGroup G;
    DihedralSubgroup GP, GQ;
    std::map<DihedralElement, int> mp_face_of;  // group element -> M_P face
    std::vector<int> face_map;                  // M_Q face -> M_P face
    std::vector<int> class_map;                 // M_Q class -> M_P class
    int degree = 1;
};

int slot_image(const Face& src, const Face& dst, int p) {
    int v = src.slot_vertex[p];
    for (int q = 0; q < dst.size(); ++q)
        if (dst.slot_vertex[q] == v) return q;
    throw error("faces of one unfolding disagree on vertex labels");
}

CoverCtx build_ctx(const TilingCertificate& cert) {
    CoverCtx ctx{TranslationSurface::unfold(cert.P),
                 TranslationSurface::unfold(cert.Q),
                 DihedralGroup(cert.P.base().group_order()),
                 cert.P.reflection_subgroup(),
                 cert.Q.reflection_subgroup(),
                 {},
                 {},
                 {},
                 1};

    for (const auto& u : ctx.GQ.elements())
        if (!ctx.GP.contains(u))
            throw geometry_mismatch("tiling group is not contained in the polygon group");

    for (int f = 0; f < ctx.MP.face_count(); ++f)
        ctx.mp_face_of[ctx.MP.face(f).g] = f;

    ctx.face_map.resize(ctx.MQ.face_count());
    for (int f = 0; f < ctx.MQ.face_count(); ++f) {
        const Face& fc = ctx.MQ.face(f);
        DihedralElement w = ctx.G.compose(fc.g, cert.Q.tiles()[fc.tile].lin);
        auto it = ctx.mp_face_of.find(w);
        if (it == ctx.mp_face_of.end())
            throw geometry_mismatch("tile copy falls outside the polygon unfolding group");
        ctx.face_map[f] = it->second;

        // Covering faces are translates of their images.
        const Face& pf = ctx.MP.face(it->second);
        if (fc.size() != pf.size() || fc.slot_vertex != pf.slot_vertex ||
            fc.reversed != pf.reversed)
            throw geometry_mismatch("covering face layout mismatch");
        Vec2 tau = fc.verts[0] - pf.verts[0];
        for (int v = 1; v < fc.size(); ++v)
            if (!nearly_equal(fc.verts[v] - pf.verts[v], tau, 1e-6))
                throw geometry_mismatch("covering face is not a translate of its image");
    }

    if (ctx.MQ.face_count() % ctx.MP.face_count() != 0)
        throw geometry_mismatch("face counts are incompatible with a covering");
    ctx.degree = ctx.MQ.face_count() / ctx.MP.face_count();

    ctx.class_map.assign(ctx.MQ.vertex_classes().size(), -1);
    for (int qc = 0; qc < static_cast<int>(ctx.MQ.vertex_classes().size()); ++qc) {
        for (auto [f, sl] : ctx.MQ.vertex_classes()[qc].corners) {
            int down = ctx.MP.class_of(ctx.face_map[f], sl);
            if (ctx.class_map[qc] < 0)
                ctx.class_map[qc] = down;
            else if (ctx.class_map[qc] != down)
                throw geometry_mismatch("vertex class does not project to a single point");
        }
    }
    return ctx;
}

std::vector<std::vector<FiberPoint>> build_fibers(const TilingCertificate& cert,
                                                  const CoverCtx& ctx) {
    std::vector<std::vector<FiberPoint>> fibers(ctx.MP.vertex_classes().size());
    for (int qc = 0; qc < static_cast<int>(ctx.MQ.vertex_classes().size()); ++qc) {
        int down = ctx.class_map[qc];
        int tq = ctx.MQ.vertex_classes()[qc].turns;
        int tp = ctx.MP.vertex_classes()[down].turns;
        if (tq % tp != 0)
            throw geometry_mismatch("cone turns upstairs are not a multiple of downstairs");
        auto [f, sl] = ctx.MQ.vertex_classes()[qc].corners.front();
        const Face& fc = ctx.MQ.face(f);
        int gcls = cert.Q.class_of_corner(fc.tile, fc.slot_vertex[sl]);
        fibers[down].push_back({qc, cert.Q.vertex_classes()[gcls].k, tq / tp});
    }
    for (const auto& fiber : fibers) {
        int total = 0;
        for (const auto& fp : fiber) total += fp.e;
        if (total != ctx.degree)
            throw geometry_mismatch("ramification indices do not sum to the degree");
    }
    return fibers;
}

} // namespace

TilingCertificate certify_tiling(const Garage& P, const Garage& Q) {
    if (P.tile_count() != 1)
        throw parameter_constraint("reference polygon must be a single-tile complex");
    if (!(P.tiles()[0].lin == DihedralElement{}))
        throw parameter_constraint("reference tile must carry the identity placement");
    if (P.base().angles() != Q.base().angles())
        throw geometry_mismatch("complexes are built over different polygons");
    const auto& pv = P.base().vertices();
    const auto& qv = Q.base().vertices();
    if (pv.size() != qv.size()) throw geometry_mismatch("complexes are built over different polygons");
    for (size_t i = 0; i < pv.size(); ++i)
        if (!nearly_equal(pv[i], qv[i], P.tol().eps_geom))
            throw geometry_mismatch("base polygon coordinates differ");

    TilingCertificate cert{P, Q, {}, {}, Q.tile_count()};
    DihedralGroup G(P.base().group_order());
    for (const Tile& t : Q.tiles()) cert.tile_elems.push_back(t.lin);
    for (const Gluing& gl : Q.gluings()) {
        DihedralElement refl =
            G.compose(G.inverse(Q.tiles()[gl.t1].lin), Q.tiles()[gl.t2].lin);
        if (!refl.flip)
            throw gluing_mismatch("glued tiles are not related by a reflection");
        cert.witnesses.push_back({gl.t1, gl.e1, gl.t2, gl.e2, gl.e1, refl});
    }
    return cert;
}

CoverReport cover_analysis(const TilingCertificate& cert) {
    CoverCtx ctx = build_ctx(cert);
    auto fibers = build_fibers(cert, ctx);

    std::vector<int> branch_set;
    int defect = 0;
    for (int c = 0; c < static_cast<int>(fibers.size()); ++c) {
        bool branched = false;
        for (const auto& fp : fibers[c]) {
            defect += fp.e - 1;
            if (fp.e > 1) branched = true;
        }
        if (branched) branch_set.push_back(c);
    }

    int index = ctx.GQ.index() / ctx.GP.index();
    if (ctx.GQ.index() % ctx.GP.index() != 0)
        throw geometry_mismatch("group indices are incompatible");
    int chi_P = ctx.MP.chi();
    int chi_Q = ctx.MQ.chi();
    bool rh = (chi_Q == ctx.degree * chi_P - defect);

    return CoverReport{ctx.degree, index,  std::move(fibers),   branch_set,
                       rh,         chi_P,  chi_Q,               std::move(ctx.MP),
                       std::move(ctx.MQ),  std::move(ctx.face_map),
                       std::move(ctx.class_map)};
}

std::map<int, bool> branch_point_count(const TilingCertificate& cert) {
    CoverCtx ctx = build_ctx(cert);
    auto fibers = build_fibers(cert, ctx);
    std::map<int, bool> out;
    for (int c = 0; c < static_cast<int>(fibers.size()); ++c) {
        bool branched = false;
        for (const auto& fp : fibers[c])
            if (fp.e > 1) branched = true;
        out[c] = branched;
    }
    return out;
}

int count_branch_points(const std::map<int, bool>& m) {
    int n = 0;
    for (const auto& [cls, flag] : m) n += flag ? 1 : 0;
    return n;
}

namespace {

// Try to lift the affine map induced by g (an element of the polygon's
// reflection group) to a face bijection of M_Q starting from F(0) = f0.
bool try_lift(const CoverCtx& ctx, const DihedralElement& g, int f0) {
    const TranslationSurface& MQ = ctx.MQ;
    int n = MQ.face_count();
    std::vector<int> F(n, -1);
    std::vector<char> used(n, 0);
    auto target_elem = [&](int f) {
        return ctx.G.compose(g, ctx.MP.face(ctx.face_map[f]).g);
    };
    if (!(ctx.MP.face(ctx.face_map[f0]).g == target_elem(0))) return false;

    std::vector<int> queue = {0};
    F[0] = f0;
    used[f0] = 1;
    while (!queue.empty()) {
        int f = queue.back();
        queue.pop_back();
        const Face& src = MQ.face(f);
        const Face& dst = MQ.face(F[f]);
        for (int p = 0; p < src.size(); ++p) {
            auto [f2, p2] = MQ.pair_of(f, p);
            int qa, qb;
            try {
                qa = slot_image(src, dst, p);
                qb = slot_image(src, dst, src.wrap(p + 1));
            } catch (const error&) {
                return false;
            }
            // The stored edge (p, p+1) maps to the stored edge spanning the
            // image slots; when the lift reverses orientation that edge
            // starts at the image of p+1.
            int pe;
            if (dst.wrap(qa + 1) == qb)
                pe = qa;
            else if (dst.wrap(qb + 1) == qa)
                pe = qb;
            else
                return false;
            auto [g2, p2i] = MQ.pair_of(F[f], pe);
            (void)p2i;
            if (!(ctx.MP.face(ctx.face_map[g2]).g == target_elem(f2))) return false;
            if (F[f2] < 0) {
                if (used[g2]) return false;
                F[f2] = g2;
                used[g2] = 1;
                queue.push_back(f2);
            } else if (F[f2] != g2) {
                return false;
            }
        }
    }
    for (int f = 0; f < n; ++f)
        if (F[f] < 0) return false;

    // Secondary geometric assertion: each face must map onto its image by
    // the linear map of g followed by one translation.
    Mat2 M = ctx.G.matrix(g);
    for (int f = 0; f < n; ++f) {
        const Face& src = MQ.face(f);
        const Face& dst = MQ.face(F[f]);
        Vec2 tau;
        for (int p = 0; p < src.size(); ++p) {
            int q = slot_image(src, dst, p);
            Vec2 d = dst.verts[q] - apply(M, src.verts[p]);
            if (p == 0)
                tau = d;
            else if (!nearly_equal(d, tau, 1e-6))
                return false;
        }
    }
    return true;
}

} // namespace

std::vector<DihedralElement> tiling_stabilizer(const TilingCertificate& cert) {
    CoverCtx ctx = build_ctx(cert);
    std::vector<DihedralElement> stab;
    for (const auto& g : ctx.GP.elements()) {
        bool ok = false;
        for (int f0 = 0; f0 < ctx.MQ.face_count() && !ok; ++f0)
            ok = try_lift(ctx, g, f0);
        if (ok) stab.push_back(g);
    }
    for (const auto& u : ctx.GQ.elements())
        if (std::find(stab.begin(), stab.end(), u) == stab.end())
            throw error("deck group element missing from the stabilizer");
    std::sort(stab.begin(), stab.end());
    return stab;
}

SuitabilityVerdict suitability_screen(const TilingCertificate& cert, bool lattice_flag) {
    SuitabilityVerdict v;
    auto add = [&](std::string name, bool pass, std::string evidence) {
        v.checks.push_back({std::move(name), pass, std::move(evidence)});
    };

    add("lattice-catalog", lattice_flag,
        lattice_flag ? "base polygon is in the verified lattice catalog"
                     : "base polygon is not covered by the lattice catalog");

    CoverCtx ctx = build_ctx(cert);
    auto fibers = build_fibers(cert, ctx);
    std::vector<int> branch_classes;
    for (int c = 0; c < static_cast<int>(fibers.size()); ++c)
        for (const auto& fp : fibers[c])
            if (fp.e > 1) {
                branch_classes.push_back(c);
                break;
            }
    {
        std::ostringstream ev;
        ev << "branch point count = " << branch_classes.size();
        add("single-branch-point", branch_classes.size() == 1, ev.str());
    }

    {
        int nq = cert.Q.garage_group().n;
        std::ostringstream ev;
        ev << "reflection group is dihedral with N = " << nq << "; -Id "
           << (nq % 2 == 0 ? "present" : "absent");
        add("odd-group", nq % 2 == 1, ev.str());
    }

    {
        bool pass = true;
        std::ostringstream ev;
        for (const auto& vc : cert.Q.vertex_classes()) {
            if (!vc.boundary) continue;
            if (vc.total_angle.den % 2 == 0) {
                pass = false;
                ev << "boundary angle " << vc.total_angle.str()
                   << " pi has even reduced denominator";
                break;
            }
        }
        if (pass) ev << "all boundary angles have odd reduced denominator";
        add("odd-angle-denominators", pass, ev.str());
    }

    {
        bool pass = true;
        std::ostringstream ev;
        if (branch_classes.empty()) {
            ev << "no branch point to displace";
        } else {
            std::vector<DihedralElement> stab = tiling_stabilizer(cert);
            for (const auto& g : stab) {
                for (int x : branch_classes) {
                    auto [f0, s0] = ctx.MP.vertex_classes()[x].corners.front();
                    DihedralElement w = ctx.G.compose(g, ctx.MP.face(f0).g);
                    int f1 = ctx.mp_face_of.at(w);
                    int s1 = slot_image(ctx.MP.face(f0), ctx.MP.face(f1), s0);
                    if (ctx.MP.class_of(f1, s1) != x) {
                        pass = false;
                        ev << "stabilizer element (rot " << g.rot << ", flip " << g.flip
                           << ") moves a branch point";
                        break;
                    }
                }
                if (!pass) break;
            }
            if (pass) ev << "all " << stab.size() << " stabilizer elements fix the branch set pointwise";
        }
        add("branch-point-fixed", pass, ev.str());
    }

    v.suitable = true;
    for (const auto& c : v.checks) {
        if (!c.pass) {
            v.suitable = false;
            if (v.rejection_reason.empty()) v.rejection_reason = c.name;
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Continued-fraction heuristic and cylinder height splits

bool cf_appears_rational(double x, int depth, double cap,
                         std::vector<long long>* quotients) {
    if (quotients) quotients->clear();
    double cur = x;
    for (int i = 0; i < depth; ++i) {
        if (!std::isfinite(cur)) return true;
        double fl = std::floor(cur);
        long long a = static_cast<long long>(fl);
        if (quotients) quotients->push_back(a);
        if (i > 0 && static_cast<double>(a) > cap) return true;
        double frac = cur - fl;
        if (frac < 1e-12) return true;
        cur = 1.0 / frac;
    }
    return false;
}

namespace {

// Distance from a chart point to the first spine crossing in direction u.
// Cone points terminate the spine, so reaching one counts as arrival.
double probe_to_spine(const TranslationSurface& s, int face, Vec2 x, Vec2 u,
                      const std::vector<std::vector<SpineSegment>>& spine, double budget) {
    const Tolerances& tol = s.tol();
    int f = face;
    int skip = -1;
    double travelled = 0;
    while (travelled < budget) {
        const Face& fc = s.face(f);
        // First exit through the face boundary.
        int m = fc.size();
        double exit_t = 1e300;
        int exit_edge = -1;
        for (int p = 0; p < m; ++p) {
            Vec2 A = fc.verts[p];
            Vec2 e = fc.vertex(p + 1) - A;
            double den = cross(u, e);
            if (std::abs(den) < 1e-15) continue;
            double t = cross(A - x, e) / den;
            double sp = cross(A - x, u) / den;
            double floor_t = (p == skip) ? 1e-9 : 1e-12;
            if (t <= floor_t || sp < -1e-9 || sp > 1 + 1e-9) continue;
            if (t < exit_t) {
                exit_t = t;
                exit_edge = p;
            }
        }
        if (exit_edge < 0) throw error("height probe lost the face boundary");

        // Spine crossing on this chart segment?
        double best = 1e300;
        for (const SpineSegment& seg : spine[f]) {
            Vec2 e = seg.b - seg.a;
            double den = cross(u, e);
            if (std::abs(den) < 1e-15) continue;
            double t = cross(seg.a - x, e) / den;
            double sp = cross(seg.a - x, u) / den;
            if (sp < -1e-9 || sp > 1 + 1e-9) continue;
            if (t < -1e-12 || travelled + t <= 1e-9 || t > exit_t + 1e-12) continue;
            best = std::min(best, t);
        }
        // Cone point on the way there?
        for (int vtx = 0; vtx < m; ++vtx) {
            if (!s.vertex_classes()[s.class_of(f, vtx)].singular()) continue;
            Vec2 w = fc.verts[vtx] - x;
            double t = std::clamp(dot(w, u), 0.0, std::min(exit_t, best));
            if ((w - u * t).norm() > tol.eps_sing) continue;
            if (travelled + t <= 1e-9) continue;
            best = std::min(best, t);
        }
        if (best < 1e300) return travelled + best;

        travelled += exit_t;
        Vec2 hitp = x + u * exit_t;
        int vslot = -1;
        if ((hitp - fc.vertex(exit_edge)).norm() <= tol.eps_sing)
            vslot = exit_edge;
        else if ((hitp - fc.vertex(exit_edge + 1)).norm() <= tol.eps_sing)
            vslot = fc.wrap(exit_edge + 1);
        if (vslot >= 0) {
            int cls = s.class_of(f, vslot);
            if (s.vertex_classes()[cls].singular()) return travelled;
            // Flat vertex: continue from the corner owning u.
            const auto& corners = s.vertex_classes()[cls].corners;
            bool moved = false;
            for (auto [nf, ns] : corners) {
                if (!wedge_contains(s.face(nf), ns, u)) continue;
                f = nf;
                x = s.face(nf).verts[ns];
                skip = -1;
                moved = true;
                break;
            }
            if (!moved) throw error("height probe stuck at a flat vertex");
            continue;
        }
        auto tr = s.transition(f, exit_edge);
        x = hitp + tr.tau;
        f = tr.face;
        skip = tr.slot;
    }
    throw error("height probe exceeded its budget without reaching the spine");
}

HeightSplitReport split_from_charts(const TranslationSurface& s,
                                    const std::vector<std::pair<int, Vec2>>& charts,
                                    bool at_vertex_class, int vertex_class, Vec2 dir,
                                    double budget) {
    dir = unit(dir);
    DecompositionResult dec = cylinder_decomposition(s, dir, budget);
    if (dec.status != DecompStatus::Cylinders)
        throw no_cylinder_decomposition("direction does not decompose into cylinders");

    for (const auto& [f, p] : charts)
        for (const SpineSegment& seg : dec.spine_by_face[f])
            if (point_segment_distance(p, seg.a, seg.b) <= s.tol().eps_geom)
                throw point_on_boundary("point lies on a cylinder boundary");

    Vec2 down = -rotate90(dir);
    Vec2 up = rotate90(dir);
    auto start_chart = [&](const Vec2& u) -> std::pair<int, Vec2> {
        if (!at_vertex_class) return charts.front();
        const auto& corners = s.vertex_classes()[vertex_class].corners;
        for (auto [f, sl] : corners)
            if (wedge_contains(s.face(f), sl, u)) return {f, s.face(f).verts[sl]};
        return {corners.front().first,
                s.face(corners.front().first).verts[corners.front().second]};
    };
    auto [f1, p1] = start_chart(down);
    double h1 = probe_to_spine(s, f1, p1, down, dec.spine_by_face, budget);
    auto [f2, p2] = start_chart(up);
    double h2 = probe_to_spine(s, f2, p2, up, dec.spine_by_face, budget);
    double h = h1 + h2;

    double mismatch = 1e300;
    for (const Cylinder& c : dec.cylinders) mismatch = std::min(mismatch, std::abs(c.h - h));
    if (mismatch > 1e-6 * std::max(1.0, h))
        throw geometry_mismatch("height split does not match any cylinder height");

    HeightSplitReport rep;
    rep.h1 = h1;
    rep.h = h;
    rep.ratio = h1 / h;
    rep.appears_rational = cf_appears_rational(rep.ratio, 40, 1e6, &rep.quotients);
    return rep;
}

} // namespace

HeightSplitReport aperiodicity_evidence(const TranslationSurface& s, int vertex_class, Vec2 dir,
                                        double budget) {
    if (vertex_class < 0 || vertex_class >= static_cast<int>(s.vertex_classes().size()))
        throw index_error("vertex class out of range");
    std::vector<std::pair<int, Vec2>> charts;
    for (auto [f, sl] : s.vertex_classes()[vertex_class].corners)
        charts.push_back({f, s.face(f).verts[sl]});
    return split_from_charts(s, charts, true, vertex_class, dir, budget);
}

HeightSplitReport aperiodicity_evidence_at(const TranslationSurface& s, int face, Vec2 point,
                                           Vec2 dir, double budget) {
    if (face < 0 || face >= s.face_count()) throw index_error("face out of range");
    const Face& fc = s.face(face);
    std::vector<std::pair<int, Vec2>> charts = {{face, point}};
    for (int p = 0; p < fc.size(); ++p) {
        if (point_segment_distance(point, fc.vertex(p), fc.vertex(p + 1)) <= s.tol().eps_geom) {
            auto tr = s.transition(face, p);
            charts.push_back({tr.face, point + tr.tau});
            break;
        }
    }
    if (charts.size() == 1 && !point_in_polygon(point, fc.verts, s.tol().eps_geom))
        throw parameter_constraint("probe point not inside the face");
    return split_from_charts(s, charts, false, -1, dir, budget);
}

} // namespace gfold

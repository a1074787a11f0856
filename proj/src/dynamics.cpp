#include "gfold/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>

#include "gfold/errors.hpp"

namespace gfold {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long long kMaxCrossings = 100000000LL;

Vec2 unit(Vec2 v) {
    double n = v.norm();
    if (n <= 0) throw parameter_constraint("zero direction vector");
    return {v.x / n, v.y / n};
}

// CCW angle from a to b in [0, 2*pi).
double angle_ccw(const Vec2& a, const Vec2& b) {
    double ang = std::atan2(cross(a, b), dot(a, b));
    if (ang < 0) ang += 2 * kPi;
    return ang;
}

// The interior wedge of stored corner (f, s): directions from the vertex
// into the face, from lo (along edge s) counterclockwise to hi (along the
// reversed edge s-1).  Span equals the corner angle.
struct Wedge {
    Vec2 lo, hi;
    double span;
};

Wedge corner_wedge(const Face& fc, int s) {
    Vec2 lo = unit(fc.edge_vec(s));
    Vec2 hi = unit(-fc.edge_vec(s - 1));
    return {lo, hi, angle_ccw(lo, hi)};
}

// Half-open membership [lo, hi): the lo side belongs to this wedge, the hi
// side to the counterclockwise neighbour.
bool wedge_contains(const Wedge& w, const Vec2& d) {
    double phi = angle_ccw(w.lo, d);
    return phi < w.span - 1e-12 || phi >= 2 * kPi - 1e-12;
}

// Corner of the class whose wedge owns direction d (used to continue a
// geodesic through a regular vertex and to seed traces from a vertex).
std::pair<int, int> pick_wedge_corner(const TranslationSurface& s, int cls, const Vec2& d) {
    const auto& corners = s.vertex_classes()[cls].corners;
    for (auto [f, sl] : corners)
        if (wedge_contains(corner_wedge(s.face(f), sl), d)) return {f, sl};
    // Numerical fallback: the closest wedge, deterministically.
    double best = 1e300;
    std::pair<int, int> pick = corners.front();
    for (auto [f, sl] : corners) {
        Wedge w = corner_wedge(s.face(f), sl);
        double phi = angle_ccw(w.lo, d);
        double dist = phi < w.span ? 0 : std::min(phi - w.span, 2 * kPi - phi);
        if (dist < best) {
            best = dist;
            pick = {f, sl};
        }
    }
    return pick;
}

struct ExitHit {
    int edge = -1;
    double t = 0;
    double s = 0;
    Vec2 point;
};

// First boundary crossing of the ray x + t*dir, t > 0.  The entry edge
// (skip) uses a larger floor so the crossing we just made is not found
// again; all other edges use a tiny floor that still rejects the corner
// adjacencies of a vertex start.
ExitHit first_exit(const std::vector<Vec2>& poly, const Vec2& x, const Vec2& dir, int skip) {
    int m = static_cast<int>(poly.size());
    ExitHit best;
    best.t = 1e300;
    for (int p = 0; p < m; ++p) {
        Vec2 A = poly[p];
        Vec2 e = poly[(p + 1) % m] - A;
        double den = cross(dir, e);
        if (std::abs(den) < 1e-15) continue;
        double t = cross(A - x, e) / den;
        double sp = cross(A - x, dir) / den;
        double floor_t = (p == skip) ? 1e-9 : 1e-12;
        if (t <= floor_t || sp < -1e-9 || sp > 1 + 1e-9) continue;
        if (t < best.t) best = {p, t, sp, x + dir * t};
    }
    return best;
}

// Earliest arc position (within [0, t_use]) at which the segment from x
// passes within eps of a vertex of `terminal` class; -1 if none.  arc0 is
// the trajectory length already travelled before this segment.
struct ProximityHit {
    double u = -1;  // local arc along the segment
    int cls = -1;
};

template <typename Terminal>
ProximityHit segment_vertex_hit(const TranslationSurface& s, int f, const Vec2& x,
                                const Vec2& dir, double t_use, double arc0, double eps,
                                Terminal terminal) {
    const Face& fc = s.face(f);
    ProximityHit best;
    for (int v = 0; v < fc.size(); ++v) {
        int cls = s.class_of(f, v);
        if (!terminal(cls)) continue;
        Vec2 w = fc.verts[v] - x;
        double u = std::clamp(dot(w, dir), 0.0, t_use);
        if ((w - dir * u).norm() > eps) continue;
        if (arc0 + u <= 1e-7) continue;  // leaving our own start vertex
        if (best.u < 0 || u < best.u) best = {u, cls};
    }
    return best;
}

} // namespace

// ---------------------------------------------------------------------------
// Straight-line flow

Trajectory flow_trace(const TranslationSurface& s, int face, Vec2 start, Vec2 dir,
                      double max_len, bool record_segments) {
    if (face < 0 || face >= s.face_count()) throw index_error("flow start face out of range");
    dir = unit(dir);
    const Tolerances& tol = s.tol();

    {
        const Face& fc = s.face(face);
        for (int v = 0; v < fc.size(); ++v) {
            if ((start - fc.verts[v]).norm() <= tol.eps_sing) {
                if (s.vertex_classes()[s.class_of(face, v)].singular())
                    throw start_at_singularity("flow start at a cone point");
                throw parameter_constraint("flow start must be inside a face or on an edge interior");
            }
        }
    }

    // Representatives of the start point in every chart containing it, for
    // closure detection.
    std::vector<std::pair<int, Vec2>> reps = {{face, start}};
    int skip = -1;
    {
        const Face& fc = s.face(face);
        int on_edge = -1;
        for (int p = 0; p < fc.size(); ++p) {
            if (point_segment_distance(start, fc.vertex(p), fc.vertex(p + 1)) <= tol.eps_geom) {
                on_edge = p;
                break;
            }
        }
        if (on_edge >= 0) {
            auto tr = s.transition(face, on_edge);
            reps.push_back({tr.face, start + tr.tau});
            if (cross(fc.edge_vec(on_edge), dir) < -1e-12) {
                // Points out of this chart; continue from the partner.
                face = tr.face;
                start = start + tr.tau;
                skip = tr.slot;
            } else {
                skip = on_edge;
            }
        } else if (!point_in_polygon(start, fc.verts, tol.eps_geom)) {
            throw parameter_constraint("flow start not inside the face");
        }
    }

    Trajectory out;
    int f = face;
    Vec2 x = start;
    while (true) {
        const Face& fc = s.face(f);
        ExitHit hit = first_exit(fc.verts, x, dir, skip);
        if (hit.edge < 0) throw error("flow trace lost the face boundary");
        double t_use = std::min(hit.t, max_len - out.length);

        // Events on this segment, earliest first: cone-point proximity,
        // then recurrence at the start point.
        ProximityHit sing = segment_vertex_hit(
            s, f, x, dir, t_use, out.length, tol.eps_sing,
            [&](int cls) { return s.vertex_classes()[cls].singular(); });
        double closure_u = -1;
        for (const auto& [rf, rp] : reps) {
            if (rf != f) continue;
            double u = std::clamp(dot(rp - x, dir), 0.0, t_use);
            if ((rp - (x + dir * u)).norm() > tol.eps_close) continue;
            if (out.length + u <= 1e-6) continue;
            if (closure_u < 0 || u < closure_u) closure_u = u;
        }

        if (sing.u >= 0 && (closure_u < 0 || sing.u <= closure_u)) {
            if (record_segments) out.segments.push_back({f, x, x + dir * sing.u});
            out.length += sing.u;
            out.termination = Termination::SaddleHit;
            out.hit_class = sing.cls;
            return out;
        }
        if (closure_u >= 0) {
            if (record_segments) out.segments.push_back({f, x, x + dir * closure_u});
            out.length += closure_u;
            out.closed_length = out.length;
            out.termination = Termination::Closed;
            return out;
        }
        if (t_use < hit.t) {  // length budget ends mid-segment
            if (record_segments) out.segments.push_back({f, x, x + dir * t_use});
            out.length = max_len;
            out.termination = Termination::BudgetExhausted;
            return out;
        }

        if (record_segments) out.segments.push_back({f, x, hit.point});
        out.length += hit.t;
        if (++out.crossings > kMaxCrossings) {
            out.termination = Termination::BudgetExhausted;
            return out;
        }

        // Exit through (or next to) a vertex: pass through flat points.
        int vslot = -1;
        if ((hit.point - fc.vertex(hit.edge)).norm() <= tol.eps_sing)
            vslot = hit.edge;
        else if ((hit.point - fc.vertex(hit.edge + 1)).norm() <= tol.eps_sing)
            vslot = fc.wrap(hit.edge + 1);
        if (vslot >= 0) {
            int cls = s.class_of(f, vslot);
            if (s.vertex_classes()[cls].singular()) {
                out.termination = Termination::SaddleHit;
                out.hit_class = cls;
                return out;
            }
            auto [nf, ns] = pick_wedge_corner(s, cls, dir);
            f = nf;
            x = s.face(nf).verts[ns];
            skip = -1;
            continue;
        }

        auto tr = s.transition(f, hit.edge);
        x = hit.point + tr.tau;
        f = tr.face;
        skip = tr.slot;
    }
}

// ---------------------------------------------------------------------------
// Billiard flow in the garage plane

BilliardTrajectory billiard_trace(const Garage& g, int tile, Vec2 start, Vec2 dir,
                                  int max_bounces, double max_len) {
    if (tile < 0 || tile >= g.tile_count()) throw index_error("billiard start tile out of range");
    dir = unit(dir);
    const Tolerances& tol = g.tol();
    const Vec2 launch_dir = dir;

    {
        const Tile& t0 = g.tiles()[tile];
        int m = static_cast<int>(t0.verts.size());
        for (int p = 0; p < m; ++p) {
            if (point_segment_distance(start, t0.verts[p], t0.verts[(p + 1) % m]) <= tol.eps_geom)
                throw start_on_boundary("billiard start on a tile edge");
        }
        if (!point_in_polygon(start, t0.verts, tol.eps_geom))
            throw parameter_constraint("billiard start not inside the tile");
    }

    auto terminal_corner = [&](int t, int v) {
        return g.vertex_classes()[g.class_of_corner(t, v)].boundary;
    };

    BilliardTrajectory out;
    int t = tile;
    Vec2 x = start;
    int skip = -1;
    long long crossings = 0;
    while (true) {
        const std::vector<Vec2>& poly = g.tiles()[t].verts;
        int m = static_cast<int>(poly.size());
        ExitHit hit = first_exit(poly, x, dir, skip);
        if (hit.edge < 0) throw error("billiard trace lost the tile boundary");
        double t_use = std::min(hit.t, max_len - out.length);

        // Corner proximity along the segment (boundary corners stop the
        // billiard; interior 2*pi vertices are flat points).
        double corner_u = -1;
        for (int v = 0; v < m; ++v) {
            if (!terminal_corner(t, v)) continue;
            Vec2 w = poly[v] - x;
            double u = std::clamp(dot(w, dir), 0.0, t_use);
            if ((w - dir * u).norm() > tol.eps_sing) continue;
            if (out.length + u <= 1e-7) continue;
            if (corner_u < 0 || u < corner_u) corner_u = u;
        }
        double closure_u = -1;
        if (t == tile && (dir - launch_dir).norm() <= 1e-9) {
            double u = std::clamp(dot(start - x, dir), 0.0, t_use);
            if ((start - (x + dir * u)).norm() <= tol.eps_close && out.length + u > 1e-6)
                closure_u = u;
        }

        if (corner_u >= 0 && (closure_u < 0 || corner_u <= closure_u)) {
            out.segments.push_back({t, x, x + dir * corner_u});
            out.length += corner_u;
            out.termination = Termination::SaddleHit;
            return out;
        }
        if (closure_u >= 0) {
            out.segments.push_back({t, x, x + dir * closure_u});
            out.length += closure_u;
            out.termination = Termination::Closed;
            return out;
        }
        if (t_use < hit.t) {
            out.segments.push_back({t, x, x + dir * t_use});
            out.length = max_len;
            out.termination = Termination::BudgetExhausted;
            return out;
        }

        out.segments.push_back({t, x, hit.point});
        out.length += hit.t;
        if (++crossings > kMaxCrossings) {
            out.termination = Termination::BudgetExhausted;
            return out;
        }

        // Vertex exit: interior flat vertices are crossed, anything else
        // was caught by the proximity test above.
        int vslot = -1;
        if ((hit.point - poly[hit.edge]).norm() <= tol.eps_sing)
            vslot = hit.edge;
        else if ((hit.point - poly[(hit.edge + 1) % m]).norm() <= tol.eps_sing)
            vslot = (hit.edge + 1) % m;
        if (vslot >= 0) {
            int cls = g.class_of_corner(t, vslot);
            if (g.vertex_classes()[cls].boundary) {
                out.termination = Termination::SaddleHit;
                return out;
            }
            // Continue through the interior vertex: all tiles share one
            // plane, so wedges are compared globally.
            const auto& corners = g.vertex_classes()[cls].corners;
            int nt = -1, nv = -1;
            for (auto [ct, cv] : corners) {
                const std::vector<Vec2>& q = g.tiles()[ct].verts;
                int qm = static_cast<int>(q.size());
                Vec2 lo = unit(q[(cv + 1) % qm] - q[cv]);
                Vec2 hi = unit(q[(cv + qm - 1) % qm] - q[cv]);
                Wedge w{lo, hi, angle_ccw(lo, hi)};
                // Orientation-reversed tiles store their polygon clockwise;
                // the interior wedge then runs from hi to lo instead.
                if (polygon_area(q) < 0) w = {hi, lo, angle_ccw(hi, lo)};
                if (wedge_contains(w, dir)) {
                    nt = ct;
                    nv = cv;
                    break;
                }
            }
            if (nt < 0) {
                out.termination = Termination::SaddleHit;
                return out;
            }
            t = nt;
            x = g.tiles()[nt].verts[nv];
            skip = -1;
            continue;
        }

        if (g.is_boundary_edge(t, hit.edge)) {
            Vec2 e = unit(poly[(hit.edge + 1) % m] - poly[hit.edge]);
            dir = e * (2 * dot(dir, e)) - dir;
            x = hit.point;
            skip = hit.edge;
            if (++out.bounces >= max_bounces) {
                out.termination = Termination::BudgetExhausted;
                return out;
            }
        } else {
            auto [t2, e2] = g.glued_to(t, hit.edge);
            t = t2;
            x = hit.point;
            skip = e2;
        }
    }
}

// ---------------------------------------------------------------------------
// Saddle connection search: corridor development with sector pruning

namespace {

struct Candidate {
    int target;
    Vec2 hol;
    double r;
    bool singular;
};

struct SCState {
    int face;
    Vec2 dev;       // chart point + dev = coordinates seen from the source
    Vec2 lo, hi;    // direction sector, CCW span < pi
    int entry;      // entry edge slot, -1 for the root face
};

// Closed membership with boundary slack; the half-open bookkeeping is done
// at the corner-wedge level.
bool sector_contains(const Vec2& lo, const Vec2& hi, const Vec2& q) {
    double r = q.norm();
    return cross(lo, q) >= -1e-9 * r && cross(q, hi) >= -1e-9 * r;
}

// Half-open version for the root wedge: includes the lo boundary, excludes
// hi (the CCW neighbour corner owns it).
bool halfopen_contains(const Vec2& lo, double span, const Vec2& q) {
    double phi = angle_ccw(lo, unit(q));
    return phi < span - 1e-9 || phi >= 2 * kPi - 1e-9;
}

void search_from_corner(const TranslationSurface& s, int f0, int s0, double L,
                        std::vector<Candidate>& out) {
    const Face& root = s.face(f0);
    Wedge w0 = corner_wedge(root, s0);
    Vec2 dev0 = -root.verts[s0];

    std::vector<SCState> stack;
    auto push_cone = [&](Vec2 lo, Vec2 hi) { stack.push_back({f0, dev0, lo, hi, -1}); };
    if (cross(w0.lo, w0.hi) > 1e-12) {
        push_cone(w0.lo, w0.hi);
    } else {
        Vec2 mid = -(w0.lo + w0.hi);
        if (mid.norm() < 1e-9) mid = rotate90(w0.lo);
        mid = unit(mid);
        push_cone(w0.lo, mid);
        push_cone(mid, w0.hi);
    }

    long long states = 0;
    while (!stack.empty()) {
        if (++states > 20000000LL) throw error("saddle connection search exceeded state cap");
        SCState st = stack.back();
        stack.pop_back();
        const Face& fc = s.face(st.face);
        int m = fc.size();

        // Vertices visible in this corridor are saddle-connection
        // candidates; membership in the root's half-open wedge is what
        // prevents double counting across the fan.
        std::vector<Vec2> dv(m);
        for (int i = 0; i < m; ++i) dv[i] = fc.verts[i] + st.dev;
        for (int i = 0; i < m; ++i) {
            double r = dv[i].norm();
            if (r <= 1e-9 || r > L + 1e-9) continue;
            if (!sector_contains(st.lo, st.hi, dv[i])) continue;
            if (!halfopen_contains(w0.lo, w0.span, dv[i])) continue;
            int cls = s.class_of(st.face, i);
            out.push_back({cls, dv[i], r, s.vertex_classes()[cls].singular()});
        }

        // Split the sector at every vertex direction; inside each piece the
        // first exit edge is constant, so one midpoint ray identifies it.
        std::vector<Vec2> dirs = {st.lo, st.hi};
        for (int i = 0; i < m; ++i) {
            double r = dv[i].norm();
            if (r <= 1e-9) continue;
            Vec2 d = {dv[i].x / r, dv[i].y / r};
            if (cross(st.lo, d) >= -1e-12 && cross(d, st.hi) >= -1e-12) dirs.push_back(d);
        }
        std::sort(dirs.begin(), dirs.end(), [&](const Vec2& a, const Vec2& b) {
            return angle_ccw(st.lo, a) < angle_ccw(st.lo, b);
        });

        for (size_t i = 0; i + 1 < dirs.size(); ++i) {
            const Vec2& d1 = dirs[i];
            const Vec2& d2 = dirs[i + 1];
            if (angle_ccw(st.lo, d2) - angle_ccw(st.lo, d1) < 1e-12) continue;
            Vec2 mid = unit(d1 + d2);

            double t_in = 0;
            if (st.entry >= 0) {
                Vec2 A = dv[st.entry];
                Vec2 e = dv[(st.entry + 1) % m] - A;
                double den = cross(mid, e);
                if (std::abs(den) > 1e-15) t_in = std::max(0.0, cross(A, e) / den);
            }
            int exit_edge = -1;
            double exit_t = 1e300;
            for (int p = 0; p < m; ++p) {
                if (p == st.entry) continue;
                Vec2 A = dv[p];
                Vec2 e = dv[(p + 1) % m] - A;
                double den = cross(mid, e);
                if (std::abs(den) < 1e-15) continue;
                double t = cross(A, e) / den;
                double sp = cross(A, mid) / den;
                if (t <= t_in + 1e-12 || sp < -1e-9 || sp > 1 + 1e-9) continue;
                if (t < exit_t) {
                    exit_t = t;
                    exit_edge = p;
                }
            }
            if (exit_edge < 0) continue;
            if (point_segment_distance({0, 0}, dv[exit_edge], dv[(exit_edge + 1) % m]) >
                L + 1e-6)
                continue;
            auto tr = s.transition(st.face, exit_edge);
            stack.push_back({tr.face, st.dev - tr.tau, d1, d2, tr.slot});
        }
    }
}

// Merge duplicates (same geodesic reached along both sides of a sector
// boundary) and cut each direction at its first cone-point hit.
void dedup_and_filter(std::vector<Candidate>& cand) {
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        if (a.target != b.target) return a.target < b.target;
        if (a.hol.x != b.hol.x) return a.hol.x < b.hol.x;
        return a.hol.y < b.hol.y;
    });
    std::vector<Candidate> uniq;
    for (const auto& c : cand) {
        if (!uniq.empty() && uniq.back().target == c.target &&
            std::abs(uniq.back().hol.x - c.hol.x) <= 1e-7 &&
            std::abs(uniq.back().hol.y - c.hol.y) <= 1e-7)
            continue;
        uniq.push_back(c);
    }

    // Group by direction, ascending radius; drop everything behind the
    // first singular target (a cone point blocks the segment).
    std::sort(uniq.begin(), uniq.end(), [](const Candidate& a, const Candidate& b) {
        double ta = std::atan2(a.hol.y, a.hol.x);
        double tb = std::atan2(b.hol.y, b.hol.x);
        if (ta < -kPi + 1e-9) ta += 2 * kPi;
        if (tb < -kPi + 1e-9) tb += 2 * kPi;
        if (std::abs(ta - tb) > 1e-9) return ta < tb;
        return a.r < b.r;
    });
    cand.clear();
    size_t i = 0;
    while (i < uniq.size()) {
        size_t j = i;
        bool blocked = false;
        while (j < uniq.size()) {
            if (j > i) {
                double ti = std::atan2(uniq[i].hol.y, uniq[i].hol.x);
                double tj = std::atan2(uniq[j].hol.y, uniq[j].hol.x);
                if (ti < -kPi + 1e-9) ti += 2 * kPi;
                if (tj < -kPi + 1e-9) tj += 2 * kPi;
                if (std::abs(ti - tj) > 1e-9) break;
            }
            if (!blocked) {
                cand.push_back(uniq[j]);
                if (uniq[j].singular) blocked = true;
            }
            ++j;
        }
        i = j;
    }
}

} // namespace

std::vector<SaddleConnection> saddle_connection_instances(const TranslationSurface& s, double L) {
    if (L <= 0) throw parameter_constraint("saddle connection bound must be positive");
    std::vector<SaddleConnection> out;
    const auto& classes = s.vertex_classes();
    for (int c = 0; c < static_cast<int>(classes.size()); ++c) {
        std::vector<Candidate> cand;
        for (auto [f, sl] : classes[c].corners) search_from_corner(s, f, sl, L, cand);
        dedup_and_filter(cand);
        for (const auto& k : cand) out.push_back({c, k.target, k.hol});
    }
    std::sort(out.begin(), out.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
        if (a.source_class != b.source_class) return a.source_class < b.source_class;
        if (a.target_class != b.target_class) return a.target_class < b.target_class;
        if (a.hol.x != b.hol.x) return a.hol.x < b.hol.x;
        return a.hol.y < b.hol.y;
    });
    return out;
}

std::vector<HolonomyVector> saddle_connections(const TranslationSurface& s, double L) {
    std::vector<SaddleConnection> inst = saddle_connection_instances(s, L);
    std::vector<HolonomyVector> out;
    std::sort(inst.begin(), inst.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
        if (a.hol.x != b.hol.x) return a.hol.x < b.hol.x;
        return a.hol.y < b.hol.y;
    });
    for (const auto& sc : inst) {
        // Instances with equal x but distinct y interleave under the sort,
        // so scan the whole tolerance window, not just the previous entry.
        bool merged = false;
        for (int j = static_cast<int>(out.size()) - 1;
             j >= 0 && sc.hol.x - out[j].v.x <= 1e-7; --j) {
            if (std::abs(out[j].v.y - sc.hol.y) <= 1e-7 &&
                std::abs(out[j].v.x - sc.hol.x) <= 1e-7) {
                ++out[j].multiplicity;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back({sc.hol, 1});
    }
    std::sort(out.begin(), out.end(), [](const HolonomyVector& a, const HolonomyVector& b) {
        double na = a.v.norm(), nb = b.v.norm();
        if (std::abs(na - nb) > 1e-12) return na < nb;
        if (a.v.x != b.v.x) return a.v.x < b.v.x;
        return a.v.y < b.v.y;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Cylinder decomposition

namespace {

struct RayEntry {
    bool out;      // outgoing (+dir) or incoming (-dir)
    int corner;    // index into ClassFan::corners
    int ray = -1;  // separatrix id for out rays
};

struct ClassFan {
    std::vector<std::pair<int, int>> corners;  // (face, slot), CCW fan order
    std::vector<RayEntry> entries;             // cyclic, fan order
};

struct Separatrix {
    int source_class = -1;
    int target_class = -1;
    bool closed = false;
    double len = 0;
    int arrival_entry = -1;  // index into the target class fan entry list
    std::vector<std::pair<SpineSegment, int>> segs;  // segment + own ray id
};

struct RaySystem {
    std::vector<int> source_classes;
    std::map<int, ClassFan> fans;
    std::vector<Separatrix> seps;
};

// Fan of corners around a class in CCW order, with its +dir / -dir rays.
ClassFan build_fan(const TranslationSurface& s, int cls, const Vec2& dir) {
    const auto& corners = s.vertex_classes()[cls].corners;
    ClassFan out;
    auto cur = corners.front();
    do {
        out.corners.push_back(cur);
        int prev_slot = s.face(cur.first).wrap(cur.second - 1);
        cur = s.pair_of(cur.first, prev_slot);
    } while (cur != corners.front() && out.corners.size() <= corners.size());
    if (out.corners.size() != corners.size())
        throw error("vertex class fan does not close up");

    Vec2 neg = -dir;
    for (int ci = 0; ci < static_cast<int>(out.corners.size()); ++ci) {
        auto [f, sl] = out.corners[ci];
        Wedge w = corner_wedge(s.face(f), sl);
        auto pos_in_wedge = [&](const Vec2& d) {
            double phi = angle_ccw(w.lo, d);
            return phi >= 2 * kPi - 1e-12 ? 0.0 : phi;  // "at lo" wraps to zero
        };
        std::vector<std::pair<double, bool>> local;  // (angle in wedge, is_out)
        if (wedge_contains(w, dir)) local.push_back({pos_in_wedge(dir), true});
        if (wedge_contains(w, neg)) local.push_back({pos_in_wedge(neg), false});
        std::sort(local.begin(), local.end());
        for (auto [phi, is_out] : local) out.entries.push_back({is_out, ci, -1});
    }
    // The +dir and -dir rays alternate around the vertex.
    int n = static_cast<int>(out.entries.size());
    for (int i = 0; i < n; ++i)
        if (out.entries[i].out == out.entries[(i + 1) % n].out)
            throw error("separatrix rays do not alternate around a vertex class");
    return out;
}

// Trace one separatrix with the flow machinery; terminal classes stop it.
Separatrix trace_separatrix(const TranslationSurface& s, int cls, int f, int sl, int ray_id,
                            const Vec2& dir, double budget,
                            const std::vector<char>& terminal) {
    const Tolerances& tol = s.tol();
    Separatrix sep;
    sep.source_class = cls;
    int face = f;
    Vec2 x = s.face(f).verts[sl];
    int skip = -1;
    long long crossings = 0;
    while (true) {
        const Face& fc = s.face(face);
        ExitHit hit = first_exit(fc.verts, x, dir, skip);
        if (hit.edge < 0) throw error("separatrix lost the face boundary");
        double t_use = std::min(hit.t, budget - sep.len);

        ProximityHit stop = segment_vertex_hit(s, face, x, dir, t_use, sep.len, tol.eps_sing,
                                               [&](int c) { return terminal[c]; });
        if (stop.u >= 0) {
            sep.segs.push_back({{face, x, x + dir * stop.u}, ray_id});
            sep.len += stop.u;
            sep.closed = true;
            sep.target_class = stop.cls;
            return sep;
        }
        if (t_use < hit.t) {
            sep.segs.push_back({{face, x, x + dir * t_use}, ray_id});
            sep.len = budget;
            return sep;  // unclosed
        }
        sep.segs.push_back({{face, x, hit.point}, ray_id});
        sep.len += hit.t;
        if (++crossings > kMaxCrossings) return sep;

        int vslot = -1;
        if ((hit.point - fc.vertex(hit.edge)).norm() <= tol.eps_sing)
            vslot = hit.edge;
        else if ((hit.point - fc.vertex(hit.edge + 1)).norm() <= tol.eps_sing)
            vslot = fc.wrap(hit.edge + 1);
        if (vslot >= 0) {
            int c = s.class_of(face, vslot);
            if (terminal[c]) {
                sep.closed = true;
                sep.target_class = c;
                return sep;
            }
            auto [nf, ns] = pick_wedge_corner(s, c, dir);
            face = nf;
            x = s.face(nf).verts[ns];
            skip = -1;
            continue;
        }
        auto tr = s.transition(face, hit.edge);
        x = hit.point + tr.tau;
        face = tr.face;
        skip = tr.slot;
    }
}

// Locate the fan entry of the incoming ray a closed separatrix arrived at:
// start from the geometric corner the trace stopped at, then step around
// the fan until the wedge owning -dir is found (grazing arrivals stop one
// chart away from the owner).
int locate_arrival(const TranslationSurface& s, const ClassFan& fan, const Vec2& dir,
                   const Separatrix& sep) {
    Vec2 neg = -dir;
    const SpineSegment& last = sep.segs.back().first;
    int n = static_cast<int>(fan.corners.size());
    int c0 = -1;
    double best = 1e300;
    for (int i = 0; i < n; ++i) {
        auto [f, sl] = fan.corners[i];
        if (f != last.face) continue;
        double d = (s.face(f).verts[sl] - last.b).norm();
        if (d < best) {
            best = d;
            c0 = i;
        }
    }
    if (c0 < 0) throw error("separatrix terminal chart has no corner of the target class");
    for (int k = 0; k < n; ++k) {
        for (int idx : {(c0 + k) % n, (c0 - k + n) % n}) {
            auto [f, sl] = fan.corners[idx];
            if (!wedge_contains(corner_wedge(s.face(f), sl), neg)) continue;
            for (int e = 0; e < static_cast<int>(fan.entries.size()); ++e)
                if (!fan.entries[e].out && fan.entries[e].corner == idx) return e;
        }
    }
    throw error("separatrix arrival ray not found");
}

RaySystem build_ray_system(const TranslationSurface& s, const Vec2& dir, double budget) {
    RaySystem sys;
    const auto& classes = s.vertex_classes();
    bool any_singular = s.has_singularity();
    std::vector<char> terminal(classes.size(), 0);
    for (int c = 0; c < static_cast<int>(classes.size()); ++c) {
        bool src = any_singular ? classes[c].singular() : true;
        terminal[c] = src;
        if (src) sys.source_classes.push_back(c);
    }
    for (int c : sys.source_classes) sys.fans.emplace(c, build_fan(s, c, dir));

    for (int c : sys.source_classes) {
        ClassFan& fan = sys.fans.at(c);
        for (auto& e : fan.entries) {
            if (!e.out) continue;
            int ray = static_cast<int>(sys.seps.size());
            e.ray = ray;
            auto [f, sl] = fan.corners[e.corner];
            sys.seps.push_back(trace_separatrix(s, c, f, sl, ray, dir, budget, terminal));
        }
    }
    for (auto& sep : sys.seps)
        if (sep.closed)
            sep.arrival_entry = locate_arrival(s, sys.fans.at(sep.target_class), dir, sep);
    return sys;
}

// Chains of separatrices: `delta` = -1 walks the boundary above the spine
// (cylinder lower boundaries), +1 the boundary below (upper boundaries).
// Returns cycles as ray-id lists; cycles touching an unclosed separatrix
// are dropped when partial is true, otherwise reported via *failed.
std::vector<std::vector<int>> sep_chains(const RaySystem& sys, int delta, bool partial) {
    std::vector<std::vector<int>> cycles;
    std::vector<char> used(sys.seps.size(), 0);
    for (int r0 = 0; r0 < static_cast<int>(sys.seps.size()); ++r0) {
        if (used[r0]) continue;
        std::vector<int> cyc;
        int r = r0;
        bool ok = true;
        while (true) {
            if (used[r]) {
                ok = (r == r0 && !cyc.empty());
                break;
            }
            used[r] = 1;
            cyc.push_back(r);
            const Separatrix& sep = sys.seps[r];
            if (!sep.closed) {
                ok = false;
                break;
            }
            const ClassFan& fan = sys.fans.at(sep.target_class);
            int n = static_cast<int>(fan.entries.size());
            int idx = (sep.arrival_entry + delta + n) % n;
            if (!fan.entries[idx].out) throw error("separatrix chain successor is not an out-ray");
            r = fan.entries[idx].ray;
        }
        if (!ok && !partial) throw error("separatrix chain left the closed set");
        if (ok) cycles.push_back(cyc);
    }
    return cycles;
}

} // namespace

DecompositionResult cylinder_decomposition(const TranslationSurface& s, Vec2 dir, double budget) {
    dir = unit(dir);
    DecompositionResult res;
    RaySystem sys = build_ray_system(s, dir, budget);

    int closed = 0;
    for (const auto& sep : sys.seps) closed += sep.closed ? 1 : 0;
    res.spine_by_face.assign(s.face_count(), {});
    for (const auto& sep : sys.seps)
        if (sep.closed)
            for (const auto& [seg, ray] : sep.segs) res.spine_by_face[seg.face].push_back(seg);

    if (closed < static_cast<int>(sys.seps.size())) {
        for (const auto& sep : sys.seps) {
            if (!sep.closed) {
                res.offender_class = sep.source_class;
                res.offender_len = sep.len;
                break;
            }
        }
        res.status = closed == 0 ? DecompStatus::BudgetExhausted : DecompStatus::NoDecomposition;
        return res;
    }

    // All separatrices closed: assemble cylinders from the chain structure.
    std::vector<std::vector<int>> lowers = sep_chains(sys, -1, false);
    std::vector<std::vector<int>> uppers = sep_chains(sys, +1, false);
    std::vector<int> upper_of_ray(sys.seps.size(), -1);
    for (int u = 0; u < static_cast<int>(uppers.size()); ++u)
        for (int r : uppers[u]) upper_of_ray[r] = u;

    // Internal spine index with ray ids for the height probes.
    std::vector<std::vector<std::pair<SpineSegment, int>>> spine_rays(s.face_count());
    for (const auto& sep : sys.seps)
        for (const auto& it : sep.segs) spine_rays[it.first.face].push_back(it);

    const Tolerances& tol = s.tol();
    Vec2 up = rotate90(dir);
    double total = 0;
    for (const auto& cyc : lowers) {
        Cylinder cyl;
        cyl.dir = dir;
        for (int r : cyc) {
            const Separatrix& sep = sys.seps[r];
            cyl.lower.push_back({sep.source_class, sep.target_class, dir * sep.len});
            cyl.w += sep.len;
        }

        // Probe upward from a point on the first lower separatrix to the
        // first spine crossing; that distance is the height and the crossed
        // separatrix names the upper boundary chain.
        const Separatrix& base = sys.seps[cyc.front()];
        static const double fracs[] = {0.5, 0.37, 0.61, 0.23, 0.71, 0.13, 0.87};
        bool done = false;
        for (double frac : fracs) {
            double want = frac * base.len;
            int pf = -1;
            Vec2 pp;
            double acc = 0;
            for (const auto& [seg, ray] : base.segs) {
                double l = (seg.b - seg.a).norm();
                if (acc + l >= want - 1e-12) {
                    pf = seg.face;
                    pp = seg.a + (seg.b - seg.a) * (l > 0 ? (want - acc) / l : 0.0);
                    break;
                }
                acc += l;
            }
            if (pf < 0) continue;

            // Upward flow, watching for spine crossings.
            int f = pf;
            Vec2 x = pp;
            int skip = -1;
            double travelled = 0;
            bool aborted = false;
            int crossed_ray = -1;
            double h = 0;
            while (travelled < budget) {
                const Face& fc = s.face(f);
                ExitHit hit = first_exit(fc.verts, x, up, skip);
                if (hit.edge < 0) {
                    aborted = true;
                    break;
                }
                double best_u = 1e300;
                int best_ray = -1;
                for (const auto& [seg, ray] : spine_rays[f]) {
                    Vec2 e = seg.b - seg.a;
                    double den = cross(up, e);
                    if (std::abs(den) < 1e-15) continue;
                    double t = cross(seg.a - x, e) / den;
                    double sp = cross(seg.a - x, up) / den;
                    if (sp < -1e-9 || sp > 1 + 1e-9) continue;
                    if (t < -1e-12 || travelled + t <= 1e-9 || t > hit.t + 1e-12) continue;
                    if (t < best_u) {
                        best_u = t;
                        best_ray = ray;
                    }
                }
                if (best_ray >= 0) {
                    h = travelled + best_u;
                    crossed_ray = best_ray;
                    break;
                }
                ProximityHit sing = segment_vertex_hit(
                    s, f, x, up, hit.t, travelled, tol.eps_sing,
                    [&](int c) { return s.vertex_classes()[c].singular(); });
                if (sing.u >= 0) {
                    aborted = true;  // cone hit: re-pick the base point
                    break;
                }
                travelled += hit.t;
                int vslot = -1;
                if ((hit.point - fc.vertex(hit.edge)).norm() <= tol.eps_sing)
                    vslot = hit.edge;
                else if ((hit.point - fc.vertex(hit.edge + 1)).norm() <= tol.eps_sing)
                    vslot = fc.wrap(hit.edge + 1);
                if (vslot >= 0) {
                    // Any marked vertex may sit on the spine (it bounds the
                    // cylinder), so a vertex hit invalidates this probe;
                    // re-pick the base point instead of flowing through.
                    aborted = true;
                    break;
                }
                auto tr = s.transition(f, hit.edge);
                x = hit.point + tr.tau;
                f = tr.face;
                skip = tr.slot;
            }
            if (!aborted && crossed_ray >= 0) {
                cyl.h = h;
                for (int r : uppers[upper_of_ray[crossed_ray]]) {
                    const Separatrix& sep = sys.seps[r];
                    cyl.upper.push_back({sep.source_class, sep.target_class, dir * sep.len});
                }
                done = true;
                break;
            }
        }
        if (!done) throw error("cylinder height probe failed");
        total += cyl.w * cyl.h;
        res.cylinders.push_back(std::move(cyl));
    }

    res.status = DecompStatus::Cylinders;
    res.area_error = std::abs(total - s.total_area()) / s.total_area();
    return res;
}

// ---------------------------------------------------------------------------
// Cylinder growth counting

GrowthResult growth_count(const TranslationSurface& s, const std::vector<double>& T_values) {
    if (T_values.size() < 4) throw parameter_constraint("growth fit needs at least 4 T values");
    for (size_t i = 0; i < T_values.size(); ++i) {
        if (T_values[i] <= 0 || (i > 0 && T_values[i] <= T_values[i - 1]))
            throw parameter_constraint("T values must be positive and ascending");
    }
    double Tmax = T_values.back();

    std::vector<HolonomyVector> sc = saddle_connections(s, Tmax);
    // Distinct directions mod pi.
    std::vector<double> angles;
    for (const auto& h : sc) {
        Vec2 d = unit(h.v);
        if (d.y < -1e-12 || (std::abs(d.y) <= 1e-12 && d.x < 0)) d = -d;
        angles.push_back(std::atan2(d.y, d.x));
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-9; }),
                 angles.end());

    std::vector<double> circumferences;
    for (double a : angles) {
        Vec2 dir{std::cos(a), std::sin(a)};
        RaySystem sys = build_ray_system(s, dir, Tmax);
        for (const auto& cyc : sep_chains(sys, -1, true)) {
            double w = 0;
            for (int r : cyc) w += sys.seps[r].len;
            if (w <= Tmax + 1e-9) circumferences.push_back(w);
        }
    }
    std::sort(circumferences.begin(), circumferences.end());

    GrowthResult res;
    res.mode = "cylinders";
    std::vector<long long> counts;
    if (circumferences.empty() && !sc.empty()) {
        res.mode = "sc-proxy";
        for (double T : T_values) {
            long long n = 0;
            for (const auto& h : sc) n += h.v.norm() <= T + 1e-9 ? 1 : 0;
            res.table.push_back({T, n});
            counts.push_back(n);
        }
    } else {
        for (double T : T_values) {
            long long n = static_cast<long long>(
                std::upper_bound(circumferences.begin(), circumferences.end(), T + 1e-9) -
                circumferences.begin());
            res.table.push_back({T, n});
            counts.push_back(n);
        }
    }

    // Least-squares slope of log N against log T over the nonzero counts.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] <= 0) continue;
        double lx = std::log(T_values[i]), ly = std::log(static_cast<double>(counts[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++k;
    }
    if (k >= 2 && sxx * k - sx * sx > 1e-15)
        res.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return res;
}

// ---------------------------------------------------------------------------
// Direction classification

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct CellGrid {
    int k;
    std::vector<std::array<double, 4>> face_box;  // x0, y0, dx, dy per face
    std::vector<std::vector<double>> cell_area;   // per face, k*k
    double total_area = 0;

    CellGrid(const TranslationSurface& s, int grid) : k(grid) {
        face_box.resize(s.face_count());
        cell_area.resize(s.face_count());
        for (int f = 0; f < s.face_count(); ++f) {
            const Face& fc = s.face(f);
            double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
            for (const Vec2& p : fc.verts) {
                x0 = std::min(x0, p.x);
                y0 = std::min(y0, p.y);
                x1 = std::max(x1, p.x);
                y1 = std::max(y1, p.y);
            }
            face_box[f] = {x0, y0, (x1 - x0) / k, (y1 - y0) / k};
            cell_area[f].assign(k * k, 0.0);
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    auto clipped = clip_to_rect(fc.verts, x0 + i * face_box[f][2],
                                                y0 + j * face_box[f][3],
                                                x0 + (i + 1) * face_box[f][2],
                                                y0 + (j + 1) * face_box[f][3]);
                    double a = clipped.size() >= 3 ? polygon_area(clipped) : 0.0;
                    cell_area[f][i * k + j] = std::max(0.0, a);
                    total_area += cell_area[f][i * k + j];
                }
            }
        }
    }

    // Length of [a,b] inside each overlapped cell of face f.
    template <typename Sink>
    void accumulate(int f, Vec2 a, Vec2 b, Sink sink) const {
        const auto& box = face_box[f];
        double len = (b - a).norm();
        if (len <= 0 || box[2] <= 0 || box[3] <= 0) return;
        int i0 = std::clamp(static_cast<int>((std::min(a.x, b.x) - box[0]) / box[2]), 0, k - 1);
        int i1 = std::clamp(static_cast<int>((std::max(a.x, b.x) - box[0]) / box[2]), 0, k - 1);
        int j0 = std::clamp(static_cast<int>((std::min(a.y, b.y) - box[1]) / box[3]), 0, k - 1);
        int j1 = std::clamp(static_cast<int>((std::max(a.y, b.y) - box[1]) / box[3]), 0, k - 1);
        Vec2 d = b - a;
        for (int i = i0; i <= i1; ++i) {
            for (int j = j0; j <= j1; ++j) {
                double rx0 = box[0] + i * box[2], ry0 = box[1] + j * box[3];
                double t0 = 0, t1 = 1;
                auto clip = [&](double p, double q) {
                    if (std::abs(p) < 1e-300) return q >= 0;
                    double r = q / p;
                    if (p < 0) {
                        if (r > t1) return false;
                        t0 = std::max(t0, r);
                    } else {
                        if (r < t0) return false;
                        t1 = std::min(t1, r);
                    }
                    return true;
                };
                if (clip(-d.x, a.x - rx0) && clip(d.x, rx0 + box[2] - a.x) &&
                    clip(-d.y, a.y - ry0) && clip(d.y, ry0 + box[3] - a.y) && t1 > t0)
                    sink(f, i * k + j, (t1 - t0) * len);
            }
        }
    }
};

} // namespace

DirectionReport classify_direction(const TranslationSurface& s, Vec2 dir, double budget,
                                   int grid, int orbit_count, std::uint64_t seed) {
    dir = unit(dir);
    DirectionReport rep;
    rep.dir = dir;

    DecompositionResult dec = cylinder_decomposition(s, dir, 1000.0);
    if (dec.status == DecompStatus::Cylinders) {
        rep.verdict = DirectionVerdict::PeriodicEvidence;
        rep.cylinders = dec.cylinders;
        rep.area_error = dec.area_error;
        return rep;
    }

    CellGrid cells(s, grid);
    std::vector<std::vector<double>> visit_full(s.face_count()),
        visit_snap(s.face_count());
    for (int f = 0; f < s.face_count(); ++f) {
        visit_full[f].assign(grid * grid, 0.0);
        visit_snap[f].assign(grid * grid, 0.0);
    }
    double len_full = 0, len_snap = 0;
    double snapT = budget / 10.0;

    std::mt19937_64 rng(seed);
    std::vector<double> face_cum;
    double acc = 0;
    for (int f = 0; f < s.face_count(); ++f) {
        acc += polygon_area(s.face(f).verts);
        face_cum.push_back(acc);
    }

    for (int orbit = 0; orbit < orbit_count; ++orbit) {
        double done = 0;
        int guard = 0;
        while (done < budget - 1e-9 && guard++ < 64) {
            // Area-weighted random interior start.
            double pickf = uniform01(rng) * face_cum.back();
            int f = static_cast<int>(std::lower_bound(face_cum.begin(), face_cum.end(), pickf) -
                                     face_cum.begin());
            f = std::min(f, s.face_count() - 1);
            const Face& fc = s.face(f);
            const auto& box = cells.face_box[f];
            Vec2 p;
            bool found = false;
            for (int tries = 0; tries < 200 && !found; ++tries) {
                p = {box[0] + uniform01(rng) * box[2] * grid,
                     box[1] + uniform01(rng) * box[3] * grid};
                if (!point_in_polygon(p, fc.verts, s.tol().eps_geom)) continue;
                bool clear = true;
                for (int e = 0; e < fc.size() && clear; ++e)
                    if (point_segment_distance(p, fc.vertex(e), fc.vertex(e + 1)) < 1e-6)
                        clear = false;
                found = clear;
            }
            if (!found) continue;

            Trajectory tr = flow_trace(s, f, p, dir, budget - done, true);
            for (const auto& seg : tr.segments) {
                double l = (seg.exit - seg.entry).norm();
                cells.accumulate(seg.face, seg.entry, seg.exit,
                                 [&](int ff, int cell, double L) { visit_full[ff][cell] += L; });
                if (done < snapT) {
                    double keep = std::min(l, snapT - done);
                    if (keep > 0 && l > 0) {
                        Vec2 mid = seg.entry + (seg.exit - seg.entry) * (keep / l);
                        cells.accumulate(seg.face, seg.entry, mid, [&](int ff, int cell, double L) {
                            visit_snap[ff][cell] += L;
                        });
                        len_snap += keep;
                    }
                }
                done += l;
                len_full += l;
            }
            if (tr.length <= 1e-9) break;  // defensive: no progress
        }
    }

    auto discrepancy = [&](const std::vector<std::vector<double>>& visit, double total_len) {
        if (total_len <= 0) return 1.0;
        double D = 0;
        for (int f = 0; f < s.face_count(); ++f) {
            for (int c = 0; c < grid * grid; ++c) {
                double va = visit[f][c] / total_len;
                double aa = cells.cell_area[f][c] / cells.total_area;
                D = std::max(D, std::abs(va - aa));
            }
        }
        return D;
    };
    double d_snap = discrepancy(visit_snap, len_snap);
    double d_full = discrepancy(visit_full, len_full);
    rep.discrepancy = {{snapT, d_snap}, {budget, d_full}};
    // Evidence = discrepancy still shrinking, or already saturated at the
    // noise floor of the max-cell statistic (far below the 0.05 threshold,
    // where sampling jitter can mask further decrease).
    bool shrinking = d_full < d_snap || d_full < 1e-3;
    rep.verdict = (shrinking && d_full < 0.05) ? DirectionVerdict::MinimalEvidence
                                               : DirectionVerdict::Inconclusive;
    return rep;
}

} // namespace gfold

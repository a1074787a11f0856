// garagefold: command-line front end for the reflection-tiling toolkit.
//
// Subcommands: gen, unfold, cover, trace, scan, sc, repro.  All reports are
// sorted key=value text so runs diff cleanly; randomized sampling is driven
// entirely by --seed.  Exit codes: 0 success, 1 usage error, 2 domain
// failure, 3 repro assertion failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfold/covers.hpp"
#include "gfold/dynamics.hpp"
#include "gfold/errors.hpp"
#include "gfold/families.hpp"
#include "gfold/garage.hpp"
#include "gfold/report.hpp"
#include "gfold/surface.hpp"
#include "gfold/svg.hpp"

using namespace gfold;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 parse_pair(const std::string& text, const std::string& what) {
    double x = 0, y = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf%c", &x, &y, &tail) != 2)
        throw CLI::ValidationError(what, "expected two comma-separated numbers, e.g. 0.25,0.5");
    return {x, y};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Closed: return "closed";
        case Termination::SaddleHit: return "saddle-hit";
        default: return "budget-exhausted";
    }
}

const char* verdict_name(DirectionVerdict v) {
    switch (v) {
        case DirectionVerdict::PeriodicEvidence: return "periodic-evidence";
        case DirectionVerdict::MinimalEvidence: return "minimal-evidence";
        default: return "inconclusive";
    }
}

void emit_cover_report(Report& rep, const CoverReport& cr) {
    rep.set("degree", cr.degree);
    rep.set("index", cr.index);
    rep.set("chi_p", cr.chi_P);
    rep.set("chi_q", cr.chi_Q);
    rep.set("genus_p", cr.MP.genus());
    rep.set("genus_q", cr.MQ.genus());
    rep.set("rh_consistent", cr.rh_consistent);
    rep.set("faces_p", cr.MP.face_count());
    rep.set("faces_q", cr.MQ.face_count());
    {
        std::ostringstream os;
        for (size_t i = 0; i < cr.branch_set.size(); ++i)
            os << (i ? "," : "") << cr.branch_set[i];
        rep.set("branch_set", os.str());
        rep.set("branch_points", static_cast<long long>(cr.branch_set.size()));
    }
    for (size_t c = 0; c < cr.fibers.size(); ++c) {
        std::ostringstream os;
        for (size_t i = 0; i < cr.fibers[c].size(); ++i) {
            const FiberPoint& fp = cr.fibers[c][i];
            os << (i ? " " : "") << fp.q_class << ":k" << fp.k << ":e" << fp.e;
        }
        rep.set(Report::indexed("fiber", static_cast<int>(c)), os.str());
        rep.set(Report::indexed("fiber", static_cast<int>(c)) + ".turns",
                cr.MP.vertex_classes()[c].turns);
    }
}

void emit_screen(Report& rep, const SuitabilityVerdict& v) {
    rep.set("suitable", v.suitable);
    rep.set("rejection_reason", v.rejection_reason.empty() ? "-" : v.rejection_reason);
    for (size_t i = 0; i < v.checks.size(); ++i) {
        std::string stem = Report::indexed("check", static_cast<int>(i + 1), 1);
        rep.set(stem + ".name", v.checks[i].name);
        rep.set(stem + ".pass", v.checks[i].pass);
        rep.set(stem + ".evidence", v.checks[i].evidence);
    }
}

// ---------------------------------------------------------------------------
// repro scripts

struct Assertions {
    int failed = 0;
    void check(const std::string& claim, bool ok, const std::string& expected,
               const std::string& actual) {
        std::cout << (ok ? "PASS " : "FAIL ") << claim << ": expected " << expected
                  << ", got " << actual << "\n";
        if (!ok) ++failed;
    }
    template <typename T>
    void eq(const std::string& claim, const T& expected, const T& actual) {
        std::ostringstream e, a;
        e << expected;
        a << actual;
        check(claim, expected == actual, e.str(), a.str());
    }
};

// M_P vertex classes lying over a given base vertex of the polygon.
std::vector<int> mp_classes_over_vertex(const TranslationSurface& MP, int base_vertex) {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(MP.vertex_classes().size()); ++c) {
        auto [f, s] = MP.vertex_classes()[c].corners.front();
        if (MP.face(f).slot_vertex[s] == base_vertex) out.push_back(c);
    }
    return out;
}

// Garage vertex class of Q underlying an M_Q vertex class.
int garage_class_of(const Garage& Q, const TranslationSurface& MQ, int q_class) {
    auto [f, s] = MQ.vertex_classes()[q_class].corners.front();
    const Face& fc = MQ.face(f);
    return Q.class_of_corner(fc.tile, fc.slot_vertex[s]);
}

int run_repro_thm3(int n) {
    Assertions A;
    Garage P = make_family("veech-isosceles", n);
    Garage Q = make_family("thm3", n);
    TilingCertificate cert = certify_tiling(P, Q);
    A.eq("tile count", 4, cert.ell);

    DihedralGroup GP = P.garage_group();
    DihedralGroup GQ = Q.garage_group();
    A.eq("polygon group parameter", n, GP.n);
    A.eq("complex group parameter", n, GQ.n);
    A.eq("group parameter is odd", 1, GQ.n % 2);
    {
        DihedralSubgroup sp = P.reflection_subgroup();
        DihedralSubgroup sq = Q.reflection_subgroup();
        A.check("reflection groups coincide",
                sp.step == sq.step && sp.refl_residue == sq.refl_residue,
                "identical subgroup", sp.step == sq.step && sp.refl_residue == sq.refl_residue
                                          ? "identical subgroup"
                                          : "different subgroups");
    }

    CoverReport cr = cover_analysis(cert);
    A.eq("cover degree", 4, cr.degree);
    A.eq("branch point count",
         1, count_branch_points(branch_point_count(cert)));
    A.eq("branch set size", static_cast<size_t>(1), cr.branch_set.size());
    A.eq("euler characteristics satisfy the branched-cover relation", true, cr.rh_consistent);

    // The branch point lies over the 2/n boundary classes of the complex
    // and nowhere else.
    {
        Frac two_over_n(2, n);
        bool all_two = true;
        int branched_fiber_points = 0;
        for (int c : cr.branch_set) {
            for (const FiberPoint& fp : cr.fibers[c]) {
                if (fp.e <= 1) continue;
                ++branched_fiber_points;
                int gc = garage_class_of(Q, cr.MQ, fp.q_class);
                if (!(Q.vertex_classes()[gc].total_angle == two_over_n)) all_two = false;
            }
        }
        A.check("branching sits over the 2/n corner classes", all_two && branched_fiber_points == 2,
                "two ramified fiber points with corner angle 2/" + std::to_string(n),
                all_two ? std::to_string(branched_fiber_points) + " ramified points with that angle"
                        : "a ramified point with a different angle");
    }
    {
        bool k3_unbranched = true;
        for (const auto& fiber : cr.fibers) {
            for (const FiberPoint& fp : fiber) {
                int gc = garage_class_of(Q, cr.MQ, fp.q_class);
                if (Q.vertex_classes()[gc].k == 3 && fp.e != 1) k3_unbranched = false;
            }
        }
        A.eq("three-corner classes are unbranched", true, k3_unbranched);
    }

    SuitabilityVerdict v = suitability_screen(cert, lattice_catalog_contains("veech-isosceles"));
    for (int i = 1; i < 5; ++i)
        A.eq("suitability check " + std::to_string(i + 1) + " (" + v.checks[i].name + ")", true,
             v.checks[i].pass);
    A.eq("candidate survives the screen", true, v.suitable);
    return A.failed == 0 ? 0 : 3;
}

int run_repro_ward(int n) {
    Assertions A;
    Garage P = make_family("ward", n);

    // Stage q0: the doubled triangle.  Its unfolding is the same surface, so
    // the covering is trivial and the construction has to keep growing.
    {
        Garage Q0 = make_family("ward-stage", n, "q0");
        TilingCertificate cert = certify_tiling(P, Q0);
        CoverReport cr = cover_analysis(cert);
        A.eq("q0 tile count", 2, cert.ell);
        A.eq("q0 cover degree", 1, cr.degree);
        A.eq("q0 branch point count", 0, count_branch_points(branch_point_count(cert)));
    }

    // Stage q1: the branch set picks up the narrow corner x2 (angle 1/(2n),
    // base vertex 0), which is disallowed for the construction.
    {
        Garage Q1 = make_family("ward-stage", n, "q1");
        TilingCertificate cert = certify_tiling(P, Q1);
        CoverReport cr = cover_analysis(cert);
        A.eq("q1 tile count", 4, cert.ell);
        A.eq("q1 cover degree", 2, cr.degree);
        std::vector<int> over_x2 = mp_classes_over_vertex(cr.MP, 0);
        bool hits_x2 = false;
        for (int c : cr.branch_set)
            if (std::find(over_x2.begin(), over_x2.end(), c) != over_x2.end()) hits_x2 = true;
        A.eq("q1 branching covers the x2 vertex class", true, hits_x2);
        A.eq("q1 euler characteristics consistent", true, cr.rh_consistent);
        SuitabilityVerdict v = suitability_screen(cert, lattice_catalog_contains("ward"));
        A.eq("q1 rejected by the screen", false, v.suitable);
    }

    // Stage q2: branching now covers both points that lie over the 1/n
    // corner x1 -- two distinct branch points, so no continuation can ever
    // get back down to one.
    {
        Garage Q2 = make_family("ward-stage", n, "q2");
        TilingCertificate cert = certify_tiling(P, Q2);
        CoverReport cr = cover_analysis(cert);
        A.eq("q2 tile count", 6, cert.ell);
        A.eq("q2 cover degree", 3, cr.degree);
        std::vector<int> over_x1 = mp_classes_over_vertex(cr.MP, 1);
        A.eq("two surface points lie over the x1 vertex", static_cast<size_t>(2), over_x1.size());
        int branched_over_x1 = 0;
        for (int c : cr.branch_set)
            if (std::find(over_x1.begin(), over_x1.end(), c) != over_x1.end()) ++branched_over_x1;
        A.eq("q2 branches over two distinct x1 points", 2, branched_over_x1);
        A.check("q2 branch locus is not a single point",
                count_branch_points(branch_point_count(cert)) >= 2, "at least 2",
                std::to_string(count_branch_points(branch_point_count(cert))));
        A.eq("q2 euler characteristics consistent", true, cr.rh_consistent);
        SuitabilityVerdict v = suitability_screen(cert, lattice_catalog_contains("ward"));
        A.eq("q2 rejected by the screen", false, v.suitable);
    }
    return A.failed == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flat-surface toolkit for reflection-tiled polygons"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for all randomized sampling")->capture_default_str();

    // gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a garage file from the family catalog");
    std::string gen_family, gen_stage, gen_out;
    int gen_n = 0;
    gen->add_option("family", gen_family, "family name")->required();
    gen->add_option("n", gen_n, "family parameter")->required();
    gen->add_option("stage", gen_stage, "stage for staged families (q0|q1|q2)");
    gen->add_option("--out", gen_out, "output path (default: stdout)");

    // unfold ------------------------------------------------------------
    auto* unf = app.add_subcommand("unfold", "unfold a garage into a translation surface");
    std::string unf_file, unf_svg;
    unf->add_option("file", unf_file, "garage file")->required();
    unf->add_option("--svg", unf_svg, "write a face-layout SVG to this path");

    // cover -------------------------------------------------------------
    auto* cov = app.add_subcommand("cover", "analyze the branched cover between two complexes");
    std::string cov_p, cov_q;
    bool cov_screen = false, cov_lattice = false;
    cov->add_option("P", cov_p, "single-tile garage file")->required();
    cov->add_option("Q", cov_q, "tiled garage file over the same polygon")->required();
    cov->add_flag("--screen", cov_screen, "run the suitability screen");
    cov->add_flag("--lattice", cov_lattice, "declare the polygon lattice-verified");

    // trace -------------------------------------------------------------
    auto* trc = app.add_subcommand("trace", "trace a flow line or billiard path");
    std::string trc_file, trc_start, trc_dir, trc_svg;
    double trc_len = 10.0;
    int trc_chart = 0, trc_bounces = 1000000000;
    bool trc_billiard = false;
    trc->add_option("file", trc_file, "garage file")->required();
    trc->add_option("--start", trc_start, "start point x,y")->required();
    trc->add_option("--dir", trc_dir, "direction dx,dy")->required();
    trc->add_option("--len", trc_len, "length budget")->capture_default_str();
    trc->add_flag("--billiard", trc_billiard, "trace the billiard in the garage plane");
    trc->add_option("--chart", trc_chart,
                    "start face (flow) or tile (billiard) index")->capture_default_str();
    trc->add_option("--bounces", trc_bounces, "bounce budget (billiard)")->capture_default_str();
    trc->add_option("--svg", trc_svg, "write the trajectory SVG to this path");

    // scan --------------------------------------------------------------
    auto* scn = app.add_subcommand("scan", "classify directions of the unfolded surface");
    std::string scn_file;
    int scn_dirs = 8;
    double scn_budget = 1e5, scn_scbound = 5.0;
    scn->add_option("file", scn_file, "garage file")->required();
    scn->add_option("--dirs", scn_dirs, "number of evenly spread directions")
        ->capture_default_str();
    scn->add_option("--budget", scn_budget, "orbit length budget per direction")
        ->capture_default_str();
    scn->add_option("--sc-bound", scn_scbound,
                    "also classify saddle-connection directions up to this length")
        ->capture_default_str();

    // sc ----------------------------------------------------------------
    auto* scc = app.add_subcommand("sc", "enumerate saddle connections");
    std::string scc_file;
    double scc_lmax = 5.0;
    bool scc_fit = false;
    scc->add_option("file", scc_file, "garage file")->required();
    scc->add_option("--lmax", scc_lmax, "length bound")->capture_default_str();
    scc->add_flag("--fit", scc_fit, "fit the cylinder growth exponent up to lmax");

    // repro ---------------------------------------------------------------
    auto* rpr = app.add_subcommand("repro", "re-run a scripted verification");
    std::string rpr_script;
    int rpr_n = 9;
    rpr->add_option("script", rpr_script, "thm3 | ward-impossibility")->required();
    rpr->add_option("n", rpr_n, "family parameter")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            Garage g = make_family(gen_family, gen_n, gen_stage);
            std::string text = serialize_garage(g);
            if (gen_out.empty())
                std::cout << text;
            else
                write_file(gen_out, text);
            return 0;
        }

        if (*unf) {
            Garage g = parse_garage_file(unf_file);
            TranslationSurface s = TranslationSurface::unfold(g);
            Report rep;
            rep.set("faces", s.face_count());
            rep.set("chi", s.chi());
            rep.set("genus", s.genus());
            rep.set("area", s.total_area());
            rep.set("group_order", s.base_group_order());
            rep.set("vertex_classes", static_cast<long long>(s.vertex_classes().size()));
            {
                std::ostringstream os;
                auto sing = s.singularities();
                for (size_t i = 0; i < sing.size(); ++i)
                    os << (i ? " " : "") << "class" << sing[i].class_id << ":turns"
                       << sing[i].turns;
                rep.set("singularities", sing.empty() ? "-" : os.str());
            }
            for (int f = 0; f < s.face_count(); ++f) {
                const Face& fc = s.face(f);
                std::ostringstream os;
                for (int p = 0; p < fc.size(); ++p) {
                    auto [f2, p2] = s.pair_of(f, p);
                    os << (p ? " " : "") << f2 << ":" << p2;
                }
                rep.set(Report::indexed("face", f) + ".tile", fc.tile);
                rep.set(Report::indexed("face", f) + ".pairs", os.str());
            }
            for (size_t c = 0; c < s.vertex_classes().size(); ++c)
                rep.set(Report::indexed("class", static_cast<int>(c)) + ".turns",
                        s.vertex_classes()[c].turns);
            std::cout << rep.str();
            if (!unf_svg.empty()) write_file(unf_svg, svg_surface(s));
            return 0;
        }

        if (*cov) {
            Garage P = parse_garage_file(cov_p);
            Garage Q = parse_garage_file(cov_q);
            TilingCertificate cert = certify_tiling(P, Q);
            CoverReport cr = cover_analysis(cert);
            Report rep;
            emit_cover_report(rep, cr);
            if (cov_screen) emit_screen(rep, suitability_screen(cert, cov_lattice));
            std::cout << rep.str();
            return 0;
        }

        if (*trc) {
            Garage g = parse_garage_file(trc_file);
            Vec2 start = parse_pair(trc_start, "--start");
            Vec2 dir = parse_pair(trc_dir, "--dir");
            Report rep;
            if (trc_billiard) {
                BilliardTrajectory bt =
                    billiard_trace(g, trc_chart, start, dir, trc_bounces, trc_len);
                rep.set("mode", "billiard");
                rep.set("termination", termination_name(bt.termination));
                rep.set("length", bt.length);
                rep.set("bounces", bt.bounces);
                rep.set("segments", static_cast<long long>(bt.segments.size()));
                std::cout << rep.str();
                if (!trc_svg.empty()) write_file(trc_svg, svg_garage(g, &bt.segments));
            } else {
                TranslationSurface s = TranslationSurface::unfold(g);
                Trajectory tr = flow_trace(s, trc_chart, start, dir, trc_len);
                rep.set("mode", "flow");
                rep.set("termination", termination_name(tr.termination));
                rep.set("length", tr.length);
                rep.set("closed_length", tr.closed_length);
                rep.set("crossings", tr.crossings);
                rep.set("hit_class", tr.hit_class);
                rep.set("segments", static_cast<long long>(tr.segments.size()));
                std::cout << rep.str();
                if (!trc_svg.empty()) write_file(trc_svg, svg_surface(s, &tr.segments));
            }
            return 0;
        }

        if (*scn) {
            Garage g = parse_garage_file(scn_file);
            TranslationSurface s = TranslationSurface::unfold(g);
            std::vector<std::pair<std::string, Vec2>> dirs;
            for (int j = 0; j < scn_dirs; ++j) {
                double th = kPi * (j + 0.5) / scn_dirs;
                dirs.push_back({"grid", {std::cos(th), std::sin(th)}});
            }
            for (const HolonomyVector& h : saddle_connections(s, scn_scbound)) {
                Vec2 d = h.v;
                if (d.y < 0 || (d.y == 0 && d.x < 0)) d = -d;
                double norm = d.norm();
                bool dup = false;
                for (const auto& [src, e] : dirs)
                    if (std::abs(cross(e, d)) <= 1e-9 * norm && dot(e, d) > 0) dup = true;
                if (!dup) dirs.push_back({"sc", {d.x / norm, d.y / norm}});
            }
            Report rep;
            rep.set("directions", static_cast<long long>(dirs.size()));
            for (size_t i = 0; i < dirs.size(); ++i) {
                DirectionReport dr = classify_direction(s, dirs[i].second, scn_budget, 20, 8,
                                                        seed + static_cast<std::uint64_t>(i));
                std::string stem = Report::indexed("dir", static_cast<int>(i));
                rep.set(stem + ".source", dirs[i].first);
                rep.set(stem + ".dx", dr.dir.x);
                rep.set(stem + ".dy", dr.dir.y);
                rep.set(stem + ".verdict", verdict_name(dr.verdict));
                if (dr.verdict == DirectionVerdict::PeriodicEvidence) {
                    rep.set(stem + ".cylinders", static_cast<long long>(dr.cylinders.size()));
                    rep.set(stem + ".area_error", dr.area_error);
                } else {
                    std::ostringstream os;
                    for (size_t k = 0; k < dr.discrepancy.size(); ++k)
                        os << (k ? " " : "") << fmt(dr.discrepancy[k].first) << ":"
                           << fmt(dr.discrepancy[k].second);
                    rep.set(stem + ".discrepancy", os.str());
                }
            }
            std::cout << rep.str();
            return 0;
        }

        if (*scc) {
            Garage g = parse_garage_file(scc_file);
            TranslationSurface s = TranslationSurface::unfold(g);
            std::vector<HolonomyVector> hol = saddle_connections(s, scc_lmax);
            Report rep;
            rep.set("count", static_cast<long long>(hol.size()));
            for (size_t i = 0; i < hol.size(); ++i) {
                std::string stem = Report::indexed("sc", static_cast<int>(i), 4);
                rep.set(stem + ".x", hol[i].v.x);
                rep.set(stem + ".y", hol[i].v.y);
                rep.set(stem + ".len", hol[i].v.norm());
                rep.set(stem + ".mult", hol[i].multiplicity);
            }
            if (scc_fit) {
                GrowthResult gr =
                    growth_count(s, {scc_lmax / 8, scc_lmax / 4, scc_lmax / 2, scc_lmax});
                rep.set("fit.mode", gr.mode);
                rep.set("fit.slope", gr.slope);
                for (size_t i = 0; i < gr.table.size(); ++i)
                    rep.set(Report::indexed("fit.point", static_cast<int>(i), 1),
                            fmt(gr.table[i].first) + ":" + std::to_string(gr.table[i].second));
            }
            std::cout << rep.str();
            return 0;
        }

        if (*rpr) {
            if (rpr_script == "thm3") return run_repro_thm3(rpr_n);
            if (rpr_script == "ward-impossibility") return run_repro_ward(rpr_n);
            std::cerr << "error: unknown repro script '" << rpr_script << "'\n";
            return 1;
        }
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

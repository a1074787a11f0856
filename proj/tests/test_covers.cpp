#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gfold/covers.hpp"
#include "gfold/errors.hpp"
#include "gfold/families.hpp"

using namespace gfold;

namespace {

constexpr double kPi = 3.14159265358979323846;

int fiber_degree(const std::vector<FiberPoint>& fiber) {
    int d = 0;
    for (const auto& fp : fiber) d += fp.e;
    return d;
}

// Garage corner class of Q under an upstairs vertex class.
int garage_class_of(const Garage& Q, const TranslationSurface& MQ, int q_class) {
    auto [f, s] = MQ.vertex_classes()[q_class].corners.front();
    const Face& fc = MQ.face(f);
    return Q.class_of_corner(fc.tile, fc.slot_vertex[s]);
}

std::vector<int> classes_over_vertex(const TranslationSurface& MP, int base_vertex) {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(MP.vertex_classes().size()); ++c) {
        auto [f, s] = MP.vertex_classes()[c].corners.front();
        if (MP.face(f).slot_vertex[s] == base_vertex) out.push_back(c);
    }
    return out;
}

} // namespace

TEST_CASE("identity covering") {
    Garage P = make_family("veech-isosceles", 5);
    TilingCertificate cert = certify_tiling(P, P);
    CHECK(cert.ell == 1);
    CHECK(cert.witnesses.empty());
    CoverReport cr = cover_analysis(cert);
    CHECK(cr.degree == 1);
    CHECK(cr.index == 1);
    CHECK(cr.branch_set.empty());
    CHECK(cr.rh_consistent);
    CHECK(cr.chi_P == cr.chi_Q);
    for (const auto& fiber : cr.fibers) {
        CHECK(fiber.size() == 1);
        CHECK(fiber[0].e == 1);
    }
    // Everything in the full dihedral group preserves the trivial tiling.
    CHECK(tiling_stabilizer(cert).size() == 10);
}

TEST_CASE("certificate validation") {
    CHECK_THROWS_AS(certify_tiling(make_family("thm3", 9), make_family("thm3", 9)),
                    parameter_constraint);
    CHECK_THROWS_AS(certify_tiling(make_family("veech-isosceles", 5), make_family("thm3", 9)),
                    geometry_mismatch);
    CHECK_THROWS_AS(certify_tiling(make_family("square", 0), make_family("rectangle", 2)),
                    geometry_mismatch);
}

TEST_CASE("four-triangle cover of the (1/9,1/9,7/9) unfolding") {
    Garage P = make_family("veech-isosceles", 9);
    Garage Q = make_family("thm3", 9);
    TilingCertificate cert = certify_tiling(P, Q);
    CHECK(cert.ell == 4);
    CHECK(cert.witnesses.size() == 3);
    DihedralGroup G(9);
    for (const auto& w : cert.witnesses) {
        CHECK(w.refl.flip);
        CHECK(G.compose(cert.tile_elems[w.t1], w.refl) == cert.tile_elems[w.t2]);
    }

    CoverReport cr = cover_analysis(cert);
    CHECK(cr.degree == 4);
    CHECK(cr.index == 1);  // same reflection group downstairs and upstairs
    CHECK(cr.MQ.face_count() == 4 * cr.MP.face_count());

    // Every fiber sums to the degree; the projection respects classes.
    REQUIRE(cr.fibers.size() == cr.MP.vertex_classes().size());
    for (int c = 0; c < static_cast<int>(cr.fibers.size()); ++c) {
        CHECK(fiber_degree(cr.fibers[c]) == cr.degree);
        for (const auto& fp : cr.fibers[c]) CHECK(cr.class_map[fp.q_class] == c);
    }

    // Branching: one downstairs point, over base vertex 1, reached by the
    // two doubled 2/9 corners with ramification 2.
    CHECK(cr.branch_set.size() == 1);
    CHECK(count_branch_points(branch_point_count(cert)) == 1);
    auto over_v1 = classes_over_vertex(cr.MP, 1);
    REQUIRE(over_v1.size() == 1);
    CHECK(cr.branch_set[0] == over_v1[0]);
    int ramified = 0;
    for (const auto& fp : cr.fibers[over_v1[0]]) {
        if (fp.e > 1) {
            ++ramified;
            CHECK(fp.e == 2);
            CHECK(Q.vertex_classes()[garage_class_of(Q, cr.MQ, fp.q_class)].total_angle ==
                  Frac(2, 9));
        }
    }
    CHECK(ramified == 2);

    // Riemann-Hurwitz, recomputed from the report's own integers.
    CHECK(cr.rh_consistent);
    int defect = 0;
    for (const auto& fiber : cr.fibers)
        for (const auto& fp : fiber) defect += fp.e - 1;
    CHECK(cr.chi_Q == cr.degree * cr.chi_P - defect);
    CHECK(cr.chi_P == -6);   // genus 4
    CHECK(cr.chi_Q == -26);  // genus 14

    // The full dihedral group D_9 preserves the tiling.
    CHECK(tiling_stabilizer(cert).size() == 18);

    SuitabilityVerdict v = suitability_screen(cert, true);
    CHECK(v.suitable);
    CHECK(v.rejection_reason.empty());
    REQUIRE(v.checks.size() == 5);
    CHECK(v.checks[0].name == "lattice-catalog");
    CHECK(v.checks[1].name == "single-branch-point");
    CHECK(v.checks[2].name == "odd-group");
    CHECK(v.checks[3].name == "odd-angle-denominators");
    CHECK(v.checks[4].name == "branch-point-fixed");
    for (const auto& c : v.checks) CHECK(c.pass);
}

TEST_CASE("staged covers over the obtuse triangle") {
    for (int n : {5, 7}) {
        CAPTURE(n);
        Garage P = make_family("ward", n);

        TilingCertificate c0 = certify_tiling(P, make_family("ward-stage", n, "q0"));
        CoverReport r0 = cover_analysis(c0);
        CHECK(r0.degree == 1);
        CHECK(r0.index == 2);
        CHECK(r0.branch_set.empty());
        CHECK(r0.rh_consistent);

        TilingCertificate c1 = certify_tiling(P, make_family("ward-stage", n, "q1"));
        CoverReport r1 = cover_analysis(c1);
        CHECK(r1.degree == 2);
        CHECK(r1.index == 2);
        CHECK(r1.rh_consistent);
        // Branches over the narrow corner's point and over exactly one of
        // the two points above the 1/n corner.
        auto over_x2 = classes_over_vertex(r1.MP, 0);
        auto over_x1 = classes_over_vertex(r1.MP, 1);
        REQUIRE(over_x2.size() == 1);
        REQUIRE(over_x1.size() == 2);
        std::set<int> branch(r1.branch_set.begin(), r1.branch_set.end());
        CHECK(branch.size() == 2);
        CHECK(branch.count(over_x2[0]) == 1);
        int x1_branched = static_cast<int>(branch.count(over_x1[0]) + branch.count(over_x1[1]));
        CHECK(x1_branched == 1);

        TilingCertificate c2 = certify_tiling(P, make_family("ward-stage", n, "q2"));
        CoverReport r2 = cover_analysis(c2);
        CHECK(r2.degree == 3);
        CHECK(r2.rh_consistent);
        std::set<int> branch2(r2.branch_set.begin(), r2.branch_set.end());
        auto over_x1b = classes_over_vertex(r2.MP, 1);
        // Both points above the 1/n corner are branched now.
        CHECK(branch2.count(over_x1b[0]) == 1);
        CHECK(branch2.count(over_x1b[1]) == 1);
        CHECK(count_branch_points(branch_point_count(c2)) >= 2);

        // Screens: all stages fail the single-branch-point test.
        for (const auto* cert : {&c0, &c1, &c2}) {
            SuitabilityVerdict v = suitability_screen(*cert, true);
            CHECK_FALSE(v.suitable);
            CHECK(v.rejection_reason == "single-branch-point");
            CHECK(v.checks[2].pass);  // group D_n, n odd
            CHECK(v.checks[3].pass);  // boundary angles all have odd denominator
        }

        // Only the index-two subgroup fixing both x1 points lifts.
        CHECK(tiling_stabilizer(c1).size() == static_cast<size_t>(2 * n));
    }
}

TEST_CASE("riemann-hurwitz for the larger theorem instance") {
    Garage P = make_family("veech-isosceles", 15);
    Garage Q = make_family("thm3", 15);
    CoverReport cr = cover_analysis(certify_tiling(P, Q));
    CHECK(cr.degree == 4);
    CHECK(cr.rh_consistent);
    CHECK(cr.branch_set.size() == 1);
    // Fiber over the 1/n vertex whose corners are tripled: k values 1 and 3,
    // all unramified; over the branch point: two doubled corners.
    for (const auto& fiber : cr.fibers) {
        std::multiset<std::pair<int, int>> ke;
        for (const auto& fp : fiber) ke.insert({fp.k, fp.e});
        bool branch_fiber = ke == std::multiset<std::pair<int, int>>{{2, 2}, {2, 2}};
        bool plain_fiber = ke == std::multiset<std::pair<int, int>>{{1, 1}, {3, 1}};
        bool apex_fiber =
            ke == std::multiset<std::pair<int, int>>{{1, 1}, {3, 1}, {3, 1}, {3, 1}};
        CHECK((branch_fiber || plain_fiber || apex_fiber));
    }
}

TEST_CASE("continued-fraction rationality heuristic") {
    CHECK(cf_appears_rational(0.5));
    CHECK(cf_appears_rational(1.0 / 3.0));
    CHECK(cf_appears_rational(7.0 / 11.0));
    CHECK(cf_appears_rational(0.5 + 1e-14));
    CHECK_FALSE(cf_appears_rational(std::sqrt(2.0) / 2));
    CHECK_FALSE(cf_appears_rational((5 - std::sqrt(5.0)) / 10));
    CHECK_FALSE(cf_appears_rational((5 + std::sqrt(5.0)) / 10));
    CHECK_FALSE(cf_appears_rational((std::sqrt(5.0) - 1) / 2));

    std::vector<long long> q;
    CHECK(cf_appears_rational(0.5, 40, 1e6, &q));
    CHECK(q == std::vector<long long>{0, 2});
}

TEST_CASE("height split on the torus") {
    TranslationSurface t = TranslationSurface::torus();

    HeightSplitReport mid = aperiodicity_evidence_at(t, 0, {0.3, 0.5}, {1, 0});
    CHECK(mid.h == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mid.h1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mid.ratio == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(mid.appears_rational);
    CHECK(mid.label == "HEURISTIC");

    HeightSplitReport irr = aperiodicity_evidence_at(t, 0, {0.3, std::sqrt(0.5)}, {1, 0});
    CHECK(irr.ratio == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK_FALSE(irr.appears_rational);

    // The marked class sits on the spine of the horizontal decomposition.
    CHECK_THROWS_AS(aperiodicity_evidence(t, 0, {1, 0}), point_on_boundary);
    // No decomposition in an irrational direction.
    CHECK_THROWS_AS(aperiodicity_evidence_at(t, 0, {0.3, 0.5}, {1, std::sqrt(2.0)}),
                    no_cylinder_decomposition);
    CHECK_THROWS_AS(aperiodicity_evidence(t, 7, {1, 0}), index_error);
    CHECK_THROWS_AS(aperiodicity_evidence_at(t, 0, {1.7, 0.5}, {1, 0}), parameter_constraint);
}

TEST_CASE("height split of the double pentagon centers") {
    TranslationSurface dp = TranslationSurface::unfold(make_family("veech-isosceles", 5));
    Vec2 dir{std::cos(kPi / 10), std::sin(kPi / 10)};

    std::vector<int> centers;
    for (int c = 0; c < static_cast<int>(dp.vertex_classes().size()); ++c)
        if (!dp.vertex_classes()[c].singular()) centers.push_back(c);
    REQUIRE(centers.size() == 2);

    std::vector<double> ratios;
    for (int c : centers) {
        HeightSplitReport r = aperiodicity_evidence(dp, c, dir);
        CHECK_FALSE(r.appears_rational);
        ratios.push_back(r.ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[0] == doctest::Approx((5 - std::sqrt(5.0)) / 10).epsilon(1e-9));
    CHECK(ratios[1] == doctest::Approx((5 + std::sqrt(5.0)) / 10).epsilon(1e-9));

    // Horizontally, the centers lie on saddle connections (pentagon sides).
    CHECK_THROWS_AS(aperiodicity_evidence(dp, centers[0], {1, 0}), point_on_boundary);
}

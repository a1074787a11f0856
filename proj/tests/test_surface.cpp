#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "gfold/families.hpp"
#include "gfold/surface.hpp"

using namespace gfold;

namespace {

// Independent topology oracle: recompute vertex classes, Euler
// characteristic and exact cone angles straight from the face/pairing data,
// without touching the surface's own class bookkeeping.
struct TopologyOracle {
    int V = 0, E = 0, F = 0;
    int chi = 0, genus = 0;
    std::vector<Frac> cone_angles;  // per recomputed vertex class, units of pi

    explicit TopologyOracle(const TranslationSurface& s,
                            const std::vector<Frac>& corner_angle_by_base_vertex) {
        F = s.face_count();
        std::vector<int> offset(F + 1, 0);
        for (int f = 0; f < F; ++f) offset[f + 1] = offset[f] + s.face(f).size();
        int slots = offset[F];
        E = slots / 2;

        // Union-find over corners: crossing stored edge (f,p) identifies the
        // corner at its start with the corner past the partner edge's end.
        std::vector<int> up(slots);
        std::iota(up.begin(), up.end(), 0);
        auto find = [&](int x) {
            while (up[x] != x) x = up[x] = up[up[x]];
            return x;
        };
        for (int f = 0; f < F; ++f)
            for (int p = 0; p < s.face(f).size(); ++p) {
                auto [f2, p2] = s.pair_of(f, p);
                int a = offset[f] + p;
                int b = offset[f2] + s.face(f2).wrap(p2 + 1);
                up[find(a)] = find(b);
            }

        std::map<int, Frac> angle;
        for (int f = 0; f < F; ++f)
            for (int p = 0; p < s.face(f).size(); ++p) {
                int root = find(offset[f] + p);
                Frac a = corner_angle_by_base_vertex[s.face(f).slot_vertex[p]];
                auto it = angle.find(root);
                if (it == angle.end())
                    angle.emplace(root, a);
                else
                    it->second = it->second + a;
            }
        V = static_cast<int>(angle.size());
        for (auto& [root, total] : angle) cone_angles.push_back(total);
        std::sort(cone_angles.begin(), cone_angles.end());

        chi = V - E + F;
        REQUIRE((2 - chi) % 2 == 0);
        genus = (2 - chi) / 2;
    }
};

void check_against_oracle(const TranslationSurface& s, const std::vector<Frac>& base_angles) {
    TopologyOracle o(s, base_angles);
    CHECK(s.chi() == o.chi);
    CHECK(s.genus() == o.genus);
    CHECK(static_cast<int>(s.vertex_classes().size()) == o.V);

    std::vector<Frac> lib_angles;
    int gauss_bonnet = 0;
    for (const auto& c : s.vertex_classes()) {
        lib_angles.push_back(c.total_angle);
        // Cone angle is an exact even multiple of pi.
        CHECK(c.total_angle == Frac(2) * Frac(c.turns));
        gauss_bonnet += c.turns - 1;
    }
    std::sort(lib_angles.begin(), lib_angles.end());
    CHECK(lib_angles == o.cone_angles);
    CHECK(gauss_bonnet == 2 * o.genus - 2);
}

std::vector<Frac> garage_base_angles(const Garage& g) { return g.base().angles(); }

std::map<int, int> turns_histogram(const TranslationSurface& s) {
    std::map<int, int> h;
    for (const auto& sing : s.singularities()) h[sing.turns]++;
    return h;
}

} // namespace

TEST_CASE("unfolding the square gives the torus") {
    Garage g = make_family("square", 0);
    TranslationSurface s = TranslationSurface::unfold(g);
    CHECK(s.face_count() == 4);
    CHECK(s.genus() == 1);
    CHECK(s.chi() == 0);
    CHECK_FALSE(s.has_singularity());
    CHECK(s.total_area() == doctest::Approx(4.0));
    for (const auto& c : s.vertex_classes()) CHECK(c.turns == 1);
    check_against_oracle(s, garage_base_angles(g));
}

TEST_CASE("unfolding a rectangle") {
    Garage g = make_family("rectangle", 2);
    TranslationSurface s = TranslationSurface::unfold(g);
    CHECK(s.face_count() == 4);
    CHECK(s.genus() == 1);
    CHECK(s.total_area() == doctest::Approx(8.0));
    check_against_oracle(s, garage_base_angles(g));
}

TEST_CASE("unfolding the (1/5,1/5,3/5) triangle") {
    Garage g = make_family("veech-isosceles", 5);
    TranslationSurface s = TranslationSurface::unfold(g);
    CHECK(s.face_count() == 10);
    CHECK(s.genus() == 2);
    CHECK(turns_histogram(s) == std::map<int, int>{{3, 1}});  // one 6*pi cone point
    CHECK(static_cast<int>(s.vertex_classes().size()) == 3);
    check_against_oracle(s, garage_base_angles(g));
}

TEST_CASE("unfolding the (1/9,1/9,7/9) triangle") {
    Garage g = make_family("veech-isosceles", 9);
    TranslationSurface s = TranslationSurface::unfold(g);
    CHECK(s.face_count() == 18);
    CHECK(s.genus() == 4);
    CHECK(turns_histogram(s) == std::map<int, int>{{7, 1}});  // one 14*pi cone point
    check_against_oracle(s, garage_base_angles(g));
}

TEST_CASE("unfolding the four-triangle complex") {
    Garage g = make_family("thm3", 9);
    TranslationSurface s = TranslationSurface::unfold(g);
    // |G_Q| copies of each of the 4 tiles, G_Q = D_9.
    CHECK(s.face_count() == 72);
    CHECK(s.genus() == 14);
    // Vertex classes, by hand from the corner classes of the complex:
    // angles {1/9, 2/9, 2/9, 1/3, 7/9, 7/3} lift to 1+1+1+3+1+3 classes.
    CHECK(static_cast<int>(s.vertex_classes().size()) == 10);
    CHECK(turns_histogram(s) == std::map<int, int>{{2, 2}, {7, 4}});
    check_against_oracle(s, garage_base_angles(g));
}

TEST_CASE("face count equals group order times tile count") {
    for (auto [name, n, stage] : {std::tuple<const char*, int, const char*>{"square", 0, ""},
                                  {"veech-isosceles", 7, ""},
                                  {"veech-right", 5, ""},
                                  {"ward", 5, ""},
                                  {"thm3", 9, ""},
                                  {"ward-stage", 5, "q1"}}) {
        Garage g = make_family(name, n, stage);
        TranslationSurface s = TranslationSurface::unfold(g);
        CHECK(s.face_count() == g.reflection_subgroup().order() * g.tile_count());
        CHECK(s.total_area() ==
              doctest::Approx(g.reflection_subgroup().order() * g.tile_count() * g.tile_area()));
    }
}

TEST_CASE("gauss-bonnet across the catalog") {
    std::vector<std::pair<Garage, const char*>> all;
    all.emplace_back(make_family("square", 0), "square");
    for (int n = 1; n <= 3; ++n) all.emplace_back(make_family("rectangle", n), "rectangle");
    for (int n = 3; n <= 15; ++n)
        all.emplace_back(make_family("veech-isosceles", n), "veech-isosceles");
    for (int n = 4; n <= 15; ++n) all.emplace_back(make_family("veech-right", n), "veech-right");
    for (int n = 4; n <= 15; ++n) all.emplace_back(make_family("ward", n), "ward");
    for (int n : {9, 15}) all.emplace_back(make_family("thm3", n), "thm3");
    for (int n = 4; n <= 15; ++n)
        for (const char* st : {"q0", "q1", "q2"})
            all.emplace_back(make_family("ward-stage", n, st), "ward-stage");

    for (const auto& [g, name] : all) {
        CAPTURE(name);
        CAPTURE(g.family_note);
        TranslationSurface s = TranslationSurface::unfold(g);
        check_against_oracle(s, garage_base_angles(g));
    }
}

TEST_CASE("edge pairing is by translation with opposite orientation") {
    Garage g = make_family("veech-isosceles", 5);
    TranslationSurface s = TranslationSurface::unfold(g);
    for (int f = 0; f < s.face_count(); ++f)
        for (int p = 0; p < s.face(f).size(); ++p) {
            auto [f2, p2] = s.pair_of(f, p);
            // Involution.
            auto back = s.pair_of(f2, p2);
            CHECK(back.first == f);
            CHECK(back.second == p);
            // Opposite holonomy.
            Vec2 a = s.face(f).edge_vec(p);
            Vec2 b = s.face(f2).edge_vec(p2);
            CHECK((a + b).norm() < 1e-9);
            // Transition lands the edge on its partner.
            auto tr = s.transition(f, p);
            CHECK(tr.face == f2);
            Vec2 mapped_start = s.face(f).vertex(p) + tr.tau;
            CHECK((mapped_start - s.face(f2).vertex(p2 + 1)).norm() < 1e-9);
            auto tr_back = s.transition(f2, p2);
            CHECK((tr.tau + tr_back.tau).norm() < 1e-9);
        }
}

TEST_CASE("vertex class walk closes") {
    Garage g = make_family("ward", 5);
    TranslationSurface s = TranslationSurface::unfold(g);
    for (int c = 0; c < static_cast<int>(s.vertex_classes().size()); ++c) {
        const auto& cls = s.vertex_classes()[c];
        auto [f0, s0] = cls.corners.front();
        // next_corner_ccw cycles through exactly the class corners.
        int steps = 0;
        auto cur = std::pair<int, int>{f0, s0};
        do {
            CHECK(s.class_of(cur.first, cur.second) == c);
            cur = s.next_corner_ccw(cur.first, cur.second);
            ++steps;
            REQUIRE(steps <= static_cast<int>(cls.corners.size()));
        } while (cur != std::pair<int, int>{f0, s0});
        CHECK(steps == static_cast<int>(cls.corners.size()));

        auto [pf, pos] = s.class_position(c);
        bool matches = false;
        for (auto [cf, cs] : cls.corners)
            if (cf == pf && (s.face(cf).vertex(cs) - pos).norm() < 1e-12) matches = true;
        CHECK(matches);
    }
}

TEST_CASE("marked torus") {
    TranslationSurface t = TranslationSurface::torus();
    CHECK(t.face_count() == 1);
    CHECK(t.genus() == 1);
    CHECK_FALSE(t.has_singularity());
    CHECK(t.total_area() == doctest::Approx(1.0));
    REQUIRE(t.vertex_classes().size() == 1);
    CHECK(t.vertex_classes()[0].turns == 1);
    check_against_oracle(t, {Frac(1, 2), Frac(1, 2), Frac(1, 2), Frac(1, 2)});

    TranslationSurface wide = TranslationSurface::torus(2.0, 0.5);
    CHECK(wide.total_area() == doctest::Approx(1.0));
    CHECK(wide.genus() == 1);
}

#include "gfold/families.hpp"

#include <algorithm>
#include <cmath>

namespace gfold {

BasePolygon normalized_triangle(const Frac& a0, const Frac& a1, const Frac& a2) {
    if (a0 + a1 + a2 != Frac(1))
        throw invalid_angle("triangle angles must sum to 1 (units of pi)");
    double s0 = std::sin(a0.value() * M_PI);
    double s1 = std::sin(a1.value() * M_PI);
    double s2 = std::sin(a2.value() * M_PI);
    double c = 1.0 / std::min({s0, s1, s2});  // unit shortest edge (law of sines)
    Vec2 v0{0, 0};
    Vec2 v1{c * s2, 0};
    Vec2 v2 = Vec2{std::cos(a0.value() * M_PI), std::sin(a0.value() * M_PI)} * (c * s1);
    return BasePolygon({v0, v1, v2}, {a0, a1, a2});
}

namespace {

Garage one_tile(BasePolygon p) { return Garage(std::move(p), {{}}, {}); }

void require(bool ok, const std::string& what) {
    if (!ok) throw parameter_constraint(what);
}

} // namespace

Garage make_family(const std::string& name, int n, const std::string& stage) {
    Garage g = [&]() -> Garage {
        if (name == "square") {
            BasePolygon p({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                          {Frac(1, 2), Frac(1, 2), Frac(1, 2), Frac(1, 2)});
            return one_tile(std::move(p));
        }
        if (name == "rectangle") {
            require(n >= 1, "rectangle requires n >= 1");
            double w = n;
            BasePolygon p({{0, 0}, {w, 0}, {w, 1}, {0, 1}},
                          {Frac(1, 2), Frac(1, 2), Frac(1, 2), Frac(1, 2)});
            return one_tile(std::move(p));
        }
        if (name == "veech-isosceles") {
            require(n >= 3, "veech-isosceles requires n >= 3");
            return one_tile(normalized_triangle(Frac(1, n), Frac(1, n), Frac(n - 2, n)));
        }
        if (name == "veech-right") {
            require(n >= 4, "veech-right requires n >= 4");
            return one_tile(
                normalized_triangle(Frac(1, 2), Frac(1, n), Frac(n - 2, 2 * n)));
        }
        if (name == "ward") {
            require(n >= 4, "ward requires n >= 4");
            return one_tile(
                normalized_triangle(Frac(1, 2 * n), Frac(1, n), Frac(2 * n - 3, 2 * n)));
        }
        if (name == "thm3") {
            require(n >= 9 && n % 2 == 1 && n % 3 == 0,
                    "thm3 requires n odd, divisible by 3, n >= 9");
            BasePolygon p = normalized_triangle(Frac(1, n), Frac(1, n), Frac(n - 2, n));
            std::vector<std::vector<int>> words = {{}, {1}, {1, 2}, {1, 2, 0}};
            std::vector<Gluing> gl = {{0, 1, 1, 1}, {1, 2, 2, 2}, {2, 0, 3, 0}};
            return Garage(std::move(p), words, gl);
        }
        if (name == "ward-stage") {
            require(n >= 4, "ward-stage requires n >= 4");
            require(stage == "q0" || stage == "q1" || stage == "q2",
                    "ward-stage requires stage q0, q1 or q2");
            BasePolygon p =
                normalized_triangle(Frac(1, 2 * n), Frac(1, n), Frac(2 * n - 3, 2 * n));
            std::vector<std::vector<int>> words = {{}, {2}, {0}, {0, 2}, {0, 2, 0}, {0, 2, 0, 2}};
            std::vector<Gluing> gl = {
                {0, 2, 1, 2}, {0, 0, 2, 0}, {2, 2, 3, 2}, {3, 0, 4, 0}, {4, 2, 5, 2}};
            int tiles = stage == "q0" ? 2 : stage == "q1" ? 4 : 6;
            words.resize(tiles);
            gl.resize(tiles - 1);
            return Garage(std::move(p), words, gl);
        }
        throw parameter_constraint("unknown family: " + name);
    }();
    g.family_note = name + " " + std::to_string(n);
    if (!stage.empty()) g.family_note += " " + stage;
    return g;
}

std::vector<std::string> family_names() {
    return {"square",      "rectangle", "veech-isosceles", "veech-right",
            "ward",        "thm3",      "ward-stage"};
}

bool lattice_catalog_contains(const std::string& name) {
    return name == "square" || name == "rectangle" || name == "veech-isosceles" ||
           name == "veech-right" || name == "ward";
}

} // namespace gfold

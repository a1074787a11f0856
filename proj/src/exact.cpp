#include "gfold/exact.hpp"

#include <cmath>
#include <numeric>

namespace gfold {

long long llgcd(long long a, long long b) { return std::gcd(a, b); }
long long lllcm(long long a, long long b) { return std::lcm(a, b); }

Frac::Frac(long long n, long long d) {
    if (d == 0) throw invalid_angle("fraction with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Frac Frac::operator+(const Frac& o) const { return Frac(num * o.den + o.num * den, den * o.den); }
Frac Frac::operator-(const Frac& o) const { return Frac(num * o.den - o.num * den, den * o.den); }
Frac Frac::operator*(const Frac& o) const { return Frac(num * o.num, den * o.den); }
bool Frac::operator<(const Frac& o) const { return num * o.den < o.num * den; }

Frac Frac::mod1() const {
    long long r = num % den;
    if (r < 0) r += den;
    return Frac(r, den);
}

std::string Frac::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

DihedralGroup::DihedralGroup(int n_) : n(n_) {
    if (n <= 0) throw parameter_constraint("dihedral group order parameter must be positive");
}

DihedralElement DihedralGroup::compose(const DihedralElement& a, const DihedralElement& b) const {
    return {mod(a.rot + (a.flip ? -b.rot : b.rot)), a.flip != b.flip};
}

DihedralElement DihedralGroup::inverse(const DihedralElement& a) const {
    if (a.flip) return a;
    return {mod(-a.rot), false};
}

int DihedralGroup::apply_dir(const DihedralElement& g, int m) const {
    return mod(2LL * g.rot + (g.flip ? -m : m));
}

Mat2 DihedralGroup::matrix(const DihedralElement& g) const {
    double t = 2.0 * M_PI * g.rot / n;
    double c = std::cos(t), s = std::sin(t);
    Mat2 rot{c, -s, s, c};
    if (!g.flip) return rot;
    Mat2 fl{1, 0, 0, -1};
    return rot * fl;
}

DihedralElement DihedralGroup::minus_id() const {
    if (!contains_minus_id()) throw parameter_constraint("-Id requires even rotation order");
    return {n / 2, false};
}

std::vector<DihedralElement> DihedralGroup::elements() const {
    std::vector<DihedralElement> out;
    out.reserve(2 * n);
    for (int f = 0; f < 2; ++f)
        for (int r = 0; r < n; ++r) out.push_back({r, f == 1});
    return out;
}

DihedralSubgroup DihedralSubgroup::from_reflection_indices(int n, const std::vector<int>& ks) {
    if (ks.empty()) throw parameter_constraint("reflection subgroup needs at least one generator");
    DihedralGroup g(n);
    int step = n;
    int k0 = g.mod(ks[0]);
    for (int k : ks) step = static_cast<int>(std::gcd<long long>(step, g.mod(k) - k0));
    DihedralSubgroup h;
    h.n = n;
    h.step = step;
    h.refl_residue = k0 % step;
    return h;
}

bool DihedralSubgroup::contains(const DihedralElement& g) const {
    if (g.flip) return (g.rot % step + step) % step == refl_residue;
    return g.rot % step == 0;
}

std::vector<DihedralElement> DihedralSubgroup::elements() const {
    std::vector<DihedralElement> out;
    for (int r = 0; r < n; r += step) out.push_back({r, false});
    for (int r = refl_residue; r < n; r += step) out.push_back({r, true});
    return out;
}

int group_from_angles(const std::vector<Frac>& angles) {
    if (angles.empty()) throw invalid_angle("empty angle list");
    long long l = 1;
    for (const Frac& a : angles) {
        if (a.num <= 0) throw invalid_angle("angle must be positive: " + a.str());
        l = std::lcm(l, a.den);
        if (l > 1'000'000) throw invalid_angle("angle denominators too large");
    }
    return static_cast<int>(l);
}

std::vector<int> direction_indices(const std::vector<Frac>& angles, int n) {
    DihedralGroup g(n);
    std::vector<int> out;
    out.reserve(angles.size());
    Frac d(0, 1);
    out.push_back(0);
    for (size_t i = 1; i < angles.size(); ++i) {
        d = d + Frac(1) - angles[i];
        Frac scaled = d * Frac(n);
        if (scaled.den != 1)
            throw invalid_angle("angle denominator does not divide group order: " +
                                angles[i].str());
        out.push_back(g.mod(scaled.num));
    }
    return out;
}

} // namespace gfold

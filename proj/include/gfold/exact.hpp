#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfold/errors.hpp"

namespace gfold {

// Reduced fraction with positive denominator.  Used for angles measured in
// units of pi (an angle a means a*pi radians) and for exact cone-angle
// bookkeeping, so all arithmetic stays integral.
struct Frac {
    long long num = 0;
    long long den = 1;

    Frac() = default;
    Frac(long long n, long long d);
    Frac(long long n) : num(n), den(1) {}

    Frac operator+(const Frac& o) const;
    Frac operator-(const Frac& o) const;
    Frac operator*(const Frac& o) const;
    Frac operator-() const { return Frac(-num, den); }
    bool operator==(const Frac& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Frac& o) const { return !(*this == o); }
    bool operator<(const Frac& o) const;

    // Representative in [0, 1) modulo 1 (directions of unoriented lines).
    Frac mod1() const;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

// 2x2 real matrix, row major.
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;
    Mat2 operator*(const Mat2& o) const;
};

// Element of the dihedral group of order 2n acting linearly on the plane:
// rotation by 2*pi*rot/n, optionally preceded by the flip diag(1,-1).
// flip == true gives the reflection across the line at angle rot*pi/n.
struct DihedralElement {
    int rot = 0;
    bool flip = false;
    bool operator==(const DihedralElement& o) const { return rot == o.rot && flip == o.flip; }
    bool operator!=(const DihedralElement& o) const { return !(*this == o); }
    bool operator<(const DihedralElement& o) const {
        return flip != o.flip ? flip < o.flip : rot < o.rot;
    }
};

// The dihedral group D_n of linear isometries generated by reflections in
// lines whose angles are integer multiples of pi/n.
struct DihedralGroup {
    int n = 1;

    explicit DihedralGroup(int n_);

    DihedralElement identity() const { return {0, false}; }
    DihedralElement rotation(int k) const { return {mod(k), false}; }
    DihedralElement reflection(int k) const { return {mod(k), true}; }

    DihedralElement compose(const DihedralElement& a, const DihedralElement& b) const;
    DihedralElement inverse(const DihedralElement& a) const;

    // Index of the image of the line with direction index m (angle m*pi/n)
    // under the element g.
    int apply_dir(const DihedralElement& g, int m) const;

    Mat2 matrix(const DihedralElement& g) const;

    bool contains_minus_id() const { return n % 2 == 0; }
    // -Id as a group element; only valid when contains_minus_id().
    DihedralElement minus_id() const;

    std::vector<DihedralElement> elements() const;

    int mod(long long k) const {
        long long r = k % n;
        return static_cast<int>(r < 0 ? r + n : r);
    }
};

// Subgroup of D_n generated by a nonempty set of reflections.  Such a
// subgroup is dihedral of order 2n/step: it holds the rotations by
// multiples of 2*pi*step/n and the reflections with axis index congruent
// to refl_residue mod step.
struct DihedralSubgroup {
    int n = 1;
    int step = 1;
    int refl_residue = 0;

    static DihedralSubgroup from_reflection_indices(int n, const std::vector<int>& ks);

    bool contains(const DihedralElement& g) const;
    int order() const { return 2 * n / step; }
    // Index in the full group D_n.
    int index() const { return step; }
    std::vector<DihedralElement> elements() const;
};

// Least n such that every given angle (in units of pi) is an integer
// multiple of 1/n; i.e. the lcm of the reduced denominators.
int group_from_angles(const std::vector<Frac>& angles);

// Direction indices of the edges of a polygon with the given interior
// angles (units of pi), relative to edge 0, in units of pi/n.  Edge i runs
// from vertex i to vertex i+1 and the angle at vertex i sits between edges
// i-1 and i.  Requires every angle denominator to divide n.
std::vector<int> direction_indices(const std::vector<Frac>& angles, int n);

long long llgcd(long long a, long long b);
long long lllcm(long long a, long long b);

} // namespace gfold

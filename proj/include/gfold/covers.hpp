#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "gfold/dynamics.hpp"
#include "gfold/garage.hpp"
#include "gfold/surface.hpp"

namespace gfold {

// Witness that the complex Q is tiled by reflected copies of the single
// polygon P: per-tile exact group elements plus, for each internal edge,
// the reflection that carries one side to the other.
struct TilingCertificate {
    Garage P, Q;
    std::vector<DihedralElement> tile_elems;  // linear part per tile of Q
    struct EdgeWitness {
        int t1, e1, t2, e2;
        int base_edge;          // the base-polygon edge both sides identify with
        DihedralElement refl;   // g_{t1}^{-1} g_{t2}, a reflection
    };
    std::vector<EdgeWitness> witnesses;
    int ell = 0;
};

TilingCertificate certify_tiling(const Garage& P, const Garage& Q);

struct FiberPoint {
    int q_class;  // vertex class id on M_Q
    int k;        // multiplicity of the underlying garage vertex class of Q
    int e;        // ramification index = cone turns upstairs / downstairs
};

struct CoverReport {
    int degree = 1;
    int index = 1;  // [G_P : G_Q]
    std::vector<std::vector<FiberPoint>> fibers;  // indexed by M_P vertex class
    std::vector<int> branch_set;                  // M_P class ids with some e > 1
    bool rh_consistent = false;
    int chi_P = 0, chi_Q = 0;
    TranslationSurface MP, MQ;
    std::vector<int> face_map;      // M_Q face -> M_P face
    std::vector<int> class_map;     // M_Q vertex class -> M_P vertex class
};

CoverReport cover_analysis(const TilingCertificate& cert);

// Which distinct points of M_P carry branching: class id -> flag.
std::map<int, bool> branch_point_count(const TilingCertificate& cert);
int count_branch_points(const std::map<int, bool>& m);

// Elements g of the base polygon's full dihedral group whose induced affine
// automorphism of M_P lifts to M_Q (i.e. g carries the cover to itself).
std::vector<DihedralElement> tiling_stabilizer(const TilingCertificate& cert);

struct SuitabilityCheck {
    std::string name;
    bool pass;
    std::string evidence;
};

struct SuitabilityVerdict {
    std::vector<SuitabilityCheck> checks;
    bool suitable = false;
    std::string rejection_reason;
};

// The five-screen candidate test: (1) caller-supplied lattice flag,
// (2) exactly one branch point, (3) odd reflection-group order,
// (4) no boundary angle with even reduced denominator, (5) branch point
// fixed by the stabilizer of the cover.  All checks always run.
SuitabilityVerdict suitability_screen(const TilingCertificate& cert, bool lattice_flag);

// Continued-fraction rationality heuristic: a partial quotient above `cap`
// (or termination) within `depth` steps reads as rational.
bool cf_appears_rational(double x, int depth = 40, double cap = 1e6,
                         std::vector<long long>* quotients = nullptr);

struct HeightSplitReport {
    double ratio = 0;   // h1 / h
    double h1 = 0, h = 0;
    bool appears_rational = false;
    std::vector<long long> quotients;
    std::string label = "HEURISTIC";
};

// Height of the point above the floor of its cylinder in the given
// direction, with a continued-fraction rationality verdict on h1/h.
// The class-based form locates the marked vertex class; the point form
// takes an explicit (face, point).
HeightSplitReport aperiodicity_evidence(const TranslationSurface& s, int vertex_class, Vec2 dir,
                                        double budget = 1000.0);
HeightSplitReport aperiodicity_evidence_at(const TranslationSurface& s, int face, Vec2 point,
                                           Vec2 dir, double budget = 1000.0);

} // namespace gfold

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gfold/surface.hpp"

namespace gfold {

enum class Termination { BudgetExhausted, Closed, SaddleHit };

struct TrajectorySegment {
    int face;
    Vec2 entry, exit;
};

struct Trajectory {
    std::vector<TrajectorySegment> segments;
    double length = 0;          // length actually traversed
    Termination termination = Termination::BudgetExhausted;
    double closed_length = 0;   // length at closure when termination == Closed
    int hit_class = -1;         // vertex class when termination == SaddleHit
    long long crossings = 0;
};

// Straight-line flow from a point inside face `face` (or on an edge
// interior).  Regular (2*pi) vertex classes are flowed through
// deterministically; cone points terminate the trace (saddle-hit) when
// approached within eps_sing.
Trajectory flow_trace(const TranslationSurface& s, int face, Vec2 start, Vec2 dir,
                      double max_len, bool record_segments = true);

// Billiard flow inside the garage: straight through internal gluings,
// elastic reflection at boundary edges.  Segment faces are tile indices.
struct BilliardTrajectory {
    std::vector<TrajectorySegment> segments;
    double length = 0;
    int bounces = 0;
    Termination termination = Termination::BudgetExhausted;
};
BilliardTrajectory billiard_trace(const Garage& g, int tile, Vec2 start, Vec2 dir,
                                  int max_bounces, double max_len = 1e18);

struct HolonomyVector {
    Vec2 v;
    int multiplicity = 1;
};

// A single saddle-connection instance, oriented from source to target.
struct SaddleConnection {
    int source_class, target_class;
    Vec2 hol;
};

// All saddle connections of length <= L: geodesic segments between marked
// vertex classes with no singular class in the interior (regular marked
// points may sit inside).  Found by corridor development from every class,
// complete up to L.
std::vector<SaddleConnection> saddle_connection_instances(const TranslationSurface& s, double L);

// The same list aggregated to holonomy vectors with multiplicities;
// symmetric under negation.
std::vector<HolonomyVector> saddle_connections(const TranslationSurface& s, double L);

struct SpineSegment {
    int face;
    Vec2 a, b;
};

struct ChainLink {
    int from_class, to_class;
    Vec2 hol;
};

struct Cylinder {
    Vec2 dir;
    double w = 0, h = 0;
    std::vector<ChainLink> lower, upper;  // boundary saddle connections
};

enum class DecompStatus { Cylinders, NoDecomposition, BudgetExhausted };

struct DecompositionResult {
    DecompStatus status = DecompStatus::BudgetExhausted;
    std::vector<Cylinder> cylinders;
    double area_error = 0;  // relative |sum w*h - area| / area
    // offending separatrix when status != Cylinders
    int offender_class = -1;
    double offender_len = 0;
    // spine geometry, indexed by face, for point location downstream
    std::vector<std::vector<SpineSegment>> spine_by_face;
};

// Decompose the surface in the given direction.  Separatrices start from
// every singular class (from every marked class when the surface has no
// singularity) and are traced up to `budget`; if all of them close into
// saddle connections the cylinders are assembled and their areas must sum
// to the surface area within 1e-6 relative.
DecompositionResult cylinder_decomposition(const TranslationSurface& s, Vec2 dir,
                                           double budget = 1000.0);

struct GrowthResult {
    std::vector<std::pair<double, long long>> table;  // (T, N(T))
    double slope = 0;
    std::string mode;  // "cylinders" or "sc-proxy"
};

// N(T) = number of cylinders (periodic strips, counted once per direction)
// of circumference <= T, plus a least-squares log-log exponent fit.
GrowthResult growth_count(const TranslationSurface& s, const std::vector<double>& T_values);

enum class DirectionVerdict { PeriodicEvidence, MinimalEvidence, Inconclusive };

struct DirectionReport {
    Vec2 dir;
    DirectionVerdict verdict = DirectionVerdict::Inconclusive;
    std::vector<Cylinder> cylinders;
    double area_error = 0;
    // (orbit-length budget, grid discrepancy) samples, ascending budgets
    std::vector<std::pair<double, double>> discrepancy;
};

// Periodicity evidence via cylinder decomposition; otherwise equidistribution
// evidence via cell-grid discrepancy of sampled orbits.
DirectionReport classify_direction(const TranslationSurface& s, Vec2 dir, double budget = 1e5,
                                   int grid = 20, int orbit_count = 8, std::uint64_t seed = 0);

} // namespace gfold

#pragma once

#include <string>
#include <vector>

#include "gfold/dynamics.hpp"
#include "gfold/garage.hpp"
#include "gfold/surface.hpp"

namespace gfold {

// Minimal SVG writers: polygons, labels, trajectory polylines.

std::string svg_garage(const Garage& g, const std::vector<TrajectorySegment>* traj = nullptr);

// Faces laid out in a ring around the origin grouped by group element;
// purely cosmetic.  Optional trajectory segments are drawn in the matching
// face offsets.
std::string svg_surface(const TranslationSurface& s,
                        const std::vector<TrajectorySegment>* traj = nullptr);

void write_file(const std::string& path, const std::string& content);

} // namespace gfold

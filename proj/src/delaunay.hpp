#ifndef SPECBOUND_SRC_DELAUNAY_HPP
#define SPECBOUND_SRC_DELAUNAY_HPP

#include "specbound/geometry.hpp"

#include <vector>

namespace specbound::detail {

/// Quality triangulation of the interior of a simple counterclockwise
/// polygon: boundary subdivided to spacing <= h, equilateral interior lattice,
/// Bowyer-Watson insertion, then Ruppert refinement until every triangle has
/// minimum angle >= min_angle_deg and longest edge <= 1.45 h.
TriangleMesh triangulate_polygon(const std::vector<Point>& loop, double h, double min_angle_deg);

}  // namespace specbound::detail

#endif  // SPECBOUND_SRC_DELAUNAY_HPP

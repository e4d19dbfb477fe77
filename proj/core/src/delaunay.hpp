#pragma once

// Internal Delaunay refinement engine behind mesh_body().  Incremental
// insertion with Lawson flips, constrained boundary edges, midpoint recovery
// of missing constraint edges, and Ruppert-style refinement (split encroached
// subsegments first, otherwise insert circumcenters of poor triangles).

#include <array>
#include <vector>

#include "insulopt/geometry.hpp"

namespace insulopt::detail {

struct RefinedTriangulation {
    std::vector<Vec2> points;
    std::vector<std::array<int, 3>> triangles;   // CCW, inside the domain only
    // Boundary subsegments in loop order: node pair (oriented along the
    // segment direction) plus the polygon segment id they refine.
    struct SubSegment {
        int a, b;
        int segment;
    };
    std::vector<SubSegment> boundary;
};

// min_angle_deg is the refinement target; max insertion count guards against
// non-termination on pathological input (MeshFailureError).
RefinedTriangulation refine_polygon(const PolygonalDomain& domain, double h_target,
                                    double min_angle_deg = 20.0);

}  // namespace insulopt::detail

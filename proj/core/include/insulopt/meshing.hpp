#pragma once

#include <array>
#include <vector>

#include "insulopt/geometry.hpp"

namespace insulopt {

enum class Region : unsigned char { Body, Layer };

enum class FacetLabel : unsigned char {
    Insulated,    // on the body boundary (interface when a layer is attached)
    Dirichlet,
    Neumann,
    LayerOuter,   // outer boundary of the extruded layer
    Artificial,   // straight side cuts of an open layer strip
};

const char* to_string(FacetLabel label);

// Conforming triangle mesh with labeled boundary facets.  Triangles are
// counter-clockwise.  For a thick mesh (body + layer) the insulated facets of
// the body become interior interface edges and move to `interface_facets`.
struct TriangleMesh {
    struct Facet {
        int a = 0;
        int b = 0;               // oriented along the boundary loop direction
        FacetLabel label = FacetLabel::Insulated;
        int segment = -1;        // polygon segment id, or -1 (layer facets)
    };

    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Region> region;          // per triangle
    std::vector<Facet> boundary_facets;
    std::vector<Facet> interface_facets; // body/layer interface (thick meshes)

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    double triangle_area(int t) const;
    double min_angle_deg() const;
    double max_edge_length() const;
    double area(Region r) const;

    // Structural validation: positive areas, interior edges shared by exactly
    // two triangles, boundary + interface facets covering the remaining edges
    // exactly once.  Throws MeshFailureError on violation.
    void validate() const;
};

// Delaunay-refined triangulation of the polygon: interior angles >= 20 deg,
// edge lengths <= 1.5 * h_target, boundary facets inherit segment labels.
// Throws MeshFailureError when the quality targets cannot be met.
TriangleMesh mesh_body(const PolygonalDomain& domain, double h_target);

// Insulated boundary discretization of a body mesh, as ordered chains bound
// to mesh node ids.
std::vector<BoundaryChain> insulated_chains_of_mesh(const TriangleMesh& mesh,
                                                    const PolygonalDomain& domain);

// Body mesh with the extruded layer glued on: layer quads split along the
// shorter diagonal, inner row shared with the body boundary nodes (conforming
// by construction).  Keeps the extrusion bookkeeping needed to evaluate fiber
// coordinates and trial fields on the layer.
struct ThickMesh {
    TriangleMesh mesh;
    InsulationLayout layout;      // bound to the inner-row mesh nodes
    double epsilon = 0.0;
    int n_layers = 0;

    // Mesh node id of grid point (row, col) of strip `chain`; row 0 nodes are
    // body nodes.
    std::vector<std::vector<int>> grid_node;   // per chain, (rows+1) x (cols+1) row-major

    int node_at(int chain, int row, int col) const {
        const int cols = layout.chains[chain].num_intervals();
        return grid_node[chain][static_cast<std::size_t>(row) * (cols + 1) + col];
    }
    // Fiber coordinate of grid point (row, col): (row / n_layers) * epsilon * d(col).
    double fiber_t(int chain, int row, int col) const;
};

ThickMesh mesh_thick(const PolygonalDomain& domain, const TransversalProfile& profile,
                     const std::vector<std::vector<double>>& dtilde_at_polygon_nodes,
                     double epsilon, double h_target, int n_layers);

// Same, but with the body mesh and its insulated layout precomputed so that a
// sweep over epsilon reuses one body discretization.
ThickMesh attach_layer(const TriangleMesh& body, const InsulationLayout& mesh_layout,
                       double epsilon, int n_layers);

// Distribution values interpolated from polygon chain nodes onto mesh chains
// (piecewise linear in arclength; values are dtilde).
std::vector<std::vector<double>> interpolate_dtilde(const PolygonalDomain& domain,
                                                    const std::vector<std::vector<double>>& at_polygon_nodes,
                                                    const std::vector<BoundaryChain>& to_chains);

}  // namespace insulopt

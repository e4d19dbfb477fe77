#pragma once

#include <optional>
#include <string>
#include <vector>

#include "insulopt/errors.hpp"
#include "insulopt/vec2.hpp"

namespace insulopt {

// Boundary condition class of a polygon segment: insulated (the part that
// carries the film / layer model), prescribed temperature, prescribed flux.
enum class BoundaryLabel : unsigned char { Insulated, Dirichlet, Neumann };

const char* to_string(BoundaryLabel label);

// ---------------------------------------------------------------------------
// PolygonalDomain: a polygonal body given by one or more closed, simple loops
// of labeled segments.  The outer loop is counter-clockwise (holes, if any,
// clockwise), so the outward unit normal of a segment is the clockwise
// rotation of its unit tangent.
// ---------------------------------------------------------------------------
struct PolygonalDomain {
    struct Segment {
        int a = 0;
        int b = 0;
        BoundaryLabel label = BoundaryLabel::Insulated;
    };

    std::vector<Vec2> vertices;
    std::vector<Segment> segments;

    // Validates loop closure, simplicity, orientation and that at least one
    // segment is insulated; throws ConfigError otherwise.
    static PolygonalDomain create(std::vector<Vec2> vertices, std::vector<Segment> segments);

    Vec2 segment_start(int s) const { return vertices[segments[s].a]; }
    Vec2 segment_end(int s) const { return vertices[segments[s].b]; }
    double segment_length(int s) const { return dist(segment_start(s), segment_end(s)); }
    Vec2 segment_tangent(int s) const { return normalized(segment_end(s) - segment_start(s)); }
    Vec2 segment_normal(int s) const { return rot_cw(segment_tangent(s)); }

    bool has_label(BoundaryLabel label) const;
    double boundary_length(BoundaryLabel label) const;

    // Strict interior test by crossing parity (points on the boundary are not
    // classified reliably; use signed_distance for those).
    bool contains(Vec2 p) const;
};

// Result of projecting a point onto the boundary polyline.
struct Projection {
    Vec2 point;          // closest point on the boundary
    double distance;     // Euclidean distance to it
    int segment;         // index of a segment attaining the minimum
    bool multiple;       // true when distinct closest points tie within 1e-12
};

Projection closest_point_projection(const PolygonalDomain& domain, Vec2 x);

// Positive outside, negative inside, zero on the boundary.
double signed_distance(const PolygonalDomain& domain, Vec2 x);

// ---------------------------------------------------------------------------
// Discretized insulated boundary.
//
// The insulated segments of the polygon form one or more maximal chains; a
// BoundaryChain is an ordered polyline discretization of one of them.  Chains
// derived from a triangulation carry mesh node ids so that layer extrusion
// and the body mesh share nodes exactly.  A closed chain stores its first
// node again at the end (nodes.front() == nodes.back()).
// ---------------------------------------------------------------------------
struct BoundaryChain {
    std::vector<Vec2> nodes;
    std::vector<int> mesh_node;    // mesh node id per node, or -1 when unbound
    std::vector<int> segment_of;   // polygon segment id per interval [i, i+1)
    std::vector<double> arclen;    // cumulative arclength per node, arclen[0] = 0
    bool closed = false;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_intervals() const { return static_cast<int>(nodes.size()) - 1; }
    double length() const { return arclen.back(); }
};

// Chains whose nodes are the polygon vertices themselves.
std::vector<BoundaryChain> insulated_chains(const PolygonalDomain& domain);

double total_length(const std::vector<BoundaryChain>& chains);

// ---------------------------------------------------------------------------
// Transversal direction field on the insulated boundary.
//
// A valid field has unit vectors k with k.n >= kappa > 0 against the outward
// normal n of every insulated segment.  Between nodes the field is the
// normalized linear interpolant of the node vectors, so certifying k.n at the
// two endpoints of every sub-segment certifies the whole sub-segment.
// ---------------------------------------------------------------------------
struct TransversalProfile {
    enum class Mode : unsigned char {
        NormalField,   // segment normal; angle bisector at interior corners
        StarShaped,    // k(x) = (x - center)/|x - center|
        UserTable,     // user vectors at the polygon's insulated vertices
    };

    Mode mode = Mode::NormalField;
    Vec2 center;                                     // StarShaped only
    std::vector<std::vector<Vec2>> table;            // UserTable: per polygon chain node
    double kappa = 0.0;                              // certified min of k.n
    std::vector<std::vector<Vec2>> node_vectors;     // per polygon chain node
};

// Builds the profile on insulated_chains(domain) and certifies kappa; throws
// NonTransversalError when min k.n <= 0.
TransversalProfile build_transversal(const PolygonalDomain& domain, TransversalProfile::Mode mode,
                                     Vec2 star_center = {},
                                     std::vector<std::vector<Vec2>> user_table = {});

// Node vectors of the same field on a refined discretization of the chains.
std::vector<Vec2> transversal_vectors(const TransversalProfile& profile,
                                      const PolygonalDomain& domain, const BoundaryChain& chain);

// ---------------------------------------------------------------------------
// Material distribution on the insulated boundary.
//
// d(s) >= 0 is the layer thickness in the transversal direction, stored at
// chain nodes with linear interpolation in arclength.  The effective
// thickness dtilde = (k.n) d is the quantity the mass constraint and the
// reduced boundary condition see.  At polygon corners, where n jumps, the
// conversion uses the normalized average of the adjacent segment normals.
// ---------------------------------------------------------------------------
struct DistributionProfile {
    std::vector<std::vector<double>> d;        // per chain node
    std::vector<std::vector<double>> dtilde;   // per chain node

    double min_d() const;
    double max_d() const;
    double max_dtilde() const;
};

// Conversion factors (k.n at each chain node, with averaged normals at
// corners) for a given chain discretization and its node vectors.
std::vector<double> node_kdotn(const PolygonalDomain& domain, const BoundaryChain& chain,
                               const std::vector<Vec2>& k);

// Everything tied to one discretization of the insulated boundary: the chains,
// the transversal node vectors and the material distribution.
struct InsulationLayout {
    std::vector<BoundaryChain> chains;
    std::vector<std::vector<Vec2>> k;    // per chain node
    DistributionProfile dist;

    double total_length() const { return insulopt::total_length(chains); }
};

InsulationLayout make_layout(const PolygonalDomain& domain, const TransversalProfile& profile,
                             std::vector<BoundaryChain> chains);

// Fills layout.dist from nodal dtilde values (d derived) or from nodal d
// values (dtilde derived).
void set_distribution_from_dtilde(const PolygonalDomain& domain, InsulationLayout& layout,
                                  const std::vector<std::vector<double>>& dtilde);
void set_distribution_from_d(const PolygonalDomain& domain, InsulationLayout& layout,
                             const std::vector<std::vector<double>>& d);

// Uniform dtilde = m / |Gamma_I|.
void set_uniform_distribution(const PolygonalDomain& domain, InsulationLayout& layout, double mass);

// Mass of the distribution: trapezoid rule on the nodal dtilde values (exact
// for the stored piecewise-linear data model).
double distribution_mass(const InsulationLayout& layout);

// ---------------------------------------------------------------------------
// Layer extrusion.
//
// Each chain is extruded into a strip of bilinear quads: node (j, i) sits at
//   s_j + (i / rows) * epsilon * d(s_j) * k(s_j),            i = 0 .. rows.
// Row 0 is the insulated boundary itself, row `rows` the outer boundary.
// Quads are checked to be convex and positively oriented (all four corner
// cross products positive), which certifies that the fiber map is injective
// on the strip.
// ---------------------------------------------------------------------------
struct LayerStrip {
    int cols = 0;   // number of quad columns (= chain intervals)
    int rows = 0;   // number of quad rows through the thickness
    bool closed = false;
    std::vector<Vec2> grid;   // (rows+1) x (cols+1), row-major

    Vec2 at(int row, int col) const { return grid[static_cast<std::size_t>(row) * (cols + 1) + col]; }
};

// Throws SelfIntersectionError when any full-height quad is degenerate (which
// also covers every sub-row, since the corner cross products are affine in
// the through-thickness coordinate).
std::vector<LayerStrip> extrude_layer(const InsulationLayout& layout, double epsilon, int rows);

// Area of the extruded layer (sum of exact bilinear quad areas).
double layer_area(const std::vector<LayerStrip>& strips);

// Fiber coordinate t of a point x of the layer: x = s + t k(s) with s on the
// insulated boundary, 0 <= t < epsilon d(s).  Throws OutsideLayerError when x
// is not inside any strip.
double transversal_distance(const InsulationLayout& layout, double epsilon, Vec2 x);

// Largest epsilon in (0, epsilon_max] at which the extrusion stays injective,
// located by bisection to a relative tolerance of 1e-3.  The certificate is
// evaluated on the chains of `layout` (refine them to the mesh resolution for
// a mesh-specific certificate).  Returns 0 when even epsilon_max * 1e-6 fails.
double check_bilipschitz(const InsulationLayout& layout, double epsilon_max);

// Convenience: layout sampled at `samples_per_segment` subdivisions of each
// insulated polygon segment, with uniform-in-arclength d interpolated from
// `dist_nodes` given at the polygon chain nodes.
InsulationLayout sampled_layout(const PolygonalDomain& domain, const TransversalProfile& profile,
                                const std::vector<std::vector<double>>& d_at_polygon_nodes,
                                int samples_per_segment);

}  // namespace insulopt

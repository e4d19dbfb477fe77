#include "insulopt/meshing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "delaunay.hpp"

namespace insulopt {

const char* to_string(FacetLabel label) {
    switch (label) {
        case FacetLabel::Insulated: return "I";
        case FacetLabel::Dirichlet: return "D";
        case FacetLabel::Neumann: return "N";
        case FacetLabel::LayerOuter: return "IEps";
        case FacetLabel::Artificial: return "A";
    }
    return "?";
}

namespace {

FacetLabel facet_label_of(BoundaryLabel label) {
    switch (label) {
        case BoundaryLabel::Insulated: return FacetLabel::Insulated;
        case BoundaryLabel::Dirichlet: return FacetLabel::Dirichlet;
        case BoundaryLabel::Neumann: return FacetLabel::Neumann;
    }
    return FacetLabel::Insulated;
}

std::uint64_t ukey(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

double TriangleMesh::triangle_area(int t) const {
    const auto& tv = triangles[t];
    return 0.5 * cross(nodes[tv[1]] - nodes[tv[0]], nodes[tv[2]] - nodes[tv[0]]);
}

double TriangleMesh::min_angle_deg() const {
    double amin = 180.0;
    for (const auto& tv : triangles) {
        const Vec2 a = nodes[tv[0]], b = nodes[tv[1]], c = nodes[tv[2]];
        auto angle = [](Vec2 u, Vec2 v) {
            return std::atan2(std::fabs(cross(u, v)), dot(u, v)) * 180.0 / M_PI;
        };
        amin = std::min({amin, angle(b - a, c - a), angle(c - b, a - b), angle(a - c, b - c)});
    }
    return amin;
}

double TriangleMesh::max_edge_length() const {
    double emax = 0.0;
    for (const auto& tv : triangles)
        for (int i = 0; i < 3; ++i)
            emax = std::max(emax, dist(nodes[tv[i]], nodes[tv[(i + 1) % 3]]));
    return emax;
}

double TriangleMesh::area(Region r) const {
    double a = 0.0;
    for (int t = 0; t < num_triangles(); ++t)
        if (region[t] == r) a += triangle_area(t);
    return a;
}

void TriangleMesh::validate() const {
    if (region.size() != triangles.size())
        throw MeshFailureError("mesh has no region tag for every triangle");

    std::unordered_map<std::uint64_t, int> edge_count;
    for (int t = 0; t < num_triangles(); ++t) {
        if (triangle_area(t) <= 0.0)
            throw MeshFailureError("triangle " + std::to_string(t) +
                                   " is degenerate or clockwise");
        const auto& tv = triangles[t];
        for (int i = 0; i < 3; ++i) ++edge_count[ukey(tv[i], tv[(i + 1) % 3])];
    }
    for (const auto& [key, count] : edge_count) {
        if (count > 2) throw MeshFailureError("an edge is shared by more than two triangles");
    }

    std::unordered_map<std::uint64_t, int> boundary_seen;
    for (const Facet& f : boundary_facets) {
        auto it = edge_count.find(ukey(f.a, f.b));
        if (it == edge_count.end() || it->second != 1)
            throw MeshFailureError("boundary facet is not a boundary edge of the triangulation");
        if (++boundary_seen[ukey(f.a, f.b)] > 1)
            throw MeshFailureError("duplicate boundary facet");
    }
    for (const Facet& f : interface_facets) {
        auto it = edge_count.find(ukey(f.a, f.b));
        if (it == edge_count.end() || it->second != 2)
            throw MeshFailureError("interface facet is not an interior edge");
    }
    std::size_t boundary_edges = 0;
    for (const auto& [key, count] : edge_count)
        if (count == 1) ++boundary_edges;
    if (boundary_edges != boundary_facets.size())
        throw MeshFailureError("boundary facets do not cover the topological boundary exactly");
}

TriangleMesh mesh_body(const PolygonalDomain& domain, double h_target) {
    const detail::RefinedTriangulation rt = detail::refine_polygon(domain, h_target);

    TriangleMesh mesh;
    mesh.nodes = rt.points;
    mesh.triangles = rt.triangles;
    mesh.region.assign(rt.triangles.size(), Region::Body);
    mesh.boundary_facets.reserve(rt.boundary.size());
    for (const auto& s : rt.boundary)
        mesh.boundary_facets.push_back(
            {s.a, s.b, facet_label_of(domain.segments[s.segment].label), s.segment});
    mesh.validate();
    return mesh;
}

std::vector<BoundaryChain> insulated_chains_of_mesh(const TriangleMesh& mesh,
                                                    const PolygonalDomain& domain) {
    // Facets grouped by polygon segment (already ordered along each segment).
    std::map<int, std::vector<const TriangleMesh::Facet*>> per_segment;
    for (const auto& f : mesh.boundary_facets)
        if (f.label == FacetLabel::Insulated) per_segment[f.segment].push_back(&f);
    for (const auto& f : mesh.interface_facets)
        if (f.label == FacetLabel::Insulated) per_segment[f.segment].push_back(&f);

    std::vector<BoundaryChain> chains;
    for (const BoundaryChain& pc : insulated_chains(domain)) {
        BoundaryChain chain;
        chain.closed = pc.closed;
        bool first = true;
        for (int seg : pc.segment_of) {
            auto it = per_segment.find(seg);
            if (it == per_segment.end())
                throw MeshFailureError("mesh has no facets on an insulated segment");
            for (const TriangleMesh::Facet* f : it->second) {
                if (first) {
                    chain.nodes.push_back(mesh.nodes[f->a]);
                    chain.mesh_node.push_back(f->a);
                    first = false;
                } else if (chain.mesh_node.back() != f->a) {
                    throw MeshFailureError("insulated boundary facets are not contiguous");
                }
                chain.nodes.push_back(mesh.nodes[f->b]);
                chain.mesh_node.push_back(f->b);
                chain.segment_of.push_back(seg);
            }
        }
        chain.arclen.resize(chain.nodes.size());
        chain.arclen[0] = 0.0;
        for (std::size_t i = 1; i < chain.nodes.size(); ++i)
            chain.arclen[i] = chain.arclen[i - 1] + dist(chain.nodes[i - 1], chain.nodes[i]);
        chains.push_back(std::move(chain));
    }
    return chains;
}

std::vector<std::vector<double>> interpolate_dtilde(
    const PolygonalDomain& domain, const std::vector<std::vector<double>>& at_polygon_nodes,
    const std::vector<BoundaryChain>& to_chains) {
    const std::vector<BoundaryChain> pchains = insulated_chains(domain);
    if (at_polygon_nodes.size() != pchains.size())
        throw ConfigError("distribution values must give one list per insulated chain");
    std::vector<std::vector<double>> out(to_chains.size());
    for (std::size_t c = 0; c < to_chains.size(); ++c) {
        const BoundaryChain& pc = pchains.at(c);
        const std::vector<double>& vals = at_polygon_nodes[c];
        if (vals.size() != pc.nodes.size())
            throw ConfigError("distribution values must match the chain node count");
        out[c].resize(to_chains[c].nodes.size());
        for (std::size_t i = 0; i < to_chains[c].nodes.size(); ++i) {
            const double s = std::clamp(to_chains[c].arclen[i], 0.0, pc.arclen.back());
            auto it = std::upper_bound(pc.arclen.begin(), pc.arclen.end(), s);
            std::size_t j = std::min<std::size_t>(
                pc.arclen.size() - 2, it == pc.arclen.begin() ? 0 : (it - pc.arclen.begin() - 1));
            const double len = pc.arclen[j + 1] - pc.arclen[j];
            const double t = len > 0 ? (s - pc.arclen[j]) / len : 0.0;
            out[c][i] = (1.0 - t) * vals[j] + t * vals[j + 1];
        }
    }
    return out;
}

double ThickMesh::fiber_t(int chain, int row, int col) const {
    return (static_cast<double>(row) / n_layers) * epsilon * layout.dist.d[chain][col];
}

ThickMesh attach_layer(const TriangleMesh& body, const InsulationLayout& mesh_layout,
                       double epsilon, int n_layers) {
    const std::vector<LayerStrip> strips = extrude_layer(mesh_layout, epsilon, n_layers);

    ThickMesh tm;
    tm.mesh = body;
    tm.layout = mesh_layout;
    tm.epsilon = epsilon;
    tm.n_layers = n_layers;

    // The body's insulated facets become the body/layer interface.
    std::vector<TriangleMesh::Facet> kept;
    for (const auto& f : tm.mesh.boundary_facets) {
        if (f.label == FacetLabel::Insulated)
            tm.mesh.interface_facets.push_back(f);
        else
            kept.push_back(f);
    }
    tm.mesh.boundary_facets = std::move(kept);

    tm.grid_node.resize(strips.size());
    for (std::size_t c = 0; c < strips.size(); ++c) {
        const LayerStrip& strip = strips[c];
        const BoundaryChain& chain = mesh_layout.chains[c];
        const int cols = strip.cols;
        std::vector<int>& grid = tm.grid_node[c];
        grid.assign(static_cast<std::size_t>(n_layers + 1) * (cols + 1), -1);

        for (int j = 0; j <= cols; ++j) grid[j] = chain.mesh_node[j];
        for (int i = 1; i <= n_layers; ++i) {
            for (int j = 0; j <= cols; ++j) {
                if (strip.closed && j == cols) {
                    grid[static_cast<std::size_t>(i) * (cols + 1) + j] =
                        grid[static_cast<std::size_t>(i) * (cols + 1)];
                    continue;
                }
                grid[static_cast<std::size_t>(i) * (cols + 1) + j] = tm.mesh.num_nodes();
                tm.mesh.nodes.push_back(strip.at(i, j));
            }
        }

        auto node = [&](int i, int j) { return grid[static_cast<std::size_t>(i) * (cols + 1) + j]; };

        for (int i = 0; i < n_layers; ++i) {
            for (int j = 0; j < cols; ++j) {
                const int n00 = node(i, j), n01 = node(i, j + 1);
                const int n10 = node(i + 1, j), n11 = node(i + 1, j + 1);
                const Vec2 p00 = tm.mesh.nodes[n00], p01 = tm.mesh.nodes[n01];
                const Vec2 p10 = tm.mesh.nodes[n10], p11 = tm.mesh.nodes[n11];
                // Counter-clockwise quad is (n01, n00, n10, n11); split along
                // the shorter diagonal.
                if (dist(p00, p11) <= dist(p01, p10)) {
                    tm.mesh.triangles.push_back({n01, n00, n11});
                    tm.mesh.triangles.push_back({n00, n10, n11});
                } else {
                    tm.mesh.triangles.push_back({n01, n00, n10});
                    tm.mesh.triangles.push_back({n01, n10, n11});
                }
                tm.mesh.region.push_back(Region::Layer);
                tm.mesh.region.push_back(Region::Layer);
            }
        }

        const int seg_front = chain.segment_of.front();
        const int seg_back = chain.segment_of.back();
        for (int j = 0; j < cols; ++j)
            tm.mesh.boundary_facets.push_back(
                {node(n_layers, j), node(n_layers, j + 1), FacetLabel::LayerOuter,
                 chain.segment_of[j]});
        if (!strip.closed) {
            for (int i = 0; i < n_layers; ++i) {
                tm.mesh.boundary_facets.push_back(
                    {node(i, 0), node(i + 1, 0), FacetLabel::Artificial, seg_front});
                tm.mesh.boundary_facets.push_back(
                    {node(i + 1, cols), node(i, cols), FacetLabel::Artificial, seg_back});
            }
        }
    }

    tm.mesh.validate();
    return tm;
}

ThickMesh mesh_thick(const PolygonalDomain& domain, const TransversalProfile& profile,
                     const std::vector<std::vector<double>>& dtilde_at_polygon_nodes,
                     double epsilon, double h_target, int n_layers) {
    if (n_layers < 1) throw ConfigError("mesh_thick needs at least one layer row");
    const TriangleMesh body = mesh_body(domain, h_target);
    InsulationLayout layout = make_layout(domain, profile, insulated_chains_of_mesh(body, domain));
    set_distribution_from_dtilde(
        domain, layout, interpolate_dtilde(domain, dtilde_at_polygon_nodes, layout.chains));
    return attach_layer(body, layout, epsilon, n_layers);
}

}  // namespace insulopt

#include "insulopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace insulopt {

namespace {

constexpr double kTieTol = 1e-12;

// Proper / improper intersection test for the simplicity check.
int orient_sign(Vec2 a, Vec2 b, Vec2 c) {
    const double v = cross(b - a, c - a);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
    return orient_sign(a, b, p) == 0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const int o1 = orient_sign(a, b, c);
    const int o2 = orient_sign(a, b, d);
    const int o3 = orient_sign(c, d, a);
    const int o4 = orient_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

Vec2 project_to_segment(Vec2 a, Vec2 b, Vec2 x) {
    const Vec2 e = b - a;
    const double t = std::clamp(dot(x - a, e) / norm2(e), 0.0, 1.0);
    return a + t * e;
}

}  // namespace

const char* to_string(BoundaryLabel label) {
    switch (label) {
        case BoundaryLabel::Insulated: return "I";
        case BoundaryLabel::Dirichlet: return "D";
        case BoundaryLabel::Neumann: return "N";
    }
    return "?";
}

PolygonalDomain PolygonalDomain::create(std::vector<Vec2> vertices,
                                        std::vector<Segment> segments) {
    PolygonalDomain dom;
    dom.vertices = std::move(vertices);
    dom.segments = std::move(segments);

    const int nv = static_cast<int>(dom.vertices.size());
    const int ns = static_cast<int>(dom.segments.size());
    if (nv < 3 || ns < 3) throw ConfigError("domain needs at least 3 vertices and 3 segments");

    std::vector<int> out_deg(nv, 0), in_deg(nv, 0);
    for (const Segment& s : dom.segments) {
        if (s.a < 0 || s.a >= nv || s.b < 0 || s.b >= nv)
            throw ConfigError("segment references a vertex out of range");
        if (s.a == s.b) throw ConfigError("zero-length segment (a == b)");
        ++out_deg[s.a];
        ++in_deg[s.b];
    }
    for (int v = 0; v < nv; ++v) {
        if (out_deg[v] != 1 || in_deg[v] != 1)
            throw ConfigError("boundary segments must form closed loops visiting each vertex once");
    }
    for (int s = 0; s < ns; ++s) {
        if (dom.segment_length(s) <= 0.0) throw ConfigError("degenerate segment of zero length");
    }

    // Simplicity: no two segments may cross; adjacent segments only touch at
    // their shared vertex.
    for (int i = 0; i < ns; ++i) {
        for (int j = i + 1; j < ns; ++j) {
            const Segment& si = dom.segments[i];
            const Segment& sj = dom.segments[j];
            const bool adjacent = si.a == sj.a || si.a == sj.b || si.b == sj.a || si.b == sj.b;
            if (adjacent) continue;
            if (segments_intersect(dom.vertices[si.a], dom.vertices[si.b], dom.vertices[sj.a],
                                   dom.vertices[sj.b]))
                throw ConfigError("boundary loops are not simple (segments intersect)");
        }
    }

    if (!dom.has_label(BoundaryLabel::Insulated))
        throw ConfigError("at least one segment must carry the insulated label");

    // Orientation: an interior sample just off the midpoint of every segment
    // must lie on the negative side of the outward normal.
    double scale = 0.0;
    for (const Vec2& v : dom.vertices) scale = std::max(scale, std::max(std::fabs(v.x), std::fabs(v.y)));
    for (int s = 0; s < ns; ++s) {
        const double delta = 1e-7 * std::max(dom.segment_length(s), scale);
        const Vec2 mid = 0.5 * (dom.segment_start(s) + dom.segment_end(s));
        const Vec2 n = dom.segment_normal(s);
        if (!dom.contains(mid - delta * n) || dom.contains(mid + delta * n))
            throw ConfigError(
                "loop orientation is wrong (outer loops counter-clockwise, holes clockwise)");
    }
    return dom;
}

bool PolygonalDomain::has_label(BoundaryLabel label) const {
    return std::any_of(segments.begin(), segments.end(),
                       [&](const Segment& s) { return s.label == label; });
}

double PolygonalDomain::boundary_length(BoundaryLabel label) const {
    double len = 0.0;
    for (int s = 0; s < static_cast<int>(segments.size()); ++s)
        if (segments[s].label == label) len += segment_length(s);
    return len;
}

bool PolygonalDomain::contains(Vec2 p) const {
    bool inside = false;
    for (const Segment& s : segments) {
        const Vec2 a = vertices[s.a];
        const Vec2 b = vertices[s.b];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (xi > p.x) inside = !inside;
        }
    }
    return inside;
}

Projection closest_point_projection(const PolygonalDomain& domain, Vec2 x) {
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    best.segment = -1;
    best.multiple = false;

    std::vector<Vec2> feet;   // distinct minimizers found so far
    for (int s = 0; s < static_cast<int>(domain.segments.size()); ++s) {
        const Vec2 foot = project_to_segment(domain.segment_start(s), domain.segment_end(s), x);
        const double d = dist(foot, x);
        if (d < best.distance - kTieTol) {
            best.point = foot;
            best.distance = d;
            best.segment = s;
            feet.clear();
            feet.push_back(foot);
        } else if (d <= best.distance + kTieTol) {
            // A tie: count it only if the foot is genuinely a new point (two
            // adjacent segments meeting at a vertex share one foot).
            bool fresh = true;
            for (const Vec2& f : feet)
                if (dist(f, foot) <= 10 * kTieTol) fresh = false;
            if (fresh) {
                feet.push_back(foot);
                if (d < best.distance) {
                    best.point = foot;
                    best.distance = d;
                    best.segment = s;
                }
            }
        }
    }
    best.multiple = feet.size() > 1;
    return best;
}

double signed_distance(const PolygonalDomain& domain, Vec2 x) {
    const Projection p = closest_point_projection(domain, x);
    if (p.distance == 0.0) return 0.0;
    return domain.contains(x) ? -p.distance : p.distance;
}

std::vector<BoundaryChain> insulated_chains(const PolygonalDomain& domain) {
    const int ns = static_cast<int>(domain.segments.size());
    std::vector<int> succ_of_vertex(domain.vertices.size(), -1);
    std::vector<int> pred_of_vertex(domain.vertices.size(), -1);
    for (int s = 0; s < ns; ++s) {
        succ_of_vertex[domain.segments[s].a] = s;
        pred_of_vertex[domain.segments[s].b] = s;
    }
    auto insulated = [&](int s) {
        return s >= 0 && domain.segments[s].label == BoundaryLabel::Insulated;
    };

    std::vector<bool> used(ns, false);
    std::vector<BoundaryChain> chains;
    // Open chains first (deterministic: scan by segment index), then any full
    // insulated loops that remain.
    for (int pass = 0; pass < 2; ++pass) {
        for (int s0 = 0; s0 < ns; ++s0) {
            if (!insulated(s0) || used[s0]) continue;
            const bool starts_chain = !insulated(pred_of_vertex[domain.segments[s0].a]);
            if (pass == 0 && !starts_chain) continue;

            BoundaryChain chain;
            chain.closed = (pass == 1);
            chain.nodes.push_back(domain.segment_start(s0));
            chain.mesh_node.push_back(-1);
            int s = s0;
            while (true) {
                used[s] = true;
                chain.nodes.push_back(domain.segment_end(s));
                chain.mesh_node.push_back(-1);
                chain.segment_of.push_back(s);
                const int next = succ_of_vertex[domain.segments[s].b];
                if (!insulated(next) || used[next]) break;
                s = next;
            }
            chain.arclen.resize(chain.nodes.size());
            chain.arclen[0] = 0.0;
            for (std::size_t i = 1; i < chain.nodes.size(); ++i)
                chain.arclen[i] = chain.arclen[i - 1] + dist(chain.nodes[i - 1], chain.nodes[i]);
            chains.push_back(std::move(chain));
        }
    }
    return chains;
}

double total_length(const std::vector<BoundaryChain>& chains) {
    double len = 0.0;
    for (const BoundaryChain& c : chains) len += c.length();
    return len;
}

namespace {

// Vector at node i of `chain` for the given mode.  NormalField uses the
// segment normal inside a segment and the normalized normal sum (angle
// bisector) where two insulated segments meet; chain ends adjacent to
// non-insulated boundary use the single available normal.
Vec2 vector_at_node(const TransversalProfile& profile, const PolygonalDomain& domain,
                    const BoundaryChain& chain, int chain_index, int i) {
    switch (profile.mode) {
        case TransversalProfile::Mode::StarShaped: {
            const Vec2 r = chain.nodes[i] - profile.center;
            if (norm(r) == 0.0)
                throw NonTransversalError("star center lies on the insulated boundary");
            return normalized(r);
        }
        case TransversalProfile::Mode::NormalField: {
            const int m = chain.num_intervals();
            int seg_prev = -1, seg_next = -1;
            if (i > 0) seg_prev = chain.segment_of[i - 1];
            if (i < m) seg_next = chain.segment_of[i];
            if (chain.closed) {
                if (i == 0) seg_prev = chain.segment_of[m - 1];
                if (i == m) seg_next = chain.segment_of[0];
            }
            Vec2 sum{0, 0};
            if (seg_prev >= 0) sum += domain.segment_normal(seg_prev);
            if (seg_next >= 0 && seg_next != seg_prev) sum += domain.segment_normal(seg_next);
            if (norm(sum) < 1e-12)
                throw NonTransversalError(
                    "adjacent insulated segments fold back on themselves; no bisector direction");
            return normalized(sum);
        }
        case TransversalProfile::Mode::UserTable: {
            // The table is given at the polygon chain nodes; interpolate by
            // arclength within the polygon segment containing this node.
            const std::vector<BoundaryChain> pchains = insulated_chains(domain);
            const BoundaryChain& pc = pchains.at(chain_index);
            const std::vector<Vec2>& tab = profile.table.at(chain_index);
            const int m = chain.num_intervals();
            const int seg = chain.segment_of[std::min(i, m - 1)];
            // Locate the polygon interval with this segment id.
            for (int j = 0; j < pc.num_intervals(); ++j) {
                if (pc.segment_of[j] != seg) continue;
                const double len = domain.segment_length(seg);
                const double t = std::clamp(dist(chain.nodes[i], pc.nodes[j]) / len, 0.0, 1.0);
                const Vec2 v = (1.0 - t) * tab.at(j) + t * tab.at(j + 1);
                if (norm(v) < 1e-12)
                    throw NonTransversalError("user transversal table interpolates to zero");
                return normalized(v);
            }
            throw ConfigError("user transversal table does not cover the insulated boundary");
        }
    }
    throw ConfigError("unknown transversal mode");
}

}  // namespace

TransversalProfile build_transversal(const PolygonalDomain& domain, TransversalProfile::Mode mode,
                                     Vec2 star_center, std::vector<std::vector<Vec2>> user_table) {
    TransversalProfile profile;
    profile.mode = mode;
    profile.center = star_center;

    const std::vector<BoundaryChain> chains = insulated_chains(domain);
    if (mode == TransversalProfile::Mode::UserTable) {
        if (user_table.size() != chains.size())
            throw ConfigError("user transversal table must provide one vector list per chain");
        for (std::size_t c = 0; c < chains.size(); ++c) {
            if (static_cast<int>(user_table[c].size()) != chains[c].num_nodes())
                throw ConfigError("user transversal table size does not match the chain nodes");
            for (Vec2& v : user_table[c]) {
                if (norm(v) < 1e-12) throw ConfigError("user transversal vector of zero length");
                v = normalized(v);
            }
        }
        profile.table = std::move(user_table);
    }

    profile.node_vectors.resize(chains.size());
    double kappa = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const BoundaryChain& chain = chains[c];
        profile.node_vectors[c].resize(chain.num_nodes());
        for (int i = 0; i < chain.num_nodes(); ++i)
            profile.node_vectors[c][i] =
                vector_at_node(profile, domain, chain, static_cast<int>(c), i);
        // k.n is certified at both endpoints of every insulated sub-segment;
        // the normalized linear interpolant between unit endpoint vectors can
        // only increase the dot product, so this bounds the whole segment.
        for (int j = 0; j < chain.num_intervals(); ++j) {
            const Vec2 n = domain.segment_normal(chain.segment_of[j]);
            kappa = std::min(kappa, dot(profile.node_vectors[c][j], n));
            kappa = std::min(kappa, dot(profile.node_vectors[c][j + 1], n));
        }
    }
    if (!(kappa > 0.0))
        throw NonTransversalError("transversal field fails k.n > 0 on the insulated boundary (min " +
                                  std::to_string(kappa) + ")");
    profile.kappa = kappa;
    return profile;
}

std::vector<Vec2> transversal_vectors(const TransversalProfile& profile,
                                      const PolygonalDomain& domain, const BoundaryChain& chain) {
    // Identify which polygon chain this discretization refines (needed for
    // UserTable lookups; harmless otherwise).
    int chain_index = 0;
    const std::vector<BoundaryChain> pchains = insulated_chains(domain);
    for (std::size_t c = 0; c < pchains.size(); ++c) {
        const auto& segs = pchains[c].segment_of;
        if (std::find(segs.begin(), segs.end(), chain.segment_of.front()) != segs.end()) {
            chain_index = static_cast<int>(c);
            break;
        }
    }
    std::vector<Vec2> k(chain.num_nodes());
    for (int i = 0; i < chain.num_nodes(); ++i)
        k[i] = vector_at_node(profile, domain, chain, chain_index, i);
    return k;
}

std::vector<double> node_kdotn(const PolygonalDomain& domain, const BoundaryChain& chain,
                               const std::vector<Vec2>& k) {
    std::vector<double> kn(chain.num_nodes());
    const int m = chain.num_intervals();
    for (int i = 0; i < chain.num_nodes(); ++i) {
        int seg_prev = i > 0 ? chain.segment_of[i - 1] : (chain.closed ? chain.segment_of[m - 1] : -1);
        int seg_next = i < m ? chain.segment_of[i] : (chain.closed ? chain.segment_of[0] : -1);
        Vec2 sum{0, 0};
        if (seg_prev >= 0) sum += domain.segment_normal(seg_prev);
        if (seg_next >= 0 && seg_next != seg_prev) sum += domain.segment_normal(seg_next);
        kn[i] = dot(k[i], normalized(sum));
    }
    return kn;
}

InsulationLayout make_layout(const PolygonalDomain& domain, const TransversalProfile& profile,
                             std::vector<BoundaryChain> chains) {
    InsulationLayout layout;
    layout.chains = std::move(chains);
    layout.k.resize(layout.chains.size());
    for (std::size_t c = 0; c < layout.chains.size(); ++c)
        layout.k[c] = transversal_vectors(profile, domain, layout.chains[c]);
    layout.dist.d.resize(layout.chains.size());
    layout.dist.dtilde.resize(layout.chains.size());
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        layout.dist.d[c].assign(layout.chains[c].num_nodes(), 0.0);
        layout.dist.dtilde[c].assign(layout.chains[c].num_nodes(), 0.0);
    }
    return layout;
}

namespace {

void require_nonnegative(const std::vector<std::vector<double>>& values, const char* what) {
    for (const auto& chain : values)
        for (double v : chain)
            if (v < 0.0)
                throw NegativeWeightError(std::string(what) + " must be nonnegative, got " +
                                          std::to_string(v));
}

}  // namespace

void set_distribution_from_dtilde(const PolygonalDomain& domain, InsulationLayout& layout,
                                  const std::vector<std::vector<double>>& dtilde) {
    require_nonnegative(dtilde, "effective thickness dtilde");
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const std::vector<double> kn = node_kdotn(domain, layout.chains[c], layout.k[c]);
        layout.dist.dtilde[c] = dtilde.at(c);
        layout.dist.d[c].resize(kn.size());
        for (std::size_t i = 0; i < kn.size(); ++i)
            layout.dist.d[c][i] = dtilde[c][i] / kn[i];
    }
}

void set_distribution_from_d(const PolygonalDomain& domain, InsulationLayout& layout,
                             const std::vector<std::vector<double>>& d) {
    require_nonnegative(d, "layer thickness d");
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const std::vector<double> kn = node_kdotn(domain, layout.chains[c], layout.k[c]);
        layout.dist.d[c] = d.at(c);
        layout.dist.dtilde[c].resize(kn.size());
        for (std::size_t i = 0; i < kn.size(); ++i)
            layout.dist.dtilde[c][i] = d[c][i] * kn[i];
    }
}

void set_uniform_distribution(const PolygonalDomain& domain, InsulationLayout& layout,
                              double mass) {
    const double len = layout.total_length();
    std::vector<std::vector<double>> dtilde(layout.chains.size());
    for (std::size_t c = 0; c < layout.chains.size(); ++c)
        dtilde[c].assign(layout.chains[c].num_nodes(), mass / len);
    set_distribution_from_dtilde(domain, layout, dtilde);
}

double DistributionProfile::min_d() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& chain : d)
        for (double x : chain) v = std::min(v, x);
    return v;
}

double DistributionProfile::max_d() const {
    double v = 0.0;
    for (const auto& chain : d)
        for (double x : chain) v = std::max(v, x);
    return v;
}

double DistributionProfile::max_dtilde() const {
    double v = 0.0;
    for (const auto& chain : dtilde)
        for (double x : chain) v = std::max(v, x);
    return v;
}

double distribution_mass(const InsulationLayout& layout) {
    double mass = 0.0;
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const BoundaryChain& chain = layout.chains[c];
        const std::vector<double>& dt = layout.dist.dtilde[c];
        for (int j = 0; j < chain.num_intervals(); ++j) {
            const double len = chain.arclen[j + 1] - chain.arclen[j];
            mass += 0.5 * len * (dt[j] + dt[j + 1]);
        }
    }
    return mass;
}

std::vector<LayerStrip> extrude_layer(const InsulationLayout& layout, double epsilon, int rows) {
    if (epsilon <= 0.0) throw ConfigError("layer extrusion needs epsilon > 0");
    if (rows < 1) throw ConfigError("layer extrusion needs at least one row of quads");

    std::vector<LayerStrip> strips;
    strips.reserve(layout.chains.size());
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const BoundaryChain& chain = layout.chains[c];
        const std::vector<Vec2>& k = layout.k[c];
        const std::vector<double>& d = layout.dist.d[c];

        LayerStrip strip;
        strip.cols = chain.num_intervals();
        strip.rows = rows;
        strip.closed = chain.closed;
        strip.grid.resize(static_cast<std::size_t>(rows + 1) * (strip.cols + 1));
        for (int i = 0; i <= rows; ++i) {
            const double tau = static_cast<double>(i) / rows;
            for (int j = 0; j <= strip.cols; ++j)
                strip.grid[static_cast<std::size_t>(i) * (strip.cols + 1) + j] =
                    chain.nodes[j] + (tau * epsilon * d[j]) * k[j];
        }

        // Validity of the full-height quads certifies all sub-rows: the
        // corner cross products are affine in the through-thickness
        // coordinate and positive at both ends.
        for (int j = 0; j < strip.cols; ++j) {
            const Vec2 a = chain.nodes[j];
            const Vec2 b = chain.nodes[j + 1];
            const Vec2 pa = (epsilon * d[j]) * k[j];
            const Vec2 pb = (epsilon * d[j + 1]) * k[j + 1];
            // Counter-clockwise corner order for a layer on the outward side.
            const Vec2 q[4] = {b, a, a + pa, b + pb};
            bool ok = true;
            for (int t = 0; t < 4 && ok; ++t) {
                const Vec2 prev = q[(t + 3) % 4];
                const Vec2 next = q[(t + 1) % 4];
                if (cross(q[t] - prev, next - q[t]) <= 0.0) ok = false;
            }
            if (!ok)
                throw SelfIntersectionError(
                    "extruded layer folds over itself near arclength " +
                    std::to_string(chain.arclen[j]) + " (chain " + std::to_string(c) +
                    ", epsilon " + std::to_string(epsilon) + ")");
        }
        strips.push_back(std::move(strip));
    }
    return strips;
}

double layer_area(const std::vector<LayerStrip>& strips) {
    double area = 0.0;
    for (const LayerStrip& s : strips) {
        for (int j = 0; j < s.cols; ++j) {
            const Vec2 q[4] = {s.at(0, j + 1), s.at(0, j), s.at(s.rows, j), s.at(s.rows, j + 1)};
            double twice = 0.0;
            for (int t = 0; t < 4; ++t) twice += cross(q[t], q[(t + 1) % 4]);
            area += 0.5 * std::fabs(twice);
        }
    }
    return area;
}

double transversal_distance(const InsulationLayout& layout, double epsilon, Vec2 x) {
    constexpr double tol = 1e-12;
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const BoundaryChain& chain = layout.chains[c];
        for (int j = 0; j < chain.num_intervals(); ++j) {
            const Vec2 a = chain.nodes[j];
            const Vec2 e = chain.nodes[j + 1] - a;
            const Vec2 pa = (epsilon * layout.dist.d[c][j]) * layout.k[c][j];
            const Vec2 pb = (epsilon * layout.dist.d[c][j + 1]) * layout.k[c][j + 1];
            const Vec2 dp = pb - pa;
            const Vec2 r = x - a;

            // x = a + alpha e + tau pa + alpha tau dp; eliminate alpha by
            // crossing with (e + tau dp), leaving a quadratic in tau.
            const double c0 = cross(r, e);
            const double c1 = cross(r, dp) + cross(e, pa);
            const double c2 = cross(dp, pa);

            double taus[2];
            int ntau = 0;
            if (std::fabs(c2) < 1e-14 * (std::fabs(c1) + std::fabs(c0) + 1e-300)) {
                if (c1 != 0.0) taus[ntau++] = -c0 / c1;
            } else {
                const double disc = c1 * c1 - 4.0 * c2 * c0;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    // Numerically stable pair of roots.
                    const double qq = -0.5 * (c1 + (c1 >= 0 ? sq : -sq));
                    if (qq != 0.0) taus[ntau++] = c0 / qq;
                    taus[ntau++] = qq / c2;
                }
            }
            for (int t = 0; t < ntau; ++t) {
                const double tau = taus[t];
                if (tau < -tol || tau > 1.0 + tol) continue;
                const Vec2 dir = e + tau * dp;
                const double dn = norm2(dir);
                if (dn == 0.0) continue;
                const double alpha = dot(r - tau * pa, dir) / dn;
                if (alpha < -tol || alpha > 1.0 + tol) continue;
                const Vec2 w = (1.0 - alpha) * pa + alpha * pb;
                return std::clamp(tau, 0.0, 1.0) * norm(w);
            }
        }
    }
    throw OutsideLayerError("point (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                            ") is not inside the extruded layer");
}

double check_bilipschitz(const InsulationLayout& layout, double epsilon_max) {
    if (epsilon_max <= 0.0) throw ConfigError("check_bilipschitz needs epsilon_max > 0");
    auto injective = [&](double eps) {
        try {
            extrude_layer(layout, eps, 1);
            return true;
        } catch (const SelfIntersectionError&) {
            return false;
        }
    };
    if (injective(epsilon_max)) return epsilon_max;

    double hi = epsilon_max;
    double lo = epsilon_max;
    const double floor_eps = epsilon_max * 1e-6;
    while (lo > floor_eps) {
        lo *= 0.5;
        if (injective(lo)) break;
        hi = lo;
    }
    if (!injective(lo)) return 0.0;

    while ((hi - lo) / lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (injective(mid) ? lo : hi) = mid;
    }
    return lo;
}

InsulationLayout sampled_layout(const PolygonalDomain& domain, const TransversalProfile& profile,
                                const std::vector<std::vector<double>>& d_at_polygon_nodes,
                                int samples_per_segment) {
    const std::vector<BoundaryChain> pchains = insulated_chains(domain);
    std::vector<BoundaryChain> fine;
    std::vector<std::vector<double>> fine_d(pchains.size());
    fine.reserve(pchains.size());
    for (std::size_t c = 0; c < pchains.size(); ++c) {
        const BoundaryChain& pc = pchains[c];
        BoundaryChain rc;
        rc.closed = pc.closed;
        for (int j = 0; j < pc.num_intervals(); ++j) {
            for (int q = 0; q < samples_per_segment; ++q) {
                const double t = static_cast<double>(q) / samples_per_segment;
                rc.nodes.push_back((1.0 - t) * pc.nodes[j] + t * pc.nodes[j + 1]);
                rc.mesh_node.push_back(-1);
                fine_d[c].push_back((1.0 - t) * d_at_polygon_nodes.at(c).at(j) +
                                    t * d_at_polygon_nodes.at(c).at(j + 1));
            }
        }
        rc.nodes.push_back(pc.nodes.back());
        rc.mesh_node.push_back(-1);
        fine_d[c].push_back(d_at_polygon_nodes.at(c).back());
        rc.segment_of.resize(rc.nodes.size() - 1);
        for (int j = 0; j < pc.num_intervals(); ++j)
            for (int q = 0; q < samples_per_segment; ++q)
                rc.segment_of[static_cast<std::size_t>(j) * samples_per_segment + q] =
                    pc.segment_of[j];
        rc.arclen.resize(rc.nodes.size());
        rc.arclen[0] = 0.0;
        for (std::size_t i = 1; i < rc.nodes.size(); ++i)
            rc.arclen[i] = rc.arclen[i - 1] + dist(rc.nodes[i - 1], rc.nodes[i]);
        fine.push_back(std::move(rc));
    }
    InsulationLayout layout = make_layout(domain, profile, std::move(fine));
    set_distribution_from_d(domain, layout, fine_d);
    return layout;
}

}  // namespace insulopt

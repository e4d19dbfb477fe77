#include "insulopt/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace insulopt {

namespace {

bool has_dirichlet(const TriangleMesh& mesh) {
    for (const auto& f : mesh.boundary_facets)
        if (f.label == FacetLabel::Dirichlet) return true;
    return false;
}

double robin_weight(double beta, double dtilde) {
    if (dtilde < 0.0)
        throw NegativeWeightError("distribution thickness is negative (" +
                                  std::to_string(dtilde) + ")");
    return beta / (1.0 + beta * dtilde);
}

double total_robin_measure(const TriangleMesh& mesh, const std::vector<WeightedFacet>& facets) {
    double s = 0.0;
    for (const auto& f : facets)
        s += 0.5 * dist(mesh.nodes[f.a], mesh.nodes[f.b]) * (f.wa + f.wb);
    return s;
}

std::function<double(Vec2)> require_dirichlet(const TriangleMesh& mesh, const PhysicsData& phys) {
    for (const auto& f : mesh.boundary_facets)
        if (f.label == FacetLabel::Dirichlet && !phys.dirichlet)
            throw ConfigError("the boundary has Dirichlet facets but no Dirichlet data was given");
    return phys.dirichlet ? phys.dirichlet : [](Vec2) { return 0.0; };
}

Solution solve_linear(const TriangleMesh& mesh, std::vector<Triplet>& triplets,
                      std::vector<double>& rhs, const PhysicsData& phys,
                      const std::vector<WeightedFacet>& robin_facets,
                      const std::vector<double>* warm) {
    if (!has_dirichlet(mesh) && !(total_robin_measure(mesh, robin_facets) > 0.0))
        throw SingularSystemError(
            "the problem has neither Dirichlet facets nor a positive Robin weight");

    SparseMatrix matrix = SparseMatrix::from_triplets(mesh.num_nodes(), triplets);
    const DirichletBC bc = collect_dirichlet(mesh, require_dirichlet(mesh, phys));
    apply_dirichlet(matrix, rhs, bc);

    Solution sol;
    if (warm && static_cast<int>(warm->size()) == mesh.num_nodes()) sol.u = *warm;
    const CgResult cg = solve_cg(matrix, rhs, sol.u);
    sol.cg_iterations = cg.iterations;
    sol.cg_residual = cg.residual;
    return sol;
}

// Simpson's rule on [0, 1]; exact for the quadratic integrands below.
template <class F>
double simpson01(const F& f) {
    return (f(0.0) + 4.0 * f(0.5) + f(1.0)) / 6.0;
}

// Geometry of one extruded column: inner edge e, full-height offsets at its
// two endpoints, all derived from the layout's nodal data.
struct Column {
    Vec2 e;        // inner facet vector
    Vec2 pa, pb;   // epsilon * d * k at the two endpoints
};

Column column_of(const InsulationLayout& layout, int chain, int j, double epsilon) {
    const BoundaryChain& ch = layout.chains[chain];
    Column col;
    col.e = ch.nodes[j + 1] - ch.nodes[j];
    col.pa = epsilon * layout.dist.d[chain][j] * layout.k[chain][j];
    col.pb = epsilon * layout.dist.d[chain][j + 1] * layout.k[chain][j + 1];
    return col;
}

// Minimum over the column of the Jacobian density
//   g(alpha, tau) = cross(w(alpha), e + tau (pb - pa)) / (|e| |w(alpha)|),
// with w(alpha) = (1 - alpha) pa + alpha pb.  (The chain tangent together
// with the outward offset forms a left-handed pair, hence this cross order.)
// The numerator is affine in tau, so the minimum sits at tau in {0, 1}; for
// fixed tau the derivative in alpha has a single root, computed in closed
// form.
double column_density_min(const Column& col) {
    const Vec2 dp = col.pb - col.pa;
    const double elen = norm(col.e);
    double gmin = std::numeric_limits<double>::infinity();
    for (double tau : {0.0, 1.0}) {
        const Vec2 u = col.e + tau * dp;
        const double A = cross(col.pa, u);
        const double B = cross(dp, u);
        auto value = [&](double alpha) {
            const Vec2 w = (1.0 - alpha) * col.pa + alpha * col.pb;
            const double wlen = norm(w);
            if (!(wlen > 0.0)) return std::numeric_limits<double>::infinity();
            return (A + alpha * B) / (elen * wlen);
        };
        gmin = std::min({gmin, value(0.0), value(1.0)});
        const double denom = B * dot(col.pa, dp) - A * norm2(dp);
        if (denom != 0.0) {
            const double alpha = (A * dot(col.pa, dp) - B * norm2(col.pa)) / denom;
            if (alpha > 0.0 && alpha < 1.0) gmin = std::min(gmin, value(alpha));
        }
    }
    return gmin;
}

}  // namespace

std::vector<WeightedFacet> reduced_robin_facets(const InsulationLayout& layout, double beta) {
    std::vector<WeightedFacet> facets;
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const BoundaryChain& ch = layout.chains[c];
        for (int j = 0; j < ch.num_intervals(); ++j) {
            if (ch.mesh_node[j] < 0 || ch.mesh_node[j + 1] < 0)
                throw ConfigError("insulated chain is not bound to mesh nodes");
            facets.push_back({ch.mesh_node[j], ch.mesh_node[j + 1],
                              robin_weight(beta, layout.dist.dtilde[c][j]),
                              robin_weight(beta, layout.dist.dtilde[c][j + 1])});
        }
    }
    return facets;
}

std::vector<WeightedFacet> thick_robin_facets(const ThickMesh& thick, double beta) {
    std::vector<WeightedFacet> facets;
    for (const auto& f : thick.mesh.boundary_facets)
        if (f.label == FacetLabel::LayerOuter) facets.push_back({f.a, f.b, beta, beta});
    return facets;
}

Solution solve_reduced(const TriangleMesh& mesh, const InsulationLayout& layout,
                       const PhysicsData& phys, RobinQuadrature quadrature,
                       const std::vector<double>* warm) {
    const std::vector<WeightedFacet> robin = reduced_robin_facets(layout, phys.beta);

    std::vector<Triplet> triplets;
    add_stiffness(mesh, phys.lambda, 0.0, triplets);
    add_robin_mass(mesh, robin, quadrature, triplets);

    std::vector<double> rhs(mesh.num_nodes(), 0.0);
    if (phys.source) add_volume_load(mesh, phys.source, Region::Body, rhs);
    if (phys.neumann) add_boundary_load(mesh, phys.neumann, FacetLabel::Neumann, rhs);
    add_robin_load(mesh, robin, quadrature, phys.u_inf, rhs);

    Solution sol = solve_linear(mesh, triplets, rhs, phys, robin, warm);
    sol.energy = reduced_energy(mesh, layout, phys, sol.u, quadrature);
    return sol;
}

Solution solve_thick(const ThickMesh& thick, const PhysicsData& phys,
                     const std::vector<double>* warm) {
    const std::vector<WeightedFacet> robin = thick_robin_facets(thick, phys.beta);

    std::vector<Triplet> triplets;
    add_stiffness(thick.mesh, phys.lambda, thick.epsilon, triplets);
    add_robin_mass(thick.mesh, robin, RobinQuadrature::Consistent, triplets);

    std::vector<double> rhs(thick.mesh.num_nodes(), 0.0);
    if (phys.source) add_volume_load(thick.mesh, phys.source, Region::Body, rhs);
    if (phys.neumann) add_boundary_load(thick.mesh, phys.neumann, FacetLabel::Neumann, rhs);
    add_robin_load(thick.mesh, robin, RobinQuadrature::Consistent, phys.u_inf, rhs);

    Solution sol = solve_linear(thick.mesh, triplets, rhs, phys, robin, warm);
    sol.energy = thick_energy(thick, phys, sol.u);
    return sol;
}

EnergyBreakdown reduced_energy(const TriangleMesh& mesh, const InsulationLayout& layout,
                               const PhysicsData& phys, const std::vector<double>& u,
                               RobinQuadrature quadrature) {
    const std::vector<WeightedFacet> robin = reduced_robin_facets(layout, phys.beta);
    EnergyBreakdown e;
    e.grad_body = 0.5 * phys.lambda * grad_norm2(mesh, u, Region::Body);
    e.robin = 0.5 * (quadrature == RobinQuadrature::Consistent
                         ? facet_weighted_diff_norm2(mesh, robin, u, phys.u_inf)
                         : facet_weighted_diff_norm2_lumped(mesh, robin, u, phys.u_inf));
    if (phys.source) e.source = volume_inner(mesh, phys.source, u, Region::Body);
    if (phys.neumann) e.neumann = boundary_inner(mesh, phys.neumann, u, FacetLabel::Neumann);
    return e;
}

EnergyBreakdown thick_energy(const ThickMesh& thick, const PhysicsData& phys,
                             const std::vector<double>& u) {
    const std::vector<WeightedFacet> robin = thick_robin_facets(thick, phys.beta);
    EnergyBreakdown e;
    e.grad_body = 0.5 * phys.lambda * grad_norm2(thick.mesh, u, Region::Body);
    e.grad_layer = 0.5 * thick.epsilon * grad_norm2(thick.mesh, u, Region::Layer);
    e.robin = 0.5 * facet_weighted_diff_norm2(thick.mesh, robin, u, phys.u_inf);
    if (phys.source) e.source = volume_inner(thick.mesh, phys.source, u, Region::Body);
    if (phys.neumann)
        e.neumann = boundary_inner(thick.mesh, phys.neumann, u, FacetLabel::Neumann);
    return e;
}

std::vector<double> build_recovery_field(const ThickMesh& thick, const PhysicsData& phys,
                                         const std::vector<double>& body_u) {
    std::vector<double> v(thick.mesh.num_nodes(), phys.u_inf);
    std::copy(body_u.begin(), body_u.end(), v.begin());
    for (std::size_t c = 0; c < thick.grid_node.size(); ++c) {
        const int cols = thick.layout.chains[c].num_intervals();
        for (int j = 0; j <= cols; ++j) {
            const double dt = thick.layout.dist.dtilde[c][j];
            const double trace = body_u[thick.node_at(static_cast<int>(c), 0, j)];
            for (int i = 1; i <= thick.n_layers; ++i) {
                const double phi = 1.0 - (static_cast<double>(i) / thick.n_layers) *
                                             phys.beta * dt / (1.0 + phys.beta * dt);
                v[thick.node_at(static_cast<int>(c), i, j)] =
                    phys.u_inf + (trace - phys.u_inf) * phi;
            }
        }
    }
    return v;
}

TransformationCheck check_transformation_formula(const InsulationLayout& layout, double epsilon) {
    TransformationCheck r;
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        for (int j = 0; j < layout.chains[c].num_intervals(); ++j) {
            const Column col = column_of(layout, static_cast<int>(c), j, epsilon);
            const Vec2 mid = 0.5 * (col.pa + col.pb);
            const double product = cross(mid, col.e);
            const double gap = 0.5 * cross(col.pa, col.pb);
            r.exact_area += product + gap;
            r.product_area += product;
            r.gap_abs += std::fabs(gap);
            const bool flat = std::fabs(cross(normalized(col.pa + col.pb),
                                              col.pb - col.pa)) <= 1e-12 * epsilon;
            if (flat) r.flat_gap_max = std::max(r.flat_gap_max, std::fabs(gap));
            const double elen = norm(col.e);
            const double outer = norm(col.e + col.pb - col.pa);
            r.outer_ratio_max = std::max(r.outer_ratio_max, std::fabs(outer / elen - 1.0));
        }
    }
    return r;
}

LebesgueCheck check_lebesgue_limit(const InsulationLayout& layout, double epsilon,
                                   const std::function<double(Vec2)>& g) {
    LebesgueCheck r;
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const BoundaryChain& ch = layout.chains[c];
        for (int j = 0; j < ch.num_intervals(); ++j) {
            const Column col = column_of(layout, static_cast<int>(c), j, epsilon);
            const double ga = g(ch.nodes[j]), gb = g(ch.nodes[j + 1]);
            const Vec2 dp = col.pb - col.pa;
            auto blend_g = [&](double a) { return (1.0 - a) * ga + a * gb; };
            auto blend_w = [&](double a) { return (1.0 - a) * col.pa + a * col.pb; };
            r.boundary_value +=
                simpson01([&](double a) { return blend_g(a) * cross(blend_w(a), col.e); }) /
                epsilon;
            r.layer_average +=
                simpson01([&](double a) {
                    return blend_g(a) * (cross(blend_w(a), col.e) + 0.5 * cross(blend_w(a), dp));
                }) /
                epsilon;
        }
    }
    r.gap = std::fabs(r.layer_average - r.boundary_value);
    return r;
}

PoincareCheck check_poincare(const ThickMesh& thick, const std::vector<double>& v,
                             double kappa) {
    PoincareCheck r;
    r.density_min = std::numeric_limits<double>::infinity();
    double constant = 0.0;       // max over columns of eps * max(d) / g_min
    double rho_max = 0.0;        // max inner/outer facet length ratio
    double outer_norm2 = 0.0;    // int |v|^2 over the outer boundary

    const InsulationLayout& layout = thick.layout;
    for (std::size_t c = 0; c < layout.chains.size(); ++c) {
        const BoundaryChain& ch = layout.chains[c];
        for (int j = 0; j < ch.num_intervals(); ++j) {
            const Column col = column_of(layout, static_cast<int>(c), j, thick.epsilon);
            const double gmin = column_density_min(col);
            r.density_min = std::min(r.density_min, gmin);
            const double dmax =
                std::max(layout.dist.d[c][j], layout.dist.d[c][j + 1]);
            if (gmin > 0.0)
                constant = std::max(constant, thick.epsilon * dmax / gmin);

            const double elen = norm(col.e);
            const double va0 = v[thick.node_at(static_cast<int>(c), 0, j)];
            const double va1 = v[thick.node_at(static_cast<int>(c), 0, j + 1)];
            const double vb0 = v[thick.node_at(static_cast<int>(c), thick.n_layers, j)];
            const double vb1 = v[thick.node_at(static_cast<int>(c), thick.n_layers, j + 1)];
            const double d0 = vb0 - va0, d1 = vb1 - va1;
            r.fiber_lhs += elen * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
            r.trace_lhs += elen * (va0 * va0 + va0 * va1 + va1 * va1) / 3.0;

            const double olen = norm(col.e + col.pb - col.pa);
            outer_norm2 += olen * (vb0 * vb0 + vb0 * vb1 + vb1 * vb1) / 3.0;
            if (olen > 0.0) rho_max = std::max(rho_max, elen / olen);
        }
    }

    const double grad_layer = grad_norm2(thick.mesh, v, Region::Layer);
    r.fiber_rhs = constant * grad_layer;
    r.trace_rhs = 2.0 * rho_max * outer_norm2 + 2.0 * constant * grad_layer;
    const double dmax_all = layout.dist.max_d();
    r.slack_report =
        dmax_all > 0.0 ? (kappa - r.density_min) / (thick.epsilon * dmax_all) : 0.0;
    r.fiber_ok = r.fiber_lhs <= r.fiber_rhs * (1.0 + 1e-10) + 1e-30;
    r.trace_ok = r.trace_lhs <= r.trace_rhs * (1.0 + 1e-10) + 1e-30;
    return r;
}

EquicoercivityReport equicoercivity_report(const TriangleMesh& body,
                                           const InsulationLayout& layout,
                                           const PhysicsData& phys,
                                           const std::vector<double>& epsilons, int n_layers) {
    auto constant_of = [&](const TriangleMesh& mesh, const std::vector<WeightedFacet>& robin,
                           double coeff_layer) {
        std::vector<Triplet> triplets;
        add_stiffness(mesh, phys.lambda, coeff_layer, triplets);
        add_robin_mass(mesh, robin, RobinQuadrature::Consistent, triplets);
        SparseMatrix matrix = SparseMatrix::from_triplets(mesh.num_nodes(), triplets);
        std::vector<double> dummy_rhs(mesh.num_nodes(), 0.0);
        apply_dirichlet(matrix, dummy_rhs,
                        collect_dirichlet(mesh, [](Vec2) { return 0.0; }));
        return norm_equivalence_constant(matrix, mesh);
    };

    EquicoercivityReport rep;
    rep.epsilons = epsilons;
    rep.reduced_constant = constant_of(body, reduced_robin_facets(layout, phys.beta), 0.0);
    for (double eps : epsilons) {
        const ThickMesh thick = attach_layer(body, layout, eps, n_layers);
        rep.thick_constants.push_back(
            constant_of(thick.mesh, thick_robin_facets(thick, phys.beta), eps));
    }

    std::vector<double> all = rep.thick_constants;
    all.push_back(rep.reduced_constant);
    std::sort(all.begin(), all.end());
    const double median = all[all.size() / 2];
    if (!(median > 0.0)) {
        rep.band_ratio = std::numeric_limits<double>::infinity();
        rep.within_factor_two = false;
        return rep;
    }
    for (double cst : all)
        rep.band_ratio = std::max({rep.band_ratio, cst / median, median / cst});
    rep.within_factor_two = rep.band_ratio <= 2.0;
    return rep;
}

}  // namespace insulopt

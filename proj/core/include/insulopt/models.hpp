#pragma once

#include <functional>
#include <vector>

#include "insulopt/fem.hpp"
#include "insulopt/geometry.hpp"
#include "insulopt/meshing.hpp"

namespace insulopt {

// Stationary heat problems on an insulated body: the resolved model meshes a
// thin conductive layer of thickness epsilon * d(s) along the insulated
// boundary and applies a convective (Robin) condition on its outer surface;
// the reduced model replaces the layer by a variable Robin weight
// w = beta / (1 + beta * dtilde) on the body boundary itself.

struct PhysicsData {
    double lambda = 1.0;     // body conductivity
    double beta = 1.0;       // convective exchange coefficient
    double u_inf = 0.0;      // ambient temperature
    std::function<double(Vec2)> source;      // volume source on the body (may be empty)
    std::function<double(Vec2)> neumann;     // prescribed flux on Neumann facets (may be empty)
    std::function<double(Vec2)> dirichlet;   // prescribed trace on Dirichlet facets
};

struct EnergyBreakdown {
    double grad_body = 0.0;   // lambda/2 * |grad u|^2 over the body
    double grad_layer = 0.0;  // eps/2 * |grad u|^2 over the layer (resolved model)
    double robin = 0.0;       // 1/2 * int w (u - u_inf)^2 over the exchange boundary
    double source = 0.0;      // (f, u)
    double neumann = 0.0;     // (g, u) on Neumann facets

    double total() const { return grad_body + grad_layer + robin - source - neumann; }
};

struct Solution {
    std::vector<double> u;
    EnergyBreakdown energy;
    int cg_iterations = 0;
    double cg_residual = 0.0;
};

// Robin facets of the reduced model: insulated chain intervals with the
// piecewise-linear weight beta / (1 + beta * dtilde) at the endpoints.
std::vector<WeightedFacet> reduced_robin_facets(const InsulationLayout& layout, double beta);

// Robin facets of the resolved model: outer layer facets with constant beta.
std::vector<WeightedFacet> thick_robin_facets(const ThickMesh& thick, double beta);

// Solve the reduced problem on a body mesh whose insulated chains carry the
// layout's distribution.  `warm` seeds the CG iteration when given.
Solution solve_reduced(const TriangleMesh& mesh, const InsulationLayout& layout,
                       const PhysicsData& phys,
                       RobinQuadrature quadrature = RobinQuadrature::Consistent,
                       const std::vector<double>* warm = nullptr);

// Solve the resolved problem: conductivity epsilon in the layer, Robin beta
// on the outer surface, natural conditions on the artificial side cuts.
Solution solve_thick(const ThickMesh& thick, const PhysicsData& phys,
                     const std::vector<double>* warm = nullptr);

// Energies of arbitrary P1 fields (no solve).
EnergyBreakdown reduced_energy(const TriangleMesh& mesh, const InsulationLayout& layout,
                               const PhysicsData& phys, const std::vector<double>& u,
                               RobinQuadrature quadrature = RobinQuadrature::Consistent);
EnergyBreakdown thick_energy(const ThickMesh& thick, const PhysicsData& phys,
                             const std::vector<double>& u);

// Extend a body field across the layer with the profile that realizes the
// reduced energy in the thin-layer limit: along each fiber the field decays
// linearly from its boundary trace to a value whose offset from the ambient
// is the trace offset divided by 1 + beta * dtilde.
std::vector<double> build_recovery_field(const ThickMesh& thick, const PhysicsData& phys,
                                         const std::vector<double>& body_u);

// --- layer geometry diagnostics -----------------------------------------

// Compares the exact area of each extruded column with the product
// (inner facet) x (blended thickness) the reduced model uses.  On straight
// runs with a fixed transversal the two agree identically; corner columns
// carry the whole mismatch and shrink quadratically in epsilon.
struct TransformationCheck {
    double exact_area = 0.0;       // sum of column areas
    double product_area = 0.0;     // fiber-blend approximation
    double gap_abs = 0.0;          // sum of |per-column gap|
    double flat_gap_max = 0.0;     // largest gap over columns with parallel offsets
    double outer_ratio_max = 0.0;  // max |outer/inner facet length - 1|
};
TransformationCheck check_transformation_formula(const InsulationLayout& layout, double epsilon);

// Thin-layer averaging: (1/eps) * int_layer g(projected arclength) dx versus
// the boundary integral of g against the blended thickness.  The difference
// is a pure corner effect of order epsilon.
struct LebesgueCheck {
    double layer_average = 0.0;    // (1/eps) * layer integral
    double boundary_value = 0.0;   // limit value
    double gap = 0.0;              // |difference|
};
LebesgueCheck check_lebesgue_limit(const InsulationLayout& layout, double epsilon,
                                   const std::function<double(Vec2)>& g);

// Certified fiber Poincare / trace inequalities on the extruded layer.  The
// constants are built from the exact per-column Jacobian density (affine in
// the fiber coordinate, extremal at the ends), so the bounds hold for every
// P1 field up to roundoff.
struct PoincareCheck {
    double fiber_lhs = 0.0;        // int |v_outer - v_inner|^2 over the interface
    double fiber_rhs = 0.0;        // certified constant * layer gradient energy
    double trace_lhs = 0.0;        // int |v_inner|^2 over the interface
    double trace_rhs = 0.0;
    double density_min = 0.0;      // min Jacobian density over all columns
    double slack_report = 0.0;     // (kappa - density_min) / (eps * max d)
    bool fiber_ok = false;
    bool trace_ok = false;
};
PoincareCheck check_poincare(const ThickMesh& thick, const std::vector<double>& v,
                             double kappa);

// Norm-equivalence constants across an epsilon family: each thick operator's
// constant should stay within a fixed band of the reduced one.
struct EquicoercivityReport {
    std::vector<double> epsilons;
    std::vector<double> thick_constants;
    double reduced_constant = 0.0;
    double band_ratio = 0.0;       // max deviation factor from the median
    bool within_factor_two = false;
};
EquicoercivityReport equicoercivity_report(const TriangleMesh& body,
                                           const InsulationLayout& layout,
                                           const PhysicsData& phys,
                                           const std::vector<double>& epsilons, int n_layers);

}  // namespace insulopt

#pragma once

#include <vector>

#include "insulopt/models.hpp"

namespace insulopt {

// Optimal material distribution under a mass constraint.  For a fixed field
// the Robin energy  1/2 int beta/(1 + beta dtilde) (u - u_inf)^2  is convex
// in dtilde >= 0; with the trapezoid (nodal) quadrature of the alternating
// solver the exact minimizer subject to  int dtilde = mass  is the threshold
// formula
//   dtilde = max(0, T - c) / (beta c),   T = |u - u_inf| on the boundary,
// where c > 0 is the unique root of  c = 1/(mass beta) int max(0, T - c).

// Trapezoid node weights (half the adjacent interval lengths per node).
std::vector<std::vector<double>> chain_node_weights(const std::vector<BoundaryChain>& chains);

struct FixedPointResult {
    double c = 0.0;
    int iterations = 0;
};

// Bisection for the threshold constant; `trace_abs` holds T at the chain
// nodes.  Throws DegenerateTraceError when T vanishes identically (every
// distribution then performs equally and the threshold is undefined).
FixedPointResult solve_c_fixed_point(const std::vector<BoundaryChain>& chains,
                                     const std::vector<std::vector<double>>& trace_abs,
                                     double mass, double beta, double rel_tol = 1e-12);

// Writes the threshold distribution for the given trace into the layout,
// renormalized so the trapezoid mass matches exactly.  Returns c.
double optimal_distribution(const PolygonalDomain& domain, InsulationLayout& layout,
                            const std::vector<std::vector<double>>& trace_abs, double mass,
                            double beta);

struct AlternateParams {
    double rel_tol = 1e-9;      // on the energy decrease, relative
    int max_iterations = 100;
};

struct AlternateResult {
    std::vector<double> u;
    std::vector<double> energy_history;   // energy after each field solve
    double c = 0.0;                       // final threshold constant
    int iterations = 0;
    bool converged = false;
    double mass_residual = 0.0;           // |trapezoid mass - mass| at exit
};

// Alternating minimization over the field and the distribution.  Uses the
// trapezoid Robin quadrature and warm-started CG so that each recorded
// energy is not larger than the previous one by construction.  The layout's
// distribution is the starting guess (uniform when empty) and holds the
// final distribution on return.
AlternateResult alternate_minimize(const TriangleMesh& mesh, const PolygonalDomain& domain,
                                   InsulationLayout& layout, const PhysicsData& phys,
                                   double mass, const AlternateParams& params = {});

// int f over the body + int g over the Neumann boundary.
double net_heat_input(const TriangleMesh& mesh, const PhysicsData& phys);

}  // namespace insulopt

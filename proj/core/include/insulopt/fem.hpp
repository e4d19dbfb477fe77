#pragma once

#include <functional>
#include <vector>

#include "insulopt/errors.hpp"
#include "insulopt/meshing.hpp"

namespace insulopt {

// Piecewise-linear (P1) finite elements on triangle meshes.  All bilinear
// forms are assembled into one symmetric CSR matrix via a shared triplet
// list; quadrature rules are exact for the polynomial degrees that occur
// (P1 trial fields, piecewise-linear coefficients).

struct Triplet {
    int i = 0;
    int j = 0;
    double v = 0.0;
};

struct SparseMatrix {
    int n = 0;
    std::vector<int> row_ptr;   // size n + 1
    std::vector<int> col;
    std::vector<double> val;

    static SparseMatrix from_triplets(int n, std::vector<Triplet>& triplets);

    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;
    // x^T A y (for energies and Rayleigh quotients).
    double inner(const std::vector<double>& x, const std::vector<double>& y) const;
};

// Boundary facet with a piecewise-linear weight given at its endpoints.
struct WeightedFacet {
    int a = 0;
    int b = 0;
    double wa = 0.0;
    double wb = 0.0;
};

enum class RobinQuadrature {
    Consistent,   // exact integration of w * phi_i * phi_j (w linear per facet)
    Lumped,       // trapezoid rule: diagonal with nodal weights
};

// grad-grad stiffness with a per-region conductivity.  Regions without
// triangles contribute nothing.
void add_stiffness(const TriangleMesh& mesh, double coeff_body, double coeff_layer,
                   std::vector<Triplet>& out);

// Boundary mass  int w * phi_i * phi_j  over the given facets.  Throws
// NegativeWeightError if a weight endpoint is negative.
void add_robin_mass(const TriangleMesh& mesh, const std::vector<WeightedFacet>& facets,
                    RobinQuadrature quadrature, std::vector<Triplet>& out);

// rhs += c * int w * phi_i  over the facets (Robin coupling to a constant
// ambient value), matching the chosen quadrature.
void add_robin_load(const TriangleMesh& mesh, const std::vector<WeightedFacet>& facets,
                    RobinQuadrature quadrature, double c, std::vector<double>& rhs);

// rhs += int_region f * phi_i, edge-midpoint rule (exact for quadratics).
void add_volume_load(const TriangleMesh& mesh, const std::function<double(Vec2)>& f,
                     Region region, std::vector<double>& rhs);

// rhs += int g * phi_i over boundary facets with the given label, two-point
// Gauss rule per facet.
void add_boundary_load(const TriangleMesh& mesh, const std::function<double(Vec2)>& g,
                       FacetLabel label, std::vector<double>& rhs);

struct DirichletBC {
    std::vector<int> nodes;       // strictly increasing
    std::vector<double> values;

    bool empty() const { return nodes.empty(); }
};

// Nodes on Dirichlet-labeled facets with their prescribed values.
DirichletBC collect_dirichlet(const TriangleMesh& mesh,
                              const std::function<double(Vec2)>& g_dirichlet);

// Symmetric elimination: constrained rows/columns are replaced by the
// identity, couplings move to the right-hand side.  Keeps the matrix SPD.
void apply_dirichlet(SparseMatrix& matrix, std::vector<double>& rhs, const DirichletBC& bc);

struct CgResult {
    int iterations = 0;
    double residual = 0.0;   // relative, at exit
};

// Jacobi-preconditioned conjugate gradients.  `x` is the start vector on
// entry (warm start) and the solution on exit.  max_iter < 0 means 20 * n.
// Throws SingularSystemError on a nonpositive diagonal and
// NoConvergenceError when the iteration cap is reached.
CgResult solve_cg(const SparseMatrix& matrix, const std::vector<double>& rhs,
                  std::vector<double>& x, double rel_tol = 1e-10, int max_iter = -1);

// int_region |grad u|^2 for a P1 field (exact).
double grad_norm2(const TriangleMesh& mesh, const std::vector<double>& u, Region region);

// int w * (u - c)^2 over the facets, exact for P1 u and linear w.
double facet_weighted_diff_norm2(const TriangleMesh& mesh,
                                 const std::vector<WeightedFacet>& facets,
                                 const std::vector<double>& u, double c);

// Trapezoid (nodal) variant of the same integral.
double facet_weighted_diff_norm2_lumped(const TriangleMesh& mesh,
                                        const std::vector<WeightedFacet>& facets,
                                        const std::vector<double>& u, double c);

// int_region f * u, edge-midpoint rule (exact for linear f).
double volume_inner(const TriangleMesh& mesh, const std::function<double(Vec2)>& f,
                    const std::vector<double>& u, Region region);

// int g * u over boundary facets with the given label, two-point Gauss rule.
double boundary_inner(const TriangleMesh& mesh, const std::function<double(Vec2)>& g,
                      const std::vector<double>& u, FacetLabel label);

// Largest eigenvalue of  M x = lambda A x  by power iteration with A-solves,
// where M is a (lumped) L2 mass matrix.  sqrt of the result bounds
// ||v||_L2 / sqrt(v^T A v); used as an equivalence-constant diagnostic.
double norm_equivalence_constant(const SparseMatrix& A, const TriangleMesh& mesh,
                                 int iterations = 60);

}  // namespace insulopt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "insulopt/errors.hpp"
#include "insulopt/fem.hpp"
#include "insulopt/meshing.hpp"
#include "test_domains.hpp"

using namespace insulopt;
using fixtures::make_slab;

namespace {

// Two nodes only; enough for facet-local integrals.
TriangleMesh edge_mesh() {
    TriangleMesh mesh;
    mesh.nodes = {{0, 0}, {2, 0}};
    return mesh;
}

double entry(const SparseMatrix& m, int i, int j) {
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        if (m.col[k] == j) return m.val[k];
    return 0.0;
}

}  // namespace

TEST_CASE("triplet assembly merges duplicates") {
    std::vector<Triplet> t = {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 0.5}, {0, 1, 0.5}, {1, 1, 4.0}};
    SparseMatrix m = SparseMatrix::from_triplets(2, t);
    CHECK(entry(m, 0, 0) == 3.0);
    CHECK(entry(m, 0, 1) == 0.5);
    CHECK(entry(m, 1, 0) == 0.5);
    CHECK(entry(m, 1, 1) == 4.0);

    std::vector<double> y = m.multiply({1.0, 2.0});
    CHECK(y[0] == doctest::Approx(4.0));
    CHECK(y[1] == doctest::Approx(8.5));
    CHECK(m.inner({1.0, 2.0}, {1.0, 2.0}) == doctest::Approx(21.0));
}

TEST_CASE("P1 stiffness of the unit right triangle") {
    TriangleMesh mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {0, 1}};
    mesh.triangles = {{0, 1, 2}};
    mesh.region = {Region::Body};

    std::vector<Triplet> t;
    add_stiffness(mesh, 1.0, 0.0, t);
    SparseMatrix k = SparseMatrix::from_triplets(3, t);
    CHECK(entry(k, 0, 0) == doctest::Approx(1.0));
    CHECK(entry(k, 1, 1) == doctest::Approx(0.5));
    CHECK(entry(k, 2, 2) == doctest::Approx(0.5));
    CHECK(entry(k, 0, 1) == doctest::Approx(-0.5));
    CHECK(entry(k, 0, 2) == doctest::Approx(-0.5));
    CHECK(entry(k, 1, 2) == doctest::Approx(0.0).epsilon(1e-15));

    // A layer triangle with zero layer coefficient contributes nothing.
    mesh.region = {Region::Layer};
    std::vector<Triplet> t2;
    add_stiffness(mesh, 1.0, 0.0, t2);
    for (const Triplet& e : t2) CHECK(e.v == 0.0);
}

TEST_CASE("robin facet matrices, consistent and lumped") {
    TriangleMesh mesh = edge_mesh();
    std::vector<WeightedFacet> facets = {{0, 1, 1.0, 3.0}};

    std::vector<Triplet> tc;
    add_robin_mass(mesh, facets, RobinQuadrature::Consistent, tc);
    SparseMatrix mc = SparseMatrix::from_triplets(2, tc);
    // Length 2, w from 1 to 3: (L/12) [[3 wa + wb, wa + wb], [wa + wb, wa + 3 wb]].
    CHECK(entry(mc, 0, 0) == doctest::Approx(1.0));
    CHECK(entry(mc, 0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(entry(mc, 1, 1) == doctest::Approx(5.0 / 3.0));

    std::vector<Triplet> tl;
    add_robin_mass(mesh, facets, RobinQuadrature::Lumped, tl);
    SparseMatrix ml = SparseMatrix::from_triplets(2, tl);
    CHECK(entry(ml, 0, 0) == doctest::Approx(1.0));
    CHECK(entry(ml, 1, 1) == doctest::Approx(3.0));
    CHECK(entry(ml, 0, 1) == 0.0);

    // Both rules integrate w exactly: total mass 4.
    CHECK(entry(mc, 0, 0) + 2 * entry(mc, 0, 1) + entry(mc, 1, 1) == doctest::Approx(4.0));
    CHECK(entry(ml, 0, 0) + entry(ml, 1, 1) == doctest::Approx(4.0));

    // Matching ambient load: rhs = u_inf * (row sums of the robin matrix).
    std::vector<double> rc(2, 0.0), rl(2, 0.0);
    add_robin_load(mesh, facets, RobinQuadrature::Consistent, 2.0, rc);
    add_robin_load(mesh, facets, RobinQuadrature::Lumped, 2.0, rl);
    CHECK(rc[0] == doctest::Approx(2.0 * (entry(mc, 0, 0) + entry(mc, 0, 1))));
    CHECK(rc[1] == doctest::Approx(2.0 * (entry(mc, 1, 1) + entry(mc, 0, 1))));
    CHECK(rl[0] == doctest::Approx(2.0));
    CHECK(rl[1] == doctest::Approx(6.0));

    std::vector<WeightedFacet> bad = {{0, 1, -0.1, 1.0}};
    std::vector<Triplet> tb;
    CHECK_THROWS_AS(add_robin_mass(mesh, bad, RobinQuadrature::Consistent, tb),
                    NegativeWeightError);
}

TEST_CASE("facet integrals of piecewise-linear data are exact") {
    TriangleMesh mesh = edge_mesh();
    std::vector<WeightedFacet> facets = {{0, 1, 1.0, 3.0}};
    // u - c rises from 1 to 3 while w rises from 1 to 3:
    // int (1+2t)^3 * 2 dt over [0,1] = 20.
    std::vector<double> u = {2.0, 4.0};
    CHECK(facet_weighted_diff_norm2(mesh, facets, u, 1.0) == doctest::Approx(20.0));
    // Trapezoid: (L/2) (wa (ua-c)^2 + wb (ub-c)^2) = 1 * (1 + 27) = 28.
    CHECK(facet_weighted_diff_norm2_lumped(mesh, facets, u, 1.0) == doctest::Approx(28.0));
}

TEST_CASE("volume and boundary integrals on a real mesh") {
    TriangleMesh mesh = mesh_body(make_slab(), 0.07);
    const int n = mesh.num_nodes();

    std::vector<double> ux(n), uy(n), ones(n, 1.0);
    for (int i = 0; i < n; ++i) {
        ux[i] = mesh.nodes[i].x;
        uy[i] = mesh.nodes[i].y;
    }

    CHECK(grad_norm2(mesh, ux, Region::Body) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grad_norm2(mesh, ones, Region::Body) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(grad_norm2(mesh, ux, Region::Layer) == 0.0);

    // int_square x * y = 1/4, exact for the edge-midpoint rule.
    CHECK(volume_inner(mesh, [](Vec2 p) { return p.x; }, uy, Region::Body) ==
          doctest::Approx(0.25).epsilon(1e-12));

    // Load vectors sum to the integral of the data (partition of unity).
    std::vector<double> rhs(n, 0.0);
    add_volume_load(mesh, [](Vec2) { return 1.0; }, Region::Body, rhs);
    double total = 0.0;
    for (double v : rhs) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // Neumann part of the slab has length 2.
    CHECK(boundary_inner(mesh, [](Vec2) { return 1.0; }, ones, FacetLabel::Neumann) ==
          doctest::Approx(2.0).epsilon(1e-12));
    std::vector<double> brhs(n, 0.0);
    add_boundary_load(mesh, [](Vec2 p) { return p.y; }, FacetLabel::Neumann, brhs);
    double btotal = 0.0;
    for (double v : brhs) btotal += v;
    // int y over bottom (0) plus top (1 per unit length).
    CHECK(btotal == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("patch test: linear fields are reproduced exactly") {
    TriangleMesh mesh = mesh_body(make_slab(), 0.06);
    const int n = mesh.num_nodes();
    auto exact = [](Vec2 p) { return 1.0 + 2.0 * p.x + 3.0 * p.y; };

    std::vector<Triplet> t;
    add_stiffness(mesh, 1.0, 0.0, t);
    SparseMatrix a = SparseMatrix::from_triplets(n, t);

    std::vector<double> rhs(n, 0.0);
    // Natural data matching the exact field: du/dn = -3 below, 3 above, 2 on
    // the right edge.
    add_boundary_load(mesh, [](Vec2 p) { return p.y < 0.5 ? -3.0 : 3.0; },
                      FacetLabel::Neumann, rhs);
    add_boundary_load(mesh, [](Vec2) { return 2.0; }, FacetLabel::Insulated, rhs);

    DirichletBC bc = collect_dirichlet(mesh, exact);
    CHECK_FALSE(bc.empty());
    for (std::size_t i = 1; i < bc.nodes.size(); ++i) CHECK(bc.nodes[i] > bc.nodes[i - 1]);
    apply_dirichlet(a, rhs, bc);

    std::vector<double> x(n, 0.0);
    CgResult res = solve_cg(a, rhs, x, 1e-12);
    CHECK(res.residual <= 1e-12);

    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(x[i] - exact(mesh.nodes[i])));
    CHECK(worst <= 1e-8);
}

TEST_CASE("cg failure modes") {
    std::vector<Triplet> t = {{0, 0, 1.0}, {1, 1, 0.0}};
    SparseMatrix bad = SparseMatrix::from_triplets(2, t);
    std::vector<double> x(2, 0.0);
    CHECK_THROWS_AS(solve_cg(bad, {1.0, 1.0}, x), SingularSystemError);

    // A well-posed system with an impossible iteration budget.
    TriangleMesh mesh = mesh_body(make_slab(), 0.1);
    const int n = mesh.num_nodes();
    std::vector<Triplet> ts;
    add_stiffness(mesh, 1.0, 0.0, ts);
    SparseMatrix a = SparseMatrix::from_triplets(n, ts);
    std::vector<double> rhs(n, 0.0);
    DirichletBC bc = collect_dirichlet(mesh, [](Vec2 p) { return p.x; });
    apply_dirichlet(a, rhs, bc);
    std::vector<double> y(n, 0.0);
    std::vector<double> b(n, 1.0);
    CHECK_THROWS_AS(solve_cg(a, b, y, 1e-14, 1), NoConvergenceError);
}

TEST_CASE("norm equivalence constant matches the slab eigenvalue") {
    // For the unit square held at zero on the left edge the sharpest constant
    // in ||v|| <= C ||grad v|| is 2/pi (lowest mode sin(pi x / 2)).
    TriangleMesh mesh = mesh_body(make_slab(), 0.05);
    const int n = mesh.num_nodes();
    std::vector<Triplet> t;
    add_stiffness(mesh, 1.0, 0.0, t);
    SparseMatrix a = SparseMatrix::from_triplets(n, t);
    std::vector<double> rhs(n, 0.0);
    DirichletBC bc = collect_dirichlet(mesh, [](Vec2) { return 0.0; });
    apply_dirichlet(a, rhs, bc);

    double c = norm_equivalence_constant(a, mesh);
    CHECK(c == doctest::Approx(2.0 / 3.141592653589793).epsilon(0.02));
}

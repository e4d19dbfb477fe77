#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "insulopt/errors.hpp"
#include "insulopt/models.hpp"
#include "test_domains.hpp"
#include "test_helpers.hpp"

using namespace insulopt;
using fixtures::make_slab;
using fixtures::make_square;
using fixtures::mesh_layout;
using fixtures::rate;
using fixtures::unit_source_physics;

// The slab fixture has the closed-form temperature u(x) = -x^2/2 + 5x/6:
// boundary trace 1/3, total energy -1/8, split into gradient part 7/72,
// exchange part 1/36 and source work 1/4.

TEST_CASE("reduced slab solution matches the closed form") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    PhysicsData phys = unit_source_physics();

    TriangleMesh mesh = mesh_body(slab, 0.02);
    InsulationLayout layout = mesh_layout(slab, prof, mesh, 1.0);
    Solution sol = solve_reduced(mesh, layout, phys);

    // Trace on the insulated edge.
    const BoundaryChain& ch = layout.chains[0];
    for (int i = 0; i < ch.num_nodes(); ++i)
        CHECK(sol.u[ch.mesh_node[i]] == doctest::Approx(1.0 / 3.0).epsilon(6e-3));

    CHECK(sol.energy.grad_body == doctest::Approx(7.0 / 72.0).epsilon(5e-3));
    CHECK(sol.energy.robin == doctest::Approx(1.0 / 36.0).epsilon(5e-3));
    CHECK(sol.energy.source == doctest::Approx(0.25).epsilon(5e-3));
    CHECK(sol.energy.neumann == 0.0);
    CHECK(sol.energy.total() == doctest::Approx(-0.125).epsilon(1e-3));

    // Quadratic energy convergence under mesh refinement.
    double err[3];
    double hs[3] = {0.08, 0.04, 0.02};
    for (int i = 0; i < 3; ++i) {
        TriangleMesh m = mesh_body(slab, hs[i]);
        InsulationLayout lay = mesh_layout(slab, prof, m, 1.0);
        err[i] = std::fabs(solve_reduced(m, lay, phys).energy.total() + 0.125);
    }
    CHECK(rate(err[0], err[1]) == doctest::Approx(2.0).epsilon(0.2));
    CHECK(rate(err[1], err[2]) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("resolved slab energy is epsilon independent and approaches the reduced one") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    PhysicsData phys = unit_source_physics();

    TriangleMesh body = mesh_body(slab, 0.05);
    InsulationLayout layout = mesh_layout(slab, prof, body, 1.0);
    const double e_red = solve_reduced(body, layout, phys).energy.total();

    double prev_gap = std::numeric_limits<double>::infinity();
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        ThickMesh thick = attach_layer(body, layout, eps, 2);
        Solution sol = solve_thick(thick, phys);
        // The flat layer makes the resolved energy -1/8 at every thickness.
        CHECK(sol.energy.total() == doctest::Approx(-0.125).epsilon(5e-3));
        const double gap = std::fabs(sol.energy.total() - e_red);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("recovery field realizes the reduced energy from above") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    PhysicsData phys = unit_source_physics();

    TriangleMesh body = mesh_body(slab, 0.05);
    InsulationLayout layout = mesh_layout(slab, prof, body, 1.0);
    Solution red = solve_reduced(body, layout, phys);

    double prev_slack = std::numeric_limits<double>::infinity();
    for (double eps : {0.1, 0.05, 0.025}) {
        ThickMesh thick = attach_layer(body, layout, eps, 2);
        std::vector<double> v = build_recovery_field(thick, phys, red.u);

        // Along each fiber: inner value = trace, outer value = trace / 2
        // (weight 1 / (1 + beta dtilde) with dtilde = 1), linear in between.
        const BoundaryChain& ch = thick.layout.chains[0];
        for (int j = 0; j <= ch.num_intervals(); ++j) {
            const double trace = red.u[ch.mesh_node[j]];
            CHECK(v[thick.node_at(0, 0, j)] == doctest::Approx(trace));
            CHECK(v[thick.node_at(0, 2, j)] == doctest::Approx(trace / 2));
            CHECK(v[thick.node_at(0, 1, j)] == doctest::Approx(0.75 * trace));
        }

        const double slack = thick_energy(thick, phys, v).total() - red.energy.total();
        CHECK(slack >= -1e-12);
        CHECK(slack < prev_slack);
        // The recovery field is admissible for the resolved problem.
        CHECK(thick_energy(thick, phys, v).total() >=
              solve_thick(thick, phys).energy.total() - 1e-10);
        prev_slack = slack;
    }
}

TEST_CASE("transformation formula is exact on straight runs") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    InsulationLayout layout = make_layout(slab, prof, insulated_chains(slab));
    set_uniform_distribution(slab, layout, 1.0);

    TransformationCheck tc = check_transformation_formula(layout, 0.1);
    CHECK(tc.exact_area == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(tc.product_area == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(tc.gap_abs <= 1e-15);
    CHECK(tc.flat_gap_max <= 1e-15);
    CHECK(tc.outer_ratio_max <= 1e-14);
}

TEST_CASE("corner mismatch of the transformation formula") {
    // Star field on the square with one column per edge: every offset vector
    // is a corner bisector, so per column gap = |p_a x p_b| / 2 = c^2 with
    // c = eps * 0.2 / sqrt(2), exact area = product + 4 c^2.
    PolygonalDomain square = make_square();
    TransversalProfile prof =
        build_transversal(square, TransversalProfile::Mode::StarShaped, {0.5, 0.5});
    InsulationLayout layout = make_layout(square, prof, insulated_chains(square));
    set_uniform_distribution(square, layout, 0.8);

    for (double eps : {0.1, 0.05}) {
        const double c = eps * 0.2 / std::sqrt(2.0);
        TransformationCheck tc = check_transformation_formula(layout, eps);
        CHECK(tc.product_area == doctest::Approx(4 * c).epsilon(1e-12));
        CHECK(tc.exact_area == doctest::Approx(4 * c + 4 * c * c).epsilon(1e-12));
        CHECK(tc.gap_abs == doctest::Approx(4 * c * c).epsilon(1e-10));
        // Independent cross-check: the extruded strips have the same area.
        CHECK(layer_area(extrude_layer(layout, eps, 2)) ==
              doctest::Approx(tc.exact_area).epsilon(1e-12));
    }

    // The mismatch shrinks quadratically.
    double g1 = check_transformation_formula(layout, 0.1).gap_abs;
    double g2 = check_transformation_formula(layout, 0.05).gap_abs;
    CHECK(rate(g1, g2) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("thin layer averages converge to weighted boundary integrals") {
    SUBCASE("flat layer: no gap at all") {
        PolygonalDomain slab = make_slab();
        TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
        InsulationLayout layout = make_layout(slab, prof, insulated_chains(slab));
        set_uniform_distribution(slab, layout, 1.0);

        LebesgueCheck lc = check_lebesgue_limit(layout, 0.1, [](Vec2 p) { return p.y; });
        CHECK(lc.boundary_value == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(lc.layer_average == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(lc.gap <= 1e-14);
    }
    SUBCASE("corner contribution of order epsilon") {
        PolygonalDomain square = make_square();
        TransversalProfile prof =
            build_transversal(square, TransversalProfile::Mode::StarShaped, {0.5, 0.5});
        InsulationLayout layout = make_layout(square, prof, insulated_chains(square));
        set_uniform_distribution(square, layout, 0.8);

        // With g = 1 the gap is exactly the corner area excess over epsilon.
        LebesgueCheck lc = check_lebesgue_limit(layout, 0.1, [](Vec2) { return 1.0; });
        const double c = 0.1 * 0.2 / std::sqrt(2.0);
        CHECK(lc.gap == doctest::Approx(4 * c * c / 0.1).epsilon(1e-10));

        double g1 = check_lebesgue_limit(layout, 0.1, [](Vec2 p) { return 1 + p.x; }).gap;
        double g2 = check_lebesgue_limit(layout, 0.05, [](Vec2 p) { return 1 + p.x; }).gap;
        CHECK(rate(g1, g2) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("certified fiber inequalities hold for random fields") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    PolygonalDomain square = make_square();
    TransversalProfile prof =
        build_transversal(square, TransversalProfile::Mode::StarShaped, {0.5, 0.5});
    ThickMesh thick = mesh_thick(square, prof, {{0.2, 0.2, 0.2, 0.2, 0.2}}, 0.08, 0.08, 2);

    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(thick.mesh.num_nodes());
        for (double& x : v) x = uni(rng);
        PoincareCheck pc = check_poincare(thick, v, prof.kappa);
        CHECK(pc.fiber_ok);
        CHECK(pc.trace_ok);
        CHECK(pc.fiber_lhs <= pc.fiber_rhs * (1 + 1e-9) + 1e-20);
        CHECK(pc.trace_lhs <= pc.trace_rhs * (1 + 1e-9) + 1e-20);
    }

    // The minimal Jacobian density is attained at the corner bisectors.
    std::vector<double> v(thick.mesh.num_nodes(), 1.0);
    PoincareCheck pc = check_poincare(thick, v, prof.kappa);
    CHECK(pc.density_min == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(pc.slack_report >= -1e-12);

    // A constant field has zero fiber differences and zero gradient energy.
    CHECK(pc.fiber_lhs <= 1e-18);
}

TEST_CASE("flat layers have unit jacobian density") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    ThickMesh thick = mesh_thick(slab, prof, {{1.0, 1.0}}, 0.1, 0.1, 2);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> v(thick.mesh.num_nodes());
    for (double& x : v) x = uni(rng);

    PoincareCheck pc = check_poincare(thick, v, prof.kappa);
    CHECK(pc.fiber_ok);
    CHECK(pc.trace_ok);
    CHECK(pc.density_min == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pc.slack_report == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("norm equivalence constants stay in a fixed band across epsilon") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    PhysicsData phys = unit_source_physics();
    TriangleMesh body = mesh_body(slab, 0.08);
    InsulationLayout layout = mesh_layout(slab, prof, body, 1.0);

    EquicoercivityReport rep =
        equicoercivity_report(body, layout, phys, {0.1, 0.05, 0.025}, 2);
    REQUIRE(rep.thick_constants.size() == 3);
    CHECK(rep.reduced_constant > 0.0);
    CHECK(rep.within_factor_two);
    CHECK(rep.band_ratio >= 1.0);
    CHECK(rep.band_ratio <= 2.0);
}

TEST_CASE("robin facet construction") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    TriangleMesh body = mesh_body(slab, 0.1);
    InsulationLayout layout = mesh_layout(slab, prof, body, 1.0);

    // Reduced: weight beta / (1 + beta dtilde) = 1/2 at every node.
    auto reduced = reduced_robin_facets(layout, 1.0);
    CHECK(reduced.size() == static_cast<std::size_t>(layout.chains[0].num_intervals()));
    for (const WeightedFacet& f : reduced) {
        CHECK(f.wa == doctest::Approx(0.5));
        CHECK(f.wb == doctest::Approx(0.5));
    }

    // Resolved: constant beta on the outer layer facets.
    ThickMesh thick = attach_layer(body, layout, 0.1, 2);
    auto outer = thick_robin_facets(thick, 2.5);
    CHECK(outer.size() == reduced.size());
    for (const WeightedFacet& f : outer) {
        CHECK(f.wa == 2.5);
        CHECK(f.wb == 2.5);
    }

    // Negative effective thickness must be rejected at solve time.
    layout.dist.dtilde[0][0] = -0.2;
    CHECK_THROWS_AS(solve_reduced(body, layout, unit_source_physics()), NegativeWeightError);
}

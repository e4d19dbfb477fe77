#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "insulopt/errors.hpp"
#include "insulopt/geometry.hpp"
#include "test_domains.hpp"

using namespace insulopt;
using fixtures::make_lshape;
using fixtures::make_slab;
using fixtures::make_square;
using fixtures::make_two_edge;

namespace {

const double kSqrtHalf = std::sqrt(0.5);

}  // namespace

TEST_CASE("domain validation") {
    PolygonalDomain slab = make_slab();
    CHECK(slab.has_label(BoundaryLabel::Insulated));
    CHECK(slab.has_label(BoundaryLabel::Dirichlet));
    CHECK(slab.boundary_length(BoundaryLabel::Insulated) == doctest::Approx(1.0));
    CHECK(slab.boundary_length(BoundaryLabel::Neumann) == doctest::Approx(2.0));

    // Loop not closed.
    CHECK_THROWS_AS(PolygonalDomain::create(
                        {{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                        {{0, 1, BoundaryLabel::Insulated},
                         {1, 2, BoundaryLabel::Insulated},
                         {2, 3, BoundaryLabel::Insulated}}),
                    ConfigError);

    // Clockwise outer loop.
    CHECK_THROWS_AS(PolygonalDomain::create(
                        {{0, 0}, {0, 1}, {1, 1}, {1, 0}},
                        {{0, 1, BoundaryLabel::Insulated},
                         {1, 2, BoundaryLabel::Insulated},
                         {2, 3, BoundaryLabel::Insulated},
                         {3, 0, BoundaryLabel::Insulated}}),
                    ConfigError);

    // Self-intersecting (bowtie).
    CHECK_THROWS_AS(PolygonalDomain::create(
                        {{0, 0}, {1, 1}, {1, 0}, {0, 1}},
                        {{0, 1, BoundaryLabel::Insulated},
                         {1, 2, BoundaryLabel::Insulated},
                         {2, 3, BoundaryLabel::Insulated},
                         {3, 0, BoundaryLabel::Insulated}}),
                    ConfigError);

    // No insulated part.
    CHECK_THROWS_AS(PolygonalDomain::create(
                        {{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                        {{0, 1, BoundaryLabel::Neumann},
                         {1, 2, BoundaryLabel::Neumann},
                         {2, 3, BoundaryLabel::Neumann},
                         {3, 0, BoundaryLabel::Dirichlet}}),
                    ConfigError);
}

TEST_CASE("orientation, containment, distance") {
    PolygonalDomain slab = make_slab();
    CHECK(slab.segment_normal(0) == Vec2{0, -1});   // bottom
    CHECK(slab.segment_normal(1) == Vec2{1, 0});    // right
    CHECK(slab.segment_normal(2) == Vec2{0, 1});    // top
    CHECK(slab.segment_normal(3) == Vec2{-1, 0});   // left

    CHECK(slab.contains({0.5, 0.5}));
    CHECK(slab.contains({0.99, 0.01}));
    CHECK_FALSE(slab.contains({1.5, 0.5}));
    CHECK_FALSE(slab.contains({-0.1, 0.5}));

    CHECK(signed_distance(slab, {0.5, 0.5}) == doctest::Approx(-0.5));
    CHECK(signed_distance(slab, {2.0, 0.5}) == doctest::Approx(1.0));
    CHECK(signed_distance(slab, {1.0, 0.5}) == doctest::Approx(0.0).epsilon(1e-14));

    PolygonalDomain lshape = make_lshape();
    CHECK(lshape.contains({0.5, 1.5}));
    CHECK(lshape.contains({1.5, 0.5}));
    CHECK_FALSE(lshape.contains({1.5, 1.5}));
    CHECK(signed_distance(lshape, {1.5, 1.5}) == doctest::Approx(0.5));
    CHECK(signed_distance(lshape, {2.5, 1.5}) == doctest::Approx(0.5 * std::sqrt(2.0)));
}

TEST_CASE("closest point projection") {
    PolygonalDomain slab = make_slab();

    Projection p = closest_point_projection(slab, {2.0, 0.5});
    CHECK(p.point.x == doctest::Approx(1.0));
    CHECK(p.point.y == doctest::Approx(0.5));
    CHECK(p.distance == doctest::Approx(1.0));
    CHECK(p.segment == 1);
    CHECK_FALSE(p.multiple);

    // The center ties against all four edges.
    Projection c = closest_point_projection(slab, {0.5, 0.5});
    CHECK(c.distance == doctest::Approx(0.5));
    CHECK(c.multiple);

    // Beyond a corner the closest point is the corner itself.
    Projection q = closest_point_projection(slab, {1.5, -0.5});
    CHECK(q.point.x == doctest::Approx(1.0));
    CHECK(q.point.y == doctest::Approx(0.0));
    CHECK(q.distance == doctest::Approx(0.5 * std::sqrt(2.0)));
}

TEST_CASE("insulated chains") {
    SUBCASE("slab: one open chain along the right edge") {
        auto chains = insulated_chains(make_slab());
        REQUIRE(chains.size() == 1);
        const BoundaryChain& ch = chains[0];
        CHECK_FALSE(ch.closed);
        REQUIRE(ch.num_nodes() == 2);
        CHECK(ch.nodes[0] == Vec2{1, 0});
        CHECK(ch.nodes[1] == Vec2{1, 1});
        CHECK(ch.arclen[0] == 0.0);
        CHECK(ch.arclen[1] == doctest::Approx(1.0));
        CHECK(ch.segment_of[0] == 1);
        CHECK(ch.length() == doctest::Approx(1.0));
    }
    SUBCASE("square: one closed chain of length 4") {
        auto chains = insulated_chains(make_square());
        REQUIRE(chains.size() == 1);
        const BoundaryChain& ch = chains[0];
        CHECK(ch.closed);
        CHECK(ch.num_nodes() == 5);
        CHECK(ch.nodes.front() == ch.nodes.back());
        CHECK(ch.length() == doctest::Approx(4.0));
        CHECK(total_length(chains) == doctest::Approx(4.0));
    }
    SUBCASE("two_edge: two disjoint chains") {
        auto chains = insulated_chains(make_two_edge());
        REQUIRE(chains.size() == 2);
        CHECK(chains[0].length() == doctest::Approx(1.0));
        CHECK(chains[1].length() == doctest::Approx(1.0));
        CHECK_FALSE(chains[0].closed);
        CHECK_FALSE(chains[1].closed);
    }
    SUBCASE("lshape: the two notch edges form one chain through the reflex corner") {
        auto chains = insulated_chains(make_lshape());
        REQUIRE(chains.size() == 1);
        const BoundaryChain& ch = chains[0];
        CHECK_FALSE(ch.closed);
        REQUIRE(ch.num_nodes() == 3);
        CHECK(ch.nodes[0] == Vec2{2, 1});
        CHECK(ch.nodes[1] == Vec2{1, 1});
        CHECK(ch.nodes[2] == Vec2{1, 2});
        CHECK(ch.length() == doctest::Approx(2.0));
    }
}

TEST_CASE("transversal fields and certified kappa") {
    SUBCASE("normal field on the slab is the constant outward normal") {
        TransversalProfile prof =
            build_transversal(make_slab(), TransversalProfile::Mode::NormalField);
        CHECK(prof.kappa == doctest::Approx(1.0));
        REQUIRE(prof.node_vectors.size() == 1);
        for (const Vec2& k : prof.node_vectors[0]) {
            CHECK(k.x == doctest::Approx(1.0));
            CHECK(k.y == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
    SUBCASE("normal field bisects convex corners of the closed square chain") {
        TransversalProfile prof =
            build_transversal(make_square(), TransversalProfile::Mode::NormalField);
        CHECK(prof.kappa == doctest::Approx(kSqrtHalf));
        const Vec2 k0 = prof.node_vectors[0][0];   // corner (0, 0)
        CHECK(k0.x == doctest::Approx(-kSqrtHalf));
        CHECK(k0.y == doctest::Approx(-kSqrtHalf));
    }
    SUBCASE("normal field bisects the reflex notch corner of the lshape") {
        TransversalProfile prof =
            build_transversal(make_lshape(), TransversalProfile::Mode::NormalField);
        CHECK(prof.kappa == doctest::Approx(kSqrtHalf));
        const Vec2 kc = prof.node_vectors[0][1];   // corner (1, 1)
        CHECK(kc.x == doctest::Approx(kSqrtHalf));
        CHECK(kc.y == doctest::Approx(kSqrtHalf));
    }
    SUBCASE("star field from the square center") {
        TransversalProfile prof = build_transversal(
            make_square(), TransversalProfile::Mode::StarShaped, {0.5, 0.5});
        CHECK(prof.kappa == doctest::Approx(kSqrtHalf));
    }
    SUBCASE("star field from a point that sees an insulated edge from behind") {
        CHECK_THROWS_AS(build_transversal(make_square(),
                                          TransversalProfile::Mode::StarShaped, {2.0, 0.5}),
                        NonTransversalError);
    }
    SUBCASE("user table") {
        TransversalProfile prof = build_transversal(
            make_slab(), TransversalProfile::Mode::UserTable, {},
            {{{1.0, 0.0}, {0.6, 0.8}}});
        CHECK(prof.kappa == doctest::Approx(0.6));

        // Wrong shape is rejected.
        CHECK_THROWS_AS(build_transversal(make_slab(), TransversalProfile::Mode::UserTable, {},
                                          {{{1.0, 0.0}}}),
                        ConfigError);
        // A tangential vector is not transversal.
        CHECK_THROWS_AS(build_transversal(make_slab(), TransversalProfile::Mode::UserTable, {},
                                          {{{0.0, 1.0}, {0.0, 1.0}}}),
                        NonTransversalError);
    }
}

TEST_CASE("distribution profiles and mass") {
    PolygonalDomain lshape = make_lshape();
    TransversalProfile prof = build_transversal(lshape, TransversalProfile::Mode::NormalField);
    InsulationLayout layout = make_layout(lshape, prof, insulated_chains(lshape));

    SUBCASE("uniform distribution has exactly the requested mass") {
        set_uniform_distribution(lshape, layout, 0.3);
        CHECK(distribution_mass(layout) == doctest::Approx(0.3).epsilon(1e-14));
        // Uniform effective thickness = mass / insulated length.
        for (double dt : layout.dist.dtilde[0]) CHECK(dt == doctest::Approx(0.15));
        // The bisector convention makes k.n = 1 at every node of this chain,
        // so the geometric thickness equals the effective one.
        for (double d : layout.dist.d[0]) CHECK(d == doctest::Approx(0.15));
    }
    SUBCASE("conversion between d and dtilde round trips") {
        set_distribution_from_d(lshape, layout, {{0.1, 0.3, 0.2}});
        CHECK(layout.dist.d[0][1] == doctest::Approx(0.3));
        std::vector<std::vector<double>> dt = layout.dist.dtilde;
        set_distribution_from_dtilde(lshape, layout, dt);
        CHECK(layout.dist.d[0][0] == doctest::Approx(0.1));
        CHECK(layout.dist.d[0][1] == doctest::Approx(0.3));
        CHECK(layout.dist.d[0][2] == doctest::Approx(0.2));
    }
    SUBCASE("node factors use averaged normals at corners") {
        auto kdotn = node_kdotn(lshape, layout.chains[0], layout.k[0]);
        REQUIRE(kdotn.size() == 3);
        CHECK(kdotn[0] == doctest::Approx(1.0));
        CHECK(kdotn[1] == doctest::Approx(1.0));   // bisector against averaged normal
        CHECK(kdotn[2] == doctest::Approx(1.0));
    }
    SUBCASE("negative thickness is rejected") {
        CHECK_THROWS_AS(set_distribution_from_d(lshape, layout, {{0.1, -0.01, 0.2}}),
                        NegativeWeightError);
    }
}

TEST_CASE("layer extrusion on the slab is an exact rectangle") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    InsulationLayout layout = make_layout(slab, prof, insulated_chains(slab));
    set_uniform_distribution(slab, layout, 1.0);

    auto strips = extrude_layer(layout, 0.1, 2);
    REQUIRE(strips.size() == 1);
    const LayerStrip& s = strips[0];
    CHECK(s.cols == 1);
    CHECK(s.rows == 2);
    CHECK_FALSE(s.closed);
    CHECK(s.at(0, 0) == Vec2{1, 0});
    CHECK(s.at(0, 1) == Vec2{1, 1});
    CHECK(s.at(1, 0).x == doctest::Approx(1.05));
    CHECK(s.at(2, 1).x == doctest::Approx(1.1));
    CHECK(s.at(2, 1).y == doctest::Approx(1.0));
    CHECK(layer_area(strips) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("reflex corner folds the layer at thickness equal to the node spacing") {
    // Sampled at spacing 0.1 with unit thickness, the quads at the notch
    // corner degenerate exactly when epsilon * d reaches the spacing.
    PolygonalDomain lshape = make_lshape();
    TransversalProfile prof = build_transversal(lshape, TransversalProfile::Mode::NormalField);
    InsulationLayout layout = sampled_layout(lshape, prof, {{1.0, 1.0, 1.0}}, 10);
    REQUIRE(layout.chains[0].num_intervals() == 20);

    CHECK_NOTHROW(extrude_layer(layout, 0.098, 2));
    CHECK_THROWS_AS(extrude_layer(layout, 0.102, 2), SelfIntersectionError);

    double eps_star = check_bilipschitz(layout, 1.0);
    CHECK(eps_star == doctest::Approx(0.1).epsilon(3e-3));
}

TEST_CASE("transversal distance inverts the fiber map") {
    SUBCASE("flat slab layer") {
        PolygonalDomain slab = make_slab();
        TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
        InsulationLayout layout = make_layout(slab, prof, insulated_chains(slab));
        set_uniform_distribution(slab, layout, 1.0);

        CHECK(transversal_distance(layout, 0.1, {1.03, 0.4}) == doctest::Approx(0.03));
        CHECK(transversal_distance(layout, 0.1, {1.0, 0.7}) == doctest::Approx(0.0));
        CHECK_THROWS_AS(transversal_distance(layout, 0.1, {1.2, 0.4}), OutsideLayerError);
        CHECK_THROWS_AS(transversal_distance(layout, 0.1, {0.5, 0.5}), OutsideLayerError);
    }
    SUBCASE("along the notch bisector of the lshape") {
        PolygonalDomain lshape = make_lshape();
        TransversalProfile prof = build_transversal(lshape, TransversalProfile::Mode::NormalField);
        InsulationLayout layout = sampled_layout(lshape, prof, {{1.0, 1.0, 1.0}}, 10);

        Vec2 x = Vec2{1, 1} + 0.02 * Vec2{kSqrtHalf, kSqrtHalf};
        CHECK(transversal_distance(layout, 0.05, x) == doctest::Approx(0.02).epsilon(1e-9));
    }
}

TEST_CASE("sampled layouts refine each insulated polygon segment uniformly") {
    PolygonalDomain slab = make_slab();
    TransversalProfile prof = build_transversal(slab, TransversalProfile::Mode::NormalField);
    InsulationLayout layout = sampled_layout(slab, prof, {{0.5, 1.5}}, 4);

    const BoundaryChain& ch = layout.chains[0];
    REQUIRE(ch.num_nodes() == 5);
    CHECK(ch.nodes[2].y == doctest::Approx(0.5));
    for (int i = 0; i + 1 < ch.num_nodes(); ++i) CHECK(ch.arclen[i] < ch.arclen[i + 1]);
    for (int id : ch.mesh_node) CHECK(id == -1);
    // Thickness is interpolated linearly in arclength.
    CHECK(layout.dist.d[0][2] == doctest::Approx(1.0));
    CHECK(layout.dist.d[0][1] == doctest::Approx(0.75));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "insulopt/config.hpp"
#include "insulopt/errors.hpp"

using namespace insulopt;

namespace {

// Minimal valid slab configuration; tests below mutate pieces of it.
std::string slab_json(const std::string& extra = "") {
    return R"({
      "domain": {
        "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]],
        "segments": [
          {"from": 0, "to": 1, "label": "neumann"},
          {"from": 1, "to": 2, "label": "insulated"},
          {"from": 2, "to": 3, "label": "neumann"},
          {"from": 3, "to": 0, "label": "dirichlet"}
        ]
      },
      "physics": {"lambda": 2.0, "beta": 0.5, "u_inf": -1.0, "source": "1 + x"},
      "distribution": {"kind": "uniform", "mass": 1.5},
      "mesh": {"h": 0.04, "layers": 3},
      "epsilon": 0.07)" +
           extra + "\n}";
}

void expect_config_error(const std::string& json, const std::string& needle) {
    try {
        parse_config(json);
        FAIL_CHECK("expected ConfigError mentioning '" << needle << "'");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
}

}  // namespace

TEST_CASE("well-formed configuration round trips") {
    RunConfig cfg = parse_config(slab_json());
    CHECK(cfg.domain.segments.size() == 4);
    CHECK(cfg.lambda == 2.0);
    CHECK(cfg.beta == 0.5);
    CHECK(cfg.u_inf == -1.0);
    REQUIRE(cfg.source.has_value());
    CHECK(cfg.source->eval(0.5, 0.0) == doctest::Approx(1.5));
    CHECK_FALSE(cfg.neumann.has_value());
    // A Dirichlet boundary exists, so the default trace is zero.
    REQUIRE(cfg.dirichlet.has_value());
    CHECK(cfg.dirichlet->eval(0.3, 0.7) == 0.0);
    CHECK(cfg.h == 0.04);
    CHECK(cfg.layers == 3);
    CHECK(cfg.epsilon == 0.07);
    CHECK(cfg.distribution.kind == DistributionSpec::Kind::Uniform);
    CHECK(cfg.distribution.mass == 1.5);
    CHECK_FALSE(cfg.sweep.has_value());
    CHECK_FALSE(cfg.optimize.has_value());
    CHECK(cfg.transversal_mode == TransversalProfile::Mode::NormalField);

    PhysicsData phys = cfg.physics();
    CHECK(phys.lambda == 2.0);
    CHECK(phys.source(Vec2{1.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("optional sections") {
    RunConfig cfg = parse_config(slab_json(R"(,
      "transversal": {"mode": "star", "center": [0.4, 0.6]},
      "sweep": {"epsilon_max": 0.2, "count": 3, "factor": 0.25},
      "optimize": {"mass": 0.9, "rel_tol": 1e-8, "max_iterations": 40})"));

    CHECK(cfg.transversal_mode == TransversalProfile::Mode::StarShaped);
    CHECK(cfg.star_center == Vec2{0.4, 0.6});

    REQUIRE(cfg.sweep.has_value());
    auto eps = cfg.sweep->epsilons();
    REQUIRE(eps.size() == 3);
    CHECK(eps[0] == doctest::Approx(0.2));
    CHECK(eps[1] == doctest::Approx(0.05));
    CHECK(eps[2] == doctest::Approx(0.0125));

    REQUIRE(cfg.optimize.has_value());
    CHECK(cfg.optimize->mass == 0.9);
    CHECK(cfg.optimize->rel_tol == 1e-8);
    CHECK(cfg.optimize->max_iterations == 40);
}

TEST_CASE("nodal distributions") {
    RunConfig cfg = parse_config(slab_json(R"(,
      "ignored": null)"));
    cfg = parse_config([] {
        std::string s = slab_json();
        auto pos = s.find("\"kind\": \"uniform\", \"mass\": 1.5");
        s.replace(pos, std::string("\"kind\": \"uniform\", \"mass\": 1.5").size(),
                  "\"kind\": \"effective_thickness\", \"values\": [[0.1, 0.3]]");
        return s;
    }());
    CHECK(cfg.distribution.kind == DistributionSpec::Kind::EffectiveThickness);
    REQUIRE(cfg.distribution.values.size() == 1);
    CHECK(cfg.distribution.values[0][1] == 0.3);
}

TEST_CASE("malformed configurations name the offending key") {
    expect_config_error("{", "JSON");
    expect_config_error(R"({"physics": {}})", "domain");

    std::string bad_label = slab_json();
    bad_label.replace(bad_label.find("\"neumann\""), 9, "\"unknown\"");
    expect_config_error(bad_label, "label");

    std::string bad_h = slab_json();
    bad_h.replace(bad_h.find("\"h\": 0.04"), 9, "\"h\": -1.0");
    expect_config_error(bad_h, "mesh.h");

    std::string bad_layers = slab_json();
    bad_layers.replace(bad_layers.find("\"layers\": 3"), 11, "\"layers\": 0");
    expect_config_error(bad_layers, "mesh.layers");

    std::string bad_eps = slab_json();
    bad_eps.replace(bad_eps.find("\"epsilon\": 0.07"), 15, "\"epsilon\": 0");
    expect_config_error(bad_eps, "epsilon");

    expect_config_error(slab_json(R"(, "sweep": {"epsilon_max": 0.1, "count": 1})"), "sweep.count");
    expect_config_error(slab_json(R"(, "sweep": {"epsilon_max": 0.1, "factor": 1.0})"),
                        "sweep.factor");
    expect_config_error(slab_json(R"(, "optimize": {"mass": 0.0})"), "optimize.mass");
    expect_config_error(slab_json(R"(, "transversal": {"mode": "star"})"), "center");
    expect_config_error(slab_json(R"(, "transversal": {"mode": "warp"})"), "mode");

    std::string bad_expr = slab_json();
    bad_expr.replace(bad_expr.find("\"1 + x\""), 7, "\"1 + \"");
    expect_config_error(bad_expr, "source");

    std::string bad_mass = slab_json();
    bad_mass.replace(bad_mass.find("\"mass\": 1.5"), 11, "\"mass\": -0.5");
    expect_config_error(bad_mass, "mass");
}

TEST_CASE("loading from disk") {
    RunConfig cfg = load_config(std::string(INSULOPT_CONFIG_DIR) + "/slab.json");
    CHECK(cfg.domain.segments.size() == 4);
    REQUIRE(cfg.sweep.has_value());
    REQUIRE(cfg.optimize.has_value());
    CHECK(cfg.optimize->mass == 1.0);

    CHECK_THROWS_AS(load_config("/nonexistent/insulopt.json"), ConfigError);

    // The shipped example configurations all parse.
    for (const char* name : {"slab.json", "square_star.json", "lshape.json", "two_edge.json"}) {
        CHECK_NOTHROW(load_config(std::string(INSULOPT_CONFIG_DIR) + "/" + name));
    }
}

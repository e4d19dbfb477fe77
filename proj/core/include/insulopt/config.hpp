#pragma once

#include <optional>
#include <string>
#include <vector>

#include "insulopt/expr.hpp"
#include "insulopt/geometry.hpp"
#include "insulopt/models.hpp"

namespace insulopt {

// Run configuration parsed from a JSON file.  Scalar data (source, flux,
// prescribed trace) is given as expressions in x and y; the distribution is
// given either as a uniform mass or as nodal values on the insulated chains
// of the polygon.

struct DistributionSpec {
    enum class Kind {
        Uniform,              // dtilde = mass / |Gamma_I|
        EffectiveThickness,   // nodal dtilde values
        Thickness,            // nodal d values
    };
    Kind kind = Kind::Uniform;
    double mass = 0.0;
    std::vector<std::vector<double>> values;   // per insulated chain node
};

struct SweepSpec {
    double epsilon_max = 0.1;
    int count = 4;
    double factor = 0.5;

    // epsilon_max * factor^k for k = 0 .. count-1
    std::vector<double> epsilons() const;
};

struct OptimizeSpec {
    double mass = 0.0;
    double rel_tol = 1e-9;
    int max_iterations = 100;
};

struct RunConfig {
    PolygonalDomain domain;

    double lambda = 1.0;
    double beta = 1.0;
    double u_inf = 0.0;
    std::optional<Expr> source;
    std::optional<Expr> neumann;
    std::optional<Expr> dirichlet;

    TransversalProfile::Mode transversal_mode = TransversalProfile::Mode::NormalField;
    Vec2 star_center;
    std::vector<std::vector<Vec2>> user_table;

    DistributionSpec distribution;

    double h = 0.05;
    int layers = 2;
    double epsilon = 0.05;

    std::optional<SweepSpec> sweep;
    std::optional<OptimizeSpec> optimize;

    PhysicsData physics() const;
    TransversalProfile transversal() const;
};

// Both throw ConfigError with the offending key in the message.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace insulopt

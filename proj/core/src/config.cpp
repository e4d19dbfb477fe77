#include "insulopt/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace insulopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

// `key` may be qualified for error messages ("mesh.h"); the JSON lookup uses
// the part after the last dot.
std::string leaf_of(const std::string& key) { return key.substr(key.rfind('.') + 1); }

double number_at(const json& j, const std::string& key, double fallback,
                 bool require_positive = false) {
    const std::string name = leaf_of(key);
    if (!j.contains(name)) {
        if (std::isnan(fallback)) fail(key, "is required");
        return fallback;
    }
    if (!j[name].is_number()) fail(key, "must be a number");
    const double v = j[name].get<double>();
    if (require_positive && !(v > 0.0)) fail(key, "must be positive");
    return v;
}

int integer_at(const json& j, const std::string& key, int fallback, int minimum) {
    const std::string name = leaf_of(key);
    if (!j.contains(name)) return fallback;
    if (!j[name].is_number_integer()) fail(key, "must be an integer");
    const int v = j[name].get<int>();
    if (v < minimum) fail(key, "must be at least " + std::to_string(minimum));
    return v;
}

Vec2 vec_at(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(key, "must be a pair of numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::optional<Expr> expr_at(const json& j, const std::string& key) {
    const std::string name = leaf_of(key);
    if (!j.contains(name)) return std::nullopt;
    if (!j[name].is_string()) fail(key, "must be an expression string");
    try {
        Expr e = Expr::parse(j[name].get<std::string>());
        if (e.is_constant_zero()) return std::nullopt;
        return e;
    } catch (const ExprSyntaxError& e) {
        fail(key, e.what());
    }
}

BoundaryLabel label_from(const std::string& s, const std::string& key) {
    if (s == "insulated") return BoundaryLabel::Insulated;
    if (s == "dirichlet") return BoundaryLabel::Dirichlet;
    if (s == "neumann") return BoundaryLabel::Neumann;
    fail(key, "unknown label '" + s + "' (expected insulated, dirichlet or neumann)");
}

PolygonalDomain domain_from(const json& j) {
    if (!j.contains("domain")) fail("domain", "is required");
    const json& d = j["domain"];
    if (!d.contains("vertices") || !d["vertices"].is_array())
        fail("domain.vertices", "must be an array of [x, y] pairs");
    std::vector<Vec2> vertices;
    for (std::size_t i = 0; i < d["vertices"].size(); ++i)
        vertices.push_back(vec_at(d["vertices"][i], "domain.vertices[" + std::to_string(i) + "]"));

    if (!d.contains("segments") || !d["segments"].is_array())
        fail("domain.segments", "must be an array of {from, to, label} objects");
    std::vector<PolygonalDomain::Segment> segments;
    for (std::size_t i = 0; i < d["segments"].size(); ++i) {
        const json& s = d["segments"][i];
        const std::string key = "domain.segments[" + std::to_string(i) + "]";
        if (!s.is_object() || !s.contains("from") || !s.contains("to") || !s.contains("label"))
            fail(key, "must be an object with from, to and label");
        PolygonalDomain::Segment seg;
        seg.a = s["from"].get<int>();
        seg.b = s["to"].get<int>();
        if (seg.a < 0 || seg.b < 0 || seg.a >= static_cast<int>(vertices.size()) ||
            seg.b >= static_cast<int>(vertices.size()))
            fail(key, "vertex index out of range");
        seg.label = label_from(s["label"].get<std::string>(), key + ".label");
        segments.push_back(seg);
    }
    return PolygonalDomain::create(std::move(vertices), std::move(segments));
}

void transversal_from(const json& j, RunConfig& cfg) {
    if (!j.contains("transversal")) return;
    const json& t = j["transversal"];
    const std::string mode = t.contains("mode") ? t["mode"].get<std::string>() : "normal";
    if (mode == "normal") {
        cfg.transversal_mode = TransversalProfile::Mode::NormalField;
    } else if (mode == "star") {
        cfg.transversal_mode = TransversalProfile::Mode::StarShaped;
        if (!t.contains("center")) fail("transversal.center", "is required for star mode");
        cfg.star_center = vec_at(t["center"], "transversal.center");
    } else if (mode == "table") {
        cfg.transversal_mode = TransversalProfile::Mode::UserTable;
        if (!t.contains("vectors") || !t["vectors"].is_array())
            fail("transversal.vectors", "must be an array (one list of [x, y] per chain)");
        for (std::size_t c = 0; c < t["vectors"].size(); ++c) {
            std::vector<Vec2> chain_vecs;
            for (std::size_t i = 0; i < t["vectors"][c].size(); ++i)
                chain_vecs.push_back(vec_at(t["vectors"][c][i],
                                            "transversal.vectors[" + std::to_string(c) + "]"));
            cfg.user_table.push_back(std::move(chain_vecs));
        }
    } else {
        fail("transversal.mode", "unknown mode '" + mode + "' (expected normal, star or table)");
    }
}

void distribution_from(const json& j, RunConfig& cfg) {
    if (!j.contains("distribution")) {
        fail("distribution", "is required (uniform, effective_thickness or thickness)");
    }
    const json& d = j["distribution"];
    const std::string kind = d.contains("kind") ? d["kind"].get<std::string>() : "uniform";
    if (kind == "uniform") {
        cfg.distribution.kind = DistributionSpec::Kind::Uniform;
        cfg.distribution.mass =
            number_at(d, "distribution.mass", std::numeric_limits<double>::quiet_NaN(), true);
        return;
    }
    if (kind == "effective_thickness")
        cfg.distribution.kind = DistributionSpec::Kind::EffectiveThickness;
    else if (kind == "thickness")
        cfg.distribution.kind = DistributionSpec::Kind::Thickness;
    else
        fail("distribution.kind", "unknown kind '" + kind + "'");
    if (!d.contains("values") || !d["values"].is_array())
        fail("distribution.values", "must be an array (one list of numbers per chain)");
    for (std::size_t c = 0; c < d["values"].size(); ++c) {
        std::vector<double> vals;
        for (const json& v : d["values"][c]) {
            if (!v.is_number())
                fail("distribution.values[" + std::to_string(c) + "]", "must hold numbers");
            if (v.get<double>() < 0.0)
                fail("distribution.values[" + std::to_string(c) + "]", "must be nonnegative");
            vals.push_back(v.get<double>());
        }
        cfg.distribution.values.push_back(std::move(vals));
    }
}

}  // namespace

std::vector<double> SweepSpec::epsilons() const {
    std::vector<double> eps;
    double e = epsilon_max;
    for (int k = 0; k < count; ++k, e *= factor) eps.push_back(e);
    return eps;
}

PhysicsData RunConfig::physics() const {
    PhysicsData phys;
    phys.lambda = lambda;
    phys.beta = beta;
    phys.u_inf = u_inf;
    if (source) phys.source = [e = *source](Vec2 p) { return e.eval(p.x, p.y); };
    if (neumann) phys.neumann = [e = *neumann](Vec2 p) { return e.eval(p.x, p.y); };
    if (dirichlet) phys.dirichlet = [e = *dirichlet](Vec2 p) { return e.eval(p.x, p.y); };
    return phys;
}

TransversalProfile RunConfig::transversal() const {
    return build_transversal(domain, transversal_mode, star_center, user_table);
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig cfg{domain_from(j)};

    if (j.contains("physics")) {
        const json& p = j["physics"];
        cfg.lambda = number_at(p, "physics.lambda", 1.0, true);
        cfg.beta = number_at(p, "physics.beta", 1.0, true);
        cfg.u_inf = number_at(p, "physics.u_inf", 0.0);
        cfg.source = expr_at(p, "physics.source");
        cfg.neumann = expr_at(p, "physics.neumann_flux");
        cfg.dirichlet = expr_at(p, "physics.dirichlet_value");
        // An all-zero prescribed trace is still a prescribed trace.
        if (!cfg.dirichlet && p.contains("dirichlet_value"))
            cfg.dirichlet = Expr::constant(0.0);
    }
    if (cfg.domain.has_label(BoundaryLabel::Dirichlet) && !cfg.dirichlet)
        cfg.dirichlet = Expr::constant(0.0);

    transversal_from(j, cfg);
    distribution_from(j, cfg);

    if (j.contains("mesh")) {
        const json& m = j["mesh"];
        cfg.h = number_at(m, "mesh.h", 0.05, true);
        cfg.layers = integer_at(m, "mesh.layers", 2, 1);
    }
    cfg.epsilon = number_at(j, "epsilon", 0.05, true);

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        SweepSpec sweep;
        sweep.epsilon_max = number_at(s, "sweep.epsilon_max", 0.1, true);
        sweep.count = integer_at(s, "sweep.count", 4, 2);
        sweep.factor = number_at(s, "sweep.factor", 0.5, true);
        if (!(sweep.factor < 1.0)) fail("sweep.factor", "must be below 1");
        cfg.sweep = sweep;
    }
    if (j.contains("optimize")) {
        const json& o = j["optimize"];
        OptimizeSpec opt;
        opt.mass = number_at(o, "optimize.mass", std::numeric_limits<double>::quiet_NaN(), true);
        opt.rel_tol = number_at(o, "optimize.rel_tol", 1e-9, true);
        opt.max_iterations = integer_at(o, "optimize.max_iterations", 100, 1);
        cfg.optimize = opt;
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace insulopt

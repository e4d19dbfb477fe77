#include "insulopt/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace insulopt {

std::vector<std::vector<double>> chain_node_weights(const std::vector<BoundaryChain>& chains) {
    std::vector<std::vector<double>> weights(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const BoundaryChain& ch = chains[c];
        weights[c].assign(ch.num_nodes(), 0.0);
        for (int j = 0; j < ch.num_intervals(); ++j) {
            const double half = 0.5 * (ch.arclen[j + 1] - ch.arclen[j]);
            weights[c][j] += half;
            weights[c][j + 1] += half;
        }
    }
    return weights;
}

FixedPointResult solve_c_fixed_point(const std::vector<BoundaryChain>& chains,
                                     const std::vector<std::vector<double>>& trace_abs,
                                     double mass, double beta, double rel_tol) {
    if (!(mass > 0.0) || !(beta > 0.0))
        throw ConfigError("the threshold equation needs positive mass and beta");
    const std::vector<std::vector<double>> weights = chain_node_weights(chains);

    double trace_max = 0.0;
    for (const auto& chain_trace : trace_abs)
        for (double t : chain_trace) trace_max = std::max(trace_max, t);
    if (!(trace_max > 0.0))
        throw DegenerateTraceError(
            "the boundary trace coincides with the ambient value; every distribution "
            "performs equally and the threshold constant is undefined");

    // G(c) = int max(0, T - c) - mass beta c is strictly decreasing with
    // G(0) >= 0 > G(trace_max); bisect.
    auto G = [&](double c) {
        double s = 0.0;
        for (std::size_t ci = 0; ci < trace_abs.size(); ++ci)
            for (std::size_t j = 0; j < trace_abs[ci].size(); ++j)
                s += weights[ci][j] * std::max(0.0, trace_abs[ci][j] - c);
        return s - mass * beta * c;
    };

    double lo = 0.0, hi = trace_max;
    int it = 0;
    while (hi - lo > rel_tol * hi && it < 200) {
        const double mid = 0.5 * (lo + hi);
        (G(mid) > 0.0 ? lo : hi) = mid;
        ++it;
    }
    return {0.5 * (lo + hi), it};
}

double optimal_distribution(const PolygonalDomain& domain, InsulationLayout& layout,
                            const std::vector<std::vector<double>>& trace_abs, double mass,
                            double beta) {
    const double c = solve_c_fixed_point(layout.chains, trace_abs, mass, beta).c;
    std::vector<std::vector<double>> dtilde(trace_abs.size());
    for (std::size_t ci = 0; ci < trace_abs.size(); ++ci) {
        dtilde[ci].resize(trace_abs[ci].size());
        for (std::size_t j = 0; j < trace_abs[ci].size(); ++j)
            dtilde[ci][j] = std::max(0.0, trace_abs[ci][j] - c) / (beta * c);
    }
    set_distribution_from_dtilde(domain, layout, dtilde);

    const double actual = distribution_mass(layout);
    if (!(actual > 0.0))
        throw DegenerateTraceError("the threshold distribution carries no mass");
    if (std::fabs(actual - mass) > 1e-10 * std::max(1.0, mass)) {
        const double scale = mass / actual;
        for (auto& chain_vals : dtilde)
            for (double& v : chain_vals) v *= scale;
        set_distribution_from_dtilde(domain, layout, dtilde);
    }
    return c;
}

AlternateResult alternate_minimize(const TriangleMesh& mesh, const PolygonalDomain& domain,
                                   InsulationLayout& layout, const PhysicsData& phys,
                                   double mass, const AlternateParams& params) {
    if (layout.dist.d.empty()) set_uniform_distribution(domain, layout, mass);

    AlternateResult res;
    for (int k = 0; k < params.max_iterations; ++k) {
        const Solution sol = solve_reduced(mesh, layout, phys, RobinQuadrature::Lumped,
                                           res.u.empty() ? nullptr : &res.u);
        res.u = sol.u;
        const double energy = sol.energy.total();
        if (!res.energy_history.empty()) {
            const double prev = res.energy_history.back();
            if (std::fabs(energy - prev) <= params.rel_tol * std::max(1.0, std::fabs(energy))) {
                res.energy_history.push_back(energy);
                res.converged = true;
                break;
            }
        }
        res.energy_history.push_back(energy);

        std::vector<std::vector<double>> trace(layout.chains.size());
        for (std::size_t c = 0; c < layout.chains.size(); ++c) {
            const BoundaryChain& ch = layout.chains[c];
            trace[c].resize(ch.num_nodes());
            for (int j = 0; j < ch.num_nodes(); ++j)
                trace[c][j] = std::fabs(res.u[ch.mesh_node[j]] - phys.u_inf);
        }
        res.c = optimal_distribution(domain, layout, trace, mass, phys.beta);
        res.mass_residual = std::fabs(distribution_mass(layout) - mass);
    }
    res.iterations = static_cast<int>(res.energy_history.size());
    return res;
}

double net_heat_input(const TriangleMesh& mesh, const PhysicsData& phys) {
    const std::vector<double> ones(mesh.num_nodes(), 1.0);
    double s = 0.0;
    if (phys.source) s += volume_inner(mesh, phys.source, ones, Region::Body);
    if (phys.neumann) s += boundary_inner(mesh, phys.neumann, ones, FacetLabel::Neumann);
    return s;
}

}  // namespace insulopt

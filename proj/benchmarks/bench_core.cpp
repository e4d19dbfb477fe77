// Micro-benchmarks of the hot paths: triangulation, layer extrusion, system
// assembly and the two model solves.  The slab scene (unit square, Dirichlet
// left wall, insulated right wall) keeps the setup cheap and deterministic;
// resolution is swept through the benchmark argument as h = 1 / range.

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "insulopt/fem.hpp"
#include "insulopt/geometry.hpp"
#include "insulopt/meshing.hpp"
#include "insulopt/models.hpp"
#include "insulopt/optimizer.hpp"

namespace {

using namespace insulopt;

PolygonalDomain slab_domain() {
    return PolygonalDomain::create(
        {{0, 0}, {1, 0}, {1, 1}, {0, 1}},
        {{0, 1, BoundaryLabel::Neumann},
         {1, 2, BoundaryLabel::Insulated},
         {2, 3, BoundaryLabel::Neumann},
         {3, 0, BoundaryLabel::Dirichlet}});
}

PhysicsData unit_physics() {
    PhysicsData phys;
    phys.lambda = 1.0;
    phys.beta = 1.0;
    phys.u_inf = 0.0;
    phys.source = [](Vec2) { return 1.0; };
    phys.dirichlet = [](Vec2) { return 0.0; };
    return phys;
}

// Body mesh with the uniform-mass layout bound to its insulated chains.
struct Scene {
    PolygonalDomain domain;
    TransversalProfile profile;
    TriangleMesh body;
    InsulationLayout layout;
    PhysicsData phys;

    explicit Scene(double h)
        : domain(slab_domain()),
          profile(build_transversal(domain, TransversalProfile::Mode::NormalField)),
          body(mesh_body(domain, h)),
          layout(make_layout(domain, profile, insulated_chains_of_mesh(body, domain))),
          phys(unit_physics()) {
        set_uniform_distribution(domain, layout, 1.0);
    }
};

double h_of(const benchmark::State& state) {
    return 1.0 / static_cast<double>(state.range(0));
}

}  // namespace

// Delaunay-refined triangulation of the body polygon.
static void BM_MeshBody(benchmark::State& state) {
    const PolygonalDomain domain = slab_domain();
    const double h = h_of(state);
    std::size_t nodes = 0;
    for (auto _ : state) {
        TriangleMesh mesh = mesh_body(domain, h);
        nodes = mesh.nodes.size();
        benchmark::DoNotOptimize(mesh.nodes.data());
    }
    state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_MeshBody)->Arg(10)->Arg(20)->Arg(40);

// Layer extrusion and stitching onto a fixed body mesh, as repeated by every
// epsilon sweep.
static void BM_AttachLayer(benchmark::State& state) {
    const Scene scene(h_of(state));
    std::size_t nodes = 0;
    for (auto _ : state) {
        ThickMesh thick = attach_layer(scene.body, scene.layout, 0.1, 2);
        nodes = thick.mesh.nodes.size();
        benchmark::DoNotOptimize(thick.mesh.nodes.data());
    }
    state.counters["nodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_AttachLayer)->Arg(20)->Arg(40);

// Stiffness triplet accumulation plus compression to CSR.
static void BM_AssembleStiffness(benchmark::State& state) {
    const Scene scene(h_of(state));
    std::size_t nnz = 0;
    for (auto _ : state) {
        std::vector<Triplet> triplets;
        add_stiffness(scene.body, scene.phys.lambda, scene.phys.lambda, triplets);
        SparseMatrix matrix = SparseMatrix::from_triplets(scene.body.num_nodes(), triplets);
        nnz = matrix.val.size();
        benchmark::DoNotOptimize(matrix.val.data());
    }
    state.counters["nnz"] = static_cast<double>(nnz);
}
BENCHMARK(BM_AssembleStiffness)->Arg(20)->Arg(40)->Arg(80);

// Full reduced solve: assembly, Dirichlet elimination and the CG iteration.
static void BM_SolveReduced(benchmark::State& state) {
    const Scene scene(h_of(state));
    int iterations = 0;
    for (auto _ : state) {
        Solution sol = solve_reduced(scene.body, scene.layout, scene.phys);
        iterations = sol.cg_iterations;
        benchmark::DoNotOptimize(sol.u.data());
    }
    state.counters["cg_iters"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveReduced)->Arg(20)->Arg(40)->Arg(80);

// Full resolved solve on a prebuilt thick mesh (layer thickness 0.1).
static void BM_SolveThick(benchmark::State& state) {
    const Scene scene(h_of(state));
    const ThickMesh thick = attach_layer(scene.body, scene.layout, 0.1, 2);
    int iterations = 0;
    for (auto _ : state) {
        Solution sol = solve_thick(thick, scene.phys);
        iterations = sol.cg_iterations;
        benchmark::DoNotOptimize(sol.u.data());
    }
    state.counters["cg_iters"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveThick)->Arg(20)->Arg(40);

// Alternating optimization of the material distribution from the uniform
// start; the layout copy per iteration is negligible next to the solves.
static void BM_AlternateMinimize(benchmark::State& state) {
    const Scene scene(h_of(state));
    int iterations = 0;
    for (auto _ : state) {
        InsulationLayout layout = scene.layout;
        AlternateResult result =
            alternate_minimize(scene.body, scene.domain, layout, scene.phys, 1.0);
        iterations = result.iterations;
        benchmark::DoNotOptimize(result.u.data());
    }
    state.counters["alt_iters"] = static_cast<double>(iterations);
}
BENCHMARK(BM_AlternateMinimize)->Arg(10)->Arg(20);

BENCHMARK_MAIN();

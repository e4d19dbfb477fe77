#include "insulopt/fem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace insulopt {

namespace {

// Two-point Gauss nodes on [0, 1] (exact through cubics).
constexpr double kGaussA = 0.21132486540518711775;   // (1 - 1/sqrt(3)) / 2
constexpr double kGaussB = 0.78867513459481288225;

double facet_length(const TriangleMesh& mesh, const WeightedFacet& f) {
    return dist(mesh.nodes[f.a], mesh.nodes[f.b]);
}

}  // namespace

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet>& triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    SparseMatrix m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (std::size_t k = 0; k < triplets.size(); ++k) {
        if (k > 0 && triplets[k].i == triplets[k - 1].i && triplets[k].j == triplets[k - 1].j) {
            m.val.back() += triplets[k].v;
            continue;
        }
        m.col.push_back(triplets[k].j);
        m.val.push_back(triplets[k].v);
        ++m.row_ptr[triplets[k].i + 1];
    }
    for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
}

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply(x, y);
    return y;
}

double SparseMatrix::inner(const std::vector<double>& x, const std::vector<double>& y) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) row += val[k] * y[col[k]];
        s += x[i] * row;
    }
    return s;
}

void add_stiffness(const TriangleMesh& mesh, double coeff_body, double coeff_layer,
                   std::vector<Triplet>& out) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double coeff = mesh.region[t] == Region::Body ? coeff_body : coeff_layer;
        if (coeff == 0.0) continue;
        const auto& tv = mesh.triangles[t];
        const Vec2 a = mesh.nodes[tv[0]], b = mesh.nodes[tv[1]], c = mesh.nodes[tv[2]];
        const double area2 = cross(b - a, c - a);   // 2 * area, positive (CCW)
        // Gradient of the hat function at vertex i is the rotated opposite
        // edge over 2*area.
        const Vec2 g[3] = {rot_ccw(c - b) / area2, rot_ccw(a - c) / area2,
                           rot_ccw(b - a) / area2};
        const double w = coeff * 0.5 * area2;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out.push_back({tv[i], tv[j], w * dot(g[i], g[j])});
    }
}

void add_robin_mass(const TriangleMesh& mesh, const std::vector<WeightedFacet>& facets,
                    RobinQuadrature quadrature, std::vector<Triplet>& out) {
    for (const WeightedFacet& f : facets) {
        if (f.wa < 0.0 || f.wb < 0.0)
            throw NegativeWeightError("Robin weight is negative on a facet (w_a=" +
                                      std::to_string(f.wa) + ", w_b=" + std::to_string(f.wb) +
                                      ")");
        const double len = facet_length(mesh, f);
        if (quadrature == RobinQuadrature::Consistent) {
            out.push_back({f.a, f.a, len * (3.0 * f.wa + f.wb) / 12.0});
            out.push_back({f.a, f.b, len * (f.wa + f.wb) / 12.0});
            out.push_back({f.b, f.a, len * (f.wa + f.wb) / 12.0});
            out.push_back({f.b, f.b, len * (f.wa + 3.0 * f.wb) / 12.0});
        } else {
            out.push_back({f.a, f.a, 0.5 * len * f.wa});
            out.push_back({f.b, f.b, 0.5 * len * f.wb});
        }
    }
}

void add_robin_load(const TriangleMesh& mesh, const std::vector<WeightedFacet>& facets,
                    RobinQuadrature quadrature, double c, std::vector<double>& rhs) {
    if (c == 0.0) return;
    for (const WeightedFacet& f : facets) {
        const double len = facet_length(mesh, f);
        if (quadrature == RobinQuadrature::Consistent) {
            rhs[f.a] += c * len * (2.0 * f.wa + f.wb) / 6.0;
            rhs[f.b] += c * len * (f.wa + 2.0 * f.wb) / 6.0;
        } else {
            rhs[f.a] += c * 0.5 * len * f.wa;
            rhs[f.b] += c * 0.5 * len * f.wb;
        }
    }
}

void add_volume_load(const TriangleMesh& mesh, const std::function<double(Vec2)>& f,
                     Region region, std::vector<double>& rhs) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.region[t] != region) continue;
        const auto& tv = mesh.triangles[t];
        const Vec2 p[3] = {mesh.nodes[tv[0]], mesh.nodes[tv[1]], mesh.nodes[tv[2]]};
        const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
        // Edge midpoints; hat function i equals 1/2 on the two midpoints of
        // the edges meeting at vertex i and 0 on the opposite one.
        const double fm[3] = {f(0.5 * (p[1] + p[2])), f(0.5 * (p[2] + p[0])),
                              f(0.5 * (p[0] + p[1]))};
        for (int i = 0; i < 3; ++i)
            rhs[tv[i]] += area / 3.0 * 0.5 * (fm[(i + 1) % 3] + fm[(i + 2) % 3]);
    }
}

void add_boundary_load(const TriangleMesh& mesh, const std::function<double(Vec2)>& g,
                       FacetLabel label, std::vector<double>& rhs) {
    for (const auto& f : mesh.boundary_facets) {
        if (f.label != label) continue;
        const Vec2 pa = mesh.nodes[f.a], pb = mesh.nodes[f.b];
        const double len = dist(pa, pb);
        for (double t : {kGaussA, kGaussB}) {
            const double gv = g(pa + t * (pb - pa));
            rhs[f.a] += 0.5 * len * gv * (1.0 - t);
            rhs[f.b] += 0.5 * len * gv * t;
        }
    }
}

DirichletBC collect_dirichlet(const TriangleMesh& mesh,
                              const std::function<double(Vec2)>& g_dirichlet) {
    std::set<int> nodes;
    for (const auto& f : mesh.boundary_facets) {
        if (f.label != FacetLabel::Dirichlet) continue;
        nodes.insert(f.a);
        nodes.insert(f.b);
    }
    DirichletBC bc;
    bc.nodes.assign(nodes.begin(), nodes.end());
    bc.values.reserve(bc.nodes.size());
    for (int n : bc.nodes) bc.values.push_back(g_dirichlet(mesh.nodes[n]));
    return bc;
}

void apply_dirichlet(SparseMatrix& matrix, std::vector<double>& rhs, const DirichletBC& bc) {
    if (bc.empty()) return;
    std::vector<char> constrained(matrix.n, 0);
    std::vector<double> value(matrix.n, 0.0);
    for (std::size_t k = 0; k < bc.nodes.size(); ++k) {
        constrained[bc.nodes[k]] = 1;
        value[bc.nodes[k]] = bc.values[k];
    }
    for (int i = 0; i < matrix.n; ++i) {
        for (int k = matrix.row_ptr[i]; k < matrix.row_ptr[i + 1]; ++k) {
            const int j = matrix.col[k];
            if (constrained[i]) {
                matrix.val[k] = (i == j) ? 1.0 : 0.0;
            } else if (constrained[j]) {
                rhs[i] -= matrix.val[k] * value[j];
                matrix.val[k] = 0.0;
            }
        }
    }
    for (std::size_t k = 0; k < bc.nodes.size(); ++k) rhs[bc.nodes[k]] = bc.values[k];
}

CgResult solve_cg(const SparseMatrix& matrix, const std::vector<double>& rhs,
                  std::vector<double>& x, double rel_tol, int max_iter) {
    const int n = matrix.n;
    if (max_iter < 0) max_iter = 20 * n;
    if (static_cast<int>(x.size()) != n) x.assign(n, 0.0);

    std::vector<double> inv_diag(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int k = matrix.row_ptr[i]; k < matrix.row_ptr[i + 1]; ++k)
            if (matrix.col[k] == i) inv_diag[i] = matrix.val[k];
        if (!(inv_diag[i] > 0.0))
            throw SingularSystemError("system matrix has a nonpositive diagonal entry at row " +
                                      std::to_string(i));
        inv_diag[i] = 1.0 / inv_diag[i];
    }

    std::vector<double> r(n), z(n), p(n), Ap(n);
    matrix.multiply(x, Ap);
    double rhs_norm = 0.0;
    for (int i = 0; i < n; ++i) {
        r[i] = rhs[i] - Ap[i];
        rhs_norm += rhs[i] * rhs[i];
    }
    rhs_norm = std::sqrt(rhs_norm);
    const double target = rel_tol * (rhs_norm > 0.0 ? rhs_norm : 1.0);

    double rz = 0.0;
    for (int i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
        p[i] = z[i];
        rz += r[i] * z[i];
    }

    double res = 0.0;
    for (int i = 0; i < n; ++i) res += r[i] * r[i];
    res = std::sqrt(res);
    if (res <= target) return {0, rhs_norm > 0.0 ? res / rhs_norm : 0.0};

    for (int it = 1; it <= max_iter; ++it) {
        matrix.multiply(p, Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (!(pAp > 0.0))
            throw SingularSystemError("conjugate gradients hit a nonpositive curvature direction");
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        res = 0.0;
        for (int i = 0; i < n; ++i) res += r[i] * r[i];
        res = std::sqrt(res);
        if (res <= target) return {it, rhs_norm > 0.0 ? res / rhs_norm : res};

        double rz_new = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NoConvergenceError("conjugate gradients did not reach the tolerance within " +
                                 std::to_string(max_iter) + " iterations",
                             rhs_norm > 0.0 ? res / rhs_norm : res);
}

double grad_norm2(const TriangleMesh& mesh, const std::vector<double>& u, Region region) {
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.region[t] != region) continue;
        const auto& tv = mesh.triangles[t];
        const Vec2 a = mesh.nodes[tv[0]], b = mesh.nodes[tv[1]], c = mesh.nodes[tv[2]];
        const double area2 = cross(b - a, c - a);
        const Vec2 grad = (u[tv[0]] * rot_ccw(c - b) + u[tv[1]] * rot_ccw(a - c) +
                           u[tv[2]] * rot_ccw(b - a)) /
                          area2;
        s += 0.5 * area2 * norm2(grad);
    }
    return s;
}

double facet_weighted_diff_norm2(const TriangleMesh& mesh,
                                 const std::vector<WeightedFacet>& facets,
                                 const std::vector<double>& u, double c) {
    double s = 0.0;
    for (const WeightedFacet& f : facets) {
        const double len = facet_length(mesh, f);
        const double da = u[f.a] - c, db = u[f.b] - c;
        for (double t : {kGaussA, kGaussB}) {
            const double w = (1.0 - t) * f.wa + t * f.wb;
            const double d = (1.0 - t) * da + t * db;
            s += 0.5 * len * w * d * d;
        }
    }
    return s;
}

double facet_weighted_diff_norm2_lumped(const TriangleMesh& mesh,
                                        const std::vector<WeightedFacet>& facets,
                                        const std::vector<double>& u, double c) {
    double s = 0.0;
    for (const WeightedFacet& f : facets) {
        const double len = facet_length(mesh, f);
        const double da = u[f.a] - c, db = u[f.b] - c;
        s += 0.5 * len * (f.wa * da * da + f.wb * db * db);
    }
    return s;
}

double volume_inner(const TriangleMesh& mesh, const std::function<double(Vec2)>& f,
                    const std::vector<double>& u, Region region) {
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.region[t] != region) continue;
        const auto& tv = mesh.triangles[t];
        const Vec2 p[3] = {mesh.nodes[tv[0]], mesh.nodes[tv[1]], mesh.nodes[tv[2]]};
        const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
        for (int i = 0; i < 3; ++i) {
            const Vec2 m = 0.5 * (p[(i + 1) % 3] + p[(i + 2) % 3]);
            const double um = 0.5 * (u[tv[(i + 1) % 3]] + u[tv[(i + 2) % 3]]);
            s += area / 3.0 * f(m) * um;
        }
    }
    return s;
}

double boundary_inner(const TriangleMesh& mesh, const std::function<double(Vec2)>& g,
                      const std::vector<double>& u, FacetLabel label) {
    double s = 0.0;
    for (const auto& f : mesh.boundary_facets) {
        if (f.label != label) continue;
        const Vec2 pa = mesh.nodes[f.a], pb = mesh.nodes[f.b];
        const double len = dist(pa, pb);
        for (double t : {kGaussA, kGaussB}) {
            const double gv = g(pa + t * (pb - pa));
            s += 0.5 * len * gv * ((1.0 - t) * u[f.a] + t * u[f.b]);
        }
    }
    return s;
}

double norm_equivalence_constant(const SparseMatrix& A, const TriangleMesh& mesh,
                                 int iterations) {
    // Lumped L2 mass: node weight = one third of the adjacent triangle areas.
    std::vector<double> mass(A.n, 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double third = mesh.triangle_area(t) / 3.0;
        for (int i = 0; i < 3; ++i) mass[mesh.triangles[t][i]] += third;
    }

    std::vector<double> x(A.n, 1.0), y;
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> mx(A.n);
        for (int i = 0; i < A.n; ++i) mx[i] = mass[i] * x[i];
        y.assign(A.n, 0.0);
        solve_cg(A, mx, y, 1e-10);
        const double xax = A.inner(y, y);
        double xmx = 0.0;
        for (int i = 0; i < A.n; ++i) xmx += mass[i] * y[i] * y[i];
        if (!(xax > 0.0)) break;
        lambda = xmx / xax;
        const double scale = 1.0 / std::sqrt(xmx);
        for (int i = 0; i < A.n; ++i) x[i] = y[i] * scale;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace insulopt

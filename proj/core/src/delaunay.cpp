#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>

#include "insulopt/errors.hpp"

namespace insulopt::detail {

namespace {

constexpr int kNoNeighbor = -1;
constexpr int kMaxInsertions = 400000;

// --- predicates (long double with scale-aware slack) -------------------------

double orient(Vec2 a, Vec2 b, Vec2 c) {
    const long double v = (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
                          (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
    return static_cast<double>(v);
}

double orient_slack(Vec2 a, Vec2 b, Vec2 c) {
    const double m = std::max({std::fabs(a.x), std::fabs(a.y), std::fabs(b.x), std::fabs(b.y),
                               std::fabs(c.x), std::fabs(c.y), 1e-30});
    return 1e-15 * m * m;
}

// Positive when d lies strictly inside the circumcircle of CCW triangle abc.
double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const long double adx = a.x - static_cast<long double>(d.x);
    const long double ady = a.y - static_cast<long double>(d.y);
    const long double bdx = b.x - static_cast<long double>(d.x);
    const long double bdy = b.y - static_cast<long double>(d.y);
    const long double cdx = c.x - static_cast<long double>(d.x);
    const long double cdy = c.y - static_cast<long double>(d.y);
    const long double ad = adx * adx + ady * ady;
    const long double bd = bdx * bdx + bdy * bdy;
    const long double cd = cdx * cdx + cdy * cdy;
    const long double det = adx * (bdy * cd - cdy * bd) - ady * (bdx * cd - cdx * bd) +
                            ad * (bdx * cdy - cdx * bdy);
    return static_cast<double>(det);
}

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

struct Engine {
    const PolygonalDomain& domain;
    double h_target;
    double min_angle_deg;

    std::vector<Vec2> pts;
    struct Tri {
        int v[3];
        int nbr[3];
        bool alive = true;
    };
    std::vector<Tri> tris;
    int last_alive = 0;
    int insertions = 0;

    struct Sub {
        int a, b;
        int segment;
        bool alive = true;
    };
    std::vector<Sub> subs;
    std::unordered_set<std::uint64_t> constrained;

    std::vector<int> touched;   // triangle slots created/modified by last insert

    Engine(const PolygonalDomain& dom, double h, double angle)
        : domain(dom), h_target(h), min_angle_deg(angle) {}

    // ---- basic triangle helpers ---------------------------------------------

    int index_of_vertex(const Tri& t, int v) const {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == v) return i;
        throw MeshFailureError("internal triangulation inconsistency (vertex not in triangle)");
    }

    int index_of_neighbor(const Tri& t, int n) const {
        for (int i = 0; i < 3; ++i)
            if (t.nbr[i] == n) return i;
        throw MeshFailureError("internal triangulation inconsistency (neighbor link broken)");
    }

    bool has_super_vertex(const Tri& t) const { return t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3; }

    Vec2 centroid(const Tri& t) const {
        return (pts[t.v[0]] + pts[t.v[1]] + pts[t.v[2]]) / 3.0;
    }

    // ---- super triangle ------------------------------------------------------

    void init_super_triangle() {
        Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
        Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
        for (const Vec2& v : domain.vertices) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
        }
        const Vec2 c = 0.5 * (lo + hi);
        const double r = 20.0 * std::max({hi.x - lo.x, hi.y - lo.y, h_target, 1e-12});
        pts.push_back({c.x - 2.0 * r, c.y - r});
        pts.push_back({c.x + 2.0 * r, c.y - r});
        pts.push_back({c.x, c.y + 2.0 * r});
        tris.push_back({{0, 1, 2}, {kNoNeighbor, kNoNeighbor, kNoNeighbor}, true});
    }

    // ---- point location ------------------------------------------------------

    // Returns the containing triangle; *edge = index of the edge the point
    // lies on (opposite vertex index), or -1 when strictly inside.
    int locate(Vec2 p, int* edge) {
        int t = last_alive;
        if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) {
            t = -1;
            for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
                if (tris[i].alive) {
                    t = i;
                    break;
                }
            if (t < 0) throw MeshFailureError("triangulation is empty");
        }
        const int cap = static_cast<int>(tris.size()) * 4 + 64;
        for (int step = 0; step < cap; ++step) {
            const Tri& tr = tris[t];
            double o[3];
            double slack = 0.0;
            for (int i = 0; i < 3; ++i) {
                const Vec2 a = pts[tr.v[(i + 1) % 3]];
                const Vec2 b = pts[tr.v[(i + 2) % 3]];
                o[i] = orient(a, b, p);
                slack = std::max(slack, orient_slack(a, b, p));
            }
            int worst = -1;
            for (int i = 0; i < 3; ++i)
                if (o[i] < -slack && (worst < 0 || o[i] < o[worst])) worst = i;
            if (worst >= 0) {
                const int next = tr.nbr[worst];
                if (next == kNoNeighbor)
                    throw MeshFailureError("point location walked out of the triangulation");
                t = next;
                continue;
            }
            // Inside (or on an edge): report the flattest edge if within slack.
            *edge = -1;
            for (int i = 0; i < 3; ++i)
                if (std::fabs(o[i]) <= slack && (*edge < 0 || std::fabs(o[i]) < std::fabs(o[*edge])))
                    *edge = i;
            return t;
        }
        // Deterministic fallback: brute-force scan.
        for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
            if (!tris[i].alive) continue;
            const Tri& tr = tris[i];
            double o[3];
            double slack = 0.0;
            for (int k = 0; k < 3; ++k) {
                const Vec2 a = pts[tr.v[(k + 1) % 3]];
                const Vec2 b = pts[tr.v[(k + 2) % 3]];
                o[k] = orient(a, b, p);
                slack = std::max(slack, orient_slack(a, b, p));
            }
            if (o[0] >= -slack && o[1] >= -slack && o[2] >= -slack) {
                *edge = -1;
                for (int k = 0; k < 3; ++k)
                    if (std::fabs(o[k]) <= slack && (*edge < 0 || std::fabs(o[k]) < std::fabs(o[*edge])))
                        *edge = k;
                return i;
            }
        }
        throw MeshFailureError("point location failed");
    }

    // ---- Lawson legalization -------------------------------------------------

    bool edge_constrained(int a, int b) const { return constrained.count(edge_key(a, b)) > 0; }

    void legalize(int t0, int i0) {
        std::vector<std::pair<int, int>> stack{{t0, i0}};
        int flips = 0;
        const int flip_cap = static_cast<int>(tris.size()) * 8 + 1024;
        while (!stack.empty()) {
            auto [t, i] = stack.back();
            stack.pop_back();
            if (!tris[t].alive) continue;
            Tri& tr = tris[t];
            const int o = tr.nbr[i];
            if (o == kNoNeighbor) continue;
            const int a = tr.v[i];
            const int b = tr.v[(i + 1) % 3];
            const int c = tr.v[(i + 2) % 3];
            if (edge_constrained(b, c)) continue;

            Tri& ot = tris[o];
            const int j = [&] {
                for (int k = 0; k < 3; ++k)
                    if (ot.v[k] != b && ot.v[k] != c) return k;
                throw MeshFailureError("internal triangulation inconsistency (degenerate neighbor)");
            }();
            const int q = ot.v[j];

            const double ic = incircle(pts[a], pts[b], pts[c], pts[q]);
            const double m = std::max({std::fabs(pts[a].x), std::fabs(pts[a].y), std::fabs(pts[q].x),
                                       std::fabs(pts[q].y), 1.0});
            if (ic <= 1e-14 * m * m * m * m) continue;
            // Flip only across a strictly convex quad.
            if (orient(pts[a], pts[b], pts[q]) <= orient_slack(pts[a], pts[b], pts[q])) continue;
            if (orient(pts[a], pts[q], pts[c]) <= orient_slack(pts[a], pts[q], pts[c])) continue;
            if (++flips > flip_cap) throw MeshFailureError("edge flipping failed to terminate");

            // tr = (a, b, c), ot = (q, c, b).  Rewrite in place:
            //   slot t -> (a, b, q),  slot o -> (a, q, c).
            const int n_bq = ot.nbr[index_of_vertex(ot, c)];
            const int n_qc = ot.nbr[index_of_vertex(ot, b)];
            const int n_ca = tr.nbr[(i + 1) % 3];
            const int n_ab = tr.nbr[(i + 2) % 3];

            tr.v[0] = a; tr.v[1] = b; tr.v[2] = q;
            tr.nbr[0] = n_bq; tr.nbr[1] = o; tr.nbr[2] = n_ab;
            ot.v[0] = a; ot.v[1] = q; ot.v[2] = c;
            ot.nbr[0] = n_qc; ot.nbr[1] = n_ca; ot.nbr[2] = t;

            if (n_bq != kNoNeighbor) tris[n_bq].nbr[index_of_neighbor(tris[n_bq], o)] = t;
            if (n_ca != kNoNeighbor) tris[n_ca].nbr[index_of_neighbor(tris[n_ca], t)] = o;

            touched.push_back(t);
            touched.push_back(o);
            stack.push_back({t, 0});   // edge (b, q)
            stack.push_back({o, 0});   // edge (q, c)
        }
    }

    // ---- insertion -----------------------------------------------------------

    // Inserts p; returns its vertex id, or -1 when p coincides with an
    // existing vertex of the containing triangle.
    int insert_point(Vec2 p) {
        if (++insertions > kMaxInsertions)
            throw MeshFailureError("refinement exceeded the insertion budget; quality target "
                                   "unreachable for this input");
        touched.clear();
        int edge = -1;
        const int t = locate(p, &edge);
        const Tri tr = tris[t];

        for (int i = 0; i < 3; ++i) {
            const Vec2 v = pts[tr.v[i]];
            const double m = std::max({std::fabs(v.x), std::fabs(v.y), 1.0});
            if (dist(v, p) <= 1e-14 * m) return -1;
        }

        const int pid = static_cast<int>(pts.size());
        pts.push_back(p);

        if (edge >= 0 && tr.nbr[edge] != kNoNeighbor) {
            split_edge(t, edge, pid);
        } else {
            split_triangle(t, pid);
        }
        last_alive = t;
        return pid;
    }

    void split_triangle(int t, int pid) {
        const Tri tr = tris[t];
        const int a = tr.v[0], b = tr.v[1], c = tr.v[2];
        const int A = tr.nbr[0], B = tr.nbr[1], C = tr.nbr[2];
        const int t1 = static_cast<int>(tris.size());
        const int t2 = t1 + 1;
        // slot t -> (p, b, c); t1 -> (p, c, a); t2 -> (p, a, b)
        tris[t] = {{pid, b, c}, {A, t1, t2}, true};
        tris.push_back({{pid, c, a}, {B, t2, t}, true});
        tris.push_back({{pid, a, b}, {C, t, t1}, true});
        if (B != kNoNeighbor) tris[B].nbr[index_of_neighbor(tris[B], t)] = t1;
        if (C != kNoNeighbor) tris[C].nbr[index_of_neighbor(tris[C], t)] = t2;
        touched.push_back(t);
        touched.push_back(t1);
        touched.push_back(t2);
        legalize(t, 0);
        legalize(t1, 0);
        legalize(t2, 0);
    }

    void split_edge(int t, int i, int pid) {
        const Tri tr = tris[t];
        const int a = tr.v[i];
        const int b = tr.v[(i + 1) % 3];
        const int c = tr.v[(i + 2) % 3];
        const int o = tr.nbr[i];
        const Tri ot = tris[o];
        const int j = [&] {
            for (int k = 0; k < 3; ++k)
                if (ot.v[k] != b && ot.v[k] != c) return k;
            throw MeshFailureError("internal triangulation inconsistency (degenerate neighbor)");
        }();
        const int q = ot.v[j];

        const int n_ca = tr.nbr[(i + 1) % 3];
        const int n_ab = tr.nbr[(i + 2) % 3];
        const int n_bq = ot.nbr[index_of_vertex(ot, c)];
        const int n_qc = ot.nbr[index_of_vertex(ot, b)];

        const int t2 = static_cast<int>(tris.size());
        const int o2 = t2 + 1;
        // slot t -> (a, b, p); t2 -> (a, p, c); slot o -> (q, c, p); o2 -> (q, p, b)
        tris[t] = {{a, b, pid}, {o2, t2, n_ab}, true};
        tris.push_back({{a, pid, c}, {o, n_ca, t}, true});
        tris[o] = {{q, c, pid}, {t2, o2, n_qc}, true};
        tris.push_back({{q, pid, b}, {t, n_bq, o}, true});

        if (n_ca != kNoNeighbor) tris[n_ca].nbr[index_of_neighbor(tris[n_ca], t)] = t2;
        if (n_bq != kNoNeighbor) tris[n_bq].nbr[index_of_neighbor(tris[n_bq], o)] = o2;

        touched.push_back(t);
        touched.push_back(t2);
        touched.push_back(o);
        touched.push_back(o2);
        legalize(t, index_of_vertex(tris[t], pid));
        legalize(t2, index_of_vertex(tris[t2], pid));
        legalize(o, index_of_vertex(tris[o], pid));
        legalize(o2, index_of_vertex(tris[o2], pid));
    }

    // ---- constraints -----------------------------------------------------------

    std::unordered_set<std::uint64_t> edge_set() const {
        std::unordered_set<std::uint64_t> edges;
        for (const Tri& t : tris) {
            if (!t.alive) continue;
            edges.insert(edge_key(t.v[0], t.v[1]));
            edges.insert(edge_key(t.v[1], t.v[2]));
            edges.insert(edge_key(t.v[2], t.v[0]));
        }
        return edges;
    }

    // Splits subsegment s at its midpoint; returns the new vertex id.
    int split_subsegment(int s) {
        Sub& sub = subs[s];
        sub.alive = false;
        constrained.erase(edge_key(sub.a, sub.b));
        const Vec2 mid = 0.5 * (pts[sub.a] + pts[sub.b]);
        const int saved_a = sub.a, saved_b = sub.b, seg = sub.segment;
        // Record the halves before inserting so legalization sees them as
        // constrained the moment they appear.
        const int pid = static_cast<int>(pts.size());
        constrained.insert(edge_key(saved_a, pid));
        constrained.insert(edge_key(pid, saved_b));
        subs.push_back({saved_a, pid, seg, true});
        subs.push_back({pid, saved_b, seg, true});
        const int got = insert_point(mid);
        if (got != pid)
            throw MeshFailureError("boundary subdivision produced a duplicate vertex");
        return pid;
    }

    bool encroached_by(const Sub& sub, Vec2 p) const {
        const Vec2 a = pts[sub.a];
        const Vec2 b = pts[sub.b];
        const Vec2 mid = 0.5 * (a + b);
        const double r2 = 0.25 * norm2(b - a);
        return norm2(p - mid) < r2 * (1.0 - 1e-12);
    }

    bool encroached_by_any_vertex(const Sub& sub) const {
        for (int v = 3; v < static_cast<int>(pts.size()); ++v) {
            if (v == sub.a || v == sub.b) continue;
            if (encroached_by(sub, pts[v])) return true;
        }
        return false;
    }

    void enforce_edges() {
        for (int pass = 0; pass < 64; ++pass) {
            const auto edges = edge_set();
            bool missing = false;
            const int count = static_cast<int>(subs.size());
            for (int s = 0; s < count; ++s) {
                if (!subs[s].alive) continue;
                if (edges.count(edge_key(subs[s].a, subs[s].b))) continue;
                split_subsegment(s);
                missing = true;
            }
            if (!missing) return;
        }
        throw MeshFailureError("could not recover the boundary as mesh edges");
    }

    // ---- refinement -------------------------------------------------------------

    struct Quality {
        double min_angle_deg;
        double circumradius;
    };

    Quality quality(const Tri& t) const {
        const Vec2 a = pts[t.v[0]], b = pts[t.v[1]], c = pts[t.v[2]];
        const double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
        const double area2 = std::fabs(orient(a, b, c));
        const double R = (la * lb * lc) / (2.0 * std::max(area2, 1e-300));
        auto angle = [](Vec2 u, Vec2 v) {
            return std::atan2(std::fabs(cross(u, v)), dot(u, v)) * 180.0 / M_PI;
        };
        const double aa = angle(b - a, c - a);
        const double ab = angle(c - b, a - b);
        const double ac = 180.0 - aa - ab;
        return {std::min({aa, ab, ac}), R};
    }

    bool is_bad(const Tri& t) const {
        const Quality q = quality(t);
        return q.min_angle_deg < min_angle_deg - 1e-9 || q.circumradius > 0.75 * h_target;
    }

    Vec2 circumcenter(const Tri& t) const {
        const Vec2 a = pts[t.v[0]];
        const Vec2 b = pts[t.v[1]] - a;
        const Vec2 c = pts[t.v[2]] - a;
        const double d = 2.0 * cross(b, c);
        const Vec2 u{(c.y * norm2(b) - b.y * norm2(c)) / d, (b.x * norm2(c) - c.x * norm2(b)) / d};
        return a + u;
    }

    void refine() {
        std::vector<int> segq;
        for (int s = 0; s < static_cast<int>(subs.size()); ++s)
            if (subs[s].alive && encroached_by_any_vertex(subs[s])) segq.push_back(s);

        std::vector<int> triq;
        for (int t = 0; t < static_cast<int>(tris.size()); ++t)
            if (tris[t].alive) triq.push_back(t);

        auto push_touched = [&] {
            for (int t : touched)
                if (tris[t].alive) triq.push_back(t);
        };
        auto queue_halves = [&](int pid) {
            for (int s = 0; s < static_cast<int>(subs.size()); ++s)
                if (subs[s].alive && (subs[s].a == pid || subs[s].b == pid) &&
                    encroached_by_any_vertex(subs[s]))
                    segq.push_back(s);
        };

        while (!segq.empty() || !triq.empty()) {
            if (!segq.empty()) {
                const int s = segq.back();
                segq.pop_back();
                if (!subs[s].alive || !encroached_by_any_vertex(subs[s])) continue;
                const int pid = split_subsegment(s);
                push_touched();
                queue_halves(pid);
                continue;
            }

            const int t = triq.back();
            triq.pop_back();
            if (!tris[t].alive || has_super_vertex(tris[t])) continue;
            if (!domain.contains(centroid(tris[t]))) continue;
            if (!is_bad(tris[t])) continue;

            const Vec2 cc = circumcenter(tris[t]);
            bool handled = false;
            if (std::isfinite(cc.x) && std::isfinite(cc.y)) {
                // Ruppert: never insert a circumcenter that encroaches a
                // boundary subsegment; split those segments instead.
                bool encroaches = false;
                for (int s = 0; s < static_cast<int>(subs.size()); ++s) {
                    if (subs[s].alive && encroached_by(subs[s], cc)) {
                        const int pid = split_subsegment(s);
                        push_touched();
                        queue_halves(pid);
                        encroaches = true;
                    }
                }
                if (encroaches) {
                    if (tris[t].alive) triq.push_back(t);
                    handled = true;
                } else {
                    const int pid = insert_point(cc);
                    if (pid >= 0) {
                        push_touched();
                        handled = true;
                    }
                }
            }
            if (!handled) {
                // Degenerate circumcenter: fall back to splitting the longest
                // edge at its midpoint.
                const Tri& tr = tris[t];
                int best = 0;
                double bl = -1.0;
                for (int i = 0; i < 3; ++i) {
                    const double l = dist(pts[tr.v[(i + 1) % 3]], pts[tr.v[(i + 2) % 3]]);
                    if (l > bl) {
                        bl = l;
                        best = i;
                    }
                }
                const Vec2 mid =
                    0.5 * (pts[tr.v[(best + 1) % 3]] + pts[tr.v[(best + 2) % 3]]);
                if (insert_point(mid) >= 0) push_touched();
            }
        }
    }

    // ---- final assembly ----------------------------------------------------------

    RefinedTriangulation finish() {
        RefinedTriangulation out;
        std::vector<int> renumber(pts.size(), -1);

        std::vector<int> kept;
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
            if (!tris[t].alive || has_super_vertex(tris[t])) continue;
            if (!domain.contains(centroid(tris[t]))) continue;
            kept.push_back(t);
        }

        for (int t : kept)
            for (int i = 0; i < 3; ++i) renumber[tris[t].v[i]] = 0;
        for (const Sub& s : subs)
            if (s.alive && (renumber[s.a] < 0 || renumber[s.b] < 0))
                throw MeshFailureError("boundary subsegment lost from the triangulation");
        int next = 0;
        for (int v = 0; v < static_cast<int>(pts.size()); ++v)
            if (renumber[v] == 0) {
                renumber[v] = next++;
                out.points.push_back(pts[v]);
            }

        for (int t : kept) {
            std::array<int, 3> tv{renumber[tris[t].v[0]], renumber[tris[t].v[1]],
                                  renumber[tris[t].v[2]]};
            if (orient(out.points[tv[0]], out.points[tv[1]], out.points[tv[2]]) <= 0.0)
                std::swap(tv[1], tv[2]);
            out.triangles.push_back(tv);
        }

        // Quality post-check on the kept triangles.
        for (const auto& t : out.triangles) {
            const Vec2 a = out.points[t[0]], b = out.points[t[1]], c = out.points[t[2]];
            auto angle = [](Vec2 u, Vec2 v) {
                return std::atan2(std::fabs(cross(u, v)), dot(u, v)) * 180.0 / M_PI;
            };
            const double amin =
                std::min({angle(b - a, c - a), angle(c - b, a - b), angle(a - c, b - c)});
            if (amin < min_angle_deg - 1e-6)
                throw MeshFailureError("refinement finished with a minimum angle of " +
                                       std::to_string(amin) + " degrees");
            const double emax = std::max({dist(a, b), dist(b, c), dist(c, a)});
            if (emax > 1.5 * h_target * (1.0 + 1e-9))
                throw MeshFailureError("refinement finished with an edge of length " +
                                       std::to_string(emax));
        }

        // Boundary subsegments ordered along each polygon segment.
        for (int seg = 0; seg < static_cast<int>(domain.segments.size()); ++seg) {
            const Vec2 origin = domain.segment_start(seg);
            const Vec2 dir = domain.segment_tangent(seg);
            std::vector<std::pair<double, RefinedTriangulation::SubSegment>> row;
            for (const Sub& s : subs) {
                if (!s.alive || s.segment != seg) continue;
                int a = s.a, b = s.b;
                if (dot(pts[b] - pts[a], dir) < 0.0) std::swap(a, b);
                const double param = dot(0.5 * (pts[a] + pts[b]) - origin, dir);
                row.push_back({param, {renumber[a], renumber[b], seg}});
            }
            std::sort(row.begin(), row.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            for (auto& [param, ss] : row) out.boundary.push_back(ss);
        }
        return out;
    }

    RefinedTriangulation run() {
        init_super_triangle();

        // Polygon vertices.
        std::vector<int> vid(domain.vertices.size());
        for (std::size_t v = 0; v < domain.vertices.size(); ++v) {
            vid[v] = insert_point(domain.vertices[v]);
            if (vid[v] < 0) throw MeshFailureError("duplicate polygon vertices");
        }

        // Pre-split each boundary segment to the target spacing and register
        // the pieces as constrained subsegments.
        for (int seg = 0; seg < static_cast<int>(domain.segments.size()); ++seg) {
            const Vec2 a = domain.segment_start(seg);
            const Vec2 b = domain.segment_end(seg);
            const int n = std::max(1, static_cast<int>(std::ceil(dist(a, b) / h_target)));
            int prev = vid[domain.segments[seg].a];
            for (int i = 1; i <= n; ++i) {
                int cur;
                if (i == n) {
                    cur = vid[domain.segments[seg].b];
                } else {
                    const double t = static_cast<double>(i) / n;
                    cur = insert_point((1.0 - t) * a + t * b);
                    if (cur < 0) throw MeshFailureError("boundary pre-split hit an existing vertex");
                }
                subs.push_back({prev, cur, seg, true});
                constrained.insert(edge_key(prev, cur));
                prev = cur;
            }
        }

        enforce_edges();
        refine();
        return finish();
    }
};

}  // namespace

RefinedTriangulation refine_polygon(const PolygonalDomain& domain, double h_target,
                                    double min_angle_deg) {
    if (h_target <= 0.0) throw ConfigError("mesh size h_target must be positive");
    Engine engine(domain, h_target, min_angle_deg);
    return engine.run();
}

}  // namespace insulopt::detail

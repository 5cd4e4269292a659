// Exact solver for the monotone-smoothing linear program
//
//   min sum_k |q_k|   s.t.   q_k - q_j <= d(k, j) := y[j] - y[k] + lip * cone(k, j)
//
// for all ordered anchor pairs.  The y terms telescope around any cycle, so
// cycle sums of d are >= 0 and the program is feasible for every lip >= 0.
//
// The LP dual is a min-cost circulation on a graph with one node per anchor
// plus a root: an infinite-capacity arc k -> j of cost d(k, j) per
// constraint, and unit-capacity zero-cost arcs root -> k and k -> root whose
// flows encode the subdifferential of |q_k|.  Optimal node potentials of the
// circulation are an optimal q.  Successive shortest paths with Dijkstra
// stay valid from the start because the initial potentials pi_k = -y_k,
// pi_root = -median(y) give every pair arc the non-negative reduced cost
// lip * cone(k, j).
//
// Pair arcs are never materialized: reduced costs are computed on the fly
// from one row of the cone matrix, so a Dijkstra run is O(K^2) with dense
// row scans.  At most one unit of imbalance exists per node, so the number
// of augmentations is bounded by K and the whole solve is exact up to
// floating-point rounding.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cellload/errors.hpp"
#include "cellload/learner.hpp"

namespace cellload::detail {

namespace {

enum class Arc : std::uint8_t {
    none,
    pair_fwd,  // u -> v on constraint arc (u, v): f[u][v] += 1
    pair_bwd,  // u -> v reversing constraint arc (v, u): f[v][u] -= 1
    g_fwd,     // root -> v: g[v] = 1
    g_bwd,     // u -> root undoing root -> u: g[u] = 0
    h_fwd,     // u -> root: h[u] = 1
    h_bwd,     // root -> v undoing v -> root: h[v] = 0
};

double midpoint_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return (k % 2 == 1) ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

std::vector<double> smooth_values_lp(const std::vector<double>& y, double lip,
                                     const Matrix& cone) {
    const std::size_t count = y.size();
    if (cone.rows != count || cone.cols != count) {
        throw std::invalid_argument("smooth_values_lp: cone matrix shape mismatch");
    }
    if (!(lip >= 0.0)) {
        throw std::invalid_argument("smooth_values_lp: Lipschitz constant must be >= 0");
    }
    if (count == 0) return {};

    // q = 0 is optimal iff no constraint is violated by the raw values.
    bool compatible = true;
    for (std::size_t k = 0; k < count && compatible; ++k) {
        const double* crow = cone.row(k);
        for (std::size_t j = 0; j < count; ++j) {
            if (j != k && y[j] - y[k] + lip * crow[j] < 0.0) {
                compatible = false;
                break;
            }
        }
    }
    if (compatible) return std::vector<double>(count, 0.0);

    const std::size_t root = count;
    const std::size_t nodes = count + 1;
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> pi(nodes);
    for (std::size_t k = 0; k < count; ++k) pi[k] = -y[k];
    pi[root] = -midpoint_median(y);

    std::vector<double> flow(count * count, 0.0);
    std::vector<std::vector<std::uint32_t>> in_arcs(count);  // k with flow[k][u] > 0
    std::vector<std::uint8_t> g(count, 0);                   // root -> k, capacity 1
    std::vector<std::uint8_t> h(count, 0);                   // k -> root, capacity 1
    std::vector<int> excess(nodes, 0);

    for (std::size_t k = 0; k < count; ++k) {
        const double rc_in = pi[k] - pi[root];  // reduced cost of root -> k
        if (rc_in < 0.0) {
            g[k] = 1;
            excess[k] += 1;
            excess[root] -= 1;
        } else if (-rc_in < 0.0) {
            h[k] = 1;
            excess[k] -= 1;
            excess[root] += 1;
        }
    }
    long total_excess = 0;
    for (std::size_t v = 0; v < nodes; ++v) {
        if (excess[v] > 0) total_excess += excess[v];
    }

    std::vector<double> dist(nodes);
    std::vector<double> z(count);  // y + pi, constant during one Dijkstra run
    std::vector<std::uint8_t> done(nodes);
    std::vector<std::int32_t> parent(nodes);
    std::vector<Arc> parent_arc(nodes);

    while (total_excess > 0) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(done.begin(), done.end(), 0);
        std::fill(parent_arc.begin(), parent_arc.end(), Arc::none);
        for (std::size_t v = 0; v < nodes; ++v) {
            if (excess[v] > 0) dist[v] = 0.0;
        }
        for (std::size_t k = 0; k < count; ++k) z[k] = y[k] + pi[k];
        const double z_root = pi[root];

        std::int32_t target = -1;
        while (true) {
            std::int32_t u = -1;
            double best = kInf;
            for (std::size_t v = 0; v < nodes; ++v) {
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = static_cast<std::int32_t>(v);
                }
            }
            if (u < 0) break;
            done[u] = 1;
            if (excess[u] < 0) {
                target = u;
                break;
            }
            const double du = dist[u];

            if (static_cast<std::size_t>(u) < count) {
                const std::size_t uu = static_cast<std::size_t>(u);
                const double zu = z[uu];
                const double* crow = cone.row(uu);
                for (std::size_t j = 0; j < count; ++j) {
                    if (done[j]) continue;
                    double rc = z[j] - zu + lip * crow[j];
                    if (rc < 0.0) rc = 0.0;
                    const double nd = du + rc;
                    if (nd < dist[j]) {
                        dist[j] = nd;
                        parent[j] = u;
                        parent_arc[j] = Arc::pair_fwd;
                    }
                }
                auto& incoming = in_arcs[uu];
                std::size_t alive = 0;
                for (const std::uint32_t k : incoming) {
                    if (flow[k * count + uu] <= 0.0) continue;  // stale entry
                    incoming[alive++] = k;
                    if (done[k]) continue;
                    double rc = z[k] - zu - lip * cone(k, uu);  // -cost of arc (k, u)
                    if (rc < 0.0) rc = 0.0;
                    const double nd = du + rc;
                    if (nd < dist[k]) {
                        dist[k] = nd;
                        parent[k] = u;
                        parent_arc[k] = Arc::pair_bwd;
                    }
                }
                incoming.resize(alive);
                if (!done[root] && (g[uu] > 0 || h[uu] < 1)) {
                    double rc = z_root - pi[uu];
                    if (rc < 0.0) rc = 0.0;
                    const double nd = du + rc;
                    if (nd < dist[root]) {
                        dist[root] = nd;
                        parent[root] = u;
                        parent_arc[root] = (g[uu] > 0) ? Arc::g_bwd : Arc::h_fwd;
                    }
                }
            } else {
                for (std::size_t k = 0; k < count; ++k) {
                    if (done[k] || (h[k] == 0 && g[k] == 1)) continue;
                    double rc = pi[k] - z_root;
                    if (rc < 0.0) rc = 0.0;
                    const double nd = du + rc;
                    if (nd < dist[k]) {
                        dist[k] = nd;
                        parent[k] = u;
                        parent_arc[k] = (h[k] > 0) ? Arc::h_bwd : Arc::g_fwd;
                    }
                }
            }
        }

        if (target < 0) {
            throw SolverError("smoothing LP: residual graph lost its augmenting path");
        }

        // Push one unit along the parent chain, then lift the potentials.
        std::int32_t v = target;
        while (parent_arc[v] != Arc::none) {
            const std::int32_t u = parent[v];
            const std::size_t su = static_cast<std::size_t>(u);
            const std::size_t sv = static_cast<std::size_t>(v);
            switch (parent_arc[v]) {
                case Arc::pair_fwd: {
                    double& fv = flow[su * count + sv];
                    if (fv == 0.0) in_arcs[sv].push_back(static_cast<std::uint32_t>(su));
                    fv += 1.0;
                    break;
                }
                case Arc::pair_bwd:
                    flow[sv * count + su] -= 1.0;
                    break;
                case Arc::g_fwd:
                    g[sv] = 1;
                    break;
                case Arc::g_bwd:
                    g[su] = 0;
                    break;
                case Arc::h_fwd:
                    h[su] = 1;
                    break;
                case Arc::h_bwd:
                    h[sv] = 0;
                    break;
                case Arc::none:
                    break;
            }
            v = u;
        }
        excess[v] -= 1;
        excess[target] += 1;
        total_excess -= 1;

        const double dt = dist[target];
        for (std::size_t w = 0; w < nodes; ++w) {
            pi[w] -= std::min(dist[w], dt);
        }
    }

    std::vector<double> q(count);
    for (std::size_t k = 0; k < count; ++k) q[k] = pi[k] - pi[root];

    // The constraints are invariant under a common shift of q, so the tied
    // direction is centered: shift to the midpoint of the median interval of
    // the adjustments, which keeps the objective at its optimum.
    std::vector<double> neg(count);
    for (std::size_t k = 0; k < count; ++k) neg[k] = -q[k];
    const double shift = midpoint_median(std::move(neg));
    for (double& qk : q) qk += shift;
    return q;
}

}  // namespace cellload::detail

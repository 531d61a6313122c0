#include "pabisim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace pabisim {

namespace {

constexpr double kPivotEps = 1e-12;

struct Tableau {
    std::size_t m, n;
    std::vector<double> cost;    // m*n
    std::vector<double> alloc;   // m*n
    std::vector<char> basic;     // m*n
    std::vector<double> u, v;    // potentials

    double& at(std::vector<double>& t, std::size_t i, std::size_t j) { return t[i * n + j]; }
    double cat(std::size_t i, std::size_t j) const { return cost[i * n + j]; }

    // Solve u_i + v_j = cost(i,j) over the basic spanning tree, u_0 = 0.
    void compute_potentials() {
        u.assign(m, 0.0);
        v.assign(n, 0.0);
        std::vector<char> udone(m, 0), vdone(n, 0);
        udone[0] = 1;
        std::deque<std::pair<char, std::size_t>> queue{{'r', 0}};
        while (!queue.empty()) {
            auto [kind, idx] = queue.front();
            queue.pop_front();
            if (kind == 'r') {
                for (std::size_t j = 0; j < n; ++j) {
                    if (basic[idx * n + j] && !vdone[j]) {
                        v[j] = cat(idx, j) - u[idx];
                        vdone[j] = 1;
                        queue.push_back({'c', j});
                    }
                }
            } else {
                for (std::size_t i = 0; i < m; ++i) {
                    if (basic[i * n + idx] && !udone[i]) {
                        u[i] = cat(i, idx) - v[idx];
                        udone[i] = 1;
                        queue.push_back({'r', i});
                    }
                }
            }
        }
    }

    // Alternating cycle closed by the entering cell (ei, ej): path from the
    // entering column back to the entering row through basic cells.
    std::vector<std::pair<std::size_t, std::size_t>> find_cycle(std::size_t ei, std::size_t ej) {
        // Nodes: rows [0, m), columns [m, m+n). BFS for a tree path.
        const std::size_t total = m + n;
        std::vector<std::size_t> parent(total, total);
        std::vector<char> seen(total, 0);
        std::deque<std::size_t> queue;
        std::size_t start = m + ej, goal = ei;
        seen[start] = 1;
        queue.push_back(start);
        while (!queue.empty()) {
            std::size_t node = queue.front();
            queue.pop_front();
            if (node == goal) break;
            if (node < m) {
                for (std::size_t j = 0; j < n; ++j)
                    if (basic[node * n + j] && !seen[m + j]) {
                        seen[m + j] = 1;
                        parent[m + j] = node;
                        queue.push_back(m + j);
                    }
            } else {
                std::size_t j = node - m;
                for (std::size_t i = 0; i < m; ++i)
                    if (basic[i * n + j] && !seen[i]) {
                        seen[i] = 1;
                        parent[i] = node;
                        queue.push_back(i);
                    }
            }
        }
        if (!seen[goal]) throw std::runtime_error("transport: basis graph disconnected");

        std::vector<std::pair<std::size_t, std::size_t>> cells;  // path cells, column-first
        std::size_t node = goal;
        while (node != start) {
            std::size_t par = parent[node];
            if (node < m)
                cells.emplace_back(node, par - m);
            else
                cells.emplace_back(par, node - m);
            node = par;
        }
        // cells currently run goal -> start; reverse to start(ej side) -> goal(ei side).
        std::vector<std::pair<std::size_t, std::size_t>> path(cells.rbegin(), cells.rend());
        return path;
    }
};

}  // namespace

TransportResult lift_metric(const GroundMetric& d, const Distribution& mu,
                            const Distribution& nu) {
    if (!mu.is_normalized() || !nu.is_normalized())
        throw std::invalid_argument("lift_metric: marginals must be probability distributions");
    if (mu.empty() || nu.empty())
        throw std::invalid_argument("lift_metric: empty marginal");

    std::vector<StateId> rows = mu.support(), cols = nu.support();
    Tableau t;
    t.m = rows.size();
    t.n = cols.size();
    t.cost.resize(t.m * t.n);
    for (std::size_t i = 0; i < t.m; ++i)
        for (std::size_t j = 0; j < t.n; ++j) t.cost[i * t.n + j] = d.at(rows[i], cols[j]);

    std::vector<double> supply(t.m), demand(t.n);
    for (std::size_t i = 0; i < t.m; ++i) supply[i] = mu.at(rows[i]).to_double();
    for (std::size_t j = 0; j < t.n; ++j) demand[j] = nu.at(cols[j]).to_double();

    // Northwest-corner start: exactly m+n-1 basic cells, zeros on ties.
    t.alloc.assign(t.m * t.n, 0.0);
    t.basic.assign(t.m * t.n, 0);
    {
        std::size_t i = 0, j = 0;
        std::vector<double> a = supply, b = demand;
        while (i < t.m && j < t.n) {
            double q = std::min(a[i], b[j]);
            t.alloc[i * t.n + j] = q;
            t.basic[i * t.n + j] = 1;
            a[i] -= q;
            b[j] -= q;
            if (i + 1 == t.m && j + 1 == t.n) break;
            if (a[i] <= b[j] && i + 1 < t.m)
                ++i;
            else
                ++j;
        }
    }

    const int max_pivots = 20000;
    for (int iter = 0;; ++iter) {
        if (iter > max_pivots) throw std::runtime_error("transport: pivot limit exceeded");
        t.compute_potentials();

        // Bland-style entering rule: first cell in row-major order with a
        // negative reduced cost.
        std::size_t ei = t.m, ej = t.n;
        for (std::size_t i = 0; i < t.m && ei == t.m; ++i)
            for (std::size_t j = 0; j < t.n; ++j) {
                if (t.basic[i * t.n + j]) continue;
                if (t.cat(i, j) - t.u[i] - t.v[j] < -kPivotEps) {
                    ei = i;
                    ej = j;
                    break;
                }
            }
        if (ei == t.m) break;  // optimal

        auto path = t.find_cycle(ei, ej);
        // Signs: entering cell +, then alternate starting with - on the first
        // path cell (it shares the entering column).
        double theta = -1.0;
        std::size_t leave_i = 0, leave_j = 0;
        bool have_leave = false;
        for (std::size_t k = 0; k < path.size(); k += 2) {
            double q = t.alloc[path[k].first * t.n + path[k].second];
            if (!have_leave || q < theta) {
                theta = q;
                leave_i = path[k].first;
                leave_j = path[k].second;
                have_leave = true;
            }
        }
        if (!have_leave) throw std::runtime_error("transport: degenerate cycle");

        t.alloc[ei * t.n + ej] += theta;
        for (std::size_t k = 0; k < path.size(); ++k) {
            double& q = t.alloc[path[k].first * t.n + path[k].second];
            q += (k % 2 == 0) ? -theta : theta;
        }
        t.basic[leave_i * t.n + leave_j] = 0;
        t.alloc[leave_i * t.n + leave_j] = 0.0;
        t.basic[ei * t.n + ej] = 1;
    }

    TransportResult res;
    res.coupling.row_states = rows;
    res.coupling.col_states = cols;
    res.coupling.values = t.alloc;
    res.row_potentials = t.u;
    res.col_potentials = t.v;
    double total = 0.0;
    for (std::size_t i = 0; i < t.m; ++i)
        for (std::size_t j = 0; j < t.n; ++j) total += t.alloc[i * t.n + j] * t.cat(i, j);
    res.value = total;
    return res;
}

bool check_weight_function(const WeightFunction& lambda, const Distribution& mu,
                           const Distribution& nu, double tol) {
    const std::size_t m = lambda.row_states.size(), n = lambda.col_states.size();
    if (lambda.values.size() != m * n) return false;
    for (double v : lambda.values)
        if (v < -tol) return false;

    for (std::size_t i = 0; i < m; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += lambda.at(i, j);
        if (std::fabs(sum - mu.at(lambda.row_states[i]).to_double()) > tol) return false;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += lambda.at(i, j);
        if (std::fabs(sum - nu.at(lambda.col_states[j]).to_double()) > tol) return false;
    }
    // Mass outside the table must be zero; positive-weight states missing
    // from the index sets mean the marginals cannot match.
    for (const auto& [s, w] : mu.weights())
        if (std::find(lambda.row_states.begin(), lambda.row_states.end(), s) ==
            lambda.row_states.end())
            return false;
    for (const auto& [s, w] : nu.weights())
        if (std::find(lambda.col_states.begin(), lambda.col_states.end(), s) ==
            lambda.col_states.end())
            return false;
    return true;
}

WeightFunction product_coupling(const Distribution& mu, const Distribution& nu) {
    WeightFunction w;
    w.row_states = mu.support();
    w.col_states = nu.support();
    w.values.reserve(w.row_states.size() * w.col_states.size());
    for (StateId s : w.row_states)
        for (StateId t : w.col_states)
            w.values.push_back(mu.at(s).to_double() * nu.at(t).to_double());
    return w;
}

}  // namespace pabisim

#pragma once

#include <vector>

#include "pabisim/distribution.hpp"

namespace pabisim {

/// Symmetric state-to-state distance table with zero diagonal, values in
/// [0,1]. Ground metric for the Kantorovich lifting.
struct GroundMetric {
    int size = 0;
    std::vector<double> entries;  // row-major size*size

    static GroundMetric zero(int n) {
        GroundMetric g;
        g.size = n;
        g.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
        return g;
    }
    /// The discrete metric: 1 off the diagonal.
    static GroundMetric discrete(int n) {
        GroundMetric g = zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) g.entries[static_cast<std::size_t>(i) * n + j] = 1.0;
        return g;
    }

    double at(StateId i, StateId j) const {
        return entries[static_cast<std::size_t>(i) * size + j];
    }
    void set(StateId i, StateId j, double v) {
        entries[static_cast<std::size_t>(i) * size + j] = v;
        entries[static_cast<std::size_t>(j) * size + i] = v;
    }
};

/// Coupling table over supp(mu) x supp(nu) whose marginals are mu and nu.
struct WeightFunction {
    std::vector<StateId> row_states;
    std::vector<StateId> col_states;
    std::vector<double> values;  // row-major |rows| x |cols|

    double at(std::size_t i, std::size_t j) const { return values[i * col_states.size() + j]; }
};

struct TransportResult {
    double value = 0.0;
    WeightFunction coupling;
    std::vector<double> row_potentials;  // dual certificate: u_i + v_j <= cost(i,j),
    std::vector<double> col_potentials;  // equality on basic cells
};

/// Minimum-cost coupling of (mu, nu) under ground costs d: the Kantorovich
/// lifting of d to distributions. Solved by the transportation simplex on the
/// support bipartite graph with Bland-style deterministic pivoting; marginals
/// are converted from exact rationals to binary64 at this boundary.
TransportResult lift_metric(const GroundMetric& d, const Distribution& mu,
                            const Distribution& nu);

/// True iff both marginal families hold within `tol` and all entries are
/// nonnegative (up to -tol).
bool check_weight_function(const WeightFunction& lambda, const Distribution& mu,
                           const Distribution& nu, double tol = 1e-12);

/// Product coupling lambda(s,t) = mu(s) * nu(t); always feasible.
WeightFunction product_coupling(const Distribution& mu, const Distribution& nu);

}  // namespace pabisim

#pragma once

#include <string>
#include <vector>

#include "pabisim/automaton.hpp"

namespace pabisim {

/// Partition of the state set into disjoint blocks. Blocks are sorted
/// internally and ordered by smallest member, so runs are reproducible.
struct Partition {
    std::vector<std::vector<StateId>> blocks;
    std::vector<int> block_of;  // per state

    static Partition by_labels(const Automaton& a);

    bool same_block(StateId s, StateId t) const { return block_of[static_cast<std::size_t>(s)] == block_of[static_cast<std::size_t>(t)]; }
    std::size_t size() const { return blocks.size(); }

    std::string describe(const Automaton& a) const;
};

/// Coarsest probabilistic bisimulation: blocks refine labels and every
/// transition of a block member is matched by a combined transition of every
/// other member with equal per-block masses (exact rational feasibility).
Partition prob_bisim_partition(const Automaton& a);

/// True iff the two distributions put exactly the same mass on every block.
bool lift_partition_check(const Partition& p, const Distribution& mu, const Distribution& nu);

/// Transfer check used by the refinement loop (exposed for the brute-force
/// oracle in tests): can `r` match the step s --act--> mu with a combined
/// transition of equal block masses?
bool transfer_matches(const Automaton& a, StateId r, ActionId act, const Distribution& mu,
                      const Partition& p);

/// Fixed-point iterates of the state-based bisimulation metric with
/// Kantorovich lifting. Entries are exact zeros on the diagonal, symmetric,
/// in [0,1], and nondecreasing over iterations.
struct StateMetricTable {
    double gamma = 1.0;
    StateId states = 0;
    std::vector<double> entries;  // row-major
    int iterations = 0;
    double last_change = 0.0;
    bool converged = false;   // pointwise change dropped below tol
    bool certified = false;   // true when tail_bound is finite
    double tail_bound = 0.0;  // upper bound on (true fixed point - table), sup norm

    double at(StateId s, StateId t) const {
        return entries[static_cast<std::size_t>(s) * states + t];
    }
};

/// Iterates the metric functional from the zero metric until the pointwise
/// change drops below tol or `max_iterations` is hit. With gamma < 1 the
/// returned tail bound certifies the distance to the least fixed point; at
/// gamma = 1 certification only happens when an exact fixed point is reached.
StateMetricTable state_metric(const Automaton& a, double gamma, double tol,
                              int max_iterations = 10000);

}  // namespace pabisim

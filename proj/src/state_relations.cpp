#include "pabisim/state_relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pabisim/parallel.hpp"
#include "pabisim/simplex.hpp"
#include "pabisim/transport.hpp"

namespace pabisim {

namespace {

Partition from_block_of(std::vector<int> block_of, std::size_t block_count) {
    Partition p;
    p.block_of = std::move(block_of);
    p.blocks.assign(block_count, {});
    for (std::size_t s = 0; s < p.block_of.size(); ++s)
        p.blocks[static_cast<std::size_t>(p.block_of[s])].push_back(static_cast<StateId>(s));
    // Order blocks by smallest member and renumber.
    std::sort(p.blocks.begin(), p.blocks.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        for (StateId s : p.blocks[b]) p.block_of[static_cast<std::size_t>(s)] = static_cast<int>(b);
    return p;
}

}  // namespace

Partition Partition::by_labels(const Automaton& a) {
    std::vector<LabelSet> classes;
    std::vector<int> block_of(a.states.size());
    for (std::size_t s = 0; s < a.states.size(); ++s) {
        auto it = std::find(classes.begin(), classes.end(), a.labels[s]);
        if (it == classes.end()) {
            classes.push_back(a.labels[s]);
            block_of[s] = static_cast<int>(classes.size()) - 1;
        } else {
            block_of[s] = static_cast<int>(it - classes.begin());
        }
    }
    return from_block_of(std::move(block_of), classes.size());
}

std::string Partition::describe(const Automaton& a) const {
    std::ostringstream os;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        os << "{";
        for (std::size_t i = 0; i < blocks[b].size(); ++i) {
            if (i) os << ",";
            os << a.states[static_cast<std::size_t>(blocks[b][i])];
        }
        os << "}";
        if (b + 1 < blocks.size()) os << " ";
    }
    return os.str();
}

bool transfer_matches(const Automaton& a, StateId r, ActionId act, const Distribution& mu,
                      const Partition& p) {
    auto succ = a.successors(r, act);
    if (succ.empty()) return false;

    // Feasibility of weights q >= 0, sum 1, with sum_i q_i * nu_i(B) = mu(B)
    // for every block B.
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;
    for (const auto& block : p.blocks) {
        std::vector<Rational> row(succ.size());
        Rational target;
        for (StateId s : block) target += mu.at(s);
        for (std::size_t i = 0; i < succ.size(); ++i) {
            Rational mass;
            for (StateId s : block) mass += succ[i].at(s);
            row[i] = mass;
        }
        rows.push_back(std::move(row));
        rhs.push_back(target);
    }
    rows.emplace_back(succ.size(), Rational(1));
    rhs.emplace_back(1);
    return nonneg_solution(rows, rhs).has_value();
}

namespace {

bool mutually_matches(const Automaton& a, StateId s, StateId r, const Partition& p) {
    for (const auto& t : a.transitions) {
        if (t.source == s && !transfer_matches(a, r, t.action, t.target, p)) return false;
        if (t.source == r && !transfer_matches(a, s, t.action, t.target, p)) return false;
    }
    return true;
}

}  // namespace

Partition prob_bisim_partition(const Automaton& a) {
    Partition p = Partition::by_labels(a);
    for (;;) {
        std::vector<int> next_block_of(a.states.size(), -1);
        int next_count = 0;
        bool changed = false;
        for (const auto& block : p.blocks) {
            std::vector<StateId> reps;
            for (StateId s : block) {
                bool placed = false;
                for (StateId rep : reps) {
                    if (mutually_matches(a, s, rep, p)) {
                        next_block_of[static_cast<std::size_t>(s)] =
                            next_block_of[static_cast<std::size_t>(rep)];
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    reps.push_back(s);
                    next_block_of[static_cast<std::size_t>(s)] = next_count++;
                }
            }
            if (reps.size() > 1) changed = true;
        }
        if (!changed) return p;
        p = from_block_of(std::move(next_block_of), static_cast<std::size_t>(next_count));
    }
}

bool lift_partition_check(const Partition& p, const Distribution& mu, const Distribution& nu) {
    for (const auto& block : p.blocks) {
        Rational m, n;
        for (StateId s : block) {
            m += mu.at(s);
            n += nu.at(s);
        }
        if (m != n) return false;
    }
    // Mass outside the partitioned universe must agree too.
    Rational rem_m = Rational(1), rem_n = Rational(1);
    for (const auto& block : p.blocks)
        for (StateId s : block) {
            rem_m -= mu.at(s);
            rem_n -= nu.at(s);
        }
    return rem_m == rem_n;
}

namespace {

// min over mixtures q of `targets` and couplings lambda of
// sum lambda(u,v) * d(u,v), where lambda couples `source` with the mixture.
// One joint LP: both enter linearly.
double best_response_cost(const Distribution& source, const std::vector<Distribution>& targets,
                          const StateMetricTable& d) {
    std::vector<StateId> rows = source.support();
    std::vector<StateId> cols;
    for (const auto& t : targets)
        for (const auto& [s, w] : t.weights())
            if (std::find(cols.begin(), cols.end(), s) == cols.end()) cols.push_back(s);
    std::sort(cols.begin(), cols.end());

    const std::size_t m = rows.size(), n = cols.size(), l = targets.size();
    const std::size_t vars = m * n + l;
    LpProblem<double> lp;
    auto lam = [&](std::size_t i, std::size_t j) { return i * n + j; };

    // Row marginals: sum_v lambda(u,v) = source(u).
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row(vars, 0.0);
        for (std::size_t j = 0; j < n; ++j) row[lam(i, j)] = 1.0;
        lp.a.push_back(std::move(row));
        lp.b.push_back(source.at(rows[i]).to_double());
    }
    // Column marginals tied to the mixture: sum_u lambda(u,v) - sum_k q_k * target_k(v) = 0.
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(vars, 0.0);
        for (std::size_t i = 0; i < m; ++i) row[lam(i, j)] = 1.0;
        for (std::size_t k = 0; k < l; ++k) row[m * n + k] = -targets[k].at(cols[j]).to_double();
        lp.a.push_back(std::move(row));
        lp.b.push_back(0.0);
    }
    // Mixture weights sum to 1.
    {
        std::vector<double> row(vars, 0.0);
        for (std::size_t k = 0; k < l; ++k) row[m * n + k] = 1.0;
        lp.a.push_back(std::move(row));
        lp.b.push_back(1.0);
    }
    lp.c.assign(vars, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.c[lam(i, j)] = d.at(rows[i], cols[j]);

    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("state_metric: inner transport program not solvable");
    return std::max(0.0, sol.value);
}

}  // namespace

StateMetricTable state_metric(const Automaton& a, double gamma, double tol, int max_iterations) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("state_metric: gamma must be in (0,1]");
    if (!(tol > 0.0)) throw std::invalid_argument("state_metric: tol must be positive");

    const StateId n = a.state_count();
    StateMetricTable table;
    table.gamma = gamma;
    table.states = n;
    table.entries.assign(static_cast<std::size_t>(n) * n, 0.0);

    // Successor families are iteration-invariant.
    std::vector<std::vector<std::vector<Distribution>>> succ(
        static_cast<std::size_t>(n), std::vector<std::vector<Distribution>>(a.actions.size()));
    for (StateId s = 0; s < n; ++s)
        for (ActionId act = 0; act < a.action_count(); ++act)
            succ[static_cast<std::size_t>(s)][static_cast<std::size_t>(act)] = a.successors(s, act);

    std::vector<std::pair<StateId, StateId>> pairs;
    for (StateId s = 0; s < n; ++s)
        for (StateId t = s + 1; t < n; ++t) pairs.emplace_back(s, t);

    auto apply_once = [&](const StateMetricTable& cur, StateMetricTable& next) {
        parallel_for(pairs.size(), [&](std::size_t k) {
            auto [s, t] = pairs[k];
            double value = a.label(s) == a.label(t) ? 0.0 : 1.0;
            for (ActionId act = 0; act < a.action_count() && value < 1.0; ++act) {
                const auto& ss = succ[static_cast<std::size_t>(s)][static_cast<std::size_t>(act)];
                const auto& ts = succ[static_cast<std::size_t>(t)][static_cast<std::size_t>(act)];
                for (int side = 0; side < 2; ++side) {
                    const auto& from = side == 0 ? ss : ts;
                    const auto& to = side == 0 ? ts : ss;
                    if (from.empty()) continue;  // sup over empty set: 0
                    if (to.empty()) {            // inf over empty set: 1
                        value = 1.0;
                        break;
                    }
                    // The inner cost is convex in the chosen source point, so
                    // the sup over combined transitions is attained at a base
                    // successor.
                    for (const auto& mu : from) {
                        value = std::max(value, gamma * best_response_cost(mu, to, cur));
                        if (value >= 1.0) break;
                    }
                    if (value >= 1.0) break;
                }
            }
            std::size_t st = static_cast<std::size_t>(s) * static_cast<std::size_t>(n) +
                             static_cast<std::size_t>(t);
            std::size_t ts_idx = static_cast<std::size_t>(t) * static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(s);
            next.entries[st] = value;
            next.entries[ts_idx] = value;
        });
    };

    StateMetricTable next = table;
    int iter = 0;
    double change = 0.0;
    while (iter < max_iterations) {
        apply_once(table, next);
        change = 0.0;
        for (std::size_t i = 0; i < table.entries.size(); ++i)
            change = std::max(change, std::fabs(next.entries[i] - table.entries[i]));
        table.entries = next.entries;
        ++iter;
        if (change < tol) break;
    }

    table.iterations = iter;
    table.last_change = change;
    table.converged = change < tol;
    if (gamma < 1.0) {
        double geometric = change * gamma / (1.0 - gamma);
        double horizon = std::pow(gamma, iter);
        table.tail_bound = std::min(geometric, horizon);
        table.certified = true;
    } else if (change == 0.0) {
        // Exact fixed point reached from below: it is the least fixed point.
        table.tail_bound = 0.0;
        table.certified = true;
    } else {
        table.tail_bound = std::numeric_limits<double>::infinity();
        table.certified = false;
    }
    return table;
}

}  // namespace pabisim

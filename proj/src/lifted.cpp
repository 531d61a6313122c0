#include "pabisim/lifted.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "pabisim/simplex.hpp"

namespace pabisim {

namespace {

// Feasibility of target = sum_i p_i * cand_i with p in the simplex, solved
// exactly. Equations range over the union of all supports involved.
std::optional<std::vector<Rational>> mixture_weights(const std::vector<Distribution>& cands,
                                                     const Distribution& target) {
    std::set<StateId> states;
    for (const auto& c : cands)
        for (const auto& [s, w] : c.weights()) states.insert(s);
    for (const auto& [s, w] : target.weights()) states.insert(s);

    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (StateId s : states) {
        std::vector<Rational> row(cands.size());
        for (std::size_t i = 0; i < cands.size(); ++i) row[i] = cands[i].at(s);
        a.push_back(std::move(row));
        b.push_back(target.at(s));
    }
    a.emplace_back(cands.size(), Rational(1));
    b.emplace_back(1);
    return nonneg_solution(a, b);
}

}  // namespace

SuccessorPolytope successor_polytope(const Automaton& a, const Distribution& mu, ActionId act) {
    SuccessorPolytope poly;
    poly.source = mu;
    poly.action = act;
    poly.support = mu.support();
    for (StateId s : poly.support) {
        auto succ = a.successors(s, act);
        if (succ.empty())
            throw std::invalid_argument("not input enabled: state " +
                                        a.states[static_cast<std::size_t>(s)] +
                                        " has no transition under action " +
                                        a.actions[static_cast<std::size_t>(act)]);
        poly.generator.push_back(std::move(succ));
    }

    // Enumerate pure choice tuples in lexicographic order.
    std::vector<std::size_t> choice(poly.support.size(), 0);
    for (;;) {
        Distribution vertex;
        for (std::size_t k = 0; k < poly.support.size(); ++k)
            vertex.accumulate(mu.at(poly.support[k]), poly.generator[k][choice[k]]);
        if (std::find(poly.vertices.begin(), poly.vertices.end(), vertex) == poly.vertices.end()) {
            poly.vertices.push_back(std::move(vertex));
            poly.vertex_choices.push_back(choice);
        }
        std::size_t k = poly.support.size();
        while (k > 0) {
            --k;
            if (++choice[k] < poly.generator[k].size()) break;
            choice[k] = 0;
            if (k == 0) return poly;
        }
        if (poly.support.empty()) return poly;
    }
}

CombinedWitness combined_reachable(const Automaton& a, StateId s, ActionId act,
                                   const Distribution& target) {
    auto succ = a.successors(s, act);
    if (succ.empty())
        throw std::invalid_argument("not input enabled: state " +
                                    a.states[static_cast<std::size_t>(s)] +
                                    " has no transition under action " +
                                    a.actions[static_cast<std::size_t>(act)]);
    CombinedWitness w;
    if (auto sol = mixture_weights(succ, target)) {
        w.reachable = true;
        w.weights = std::move(*sol);
    }
    return w;
}

MemberWitness lifted_step_member(const SuccessorPolytope& poly, const Distribution& candidate) {
    MemberWitness w;
    if (auto sol = mixture_weights(poly.vertices, candidate)) {
        w.member = true;
        w.weights = std::move(*sol);
    }
    return w;
}

std::vector<Distribution> decompose_step(const Automaton& a,
                                         const std::vector<std::pair<Rational, Distribution>>& parts,
                                         ActionId act, const Distribution& combined_successor) {
    Rational sum;
    for (const auto& [w, d] : parts) {
        if (!w.is_positive())
            throw std::invalid_argument("decompose_step: part weights must be strictly positive");
        sum += w;
    }
    if (sum != Rational(1))
        throw std::invalid_argument("decompose_step: part weights sum to " + sum.str() +
                                    ", expected 1");

    Distribution mixture;
    for (const auto& [w, d] : parts) mixture.accumulate(w, d);

    SuccessorPolytope poly = successor_polytope(a, mixture, act);
    MemberWitness wit = lifted_step_member(poly, combined_successor);
    if (!wit.member)
        throw std::invalid_argument(
            "decompose_step: combined_successor is not a lifted successor of the mixture");

    // Per-support-state combined choice realizing the step: mix each
    // vertex's pure choice by the certifying hull weights.
    std::vector<Distribution> per_state(poly.support.size());
    for (std::size_t k = 0; k < poly.support.size(); ++k) {
        Distribution mix;
        for (std::size_t j = 0; j < poly.vertices.size(); ++j) {
            if (wit.weights[j].is_zero()) continue;
            mix.accumulate(wit.weights[j], poly.generator[k][poly.vertex_choices[j][k]]);
        }
        per_state[k] = std::move(mix);
    }

    std::vector<Distribution> out;
    out.reserve(parts.size());
    for (const auto& [w, part] : parts) {
        Distribution nu;
        for (const auto& [s, mass] : part.weights()) {
            auto it = std::find(poly.support.begin(), poly.support.end(), s);
            nu.accumulate(mass, per_state[static_cast<std::size_t>(it - poly.support.begin())]);
        }
        out.push_back(std::move(nu));
    }
    return out;
}

PolytopeGrid grid_points(const SuccessorPolytope& poly, int density, std::size_t max_points) {
    PolytopeGrid grid;
    const std::size_t v = poly.vertices.size();
    if (v == 0) return grid;
    if (v == 1) {
        grid.points = poly.vertices;
        grid.effective_density = 1;
        grid.cover_radius = 0.0;
        return grid;
    }
    if (density < 1) density = 1;

    auto composition_count = [&](int g) {
        // C(g + v - 1, v - 1), capped to avoid overflow.
        unsigned long long count = 1;
        for (std::size_t i = 1; i < v; ++i) {
            count = count * (static_cast<unsigned long long>(g) + i) / i;
            if (count > 1000000) return count;
        }
        return count;
    };
    int g = density;
    while (g > 1 && composition_count(g) > max_points) --g;
    grid.effective_density = g;

    // All integer compositions k_1 + ... + k_v = g, lexicographic.
    std::vector<int> comp(v, 0);
    comp[0] = g;
    std::set<Distribution> seen;
    for (;;) {
        Distribution point;
        for (std::size_t j = 0; j < v; ++j) {
            if (comp[j] == 0) continue;
            point.accumulate(Rational(comp[j], g), poly.vertices[j]);
        }
        if (seen.insert(point).second) grid.points.push_back(std::move(point));

        // Next composition: move a unit from the rightmost positive
        // non-final slot onward (standard colex successor).
        std::size_t k = v - 1;
        while (k > 0 && comp[k - 1] == 0) --k;
        if (k == 0) break;
        --comp[k - 1];
        int rest = 1;
        for (std::size_t j = k; j < v; ++j) {
            rest += comp[j];
            comp[j] = 0;
        }
        comp[k] = rest;
    }

    // Any mixture coefficient vector is within L1 distance v/(2g) of a grid
    // coefficient vector, and mixing is 1/2-Lipschitz from coefficients to
    // total variation.
    grid.cover_radius = static_cast<double>(v) / (4.0 * g);
    return grid;
}

}  // namespace pabisim

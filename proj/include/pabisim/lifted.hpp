#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pabisim/automaton.hpp"

namespace pabisim {

/// Convex set of distributions reachable from `source` under one action.
/// Vertices come from pure per-support-state choices among base successors;
/// the full successor set under combined transitions is their convex hull.
struct SuccessorPolytope {
    Distribution source;
    ActionId action = 0;
    std::vector<StateId> support;                    // supp(source), ascending
    std::vector<std::vector<Distribution>> generator;  // per support state, distinct base successors
    std::vector<Distribution> vertices;              // deduplicated, lexicographic choice order
    std::vector<std::vector<std::size_t>> vertex_choices;  // first choice tuple per vertex
};

/// Throws when some support state enables no `act` transition (callers are
/// expected to work in the dead-state extension).
SuccessorPolytope successor_polytope(const Automaton& a, const Distribution& mu, ActionId act);

struct CombinedWitness {
    bool reachable = false;
    std::vector<Rational> weights;  // over the distinct base successors, when reachable
};

/// Is `target` a convex mixture of the base act-successors of s? Decided by
/// exact rational feasibility; returns one certifying weight vector.
CombinedWitness combined_reachable(const Automaton& a, StateId s, ActionId act,
                                   const Distribution& target);

struct MemberWitness {
    bool member = false;
    std::vector<Rational> weights;  // convex weights over poly.vertices
};

/// Exact convex-hull membership for the lifted transition relation.
MemberWitness lifted_step_member(const SuccessorPolytope& poly, const Distribution& candidate);

/// Splits a lifted step of a mixture source into per-part steps: given
/// sum_i w_i * mu_i --act--> combined_successor, returns nu_i with
/// mu_i --act--> nu_i and sum_i w_i * nu_i = combined_successor exactly.
/// Weights must be strictly positive and sum to 1.
std::vector<Distribution> decompose_step(const Automaton& a,
                                         const std::vector<std::pair<Rational, Distribution>>& parts,
                                         ActionId act, const Distribution& combined_successor);

/// Finite probe set for a polytope: vertices plus the barycentric mixtures
/// with denominator `density`. When the full grid would exceed `max_points`,
/// the density is lowered (vertices are always kept). `cover_radius` bounds
/// the total-variation distance from any polytope point to the nearest probe.
struct PolytopeGrid {
    std::vector<Distribution> points;
    int effective_density = 1;
    double cover_radius = 0.0;
};

PolytopeGrid grid_points(const SuccessorPolytope& poly, int density, std::size_t max_points = 330);

}  // namespace pabisim

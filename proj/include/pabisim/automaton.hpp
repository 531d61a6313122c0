#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pabisim/distribution.hpp"

namespace pabisim {

/// Set of atomic propositions as a bitmask over the owning automaton's AP
/// list (declaration order gives bit positions). Capped at 64 propositions.
struct LabelSet {
    std::uint64_t bits = 0;

    static constexpr std::size_t max_props = 64;

    bool test(std::size_t i) const { return (bits >> i) & 1u; }
    void set(std::size_t i) { bits |= std::uint64_t(1) << i; }
    bool empty() const { return bits == 0; }
    bool is_full(std::size_t universe) const {
        if (universe == 0) return true;
        return bits == (universe == 64 ? ~std::uint64_t(0)
                                       : (std::uint64_t(1) << universe) - 1);
    }

    friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.bits == b.bits; }
    friend bool operator!=(const LabelSet& a, const LabelSet& b) { return a.bits != b.bits; }
    friend bool operator<(const LabelSet& a, const LabelSet& b) { return a.bits < b.bits; }
};

struct Transition {
    StateId source = 0;
    ActionId action = 0;
    Distribution target;
};

/// Probabilistic automaton: finitely many states, actions and transitions,
/// each state carrying a set of atomic propositions, plus an initial
/// distribution. Values are immutable by convention once built; every
/// operation in this library is a pure function over const references.
struct Automaton {
    std::string name;
    std::vector<std::string> ap;       // proposition names, declaration order
    std::vector<std::string> actions;  // action names, declaration order
    std::vector<std::string> states;   // state names, declaration order
    std::vector<LabelSet> labels;      // one per state
    std::vector<Transition> transitions;
    Distribution initial;

    StateId state_count() const { return static_cast<StateId>(states.size()); }
    ActionId action_count() const { return static_cast<ActionId>(actions.size()); }

    std::optional<StateId> state_index(std::string_view name) const;
    std::optional<ActionId> action_index(std::string_view name) const;

    LabelSet label(StateId s) const { return labels[static_cast<std::size_t>(s)]; }

    /// Base successor distributions of (s, a) in transition-list order,
    /// with exact duplicates removed.
    std::vector<Distribution> successors(StateId s, ActionId a) const;
    bool enables(StateId s, ActionId a) const;

    /// Distinct label sets occurring on states, ordered by first occurrence.
    std::vector<LabelSet> realized_label_classes() const;

    /// Mass the distribution puts on states labeled exactly `cls`.
    Rational class_mass(const Distribution& mu, LabelSet cls) const;

    std::string format_distribution(const Distribution& mu) const;
};

/// Returns every violated invariant with location info; empty means
/// well-formed. Violations are data, not failures.
std::vector<std::string> validate(const Automaton& a);

struct ReactiveCheck {
    bool ok = false;
    std::optional<StateId> state;    // first offending state
    std::optional<ActionId> action;  // offending action, if the problem is per-action
    std::string reason;              // human-readable
};

/// True iff every state enables every action via exactly one successor
/// distribution and every label is empty or the full AP set.
ReactiveCheck is_reactive(const Automaton& a);

/// Input-enabled extension: adds a dead state labeled with the fresh
/// proposition "dead", absorbing every action not enabled elsewhere.
/// State indices of `a` are preserved; the dead state comes last.
/// Throws if a proposition named "dead" is already declared.
Automaton bot_extend(const Automaton& a);

/// Index of the dead state in a bot_extend result.
inline StateId dead_state(const Automaton& extended) { return extended.state_count() - 1; }

struct DirectSum {
    Automaton sum;
    std::vector<StateId> left_map;   // original left state -> sum state
    std::vector<StateId> right_map;  // original right state -> sum state

    Distribution inject_left(const Distribution& mu) const;
    Distribution inject_right(const Distribution& mu) const;
};

/// Disjoint union with state names prefixed "L." / "R.". Requires equal
/// action and proposition universes (as sets); the sum reuses the left
/// automaton's declaration order. Throws listing the symmetric difference
/// when the action sets differ.
DirectSum direct_sum(const Automaton& a1, const Automaton& a2);

/// Reactive automaton view: one row-stochastic matrix per action plus the
/// accepting states (those labeled with the full AP set). Holds a pointer to
/// the base automaton, which must outlive the view.
struct ReactiveView {
    const Automaton* base = nullptr;
    // matrices[a][s][t]: probability of moving s -> t under action a.
    std::vector<std::vector<std::vector<Rational>>> matrices;
    std::vector<bool> accepting;

    StateId state_count() const { return base->state_count(); }
    ActionId action_count() const { return base->action_count(); }

    /// Acceptance mass of a distribution (inner product with the
    /// characteristic vector of the accepting set).
    Rational accepting_mass(const Distribution& mu) const;
};

/// Throws (with the is_reactive witness in the message) when `a` is not
/// reactive.
ReactiveView reactive_view(const Automaton& a);

}  // namespace pabisim

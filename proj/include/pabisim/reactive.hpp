#pragma once

#include <string>
#include <vector>

#include "pabisim/automaton.hpp"
#include "pabisim/dist_metric.hpp"

namespace pabisim {

using Word = std::vector<ActionId>;

std::string format_word(const Automaton& a, const Word& w);

/// Acceptance probability of `word` from the distribution `alpha`: the exact
/// row-vector/matrix product chain ending in the accepting-set indicator.
/// The empty word returns the accepting mass of `alpha` itself.
Rational acceptance(const ReactiveView& v, const Distribution& alpha, const Word& word);

struct WordAcceptance {
    Word word;
    Rational value;  // in [0,1]
};

/// Acceptance of a word from the base initial distribution.
WordAcceptance word_acceptance(const ReactiveView& v, const Word& word);

struct EquivalenceResult {
    bool equivalent = true;
    Word word;  // shortest-by-BFS distinguishing word when inequivalent
    Rational value1, value2;
};

/// Exact language equivalence: explores the joint row-vector space
/// breadth-first, inserting vectors while they enlarge the rational span;
/// terminates within |S1| + |S2| insertions. Throws when the action sets
/// differ.
EquivalenceResult exact_equivalent(const ReactiveView& v1, const ReactiveView& v2);
EquivalenceResult exact_equivalent(const ReactiveView& v1, const Distribution& alpha1,
                                   const ReactiveView& v2, const Distribution& alpha2);

struct HorizonGap {
    Rational gap;  // max |A1(w) - A2(w)| over words of length <= horizon
    double bound = 0.0;
    Word witness;          // first maximizer in BFS order
    bool saturated = false;  // span closed with zero gap before the horizon
};

/// Lower bound on the equivalence metric by exhausting words up to the
/// horizon (with a sound early stop once the joint span saturates while all
/// gaps are zero). Exact when the span saturates within the horizon.
HorizonGap equiv_metric_lower(const ReactiveView& v1, const ReactiveView& v2, int horizon);

struct CrosscheckReport {
    EquivalenceResult equivalence;
    Verdict bisim;           // on the direct sum, via the exact reactive route
    MetricInterval metric;   // dist_metric at gamma = 1 on the injected initials
    HorizonGap horizon_gap;  // at horizon |S1| + |S2|
    bool ordering_ok = true;     // horizon gap <= metric upper + tol
    bool qualitative_ok = true;  // equivalence verdict matches bisimilarity
};

/// Builds the direct sum and checks that the equivalence view, the
/// bisimilarity verdict and the metric bounds agree. Requires gamma = 1.
CrosscheckReport equiv_vs_bisim_crosscheck(const ReactiveView& v1, const ReactiveView& v2,
                                           MetricParams params);

}  // namespace pabisim

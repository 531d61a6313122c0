#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pabisim/automaton.hpp"
#include "pabisim/dist_metric.hpp"
#include "pabisim/lifted.hpp"

namespace pabisim {

/// Quantitative modal formula. Concrete syntax (whitespace-insensitive):
///
///   B{{p,q},{}}        label-class set
///   (f + 1/4)          shift, clamped at 1
///   !f                 negation
///   /\[f1,f2]          finite conjunction (minimum)
///   <a>f               diamond: discounted sup over lifted a-successors
struct Formula {
    enum class Kind { Classes, Plus, Neg, Conj, Diamond };
    Kind kind = Kind::Classes;
    std::vector<LabelSet> classes;  // Classes
    Rational shift;                 // Plus
    ActionId action = -1;           // Diamond
    std::vector<std::shared_ptr<const Formula>> children;
};
using FormulaPtr = std::shared_ptr<const Formula>;

FormulaPtr make_classes(std::vector<LabelSet> classes);
FormulaPtr make_plus(FormulaPtr f, Rational shift);
FormulaPtr make_neg(FormulaPtr f);
FormulaPtr make_conj(std::vector<FormulaPtr> fs);
FormulaPtr make_diamond(ActionId a, FormulaPtr f);

/// Strict parser; throws ParseError (from model_io) with position info.
FormulaPtr parse_formula(const std::string& text, const Automaton& a);
std::string format_formula(const Formula& f, const Automaton& a);

struct EvalBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Evaluates formulas over one automaton (dead-state extension built once).
/// Boolean-free nodes are exact; diamonds probe successor polytopes at grid
/// points, with the upper bound widened by the probe cover radius (formula
/// semantics are 1-Lipschitz under total variation). Singleton polytopes
/// evaluate exactly.
class LogicEvaluator {
public:
    LogicEvaluator(const Automaton& a, MetricParams params);

    EvalBounds eval(const Formula& f, const Distribution& mu);

    /// Certified lower bound on |f(mu) - f(nu)|.
    double separation(const Formula& f, const Distribution& mu, const Distribution& nu);

    const Automaton& base() const { return *base_; }
    const Automaton& extended() const { return ext_; }

private:
    struct CachedPolytope {
        SuccessorPolytope poly;
        PolytopeGrid grid;
    };
    const CachedPolytope& polytope(const Distribution& mu, ActionId act);

    const Automaton* base_;
    Automaton ext_;
    MetricParams params_;
    std::map<std::pair<Distribution, ActionId>, CachedPolytope> cache_;
};

EvalBounds eval_formula(const Formula& f, const Automaton& a, const Distribution& mu,
                        const MetricParams& params);

/// Max over the supplied formulas of the certified separation lower bound;
/// a lower bound on the logical distance.
double logic_distance_lower(const Automaton& a, const Distribution& mu, const Distribution& nu,
                            const std::vector<FormulaPtr>& formulas, const MetricParams& params);

struct SearchResult {
    FormulaPtr formula;
    double separation = 0.0;
};

/// Bounded search for a distinguishing formula of diamond-depth at most
/// `depth`: single-class atoms, best one-sided class sets, shifted
/// conjunctions over sampled successor responses, and diamonds over polytope
/// probes. Returns the best candidate found with its certified separation.
SearchResult distinguishing_search(const Automaton& a, const Distribution& mu,
                                   const Distribution& nu, int depth, const MetricParams& params);

}  // namespace pabisim

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>

#include "pabisim/automaton.hpp"
#include "pabisim/lifted.hpp"
#include "pabisim/state_relations.hpp"
#include "pabisim/transport.hpp"

namespace pabisim {

struct MetricParams {
    double gamma = 0.9;
    double tol = 1e-6;
    int depth_cap = 0;  // 0 = auto: ceil(log tol / log gamma) when gamma < 1, else 64
    int grid = 4;       // barycentric subdivision density for polytope probes
    std::size_t max_grid_points = 330;
    std::size_t max_evaluations = 50000;  // recursion budget per query
    bool state_metric_cap = true;  // tighten uppers with the lifted state metric

    int effective_depth() const {
        if (depth_cap > 0) return depth_cap;
        if (gamma < 1.0) {
            double d = std::ceil(std::log(tol) / std::log(gamma));
            return d < 1.0 ? 1 : static_cast<int>(d);
        }
        return 64;
    }
};

struct MetricInterval {
    double lower = 0.0;
    double upper = 1.0;
    /// Whether the upper bound is horizon-certified. Always true at
    /// gamma < 1 (depth truncation contributes at most gamma^depth, folded
    /// into the bound); at gamma = 1 only bounds independent of the depth
    /// cutoff count.
    bool certified = false;
    /// gamma = 1 only: iterative deepening stopped because the lower
    /// iterates stabilized within tol (or the interval closed).
    bool stable = false;
    int depth = 0;
};

/// Label distance: half the L1 distance between the label-class mass
/// vectors, over classes realized in the automaton.
Rational d_ap_exact(const Automaton& a, const Distribution& mu, const Distribution& nu);
double d_ap(const Automaton& a, const Distribution& mu, const Distribution& nu);
/// The equivalent max-form: the largest one-sided class-mass gap.
double d_ap_max_form(const Automaton& a, const Distribution& mu, const Distribution& nu);

/// Certified interval bounds on the distribution bisimulation metric.
/// Works in the dead-state extension internally; the recursion alternates
/// sup/inf over successor polytopes probed at grid points, uppers are
/// additionally capped by the total-variation distance and by the
/// Kantorovich-lifted state metric.
class DistMetricEngine {
public:
    DistMetricEngine(const Automaton& a, MetricParams params);

    MetricInterval distance(const Distribution& mu, const Distribution& nu);

    const Automaton& extended() const { return ext_; }
    const MetricParams& params() const { return params_; }
    std::size_t evaluations() const { return eval_count_; }

private:
    struct Entry {
        double lower = 0.0;
        double upper = 1.0;
        int depth = -1;
        bool horizon_free = false;
    };
    struct PairKey {
        Distribution first, second;
        bool operator==(const PairKey& o) const {
            return first == o.first && second == o.second;
        }
    };
    struct PairKeyHash {
        std::size_t operator()(const PairKey& k) const;
    };
    struct CachedPolytope {
        SuccessorPolytope poly;
        PolytopeGrid grid;
    };

    Entry evaluate(const Distribution& mu, const Distribution& nu, int depth);
    const CachedPolytope& polytope(const Distribution& mu, ActionId act);

    Automaton ext_;
    MetricParams params_;
    std::optional<StateMetricTable> state_table_;
    GroundMetric state_ground_;
    double state_tail_ = 0.0;
    bool state_cap_usable_ = false;
    std::unordered_map<PairKey, Entry, PairKeyHash> memo_;
    std::map<std::pair<Distribution, ActionId>, CachedPolytope> poly_cache_;
    std::size_t eval_count_ = 0;
    int root_depth_ = 0;
};

MetricInterval dist_metric(const Automaton& a, const Distribution& mu, const Distribution& nu,
                           const MetricParams& params);

enum class VerdictKind { Yes, No, Unknown };

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    bool exact = false;  // decided by the exact reactive equivalence routine
    bool certified = false;
    MetricInterval interval;
    std::string note;
};

/// Threshold verdict: yes when the certified upper bound is at most eps, no
/// when the lower bound exceeds it, unknown otherwise.
Verdict approx_bisim(const Automaton& a, const Distribution& mu, const Distribution& nu,
                     double eps, const MetricParams& params);

/// Bisimilarity as the metric kernel (eps = 0 read through tol). Reactive
/// automata are decided exactly through language equivalence instead.
Verdict bisimilar(const Automaton& a, const Distribution& mu, const Distribution& nu,
                  const MetricParams& params);

const char* to_string(VerdictKind k);

}  // namespace pabisim

#include "pabisim/dist_metric.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "pabisim/reactive.hpp"

namespace pabisim {

namespace {

Rational class_gap_positive(const Automaton& a, const Distribution& mu, const Distribution& nu) {
    Rational acc;
    for (const auto& cls : a.realized_label_classes()) {
        Rational gap = a.class_mass(mu, cls) - a.class_mass(nu, cls);
        if (gap.is_positive()) acc += gap;
    }
    return acc;
}

}  // namespace

Rational d_ap_exact(const Automaton& a, const Distribution& mu, const Distribution& nu) {
    Rational half_sum;
    for (const auto& cls : a.realized_label_classes())
        half_sum += abs(a.class_mass(mu, cls) - a.class_mass(nu, cls));
    half_sum /= Rational(2);
    // The half-sum equals the maximal one-sided class-mass gap; both label
    // mass vectors total 1, so positive and negative gaps balance.
    return half_sum;
}

double d_ap(const Automaton& a, const Distribution& mu, const Distribution& nu) {
    return d_ap_exact(a, mu, nu).to_double();
}

double d_ap_max_form(const Automaton& a, const Distribution& mu, const Distribution& nu) {
    return class_gap_positive(a, mu, nu).to_double();
}

std::size_t DistMetricEngine::PairKeyHash::operator()(const PairKey& k) const {
    // Hash on 12-decimal roundings; equality stays exact, so collisions only
    // cost probing.
    std::size_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    for (const auto* d : {&k.first, &k.second}) {
        for (const auto& [s, w] : d->weights()) {
            mix(static_cast<std::uint64_t>(s) + 0x9e37ull);
            mix(static_cast<std::uint64_t>(std::llround(w.to_double() * 1e12)));
        }
        mix(0xabcdull);
    }
    return h;
}

DistMetricEngine::DistMetricEngine(const Automaton& a, MetricParams params)
    : params_(std::move(params)) {
    if (!(params_.gamma > 0.0 && params_.gamma <= 1.0))
        throw std::invalid_argument("dist_metric: gamma must be in (0,1]");
    if (!(params_.tol > 0.0)) throw std::invalid_argument("dist_metric: tol must be positive");

    ext_ = bot_extend(a);

    if (params_.state_metric_cap) {
        // Kantorovich-lifted state metric dominates the distribution metric,
        // so it caps uppers; the tail bound accounts for stopping short of
        // the fixed point. Usable at gamma = 1 only on exact stabilization.
        int iters = params_.gamma < 1.0
                        ? std::max(64, static_cast<int>(std::ceil(std::log(1e-9) /
                                                                  std::log(params_.gamma))))
                        : 300;
        state_table_ = state_metric(ext_, params_.gamma, 1e-12, iters);
        if (state_table_->certified) {
            state_ground_.size = state_table_->states;
            state_ground_.entries = state_table_->entries;
            state_tail_ = state_table_->tail_bound;
            state_cap_usable_ = true;
        }
    }
}

const DistMetricEngine::CachedPolytope& DistMetricEngine::polytope(const Distribution& mu,
                                                                   ActionId act) {
    auto key = std::make_pair(mu, act);
    auto it = poly_cache_.find(key);
    if (it != poly_cache_.end()) return it->second;
    CachedPolytope cp;
    cp.poly = successor_polytope(ext_, mu, act);
    cp.grid = grid_points(cp.poly, params_.grid, params_.max_grid_points);
    return poly_cache_.emplace(std::move(key), std::move(cp)).first->second;
}

DistMetricEngine::Entry DistMetricEngine::evaluate(const Distribution& mu, const Distribution& nu,
                                                   int depth) {
    if (mu == nu) return Entry{0.0, 0.0, std::numeric_limits<int>::max(), true};

    PairKey key = nu < mu ? PairKey{nu, mu} : PairKey{mu, nu};
    auto it = memo_.find(key);
    if (it != memo_.end() && it->second.depth >= depth) return it->second;

    ++eval_count_;
    const double gamma = params_.gamma;
    const double dap = d_ap_exact(ext_, mu, nu).to_double();
    const int level = root_depth_ - depth;

    Entry out;
    out.depth = depth;
    out.lower = dap;
    out.upper = 1.0;
    out.horizon_free = false;

    // Certified caps, applied before any recursion so tight pairs never
    // expand: the total variation distance always dominates the metric, and
    // near the root so does the Kantorovich-lifted state metric (the lift is
    // an LP, so it is rationed by level).
    double tv = tv_distance(mu, nu).to_double();
    if (tv < out.upper) {
        out.upper = tv;
        out.horizon_free = true;
    }
    if (state_cap_usable_ && level <= 2) {
        double cap = lift_metric(state_ground_, mu, nu).value + state_tail_;
        if (cap < out.upper) {
            out.upper = cap;
            out.horizon_free = true;
        }
    }

    bool decided = dap >= gamma;
    if (decided) {
        // Successor terms are bounded by gamma, so the label distance
        // already decides this pair exactly.
        out.upper = std::min(out.upper, dap);
        out.horizon_free = true;
    }

    bool leaf = decided || depth <= 0 || eval_count_ > params_.max_evaluations ||
                out.upper - out.lower <= params_.tol;
    if (!leaf) {
        double best_lower_side = 0.0;
        double best_upper_side = 0.0;
        bool sides_horizon_free = true;
        for (ActionId act = 0; act < ext_.action_count(); ++act) {
            for (int side = 0; side < 2; ++side) {
                const auto& mover = polytope(side == 0 ? mu : nu, act);
                const auto& responder = polytope(side == 0 ? nu : mu, act);

                // Lower: sup restricted to grid probes, inner inf over grid
                // probes of recursive lowers.
                for (const auto& g : mover.grid.points) {
                    double row = std::numeric_limits<double>::infinity();
                    for (const auto& w : responder.grid.points) {
                        row = std::min(row, evaluate(g, w, depth - 1).lower);
                        if (row <= 0.0) break;
                    }
                    best_lower_side = std::max(best_lower_side, row);
                }

                // Upper: mixtures of best responses witness any mixture
                // source, so vertices alone bound the sup side; the inner
                // inf restricted to probes only over-approximates.
                for (const auto& v : mover.poly.vertices) {
                    double row = std::numeric_limits<double>::infinity();
                    bool row_free = false;
                    for (const auto& w : responder.grid.points) {
                        Entry child = evaluate(v, w, depth - 1);
                        if (child.upper < row - 1e-15) {
                            row = child.upper;
                            row_free = child.horizon_free;
                        } else if (child.upper <= row + 1e-15) {
                            row_free = row_free || child.horizon_free;
                        }
                    }
                    best_upper_side = std::max(best_upper_side, row);
                    sides_horizon_free = sides_horizon_free && row_free;
                }
            }
        }
        out.lower = std::max(dap, gamma * best_lower_side);
        double rec_upper = std::max(dap, gamma * best_upper_side);
        if (rec_upper < out.upper) {
            out.upper = rec_upper;
            out.horizon_free = sides_horizon_free;
        } else if (rec_upper <= out.upper) {
            out.horizon_free = out.horizon_free || sides_horizon_free;
        }
    }

    out.upper = std::max(0.0, std::min(out.upper, 1.0));
    out.lower = std::min(out.lower, out.upper);

    if (it != memo_.end()) {
        Entry merged = it->second;
        merged.lower = std::max(merged.lower, out.lower);
        if (out.upper < merged.upper) {
            merged.upper = out.upper;
            merged.horizon_free = out.horizon_free;
        } else if (out.upper <= merged.upper) {
            merged.horizon_free = merged.horizon_free || out.horizon_free;
        }
        merged.depth = std::max(merged.depth, depth);
        it->second = merged;
        return merged;
    }
    memo_.emplace(std::move(key), out);
    return out;
}

MetricInterval DistMetricEngine::distance(const Distribution& mu, const Distribution& nu) {
    const int budget = params_.effective_depth();
    MetricInterval iv;
    if (params_.gamma < 1.0) {
        root_depth_ = budget;
        Entry e = evaluate(mu, nu, budget);
        iv.lower = e.lower;
        iv.upper = e.upper;
        iv.certified = true;
        iv.stable = true;
        iv.depth = budget;
        return iv;
    }

    // gamma = 1: no horizon tail exists, so deepen until the lower iterates
    // stabilize or the interval closes, and report certification honestly.
    double previous = -1.0;
    Entry e;
    int used = 1;
    for (int k = 1;; k = std::min(k * 2, budget)) {
        root_depth_ = k;
        e = evaluate(mu, nu, k);
        used = k;
        if (e.upper - e.lower <= params_.tol) {
            iv.stable = true;
            break;
        }
        if (previous >= 0.0 && e.lower - previous < params_.tol) {
            iv.stable = true;
            break;
        }
        previous = e.lower;
        if (k == budget) break;
    }
    iv.lower = e.lower;
    iv.upper = e.upper;
    iv.certified = e.horizon_free;
    iv.depth = used;
    return iv;
}

MetricInterval dist_metric(const Automaton& a, const Distribution& mu, const Distribution& nu,
                           const MetricParams& params) {
    DistMetricEngine engine(a, params);
    return engine.distance(mu, nu);
}

Verdict approx_bisim(const Automaton& a, const Distribution& mu, const Distribution& nu,
                     double eps, const MetricParams& params) {
    if (eps < 0.0) throw std::invalid_argument("approx_bisim: eps must be nonnegative");
    MetricInterval iv = dist_metric(a, mu, nu, params);
    Verdict v;
    v.interval = iv;
    v.certified = iv.certified;
    if (iv.upper <= eps)
        v.kind = VerdictKind::Yes;
    else if (iv.lower > eps)
        v.kind = VerdictKind::No;
    else
        v.kind = VerdictKind::Unknown;
    return v;
}

Verdict bisimilar(const Automaton& a, const Distribution& mu, const Distribution& nu,
                  const MetricParams& params) {
    if (is_reactive(a).ok) {
        ReactiveView view = reactive_view(a);
        EquivalenceResult res = exact_equivalent(view, mu, view, nu);
        Verdict v;
        v.exact = true;
        v.certified = true;
        v.kind = res.equivalent ? VerdictKind::Yes : VerdictKind::No;
        v.interval.lower = res.equivalent ? 0.0 : std::fabs((res.value1 - res.value2).to_double());
        v.interval.upper = res.equivalent ? 0.0 : 1.0;
        v.interval.certified = true;
        v.interval.stable = true;
        if (!res.equivalent)
            v.note = "distinguishing word \"" + format_word(*view.base, res.word) + "\" accepted " +
                     res.value1.str() + " vs " + res.value2.str();
        else
            v.note = "decided by exact reactive language equivalence";
        return v;
    }

    MetricInterval iv = dist_metric(a, mu, nu, params);
    Verdict v;
    v.interval = iv;
    v.certified = iv.certified;
    if (iv.upper <= params.tol)
        v.kind = VerdictKind::Yes;
    else if (iv.lower > params.tol)
        v.kind = VerdictKind::No;
    else
        v.kind = VerdictKind::Unknown;
    return v;
}

const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::Yes: return "yes";
        case VerdictKind::No: return "no";
        default: return "unknown";
    }
}

}  // namespace pabisim

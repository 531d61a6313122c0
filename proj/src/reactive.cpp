#include "pabisim/reactive.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace pabisim {

namespace {

using Vec = std::vector<Rational>;

Vec to_dense(const Distribution& d, std::size_t n, std::size_t offset = 0,
             std::size_t total = 0) {
    Vec out(total ? total : n);
    for (const auto& [s, w] : d.weights()) out[offset + static_cast<std::size_t>(s)] = w;
    return out;
}

Vec apply_matrix(const Vec& x, const std::vector<std::vector<Rational>>& m) {
    const std::size_t n = m.size();
    Vec out(n);
    for (std::size_t s = 0; s < n; ++s) {
        if (x[s].is_zero()) continue;
        for (std::size_t t = 0; t < n; ++t) {
            if (m[s][t].is_zero()) continue;
            out[t] += x[s] * m[s][t];
        }
    }
    return out;
}

// Exact span bookkeeping: rows kept reduced with recorded pivot columns.
struct Span {
    std::vector<Vec> rows;
    std::vector<std::size_t> pivots;

    Vec reduce(Vec x) const {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (x[pivots[i]].is_zero()) continue;
            Rational f = x[pivots[i]];
            for (std::size_t j = 0; j < x.size(); ++j) x[j] -= f * rows[i][j];
        }
        return x;
    }

    // Returns true when x was independent (and is now part of the span).
    bool insert(const Vec& x) {
        Vec r = reduce(x);
        std::size_t pivot = r.size();
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (!r[j].is_zero()) {
                pivot = j;
                break;
            }
        }
        if (pivot == r.size()) return false;
        Rational inv = Rational(1) / r[pivot];
        for (auto& v : r) v *= inv;
        rows.push_back(std::move(r));
        pivots.push_back(pivot);
        return true;
    }
};

struct JointSpace {
    const ReactiveView* v1;
    const ReactiveView* v2;
    std::size_t n1, n2;
    std::vector<ActionId> act2_of;  // v1 action index -> v2 action index

    JointSpace(const ReactiveView& a, const ReactiveView& b) : v1(&a), v2(&b) {
        n1 = static_cast<std::size_t>(a.state_count());
        n2 = static_cast<std::size_t>(b.state_count());
        std::set<std::string> s1(a.base->actions.begin(), a.base->actions.end());
        std::set<std::string> s2(b.base->actions.begin(), b.base->actions.end());
        if (s1 != s2) {
            std::string diff;
            for (const auto& x : s1)
                if (!s2.count(x)) diff += " " + x;
            for (const auto& x : s2)
                if (!s1.count(x)) diff += " " + x;
            throw std::invalid_argument("action sets differ:" + diff);
        }
        act2_of.resize(a.base->actions.size());
        for (std::size_t i = 0; i < a.base->actions.size(); ++i)
            act2_of[i] = *b.base->action_index(a.base->actions[i]);
    }

    Vec seed(const Distribution& alpha1, const Distribution& alpha2) const {
        Vec x = to_dense(alpha1, n1, 0, n1 + n2);
        for (const auto& [s, w] : alpha2.weights()) x[n1 + static_cast<std::size_t>(s)] = w;
        return x;
    }

    Vec step(const Vec& x, ActionId act) const {
        Vec left(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n1));
        Vec right(x.begin() + static_cast<std::ptrdiff_t>(n1), x.end());
        Vec l2 = apply_matrix(left, v1->matrices[static_cast<std::size_t>(act)]);
        Vec r2 = apply_matrix(
            right, v2->matrices[static_cast<std::size_t>(act2_of[static_cast<std::size_t>(act)])]);
        Vec out(n1 + n2);
        std::copy(l2.begin(), l2.end(), out.begin());
        std::copy(r2.begin(), r2.end(), out.begin() + static_cast<std::ptrdiff_t>(n1));
        return out;
    }

    // Acceptance gap A1 - A2 of the word behind this joint vector.
    Rational gap(const Vec& x) const {
        Rational g;
        for (std::size_t s = 0; s < n1; ++s)
            if (v1->accepting[s]) g += x[s];
        for (std::size_t s = 0; s < n2; ++s)
            if (v2->accepting[s]) g -= x[n1 + s];
        return g;
    }

    std::pair<Rational, Rational> values(const Vec& x) const {
        Rational a, b;
        for (std::size_t s = 0; s < n1; ++s)
            if (v1->accepting[s]) a += x[s];
        for (std::size_t s = 0; s < n2; ++s)
            if (v2->accepting[s]) b += x[n1 + s];
        return {a, b};
    }
};

}  // namespace

std::string format_word(const Automaton& a, const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += " ";
        out += a.actions[static_cast<std::size_t>(w[i])];
    }
    return out;
}

Rational acceptance(const ReactiveView& v, const Distribution& alpha, const Word& word) {
    Vec x = to_dense(alpha, static_cast<std::size_t>(v.state_count()));
    for (ActionId act : word) {
        if (act < 0 || act >= v.action_count())
            throw std::invalid_argument("acceptance: undeclared action #" + std::to_string(act));
        x = apply_matrix(x, v.matrices[static_cast<std::size_t>(act)]);
    }
    Rational mass;
    for (std::size_t s = 0; s < x.size(); ++s)
        if (v.accepting[s]) mass += x[s];
    return mass;
}

EquivalenceResult exact_equivalent(const ReactiveView& v1, const Distribution& alpha1,
                                   const ReactiveView& v2, const Distribution& alpha2) {
    JointSpace js(v1, v2);
    Span span;
    std::deque<std::pair<Word, Vec>> queue;
    queue.emplace_back(Word{}, js.seed(alpha1, alpha2));

    while (!queue.empty()) {
        auto [word, x] = std::move(queue.front());
        queue.pop_front();
        if (!js.gap(x).is_zero()) {
            auto [a, b] = js.values(x);
            return {false, word, a, b};
        }
        if (!span.insert(x)) continue;
        for (ActionId act = 0; act < v1.action_count(); ++act) {
            Word next = word;
            next.push_back(act);
            queue.emplace_back(std::move(next), js.step(x, act));
        }
    }
    return {true, {}, Rational(0), Rational(0)};
}

EquivalenceResult exact_equivalent(const ReactiveView& v1, const ReactiveView& v2) {
    return exact_equivalent(v1, v1.base->initial, v2, v2.base->initial);
}

WordAcceptance word_acceptance(const ReactiveView& v, const Word& word) {
    return {word, acceptance(v, v.base->initial, word)};
}

HorizonGap equiv_metric_lower(const ReactiveView& v1, const ReactiveView& v2, int horizon) {
    if (horizon < 0) throw std::invalid_argument("equiv_metric_lower: negative horizon");
    JointSpace js(v1, v2);
    const std::size_t explored_cap = 2000000;

    HorizonGap out;
    Span span;
    std::vector<std::pair<Word, Vec>> level;
    level.emplace_back(Word{}, js.seed(v1.base->initial, v2.base->initial));
    std::size_t explored = 0;

    for (int depth = 0;; ++depth) {
        bool grew = false;
        for (const auto& [word, x] : level) {
            if (++explored > explored_cap)
                throw std::runtime_error("equiv_metric_lower: horizon explores too many words");
            Rational g = abs(js.gap(x));
            if (g > out.gap) {
                out.gap = g;
                out.witness = word;
            }
            grew = span.insert(x) || grew;
        }
        if (!grew && out.gap.is_zero()) {
            // The span is closed under every action and the acceptance gap
            // vanishes on a spanning set, hence on every longer word.
            out.saturated = true;
            break;
        }
        if (depth == horizon) break;
        std::vector<std::pair<Word, Vec>> next;
        next.reserve(level.size() * v1.base->actions.size());
        for (const auto& [word, x] : level) {
            for (ActionId act = 0; act < v1.action_count(); ++act) {
                Word w = word;
                w.push_back(act);
                next.emplace_back(std::move(w), js.step(x, act));
            }
        }
        level = std::move(next);
    }
    out.bound = out.gap.to_double();
    return out;
}

CrosscheckReport equiv_vs_bisim_crosscheck(const ReactiveView& v1, const ReactiveView& v2,
                                           MetricParams params) {
    if (params.gamma != 1.0)
        throw std::invalid_argument("equiv_vs_bisim_crosscheck: requires gamma = 1");

    CrosscheckReport report;
    report.equivalence = exact_equivalent(v1, v2);

    DirectSum ds = direct_sum(*v1.base, *v2.base);
    Distribution mu = ds.inject_left(v1.base->initial);
    Distribution nu = ds.inject_right(v2.base->initial);
    report.metric = dist_metric(ds.sum, mu, nu, params);
    report.bisim = bisimilar(ds.sum, mu, nu, params);

    int horizon = v1.state_count() + v2.state_count();
    report.horizon_gap = equiv_metric_lower(v1, v2, horizon);

    report.ordering_ok = report.horizon_gap.bound <= report.metric.upper + params.tol;
    report.qualitative_ok =
        report.equivalence.equivalent == (report.bisim.kind == VerdictKind::Yes);
    return report;
}

}  // namespace pabisim

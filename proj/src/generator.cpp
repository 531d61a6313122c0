#include "pabisim/generator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pabisim {

namespace {

// Random distribution over a support of `size` distinct states, with small
// integer weights normalized exactly.
Distribution random_distribution(Rng& rng, int state_count, int size) {
    std::vector<StateId> pool(static_cast<std::size_t>(state_count));
    for (int i = 0; i < state_count; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.below(i)]);

    size = std::max(1, std::min(size, state_count));
    std::vector<long> weights(static_cast<std::size_t>(size));
    long total = 0;
    for (auto& w : weights) {
        w = 1 + static_cast<long>(rng.below(9));
        total += w;
    }
    std::vector<std::pair<StateId, Rational>> entries;
    for (int i = 0; i < size; ++i)
        entries.emplace_back(pool[static_cast<std::size_t>(i)],
                             Rational(weights[static_cast<std::size_t>(i)], total));
    return Distribution::from_weights(entries);
}

}  // namespace

Automaton generate(const GeneratorConfig& config) {
    if (config.states < 1 || config.actions < 0 || config.ap < 0)
        throw std::invalid_argument("generate: invalid counts");
    bool input_enabled = config.input_enabled || config.reactive;
    if (input_enabled && config.actions > 0 && config.max_transitions < 1)
        throw std::invalid_argument("generate: input-enabled generation needs max_transitions >= 1");

    Rng rng(config.seed);
    Automaton a;
    a.name = "gen" + std::to_string(config.seed);
    for (int i = 0; i < config.ap; ++i) a.ap.push_back("p" + std::to_string(i));
    for (int i = 0; i < config.actions; ++i) a.actions.push_back("a" + std::to_string(i));
    for (int i = 0; i < config.states; ++i) a.states.push_back("s" + std::to_string(i));

    for (int i = 0; i < config.states; ++i) {
        LabelSet l;
        if (config.reactive) {
            if (rng.below(2) == 1)
                for (int b = 0; b < config.ap; ++b) l.set(static_cast<std::size_t>(b));
        } else {
            for (int b = 0; b < config.ap; ++b)
                if (rng.below(2) == 1) l.set(static_cast<std::size_t>(b));
        }
        a.labels.push_back(l);
    }

    for (StateId s = 0; s < a.state_count(); ++s) {
        for (ActionId act = 0; act < a.action_count(); ++act) {
            bool enabled = input_enabled || rng.unit() < config.density;
            if (!enabled) continue;
            int count = config.reactive
                            ? 1
                            : 1 + static_cast<int>(rng.below(
                                      static_cast<std::uint64_t>(config.max_transitions)));
            for (int k = 0; k < count; ++k) {
                int support = 1 + static_cast<int>(rng.below(
                                      static_cast<std::uint64_t>(config.max_support)));
                a.transitions.push_back(
                    {s, act, random_distribution(rng, config.states, support)});
            }
        }
    }

    a.initial = random_distribution(
        rng, config.states, 1 + static_cast<int>(rng.below(2)));
    return a;
}

Automaton perturb(const Automaton& a, const Rational& eps, std::uint64_t seed) {
    if (eps.is_negative()) throw std::invalid_argument("perturb: negative epsilon");
    Automaton out = a;
    if (eps.is_zero()) return out;

    Rng rng(seed);
    // Transitions with at least two support states and a donor able to give
    // the full epsilon.
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < out.transitions.size(); ++i) {
        const auto& d = out.transitions[i].target;
        if (d.support_size() < 2) continue;
        bool donor = false;
        for (const auto& [s, w] : d.weights())
            if (w >= eps) donor = true;
        if (donor) candidates.push_back(i);
    }
    if (candidates.empty())
        throw std::invalid_argument("perturb: epsilon " + eps.str() +
                                    " exceeds every transition's available mass");

    for (std::size_t idx : candidates) {
        if (rng.below(2) == 0) continue;
        Distribution& d = out.transitions[idx].target;
        auto support = d.support();
        std::vector<StateId> donors;
        for (StateId s : support)
            if (d.at(s) >= eps) donors.push_back(s);
        if (donors.empty()) continue;
        StateId from = donors[rng.below(donors.size())];
        StateId to = from;
        while (to == from) to = support[rng.below(support.size())];

        std::vector<std::pair<StateId, Rational>> entries;
        for (StateId s : support) {
            Rational w = d.at(s);
            if (s == from) w -= eps;
            if (s == to) w += eps;
            entries.emplace_back(s, w);
        }
        d = Distribution::from_weights(entries);
    }
    return out;
}

}  // namespace pabisim

#pragma once

#include <cstdint>

#include "pabisim/automaton.hpp"

namespace pabisim {

/// splitmix64: tiny deterministic generator, identical streams on every
/// platform for a given seed.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
    /// Uniform in [0, 1) with 53 bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct GeneratorConfig {
    int states = 4;
    int actions = 2;
    int ap = 2;
    int max_transitions = 2;  // distributions per (state, action) when enabled
    int max_support = 3;     // support size per successor distribution
    double density = 0.8;    // probability that a (state, action) pair is enabled
    std::uint64_t seed = 1;
    bool input_enabled = false;  // force >= 1 distribution per (state, action)
    bool reactive = false;       // exactly one per pair, labels empty/full
};

/// Deterministic from the seed: identical configs yield identical automata.
Automaton generate(const GeneratorConfig& config);

/// Moves `eps` of probability mass between two successor states of randomly
/// chosen transitions, keeping every distribution exactly normalized. An
/// `eps` of zero returns the automaton unchanged. Throws when no transition
/// has a donor state carrying at least `eps`.
Automaton perturb(const Automaton& a, const Rational& eps, std::uint64_t seed);

}  // namespace pabisim

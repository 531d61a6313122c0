#include "pabisim/distribution.hpp"

#include <stdexcept>

namespace pabisim {

Distribution Distribution::from_weights(const std::vector<std::pair<StateId, Rational>>& entries) {
    Distribution d;
    for (const auto& [s, w] : entries) {
        if (w.is_negative()) throw std::invalid_argument("negative distribution weight");
        if (w.is_zero()) continue;
        auto [it, inserted] = d.weights_.emplace(s, w);
        if (!inserted) it->second += w;
    }
    return d;
}

std::vector<StateId> Distribution::support() const {
    std::vector<StateId> out;
    out.reserve(weights_.size());
    for (const auto& [s, w] : weights_) out.push_back(s);
    return out;
}

Rational Distribution::total() const {
    Rational sum;
    for (const auto& [s, w] : weights_) sum += w;
    return sum;
}

void Distribution::accumulate(const Rational& w, const Distribution& other) {
    if (w.is_negative()) throw std::invalid_argument("negative mixture weight");
    if (w.is_zero()) return;
    for (const auto& [s, p] : other.weights_) {
        auto [it, inserted] = weights_.emplace(s, w * p);
        if (!inserted) it->second += w * p;
    }
}

Distribution convex_combine(const std::vector<std::pair<Rational, Distribution>>& parts) {
    Rational sum;
    for (const auto& [w, d] : parts) {
        if (w.is_negative())
            throw std::invalid_argument("convex_combine: negative weight " + w.str());
        sum += w;
    }
    if (sum != Rational(1)) {
        Rational deviation = sum - Rational(1);
        throw std::invalid_argument("convex_combine: weights sum to " + sum.str() +
                                    ", deviation " + deviation.str());
    }
    Distribution out;
    for (const auto& [w, d] : parts) out.accumulate(w, d);
    return out;
}

Rational tv_distance(const Distribution& mu, const Distribution& nu) {
    Rational l1;
    for (const auto& [s, w] : mu.weights()) l1 += abs(w - nu.at(s));
    for (const auto& [s, w] : nu.weights()) {
        if (!mu.contains(s)) l1 += w;
    }
    return l1 / Rational(2);
}

}  // namespace pabisim

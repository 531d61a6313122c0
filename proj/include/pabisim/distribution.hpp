#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pabisim/rational.hpp"

namespace pabisim {

using StateId = std::int32_t;
using ActionId = std::int32_t;

/// Support-sparse probability distribution over state indices. Only strictly
/// positive weights are stored; library operations always produce weights
/// summing exactly to 1, while freshly parsed or hand-built data may not
/// (validation reports the deviation).
class Distribution {
public:
    Distribution() = default;

    static Distribution dirac(StateId s) {
        Distribution d;
        d.weights_.emplace(s, Rational(1));
        return d;
    }

    /// Builds from (state, weight) pairs, accumulating duplicates and
    /// dropping zeros. Throws on negative weights.
    static Distribution from_weights(const std::vector<std::pair<StateId, Rational>>& entries);

    const std::map<StateId, Rational>& weights() const { return weights_; }
    bool empty() const { return weights_.empty(); }
    std::size_t support_size() const { return weights_.size(); }

    std::vector<StateId> support() const;

    Rational at(StateId s) const {
        auto it = weights_.find(s);
        return it == weights_.end() ? Rational(0) : it->second;
    }
    bool contains(StateId s) const { return weights_.count(s) > 0; }

    Rational total() const;
    bool is_normalized() const { return total() == Rational(1); }

    /// Adds w * other into this distribution (w >= 0), dropping zero results.
    void accumulate(const Rational& w, const Distribution& other);

    friend bool operator==(const Distribution& a, const Distribution& b) {
        return a.weights_ == b.weights_;
    }
    friend bool operator!=(const Distribution& a, const Distribution& b) { return !(a == b); }
    friend bool operator<(const Distribution& a, const Distribution& b) {
        return a.weights_ < b.weights_;
    }

private:
    std::map<StateId, Rational> weights_;
};

/// Exact convex combination; weight list must be nonnegative and sum to 1,
/// otherwise throws with the exact deviation.
Distribution convex_combine(const std::vector<std::pair<Rational, Distribution>>& parts);

/// Total variation distance, 1/2 * L1.
Rational tv_distance(const Distribution& mu, const Distribution& nu);

}  // namespace pabisim

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pabisim/dist_metric.hpp"
#include "pabisim/generator.hpp"
#include "pabisim/model_io.hpp"
#include "pabisim/state_relations.hpp"
#include "pabisim/transport.hpp"

using namespace pabisim;

namespace {

Automaton load(const std::string& name) {
    std::ifstream in(std::string(PABISIM_DATA_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

Automaton fig1_sum(const std::string& left = "fig1_left.pa") {
    return direct_sum(load(left), load("fig1_right.pa")).sum;
}

Distribution random_dirac(Rng& rng, const Automaton& a) {
    return Distribution::dirac(
        static_cast<StateId>(rng.below(static_cast<std::uint64_t>(a.state_count()))));
}

Distribution random_mix(Rng& rng, const Automaton& a) {
    int k = 1 + static_cast<int>(rng.below(3));
    std::vector<std::pair<StateId, Rational>> entries;
    long total = 0;
    std::vector<long> w(static_cast<std::size_t>(k));
    for (auto& x : w) {
        x = 1 + static_cast<long>(rng.below(6));
        total += x;
    }
    for (int i = 0; i < k; ++i)
        entries.emplace_back(
            static_cast<StateId>(rng.below(static_cast<std::uint64_t>(a.state_count()))),
            Rational(w[static_cast<std::size_t>(i)], total));
    return Distribution::from_weights(entries);
}

// Deterministic-per-action random automata: every polytope is a singleton,
// so interval evaluation is exact and property tests bite.
GeneratorConfig singleton_cfg(Rng& rng, int ap = 2) {
    GeneratorConfig cfg;
    cfg.states = 2 + static_cast<int>(rng.below(4));
    cfg.actions = 1 + static_cast<int>(rng.below(2));
    cfg.ap = ap;
    cfg.max_transitions = 1;
    cfg.input_enabled = true;
    cfg.seed = rng.next();
    return cfg;
}

MetricParams params09() {
    MetricParams p;
    p.gamma = 0.9;
    p.tol = 1e-6;
    return p;
}

}  // namespace

TEST_CASE("label distance on the running example") {
    Automaton a = load("fig1_left.pa");
    Distribution s1 = parse_distribution("s1", a), s2 = parse_distribution("s2", a);
    CHECK(d_ap(a, s1, s2) == 1.0);
    CHECK(d_ap(a, parse_distribution("s1:1/2,s2:1/2", a), s1) == 0.5);
    CHECK(d_ap(a, s1, s1) == 0.0);
}

TEST_CASE("half-sum and max-form label distances agree exactly") {
    Rng rng(515151);
    for (int round = 0; round < 100; ++round) {
        GeneratorConfig cfg;
        cfg.states = 2 + static_cast<int>(rng.below(5));
        cfg.ap = 1 + static_cast<int>(rng.below(3));
        cfg.seed = rng.next();
        Automaton a = generate(cfg);
        Distribution mu = random_mix(rng, a), nu = random_mix(rng, a);
        CHECK(d_ap(a, mu, nu) == d_ap_max_form(a, mu, nu));
    }
}

TEST_CASE("equal distributions sit at the zero point of the interval") {
    Automaton sum = fig1_sum();
    Distribution q = parse_distribution("L.q", sum);
    MetricInterval iv = dist_metric(sum, q, q, params09());
    CHECK(iv.lower == 0.0);
    CHECK(iv.upper == 0.0);
}

TEST_CASE("the unperturbed example roots are bisimilar with a tiny certified upper") {
    Automaton sum = fig1_sum();
    Distribution q = parse_distribution("L.q", sum);
    Distribution qp = parse_distribution("R.q'", sum);
    MetricInterval iv = dist_metric(sum, q, qp, params09());
    CHECK(iv.certified);
    CHECK(iv.upper <= 1e-6);
    CHECK(iv.lower == 0.0);

    Verdict v = bisimilar(sum, q, qp, params09());
    CHECK(v.kind == VerdictKind::Yes);
}

TEST_CASE("perturbed example: the interval pins gamma^2 * (eps1 - eps2) / 2") {
    // The class-mass gap of 0.5*(eps1 - eps2) = 0.025 first appears two
    // lifted steps below the roots and persists under the leaf self-loops,
    // so each recursion level discounts it once: the fixed point sits at
    // 0.025 * gamma^2. Polytopes are singletons here, making the recursion
    // exact up to the horizon tail.
    Automaton sum = fig1_sum("fig1_left_eps.pa");
    Distribution q = parse_distribution("L.q", sum);
    Distribution qp = parse_distribution("R.q'", sum);
    MetricInterval iv = dist_metric(sum, q, qp, params09());
    double expected = 0.025 * 0.9 * 0.9;
    CHECK(iv.lower <= expected + 1e-12);
    CHECK(iv.upper >= expected - 1e-12);
    CHECK(iv.upper - iv.lower <= 1e-9);
    CHECK(iv.certified);
}

TEST_CASE("depth-2 separation: r1 vs r' costs at least gamma/6") {
    Automaton sum = fig1_sum();
    Distribution r1 = parse_distribution("L.r1", sum);
    Distribution rp = parse_distribution("R.r'", sum);
    MetricInterval iv = dist_metric(sum, r1, rp, params09());
    // One step below, the label masses differ by |2/3 - 1/2| = 1/6.
    CHECK(iv.lower >= 0.9 / 6.0 - 1e-12);
    Verdict v = bisimilar(sum, r1, rp, params09());
    CHECK(v.kind == VerdictKind::No);
}

TEST_CASE("approximate bisimilarity thresholds around the perturbed value") {
    Automaton sum = fig1_sum("fig1_left_eps.pa");
    Distribution q = parse_distribution("L.q", sum);
    Distribution qp = parse_distribution("R.q'", sum);
    CHECK(approx_bisim(sum, q, qp, 0.02, params09()).kind == VerdictKind::No);
    CHECK(approx_bisim(sum, q, qp, 0.03, params09()).kind == VerdictKind::Yes);
    CHECK(approx_bisim(sum, q, q, 0.0, params09()).kind == VerdictKind::Yes);
}

TEST_CASE("threshold verdicts are monotone in eps") {
    Rng rng(616161);
    for (int round = 0; round < 100; ++round) {
        GeneratorConfig cfg = singleton_cfg(rng);
        Automaton a = generate(cfg);
        MetricParams shallow = params09();
        shallow.depth_cap = 10;
        DistMetricEngine engine(a, shallow);
        MetricInterval iv = engine.distance(random_mix(rng, a), random_mix(rng, a));
        double eps1 = rng.unit() * 0.5;
        double eps2 = eps1 + rng.unit() * 0.5;
        auto verdict = [&](double eps) {
            if (iv.upper <= eps) return VerdictKind::Yes;
            if (iv.lower > eps) return VerdictKind::No;
            return VerdictKind::Unknown;
        };
        if (verdict(eps1) == VerdictKind::Yes) CHECK(verdict(eps2) == VerdictKind::Yes);
        if (verdict(eps2) == VerdictKind::No) CHECK(verdict(eps1) == VerdictKind::No);
    }
}

TEST_CASE("pseudometric shape: zero diagonal, symmetry, triangle inequality") {
    Rng rng(717171);
    for (int round = 0; round < 25; ++round) {
        Automaton a = generate(singleton_cfg(rng));
        MetricParams p = params09();
        p.depth_cap = 12;
        DistMetricEngine engine(a, p);
        Distribution mu = random_mix(rng, a), nu = random_mix(rng, a), om = random_mix(rng, a);

        MetricInterval ab = engine.distance(mu, nu);
        MetricInterval ba = engine.distance(nu, mu);
        CHECK(ab.lower == ba.lower);
        CHECK(ab.upper == ba.upper);

        MetricInterval bc = engine.distance(nu, om);
        MetricInterval ac = engine.distance(mu, om);
        CHECK(ab.upper + bc.upper >= ac.lower - p.tol);

        MetricInterval self = engine.distance(mu, mu);
        CHECK(self.upper == 0.0);
    }
}

TEST_CASE("intervals dominate the label distance") {
    Rng rng(818181);
    for (int round = 0; round < 40; ++round) {
        GeneratorConfig cfg;
        cfg.states = 2 + static_cast<int>(rng.below(4));
        cfg.actions = 1 + static_cast<int>(rng.below(2));
        cfg.seed = rng.next();
        Automaton a = generate(cfg);
        MetricParams shallow = params09();
        shallow.depth_cap = 6;
        DistMetricEngine engine(a, shallow);
        Distribution mu = random_mix(rng, a), nu = random_mix(rng, a);
        MetricInterval iv = engine.distance(mu, nu);
        CHECK(iv.lower >= d_ap(engine.extended(), mu, nu) - 1e-12);
        CHECK(iv.lower <= iv.upper + 1e-12);
        CHECK(iv.upper <= 1.0);
    }
}

TEST_CASE("mixing bounded-distance pairs never increases the distance bound") {
    Rng rng(919191);
    for (int round = 0; round < 25; ++round) {
        Automaton a = generate(singleton_cfg(rng));
        MetricParams p = params09();
        p.depth_cap = 10;
        DistMetricEngine engine(a, p);
        Distribution mu1 = random_dirac(rng, a), nu1 = random_dirac(rng, a);
        Distribution mu2 = random_dirac(rng, a), nu2 = random_dirac(rng, a);
        double w_num = static_cast<double>(rng.below(4) + 1);
        Rational w(static_cast<long>(w_num), 5);
        Rational cw = Rational(1) - w;

        Distribution mu, nu;
        mu.accumulate(w, mu1);
        mu.accumulate(cw, mu2);
        nu.accumulate(w, nu1);
        nu.accumulate(cw, nu2);

        double cap = std::max(engine.distance(mu1, nu1).upper, engine.distance(mu2, nu2).upper);
        CHECK(engine.distance(mu, nu).upper <= cap + p.tol);
    }
}

TEST_CASE("state-partition lift never contradicts the metric verdict") {
    Rng rng(121212);
    for (int round = 0; round < 20; ++round) {
        GeneratorConfig cfg;
        cfg.states = 2 + static_cast<int>(rng.below(4));
        cfg.actions = 1;
        cfg.ap = 1;
        cfg.seed = rng.next();
        Automaton a = generate(cfg);
        Partition part = prob_bisim_partition(a);
        Distribution mu = random_mix(rng, a), nu = random_mix(rng, a);
        if (!lift_partition_check(part, mu, nu)) continue;
        Verdict v = bisimilar(a, mu, nu, params09());
        CHECK(v.kind != VerdictKind::No);
    }
}

TEST_CASE("uppers stay below the lifted state metric") {
    Rng rng(232323);
    for (int round = 0; round < 10; ++round) {
        GeneratorConfig cfg;
        cfg.states = 2 + static_cast<int>(rng.below(4));
        cfg.actions = 1 + static_cast<int>(rng.below(2));
        cfg.input_enabled = true;
        cfg.seed = rng.next();
        Automaton a = generate(cfg);
        MetricParams p = params09();
        p.depth_cap = 8;  // the dominance bound concerns the upper only
        DistMetricEngine engine(a, p);
        StateMetricTable t = state_metric(bot_extend(a), 0.9, 1e-12, 300);
        for (int k = 0; k < 5; ++k) {
            StateId s = static_cast<StateId>(rng.below(static_cast<std::uint64_t>(a.state_count())));
            StateId u = static_cast<StateId>(rng.below(static_cast<std::uint64_t>(a.state_count())));
            MetricInterval iv = engine.distance(Distribution::dirac(s), Distribution::dirac(u));
            CHECK(iv.upper <= t.at(s, u) + 1e-6);
        }
    }
}

TEST_CASE("reactive delegation decides exactly at gamma 1") {
    Automaton left = parse_model(
        "pa l\nap: f\nactions: a\nstate s0 label {}\nstate s1 label {f}\ninit: s0:1\n"
        "trans s0 a -> s0:1/2, s1:1/2\ntrans s1 a -> s1:1\n");
    MetricParams p;
    p.gamma = 1.0;
    p.tol = 1e-4;
    DirectSum ds = direct_sum(left, left);
    Distribution mu = ds.inject_left(left.initial);
    Distribution nu = ds.inject_right(left.initial);
    Verdict v = bisimilar(ds.sum, mu, nu, p);
    CHECK(v.kind == VerdictKind::Yes);
    CHECK(v.exact);
}

TEST_CASE("lower iterates never shrink with depth") {
    Automaton sum = fig1_sum("fig1_left_eps.pa");
    Distribution r1 = parse_distribution("L.r1", sum);
    Distribution rp = parse_distribution("R.r'", sum);
    double prev = -1.0;
    for (int depth : {1, 2, 4, 8, 16}) {
        MetricParams p = params09();
        p.depth_cap = depth;
        p.state_metric_cap = false;  // watch the bare iterates
        MetricInterval iv = dist_metric(sum, r1, rp, p);
        CHECK(iv.lower >= prev - 1e-15);
        prev = iv.lower;
    }
}

TEST_CASE("thresholds at or above 1 accept everything") {
    Automaton a = load("fig1_left.pa");
    Distribution s1 = parse_distribution("s1", a), s2 = parse_distribution("s2", a);
    // Even a label-distinct pair (distance 1) is within threshold 1.
    CHECK(approx_bisim(a, s1, s2, 1.0, params09()).kind == VerdictKind::Yes);
}

TEST_CASE("repeated queries are deterministic") {
    Automaton sum = fig1_sum("fig1_left_eps.pa");
    Distribution q = parse_distribution("L.q", sum);
    Distribution qp = parse_distribution("R.q'", sum);
    MetricInterval a = dist_metric(sum, q, qp, params09());
    MetricInterval b = dist_metric(sum, q, qp, params09());
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
}

TEST_CASE("parameter validation") {
    Automaton a = parse_model("pa t\nap:\nactions: a\nstate s label {}\ninit: s:1\n");
    MetricParams p;
    p.gamma = 0.0;
    CHECK_THROWS_AS(dist_metric(a, a.initial, a.initial, p), std::invalid_argument);
    p.gamma = 0.5;
    p.tol = -1.0;
    CHECK_THROWS_AS(dist_metric(a, a.initial, a.initial, p), std::invalid_argument);
    p.tol = 1e-6;
    CHECK_THROWS_AS(approx_bisim(a, a.initial, a.initial, -0.5, p), std::invalid_argument);
}

#include "pabisim/logic.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pabisim/model_io.hpp"

namespace pabisim {

FormulaPtr make_classes(std::vector<LabelSet> classes) {
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Classes;
    f->classes = std::move(classes);
    return f;
}

FormulaPtr make_plus(FormulaPtr child, Rational shift) {
    if (shift.is_negative() || shift > Rational(1))
        throw std::invalid_argument("formula shift must be in [0,1]");
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Plus;
    f->shift = std::move(shift);
    f->children = {std::move(child)};
    return f;
}

FormulaPtr make_neg(FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Neg;
    f->children = {std::move(child)};
    return f;
}

FormulaPtr make_conj(std::vector<FormulaPtr> fs) {
    if (fs.empty()) throw std::invalid_argument("conjunction must be nonempty");
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Conj;
    f->children = std::move(fs);
    return f;
}

FormulaPtr make_diamond(ActionId a, FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Diamond;
    f->action = a;
    f->children = {std::move(child)};
    return f;
}

namespace {

struct FormulaParser {
    const std::string& text;
    const Automaton& a;
    std::size_t pos = 0;

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(1, static_cast<int>(pos) + 1, msg);
    }
    char peek() {
        skip();
        return pos < text.size() ? text[pos] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string ident() {
        skip();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '.' || text[pos] == '\''))
            ++pos;
        if (pos == start) fail("expected identifier");
        return text.substr(start, pos - start);
    }

    Rational number() {
        skip();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/' ||
                text[pos] == '.'))
            ++pos;
        auto r = Rational::parse(text.substr(start, pos - start));
        if (!r) fail("malformed number");
        return *r;
    }

    LabelSet label_class() {
        expect('{');
        LabelSet cls;
        if (accept('}')) return cls;
        for (;;) {
            std::string prop = ident();
            bool found = false;
            for (std::size_t i = 0; i < a.ap.size(); ++i)
                if (a.ap[i] == prop) {
                    cls.set(i);
                    found = true;
                }
            if (!found) fail("undeclared proposition \"" + prop + "\"");
            if (accept('}')) return cls;
            expect(',');
        }
    }

    FormulaPtr formula() {
        char c = peek();
        if (c == 'B') {
            ++pos;
            expect('{');
            std::vector<LabelSet> classes;
            if (!accept('}')) {
                for (;;) {
                    classes.push_back(label_class());
                    if (accept('}')) break;
                    expect(',');
                }
            }
            return make_classes(std::move(classes));
        }
        if (c == '(') {
            ++pos;
            FormulaPtr child = formula();
            expect('+');
            Rational p = number();
            if (p.is_negative() || p > Rational(1)) fail("shift constant outside [0,1]");
            expect(')');
            return make_plus(std::move(child), std::move(p));
        }
        if (c == '!') {
            ++pos;
            return make_neg(formula());
        }
        if (c == '/') {
            ++pos;
            expect('\\');
            expect('[');
            std::vector<FormulaPtr> parts;
            for (;;) {
                parts.push_back(formula());
                if (accept(']')) break;
                expect(',');
            }
            return make_conj(std::move(parts));
        }
        if (c == '<') {
            ++pos;
            std::string act = ident();
            auto idx = a.action_index(act);
            if (!idx) fail("undeclared action \"" + act + "\"");
            expect('>');
            return make_diamond(*idx, formula());
        }
        fail("expected formula");
    }
};

std::string format_class(LabelSet cls, const Automaton& a) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < a.ap.size(); ++i) {
        if (!cls.test(i)) continue;
        if (!first) out += ",";
        first = false;
        out += a.ap[i];
    }
    return out + "}";
}

}  // namespace

FormulaPtr parse_formula(const std::string& text, const Automaton& a) {
    FormulaParser p{text, a};
    FormulaPtr f = p.formula();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    return f;
}

std::string format_formula(const Formula& f, const Automaton& a) {
    switch (f.kind) {
        case Formula::Kind::Classes: {
            std::string out = "B{";
            for (std::size_t i = 0; i < f.classes.size(); ++i) {
                if (i) out += ",";
                out += format_class(f.classes[i], a);
            }
            return out + "}";
        }
        case Formula::Kind::Plus:
            return "(" + format_formula(*f.children[0], a) + " + " + f.shift.str() + ")";
        case Formula::Kind::Neg:
            return "!" + format_formula(*f.children[0], a);
        case Formula::Kind::Conj: {
            std::string out = "/\\[";
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                if (i) out += ",";
                out += format_formula(*f.children[i], a);
            }
            return out + "]";
        }
        case Formula::Kind::Diamond:
            return "<" + a.actions[static_cast<std::size_t>(f.action)] + ">" +
                   format_formula(*f.children[0], a);
    }
    return "";
}

LogicEvaluator::LogicEvaluator(const Automaton& a, MetricParams params)
    : base_(&a), params_(std::move(params)) {
    if (!(params_.gamma > 0.0 && params_.gamma <= 1.0))
        throw std::invalid_argument("logic: gamma must be in (0,1]");
    ext_ = bot_extend(a);
}

const LogicEvaluator::CachedPolytope& LogicEvaluator::polytope(const Distribution& mu,
                                                               ActionId act) {
    auto key = std::make_pair(mu, act);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    CachedPolytope cp;
    cp.poly = successor_polytope(ext_, mu, act);
    cp.grid = grid_points(cp.poly, params_.grid, params_.max_grid_points);
    return cache_.emplace(std::move(key), std::move(cp)).first->second;
}

EvalBounds LogicEvaluator::eval(const Formula& f, const Distribution& mu) {
    switch (f.kind) {
        case Formula::Kind::Classes: {
            Rational mass;
            for (const auto& cls : f.classes) mass += ext_.class_mass(mu, cls);
            double v = mass.to_double();
            return {v, v};
        }
        case Formula::Kind::Plus: {
            EvalBounds c = eval(*f.children[0], mu);
            double p = f.shift.to_double();
            return {std::min(c.lower + p, 1.0), std::min(c.upper + p, 1.0)};
        }
        case Formula::Kind::Neg: {
            EvalBounds c = eval(*f.children[0], mu);
            return {1.0 - c.upper, 1.0 - c.lower};
        }
        case Formula::Kind::Conj: {
            EvalBounds out{1.0, 1.0};
            for (const auto& child : f.children) {
                EvalBounds c = eval(*child, mu);
                out.lower = std::min(out.lower, c.lower);
                out.upper = std::min(out.upper, c.upper);
            }
            return out;
        }
        case Formula::Kind::Diamond: {
            const auto& cp = polytope(mu, f.action);
            double lo = 0.0;
            double hi = std::numeric_limits<double>::infinity();
            // Formula values are 1-Lipschitz under total variation, so the
            // sup over the whole polytope exceeds a probe max by at most the
            // grid cover radius. Halved densities give nested probe sets, so
            // taking the envelope keeps refinement monotone.
            for (int density = cp.grid.effective_density;;) {
                PolytopeGrid coarse;
                const PolytopeGrid& grid =
                    density == cp.grid.effective_density
                        ? cp.grid
                        : (coarse = grid_points(cp.poly, density, params_.max_grid_points), coarse);
                double max_lo = 0.0, max_hi = 0.0;
                for (const auto& point : grid.points) {
                    EvalBounds c = eval(*f.children[0], point);
                    max_lo = std::max(max_lo, c.lower);
                    max_hi = std::max(max_hi, c.upper);
                }
                lo = std::max(lo, max_lo);
                hi = std::min(hi, max_hi + grid.cover_radius);
                if (density == 1) break;
                density /= 2;
            }
            hi = std::min(1.0, std::max(hi, lo));
            double gamma = params_.gamma;
            return {gamma * lo, gamma * hi};
        }
    }
    return {0.0, 1.0};
}

double LogicEvaluator::separation(const Formula& f, const Distribution& mu,
                                  const Distribution& nu) {
    EvalBounds bm = eval(f, mu), bn = eval(f, nu);
    return std::max({bm.lower - bn.upper, bn.lower - bm.upper, 0.0});
}

EvalBounds eval_formula(const Formula& f, const Automaton& a, const Distribution& mu,
                        const MetricParams& params) {
    LogicEvaluator ev(a, params);
    return ev.eval(f, mu);
}

double logic_distance_lower(const Automaton& a, const Distribution& mu, const Distribution& nu,
                            const std::vector<FormulaPtr>& formulas, const MetricParams& params) {
    LogicEvaluator ev(a, params);
    double best = 0.0;
    for (const auto& f : formulas) best = std::max(best, ev.separation(*f, mu, nu));
    return best;
}

namespace {

// Class set maximizing the one-sided mass gap of (x, y): exactly the classes
// where x carries more mass.
FormulaPtr best_class_set(const Automaton& ext, const Distribution& x, const Distribution& y) {
    std::vector<LabelSet> picked;
    for (const auto& cls : ext.realized_label_classes()) {
        if ((ext.class_mass(x, cls) - ext.class_mass(y, cls)).is_positive()) picked.push_back(cls);
    }
    return make_classes(std::move(picked));
}

struct Searcher {
    LogicEvaluator& ev;
    const Automaton& ext;
    int grid_cap;
    std::map<std::tuple<Distribution, Distribution, int>, FormulaPtr> memo;

    std::vector<FormulaPtr> atoms(const Distribution& x, const Distribution& y) {
        std::vector<FormulaPtr> out;
        for (const auto& cls : ext.realized_label_classes()) out.push_back(make_classes({cls}));
        out.push_back(best_class_set(ext, x, y));
        out.push_back(best_class_set(ext, y, x));
        return out;
    }

    FormulaPtr best(const Distribution& x, const Distribution& y, int depth) {
        auto key = std::make_tuple(x, y, depth);
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        std::vector<FormulaPtr> candidates = atoms(x, y);
        if (depth >= 1) {
            for (ActionId act = 0; act < ext.action_count(); ++act) {
                SuccessorPolytope px = successor_polytope(ext, x, act);
                SuccessorPolytope py = successor_polytope(ext, y, act);
                auto gx = grid_points(px, 2, static_cast<std::size_t>(grid_cap));
                auto gy = grid_points(py, 2, static_cast<std::size_t>(grid_cap));
                for (const auto& xprime : gx.points) {
                    std::vector<FormulaPtr> responses;
                    for (const auto& omega : gy.points) {
                        FormulaPtr child = best(xprime, omega, depth - 1);
                        candidates.push_back(make_diamond(act, child));
                        responses.push_back(std::move(child));
                    }
                    if (responses.size() > 1) {
                        // Shift every response so it peaks at the same value
                        // on x', then conjoin: the adversary cannot dodge.
                        double p = 0.0;
                        std::vector<double> at_x(responses.size());
                        for (std::size_t i = 0; i < responses.size(); ++i) {
                            at_x[i] = ev.eval(*responses[i], xprime).lower;
                            p = std::max(p, at_x[i]);
                        }
                        std::vector<FormulaPtr> shifted;
                        for (std::size_t i = 0; i < responses.size(); ++i) {
                            double shift = std::max(0.0, std::min(1.0, p - at_x[i]));
                            shifted.push_back(
                                make_plus(responses[i], Rational::from_double_exact(shift)));
                        }
                        candidates.push_back(make_diamond(act, make_conj(std::move(shifted))));
                    }
                }
            }
        }

        FormulaPtr winner = candidates.front();
        double best_sep = ev.separation(*winner, x, y);
        for (std::size_t i = 1; i < candidates.size(); ++i) {
            double sep = ev.separation(*candidates[i], x, y);
            if (sep > best_sep + 1e-15) {
                best_sep = sep;
                winner = candidates[i];
            }
        }
        memo.emplace(std::move(key), winner);
        return winner;
    }
};

}  // namespace

SearchResult distinguishing_search(const Automaton& a, const Distribution& mu,
                                   const Distribution& nu, int depth, const MetricParams& params) {
    if (depth < 1) throw std::invalid_argument("distinguishing_search: depth must be >= 1");
    LogicEvaluator ev(a, params);
    Searcher search{ev, ev.extended(), 12, {}};
    FormulaPtr f = search.best(mu, nu, depth);
    return {f, ev.separation(*f, mu, nu)};
}

}  // namespace pabisim

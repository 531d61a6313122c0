#include "pabisim/automaton.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pabisim {

std::optional<StateId> Automaton::state_index(std::string_view name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == name) return static_cast<StateId>(i);
    return std::nullopt;
}

std::optional<ActionId> Automaton::action_index(std::string_view name) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i] == name) return static_cast<ActionId>(i);
    return std::nullopt;
}

std::vector<Distribution> Automaton::successors(StateId s, ActionId a) const {
    std::vector<Distribution> out;
    for (const auto& t : transitions) {
        if (t.source != s || t.action != a) continue;
        if (std::find(out.begin(), out.end(), t.target) == out.end()) out.push_back(t.target);
    }
    return out;
}

bool Automaton::enables(StateId s, ActionId a) const {
    for (const auto& t : transitions)
        if (t.source == s && t.action == a) return true;
    return false;
}

std::vector<LabelSet> Automaton::realized_label_classes() const {
    std::vector<LabelSet> out;
    for (const auto& l : labels)
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    return out;
}

Rational Automaton::class_mass(const Distribution& mu, LabelSet cls) const {
    Rational mass;
    for (const auto& [s, w] : mu.weights()) {
        auto idx = static_cast<std::size_t>(s);
        if (idx < labels.size() && labels[idx] == cls) mass += w;
    }
    return mass;
}

std::string Automaton::format_distribution(const Distribution& mu) const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [s, w] : mu.weights()) {
        if (!first) os << ",";
        first = false;
        auto idx = static_cast<std::size_t>(s);
        if (idx < states.size())
            os << states[idx];
        else
            os << "#" << s;
        os << ":" << w.str();
    }
    return os.str();
}

namespace {

void check_distribution(const Automaton& a, const Distribution& d, const std::string& where,
                        std::vector<std::string>& out) {
    for (const auto& [s, w] : d.weights()) {
        if (s < 0 || s >= a.state_count())
            out.push_back(where + ": mass on undeclared state #" + std::to_string(s));
        if (!w.is_positive())
            out.push_back(where + ": non-positive weight " + w.str());
    }
    Rational total = d.total();
    if (total != Rational(1)) {
        Rational deficit = Rational(1) - total;
        out.push_back(where + ": weights sum to " + total.str() + " (deficit " + deficit.str() +
                      ")");
    }
}

template <typename T>
void check_unique(const std::vector<T>& names, const std::string& what,
                  std::vector<std::string>& out) {
    std::set<T> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) out.push_back("duplicate " + what + " name \"" + n + "\"");
}

}  // namespace

std::vector<std::string> validate(const Automaton& a) {
    std::vector<std::string> out;
    check_unique(a.states, "state", out);
    check_unique(a.actions, "action", out);
    check_unique(a.ap, "proposition", out);
    if (a.ap.size() > LabelSet::max_props)
        out.push_back("more than " + std::to_string(LabelSet::max_props) +
                      " atomic propositions");
    if (a.labels.size() != a.states.size())
        out.push_back("label table has " + std::to_string(a.labels.size()) + " entries for " +
                      std::to_string(a.states.size()) + " states");
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        for (std::size_t b = a.ap.size(); b < LabelSet::max_props; ++b)
            if (a.labels[i].test(b))
                out.push_back("state " + a.states[i] + ": label uses undeclared proposition bit " +
                              std::to_string(b));
    }
    check_distribution(a, a.initial, "initial distribution", out);
    for (const auto& t : a.transitions) {
        std::string src = (t.source >= 0 && t.source < a.state_count())
                              ? a.states[static_cast<std::size_t>(t.source)]
                              : "#" + std::to_string(t.source);
        std::string act = (t.action >= 0 && t.action < a.action_count())
                              ? a.actions[static_cast<std::size_t>(t.action)]
                              : "#" + std::to_string(t.action);
        std::string where = "transition " + src + " --" + act + "->";
        if (t.source < 0 || t.source >= a.state_count())
            out.push_back(where + ": undeclared source state");
        if (t.action < 0 || t.action >= a.action_count())
            out.push_back(where + ": undeclared action");
        check_distribution(a, t.target, where, out);
    }
    return out;
}

ReactiveCheck is_reactive(const Automaton& a) {
    ReactiveCheck res;
    for (StateId s = 0; s < a.state_count(); ++s) {
        LabelSet l = a.label(s);
        if (!l.empty() && !l.is_full(a.ap.size())) {
            res.ok = false;
            res.state = s;
            res.reason = "state " + a.states[static_cast<std::size_t>(s)] +
                         " has a label that is neither empty nor the full AP set";
            return res;
        }
        for (ActionId act = 0; act < a.action_count(); ++act) {
            auto succ = a.successors(s, act);
            if (succ.empty()) {
                res.ok = false;
                res.state = s;
                res.action = act;
                res.reason = "state " + a.states[static_cast<std::size_t>(s)] +
                             " lacks action " + a.actions[static_cast<std::size_t>(act)];
                return res;
            }
            if (succ.size() > 1) {
                res.ok = false;
                res.state = s;
                res.action = act;
                res.reason = "state " + a.states[static_cast<std::size_t>(s)] + " has " +
                             std::to_string(succ.size()) + " distinct successors under action " +
                             a.actions[static_cast<std::size_t>(act)];
                return res;
            }
        }
    }
    res.ok = true;
    return res;
}

Automaton bot_extend(const Automaton& a) {
    std::size_t dead_bit = a.ap.size();
    bool reuse_dead = false;
    for (std::size_t i = 0; i < a.ap.size(); ++i) {
        if (a.ap[i] != "dead") continue;
        // A "dead" proposition is acceptable only as the residue of an
        // earlier extension, witnessed by a recognizable dead state: labeled
        // exactly {dead} and looping to itself under every action.
        LabelSet marker;
        marker.set(i);
        bool recognizable = false;
        for (StateId s = 0; s < a.state_count() && !recognizable; ++s) {
            if (a.label(s) != marker) continue;
            bool loops = true;
            for (ActionId act = 0; act < a.action_count(); ++act) {
                auto succ = a.successors(s, act);
                loops = loops && succ.size() == 1 && succ[0] == Distribution::dirac(s);
            }
            recognizable = loops;
        }
        if (!recognizable)
            throw std::invalid_argument(
                "bot_extend: proposition name \"dead\" already declared; rename it first");
        dead_bit = i;
        reuse_dead = true;
    }

    Automaton out = a;
    if (!reuse_dead) out.ap.push_back("dead");

    std::string bot_name = "bot";
    while (out.state_index(bot_name).has_value()) bot_name += "_";
    StateId bot = out.state_count();
    out.states.push_back(bot_name);
    LabelSet dead_label;
    dead_label.set(dead_bit);
    out.labels.push_back(dead_label);

    for (StateId s = 0; s < a.state_count(); ++s)
        for (ActionId act = 0; act < a.action_count(); ++act)
            if (!a.enables(s, act))
                out.transitions.push_back({s, act, Distribution::dirac(bot)});
    for (ActionId act = 0; act < a.action_count(); ++act)
        out.transitions.push_back({bot, act, Distribution::dirac(bot)});
    return out;
}

namespace {

Distribution remap(const Distribution& mu, const std::vector<StateId>& map) {
    std::vector<std::pair<StateId, Rational>> entries;
    for (const auto& [s, w] : mu.weights()) entries.emplace_back(map[static_cast<std::size_t>(s)], w);
    return Distribution::from_weights(entries);
}

}  // namespace

Distribution DirectSum::inject_left(const Distribution& mu) const { return remap(mu, left_map); }
Distribution DirectSum::inject_right(const Distribution& mu) const { return remap(mu, right_map); }

DirectSum direct_sum(const Automaton& a1, const Automaton& a2) {
    {
        std::set<std::string> s1(a1.actions.begin(), a1.actions.end());
        std::set<std::string> s2(a2.actions.begin(), a2.actions.end());
        if (s1 != s2) {
            std::string diff;
            for (const auto& x : s1)
                if (!s2.count(x)) diff += " " + x + "(left-only)";
            for (const auto& x : s2)
                if (!s1.count(x)) diff += " " + x + "(right-only)";
            throw std::invalid_argument("direct_sum: action sets differ:" + diff);
        }
        std::set<std::string> p1(a1.ap.begin(), a1.ap.end());
        std::set<std::string> p2(a2.ap.begin(), a2.ap.end());
        if (p1 != p2) throw std::invalid_argument("direct_sum: proposition universes differ");
    }

    DirectSum ds;
    Automaton& sum = ds.sum;
    sum.name = a1.name + "+" + a2.name;
    sum.ap = a1.ap;
    sum.actions = a1.actions;

    // a2's action ids and label bits are remapped onto a1's declaration order.
    std::vector<ActionId> act_map(a2.actions.size());
    for (std::size_t i = 0; i < a2.actions.size(); ++i)
        act_map[i] = *a1.action_index(a2.actions[i]);
    std::vector<std::size_t> ap_map(a2.ap.size());
    for (std::size_t i = 0; i < a2.ap.size(); ++i) {
        for (std::size_t j = 0; j < a1.ap.size(); ++j)
            if (a1.ap[j] == a2.ap[i]) ap_map[i] = j;
    }
    auto remap_label = [&](LabelSet l) {
        LabelSet out;
        for (std::size_t i = 0; i < a2.ap.size(); ++i)
            if (l.test(i)) out.set(ap_map[i]);
        return out;
    };

    ds.left_map.resize(a1.states.size());
    ds.right_map.resize(a2.states.size());
    for (std::size_t i = 0; i < a1.states.size(); ++i) {
        ds.left_map[i] = static_cast<StateId>(sum.states.size());
        sum.states.push_back("L." + a1.states[i]);
        sum.labels.push_back(a1.labels[i]);
    }
    for (std::size_t i = 0; i < a2.states.size(); ++i) {
        ds.right_map[i] = static_cast<StateId>(sum.states.size());
        sum.states.push_back("R." + a2.states[i]);
        sum.labels.push_back(remap_label(a2.labels[i]));
    }

    for (const auto& t : a1.transitions)
        sum.transitions.push_back(
            {ds.left_map[static_cast<std::size_t>(t.source)], t.action, ds.inject_left(t.target)});
    for (const auto& t : a2.transitions)
        sum.transitions.push_back({ds.right_map[static_cast<std::size_t>(t.source)],
                                   act_map[static_cast<std::size_t>(t.action)],
                                   ds.inject_right(t.target)});

    sum.initial = ds.inject_left(a1.initial);
    return ds;
}

Rational ReactiveView::accepting_mass(const Distribution& mu) const {
    Rational mass;
    for (const auto& [s, w] : mu.weights())
        if (accepting[static_cast<std::size_t>(s)]) mass += w;
    return mass;
}

ReactiveView reactive_view(const Automaton& a) {
    ReactiveCheck chk = is_reactive(a);
    if (!chk.ok) throw std::invalid_argument("reactive_view: automaton not reactive: " + chk.reason);

    ReactiveView v;
    v.base = &a;
    auto n = static_cast<std::size_t>(a.state_count());
    v.matrices.assign(a.actions.size(), std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)));
    for (ActionId act = 0; act < a.action_count(); ++act) {
        for (StateId s = 0; s < a.state_count(); ++s) {
            auto succ = a.successors(s, act);
            for (const auto& [t, w] : succ.front().weights())
                v.matrices[static_cast<std::size_t>(act)][static_cast<std::size_t>(s)]
                          [static_cast<std::size_t>(t)] = w;
        }
    }
    v.accepting.assign(n, false);
    for (StateId s = 0; s < a.state_count(); ++s)
        v.accepting[static_cast<std::size_t>(s)] = a.label(s).is_full(a.ap.size());
    return v;
}

}  // namespace pabisim

#include "pabisim/model_io.hpp"

#include <cctype>
#include <sstream>

namespace pabisim {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
}

struct LineLexer {
    const std::string& text;
    int line;
    std::size_t pos = 0;

    LineLexer(const std::string& t, int l) : text(t), line(l) {}

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    int col() const { return static_cast<int>(pos) + 1; }
    bool at_end() {
        skip_ws();
        return pos >= text.size() || text[pos] == '#';
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(line, col(), msg); }

    char peek_char() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    std::string ident() {
        skip_ws();
        if (pos >= text.size() || !ident_start(text[pos])) fail("expected identifier");
        std::size_t start = pos;
        while (pos < text.size() && ident_char(text[pos])) ++pos;
        return text.substr(start, pos - start);
    }

    Rational number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '/' ||
                text[pos] == '.'))
            ++pos;
        if (pos == start) fail("expected probability");
        auto r = Rational::parse(text.substr(start, pos - start));
        if (!r) {
            pos = start;
            fail("malformed probability \"" + text.substr(start) + "\"");
        }
        return *r;
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect_arrow() {
        skip_ws();
        if (pos + 1 >= text.size() || text[pos] != '-' || text[pos + 1] != '>')
            fail("expected '->'");
        pos += 2;
    }
    void expect_end() {
        if (!at_end()) fail("unexpected trailing input");
    }
    std::string rest_of_line() {
        skip_ws();
        std::size_t end = text.size();
        if (auto hash = text.find('#', pos); hash != std::string::npos) end = hash;
        while (end > pos && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
        return text.substr(pos, end - pos);
    }
};

// dist := IDENT [":" prob] ("," IDENT ":" prob)* ; a bare IDENT is Dirac.
std::vector<std::pair<std::string, Rational>> parse_dist_literal(LineLexer& lex) {
    std::vector<std::pair<std::string, Rational>> entries;
    std::string first = lex.ident();
    if (lex.peek_char() != ':') {
        entries.emplace_back(first, Rational(1));
        return entries;
    }
    lex.expect(':');
    entries.emplace_back(first, lex.number());
    while (lex.accept(',')) {
        std::string name = lex.ident();
        lex.expect(':');
        entries.emplace_back(name, lex.number());
    }
    return entries;
}

Distribution resolve_dist(const std::vector<std::pair<std::string, Rational>>& entries,
                          const Automaton& a, LineLexer& lex) {
    std::vector<std::pair<StateId, Rational>> resolved;
    for (const auto& [name, w] : entries) {
        auto idx = a.state_index(name);
        if (!idx) lex.fail("unknown state \"" + name + "\"");
        if (w.is_negative()) lex.fail("negative probability for state \"" + name + "\"");
        resolved.emplace_back(*idx, w);
    }
    return Distribution::from_weights(resolved);
}

}  // namespace

Automaton parse_model(const std::string& text, bool validate_result) {
    Automaton a;
    bool have_header = false, have_ap = false, have_actions = false, have_init = false;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        LineLexer lex(raw, lineno);
        if (lex.at_end()) continue;

        std::string keyword = lex.ident();
        if (keyword == "pa") {
            if (have_header) lex.fail("duplicate header");
            a.name = lex.rest_of_line();
            if (a.name.empty()) lex.fail("expected automaton name");
            have_header = true;
            continue;
        }
        if (!have_header) lex.fail("expected 'pa <name>' header before declarations");

        if (keyword == "ap") {
            lex.expect(':');
            if (have_ap) lex.fail("duplicate ap declaration");
            have_ap = true;
            while (!lex.at_end()) a.ap.push_back(lex.ident());
        } else if (keyword == "actions") {
            lex.expect(':');
            if (have_actions) lex.fail("duplicate actions declaration");
            have_actions = true;
            while (!lex.at_end()) a.actions.push_back(lex.ident());
        } else if (keyword == "state") {
            std::string name = lex.ident();
            if (a.state_index(name)) lex.fail("duplicate state declaration \"" + name + "\"");
            std::string kw = lex.ident();
            if (kw != "label") lex.fail("expected 'label'");
            lex.expect('{');
            LabelSet label;
            if (!lex.accept('}')) {
                for (;;) {
                    std::string prop = lex.ident();
                    bool found = false;
                    for (std::size_t i = 0; i < a.ap.size(); ++i)
                        if (a.ap[i] == prop) {
                            label.set(i);
                            found = true;
                        }
                    if (!found) lex.fail("undeclared proposition \"" + prop + "\"");
                    if (lex.accept('}')) break;
                    lex.expect(',');
                }
            }
            lex.expect_end();
            a.states.push_back(name);
            a.labels.push_back(label);
        } else if (keyword == "init") {
            lex.expect(':');
            if (have_init) lex.fail("duplicate init declaration");
            have_init = true;
            auto entries = parse_dist_literal(lex);
            lex.expect_end();
            a.initial = resolve_dist(entries, a, lex);
        } else if (keyword == "trans") {
            std::string src = lex.ident();
            auto sidx = a.state_index(src);
            if (!sidx) lex.fail("unknown state \"" + src + "\"");
            std::string act = lex.ident();
            auto aidx = a.action_index(act);
            if (!aidx) lex.fail("unknown action \"" + act + "\"");
            lex.expect_arrow();
            auto entries = parse_dist_literal(lex);
            lex.expect_end();
            a.transitions.push_back({*sidx, *aidx, resolve_dist(entries, a, lex)});
        } else {
            lex.fail("unknown keyword \"" + keyword + "\"");
        }
    }

    if (!have_header) throw ParseError(lineno + 1, 1, "empty model: missing 'pa <name>' header");

    if (validate_result) {
        auto violations = validate(a);
        if (!violations.empty()) {
            std::string msg = "model is not well-formed:";
            for (const auto& v : violations) msg += "\n  - " + v;
            throw ParseError(lineno, 1, msg);
        }
    }
    return a;
}

std::string serialize_model(const Automaton& a) {
    std::ostringstream os;
    os << "pa " << (a.name.empty() ? "unnamed" : a.name) << "\n";
    os << "ap:";
    for (const auto& p : a.ap) os << " " << p;
    os << "\n";
    os << "actions:";
    for (const auto& act : a.actions) os << " " << act;
    os << "\n";
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        os << "state " << a.states[i] << " label {";
        bool first = true;
        for (std::size_t b = 0; b < a.ap.size(); ++b) {
            if (!a.labels[i].test(b)) continue;
            if (!first) os << ",";
            first = false;
            os << a.ap[b];
        }
        os << "}\n";
    }
    os << "init: " << a.format_distribution(a.initial) << "\n";
    for (const auto& t : a.transitions) {
        os << "trans " << a.states[static_cast<std::size_t>(t.source)] << " "
           << a.actions[static_cast<std::size_t>(t.action)] << " -> "
           << a.format_distribution(t.target) << "\n";
    }
    return os.str();
}

Distribution parse_distribution(const std::string& text, const Automaton& a) {
    LineLexer lex(text, 1);
    auto entries = parse_dist_literal(lex);
    lex.expect_end();
    Distribution d = resolve_dist(entries, a, lex);
    if (!d.is_normalized())
        throw ParseError(1, 1, "distribution mass is " + d.total().str() + ", expected 1");
    return d;
}

}  // namespace pabisim

#include "pabisim/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pabisim/dist_metric.hpp"
#include "pabisim/generator.hpp"
#include "pabisim/logic.hpp"
#include "pabisim/model_io.hpp"
#include "pabisim/reactive.hpp"
#include "pabisim/state_relations.hpp"

namespace pabisim {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(12) << v;
    return os.str();
}

std::string fmt(const Rational& r) { return r.str() + " (" + fmt(r.to_double()) + ")"; }

Automaton load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

Rational parse_rational_arg(const std::string& text, const std::string& what) {
    auto r = Rational::parse(text);
    if (!r) throw std::runtime_error("malformed " + what + " \"" + text + "\"");
    return *r;
}

json interval_json(const MetricInterval& iv) {
    return json{{"lower", iv.lower},
                {"upper", iv.upper},
                {"certified", iv.certified},
                {"stable", iv.stable},
                {"depth", iv.depth}};
}

void emit(std::ostream& out, bool as_json, const json& report, const std::string& text) {
    if (as_json)
        out << report.dump(2) << "\n";
    else
        out << text;
}

struct MetricOptions {
    double gamma = 0.9;
    double tol = 1e-6;
    int depth = 0;
    int grid = 4;

    MetricParams params() const {
        MetricParams p;
        p.gamma = gamma;
        p.tol = tol;
        p.depth_cap = depth;
        p.grid = grid;
        return p;
    }
    void attach(CLI::App* cmd, bool required_gamma = false) {
        auto* g = cmd->add_option("--gamma", gamma, "discount factor in (0,1]");
        if (required_gamma) g->required();
        cmd->add_option("--tol", tol, "tolerance");
        cmd->add_option("--depth", depth, "recursion depth cap (0 = auto)");
        cmd->add_option("--grid", grid, "polytope probe density");
    }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"distribution-based bisimulation and equivalence checking for probabilistic automata"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    int exit_code = 0;

    // validate
    {
        auto* cmd = app.add_subcommand("validate", "check model well-formedness");
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file, "model file")->required();
        cmd->callback([&, file] {
            std::ifstream in(*file);
            if (!in) throw std::runtime_error("cannot open \"" + *file + "\"");
            std::ostringstream buf;
            buf << in.rdbuf();
            Automaton a = parse_model(buf.str(), false);
            auto violations = validate(a);
            json rep{{"tool", "pabisim"},
                     {"command", "validate"},
                     {"file", *file},
                     {"violations", violations}};
            std::ostringstream text;
            if (violations.empty()) {
                text << "ok\n";
            } else {
                for (const auto& v : violations) text << "violation: " << v << "\n";
                exit_code = 1;
            }
            emit(out, as_json, rep, text.str());
        });
    }

    // extend-bot
    {
        auto* cmd = app.add_subcommand("extend-bot", "print the input-enabled dead-state extension");
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file, "model file")->required();
        cmd->callback([&, file] {
            Automaton ext = bot_extend(load_model(*file));
            json rep{{"tool", "pabisim"}, {"command", "extend-bot"}, {"model", serialize_model(ext)}};
            emit(out, as_json, rep, serialize_model(ext));
        });
    }

    // sum
    {
        auto* cmd = app.add_subcommand("sum", "print the direct sum of two models");
        auto left = std::make_shared<std::string>(), right = std::make_shared<std::string>();
        cmd->add_option("left", *left, "left model")->required();
        cmd->add_option("right", *right, "right model")->required();
        cmd->callback([&, left, right] {
            Automaton a = load_model(*left), b = load_model(*right);
            DirectSum ds = direct_sum(a, b);
            json rep{{"tool", "pabisim"}, {"command", "sum"}, {"model", serialize_model(ds.sum)}};
            emit(out, as_json, rep, serialize_model(ds.sum));
        });
    }

    // state-bisim
    {
        auto* cmd = app.add_subcommand("state-bisim", "probabilistic bisimulation partition");
        auto file = std::make_shared<std::string>();
        cmd->add_option("file", *file, "model file")->required();
        cmd->callback([&, file] {
            Automaton a = load_model(*file);
            Partition p = prob_bisim_partition(a);
            json blocks = json::array();
            for (const auto& block : p.blocks) {
                json names = json::array();
                for (StateId s : block) names.push_back(a.states[static_cast<std::size_t>(s)]);
                blocks.push_back(names);
            }
            json rep{{"tool", "pabisim"}, {"command", "state-bisim"}, {"blocks", blocks}};
            emit(out, as_json, rep, p.describe(a) + "\n");
        });
    }

    // state-metric
    {
        auto* cmd = app.add_subcommand("state-metric", "state bisimulation metric table");
        auto file = std::make_shared<std::string>();
        auto opts = std::make_shared<MetricOptions>();
        opts->tol = 1e-9;
        cmd->add_option("file", *file, "model file")->required();
        cmd->add_option("--gamma", opts->gamma, "discount factor in (0,1]")->required();
        cmd->add_option("--tol", opts->tol, "iteration stop tolerance");
        cmd->callback([&, file, opts] {
            Automaton a = load_model(*file);
            StateMetricTable t = state_metric(a, opts->gamma, opts->tol);
            std::ostringstream text;
            json entries = json::array();
            for (StateId s = 0; s < a.state_count(); ++s)
                for (StateId u = s + 1; u < a.state_count(); ++u) {
                    text << a.states[static_cast<std::size_t>(s)] << " "
                         << a.states[static_cast<std::size_t>(u)] << " " << fmt(t.at(s, u)) << "\n";
                    entries.push_back({{"s", a.states[static_cast<std::size_t>(s)]},
                                       {"t", a.states[static_cast<std::size_t>(u)]},
                                       {"value", t.at(s, u)}});
                }
            text << "iterations " << t.iterations << " converged "
                 << (t.converged ? "true" : "false") << " certified "
                 << (t.certified ? "true" : "false") << "\n";
            json rep{{"tool", "pabisim"},          {"command", "state-metric"},
                     {"gamma", t.gamma},           {"entries", entries},
                     {"iterations", t.iterations}, {"converged", t.converged},
                     {"certified", t.certified},   {"tail_bound", t.tail_bound}};
            emit(out, as_json, rep, text.str());
        });
    }

    // dist-metric
    {
        auto* cmd = app.add_subcommand("dist-metric", "distribution bisimulation metric interval");
        auto file = std::make_shared<std::string>();
        auto mu_text = std::make_shared<std::string>(), nu_text = std::make_shared<std::string>();
        auto opts = std::make_shared<MetricOptions>();
        cmd->add_option("file", *file, "model file")->required();
        cmd->add_option("--mu", *mu_text, "first distribution")->required();
        cmd->add_option("--nu", *nu_text, "second distribution")->required();
        opts->attach(cmd, true);
        cmd->callback([&, file, mu_text, nu_text, opts] {
            Automaton a = load_model(*file);
            Distribution mu = parse_distribution(*mu_text, a);
            Distribution nu = parse_distribution(*nu_text, a);
            MetricInterval iv = dist_metric(a, mu, nu, opts->params());
            std::ostringstream text;
            text << "interval [" << fmt(iv.lower) << ", " << fmt(iv.upper) << "]\n"
                 << "certified " << (iv.certified ? "true" : "false") << " depth " << iv.depth
                 << "\n";
            json rep{{"tool", "pabisim"},
                     {"command", "dist-metric"},
                     {"mu", *mu_text},
                     {"nu", *nu_text},
                     {"gamma", opts->gamma},
                     {"interval", interval_json(iv)}};
            emit(out, as_json, rep, text.str());
        });
    }

    // bisim
    {
        auto* cmd = app.add_subcommand("bisim", "distribution bisimilarity verdict");
        auto file = std::make_shared<std::string>();
        auto mu_text = std::make_shared<std::string>(), nu_text = std::make_shared<std::string>();
        auto opts = std::make_shared<MetricOptions>();
        auto eps = std::make_shared<double>(-1.0);
        cmd->add_option("file", *file, "model file")->required();
        cmd->add_option("--mu", *mu_text, "first distribution")->required();
        cmd->add_option("--nu", *nu_text, "second distribution")->required();
        cmd->add_option("--eps", *eps, "approximate bisimilarity threshold");
        opts->attach(cmd);
        cmd->callback([&, file, mu_text, nu_text, opts, eps] {
            Automaton a = load_model(*file);
            Distribution mu = parse_distribution(*mu_text, a);
            Distribution nu = parse_distribution(*nu_text, a);
            Verdict v = *eps >= 0.0 ? approx_bisim(a, mu, nu, *eps, opts->params())
                                    : bisimilar(a, mu, nu, opts->params());
            std::ostringstream text;
            text << to_string(v.kind) << "\n";
            if (!v.exact)
                text << "interval [" << fmt(v.interval.lower) << ", " << fmt(v.interval.upper)
                     << "] certified " << (v.interval.certified ? "true" : "false") << "\n";
            if (!v.note.empty()) text << v.note << "\n";
            json rep{{"tool", "pabisim"},
                     {"command", *eps >= 0.0 ? "approx-bisim" : "bisim"},
                     {"verdict", to_string(v.kind)},
                     {"exact", v.exact},
                     {"interval", interval_json(v.interval)},
                     {"note", v.note}};
            if (*eps >= 0.0) rep["eps"] = *eps;
            emit(out, as_json, rep, text.str());
            if (v.kind == VerdictKind::No) exit_code = 1;
        });
    }

    // equiv
    {
        auto* cmd = app.add_subcommand("equiv", "exact reactive language equivalence");
        auto left = std::make_shared<std::string>(), right = std::make_shared<std::string>();
        cmd->add_option("left", *left, "left model")->required();
        cmd->add_option("right", *right, "right model")->required();
        cmd->callback([&, left, right] {
            Automaton a = load_model(*left), b = load_model(*right);
            ReactiveView va = reactive_view(a), vb = reactive_view(b);
            EquivalenceResult res = exact_equivalent(va, vb);
            std::ostringstream text;
            json rep{{"tool", "pabisim"},
                     {"command", "equiv"},
                     {"equivalent", res.equivalent}};
            if (res.equivalent) {
                text << "equivalent\n";
            } else {
                text << "inequivalent\nword \"" << format_word(a, res.word) << "\"\n"
                     << "left  " << fmt(res.value1) << "\n"
                     << "right " << fmt(res.value2) << "\n";
                rep["word"] = format_word(a, res.word);
                rep["left_value"] = res.value1.str();
                rep["right_value"] = res.value2.str();
                exit_code = 1;
            }
            emit(out, as_json, rep, text.str());
        });
    }

    // equiv-metric
    {
        auto* cmd = app.add_subcommand("equiv-metric", "bounded-horizon equivalence metric lower bound");
        auto left = std::make_shared<std::string>(), right = std::make_shared<std::string>();
        auto horizon = std::make_shared<int>(0);
        cmd->add_option("left", *left, "left model")->required();
        cmd->add_option("right", *right, "right model")->required();
        cmd->add_option("--horizon", *horizon, "maximal word length")->required();
        cmd->callback([&, left, right, horizon] {
            Automaton a = load_model(*left), b = load_model(*right);
            ReactiveView va = reactive_view(a), vb = reactive_view(b);
            HorizonGap gap = equiv_metric_lower(va, vb, *horizon);
            std::ostringstream text;
            text << "bound " << fmt(gap.gap) << "\n"
                 << "witness \"" << format_word(a, gap.witness) << "\"\n"
                 << "saturated " << (gap.saturated ? "true" : "false") << "\n";
            json rep{{"tool", "pabisim"},
                     {"command", "equiv-metric"},
                     {"horizon", *horizon},
                     {"bound", gap.bound},
                     {"bound_exact", gap.gap.str()},
                     {"witness", format_word(a, gap.witness)},
                     {"saturated", gap.saturated}};
            emit(out, as_json, rep, text.str());
        });
    }

    // logic
    {
        auto* cmd = app.add_subcommand("logic", "evaluate a modal formula on a distribution");
        auto file = std::make_shared<std::string>();
        auto formula_text = std::make_shared<std::string>(), mu_text = std::make_shared<std::string>();
        auto opts = std::make_shared<MetricOptions>();
        cmd->add_option("file", *file, "model file")->required();
        cmd->add_option("--formula", *formula_text, "formula text")->required();
        cmd->add_option("--mu", *mu_text, "distribution")->required();
        opts->attach(cmd, true);
        cmd->callback([&, file, formula_text, mu_text, opts] {
            Automaton a = load_model(*file);
            FormulaPtr f = parse_formula(*formula_text, a);
            Distribution mu = parse_distribution(*mu_text, a);
            EvalBounds b = eval_formula(*f, a, mu, opts->params());
            std::ostringstream text;
            text << "value [" << fmt(b.lower) << ", " << fmt(b.upper) << "]\n";
            json rep{{"tool", "pabisim"},
                     {"command", "logic"},
                     {"formula", format_formula(*f, a)},
                     {"lower", b.lower},
                     {"upper", b.upper}};
            emit(out, as_json, rep, text.str());
        });
    }

    // gen
    {
        auto* cmd = app.add_subcommand("gen", "generate a random model");
        auto cfg = std::make_shared<GeneratorConfig>();
        cmd->add_option("--states", cfg->states, "state count");
        cmd->add_option("--actions", cfg->actions, "action count");
        cmd->add_option("--ap", cfg->ap, "atomic proposition count");
        cmd->add_option("--max-trans", cfg->max_transitions, "max distributions per (state, action)");
        cmd->add_option("--max-support", cfg->max_support, "max support per distribution");
        cmd->add_option("--density", cfg->density, "probability a (state, action) is enabled");
        cmd->add_option("--seed", cfg->seed, "random seed")->required();
        cmd->add_flag("--input-enabled", cfg->input_enabled, "force input-enabledness");
        cmd->add_flag("--reactive", cfg->reactive, "generate a reactive automaton");
        cmd->callback([&, cfg] {
            Automaton a = generate(*cfg);
            json rep{{"tool", "pabisim"}, {"command", "gen"}, {"model", serialize_model(a)}};
            emit(out, as_json, rep, serialize_model(a));
        });
    }

    // perturb
    {
        auto* cmd = app.add_subcommand("perturb", "shift transition mass by epsilon");
        auto file = std::make_shared<std::string>();
        auto eps_text = std::make_shared<std::string>();
        auto seed = std::make_shared<std::uint64_t>(1);
        cmd->add_option("file", *file, "model file")->required();
        cmd->add_option("--eps", *eps_text, "mass shift (rational or decimal)")->required();
        cmd->add_option("--seed", *seed, "random seed")->required();
        cmd->callback([&, file, eps_text, seed] {
            Automaton a = load_model(*file);
            Automaton p = perturb(a, parse_rational_arg(*eps_text, "epsilon"), *seed);
            json rep{{"tool", "pabisim"}, {"command", "perturb"}, {"model", serialize_model(p)}};
            emit(out, as_json, rep, serialize_model(p));
        });
    }

    std::vector<std::string> argv_owned = args;
    std::vector<const char*> argv;
    argv.push_back("pabisim");
    for (const auto& s : argv_owned) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

}  // namespace pabisim

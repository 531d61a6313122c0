#pragma once

#include <stdexcept>
#include <string>

#include "pabisim/automaton.hpp"

namespace pabisim {

struct ParseError : std::runtime_error {
    int line = 0, column = 0;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) +
                             ": " + msg),
          line(l),
          column(c) {}
};

/// Parses the `.pa` model text format (grammar in docs/model-format.md).
/// Throws ParseError on syntax errors; with `validate_result` set, semantic
/// violations found by validate() are reported as a ParseError listing them.
Automaton parse_model(const std::string& text, bool validate_result = true);

/// Canonical text form; parse(serialize(a)) reproduces `a` exactly,
/// including every rational value.
std::string serialize_model(const Automaton& a);

/// Distribution literal: "s0:1/2,s1:1/2", or a bare state name as Dirac
/// shorthand. Weights must sum to exactly 1.
Distribution parse_distribution(const std::string& text, const Automaton& a);

}  // namespace pabisim

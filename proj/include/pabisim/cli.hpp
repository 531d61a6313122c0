#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pabisim {

/// CLI entry point, callable in-process for tests. Exit code 0: success or
/// affirmative verdict; 1: a checked property is false (violations found,
/// not bisimilar, inequivalent); 2: usage, parse or semantic errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pabisim

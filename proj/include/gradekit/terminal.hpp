#pragma once

#include "gradekit/engine.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace gradekit {

/// Default command that opens a file with the desktop's associated program.
std::string platform_open_command();

/// Runs an effect: open/close hooks via the shell ("<command> <path>"),
/// finalize by regenerating every output from the log. Hook failures are
/// reported on `out` and otherwise ignored.
void run_effect(const Session& session, const Effect& effect, std::ostream& out);

/// Single-quotes `text` for /bin/sh.
std::string shell_quote(const std::string& text);

/// Interactive loop: prints a prompt per cell and reads one action per line
/// from `in`. End of input counts as quit. Returns when the session ends.
void run_terminal(Session& session, std::istream& in, std::ostream& out);

} // namespace gradekit

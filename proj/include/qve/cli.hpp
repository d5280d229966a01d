#pragma once

namespace qve {

// The qve-bench command line, callable in-process (used by the binary and by
// the tests).  Returns the process exit code:
//   0  solved / requested action completed
//   1  usage, parse, or validation error
//   2  solver breakdown
//   3  iteration budget exhausted
int cli_main(int argc, const char* const* argv);

} // namespace qve

#pragma once

namespace otplan {

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 input or validation failure, 2 internal invariant violation, 3 property
// check failure.
int run_cli(int argc, const char* const* argv);

}  // namespace otplan

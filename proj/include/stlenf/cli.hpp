#pragma once

namespace stlenf {

// Entry point for the command-line tool. Exit codes: 0 success,
// 1 property violated (monitor), 2 usage error, 3 runtime error.
int run_cli(int argc, const char* const* argv);

}  // namespace stlenf

#pragma once

#include <ostream>

namespace promptrouter {

/// Entry point of the `promptrouter` tool. Returns 0 on success, 1 on a usage
/// error (help text goes to `err`), 2 on a runtime error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace promptrouter

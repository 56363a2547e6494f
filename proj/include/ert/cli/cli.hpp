#pragma once

#include <iosfwd>

namespace ert::cli {

// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ert::cli

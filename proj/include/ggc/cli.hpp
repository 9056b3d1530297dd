#pragma once

#include <ostream>

namespace ggc::cli {

// Exit status: 0 when (weak) GGC holds or a command succeeded, 2 when the
// criteria are inconclusive, 1 on any error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ggc::cli

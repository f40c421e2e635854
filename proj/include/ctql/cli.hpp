#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace ctql::cli {

// Stable exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;      // bad config / unknown key / capacity
inline constexpr int kExitArtifact = 3;    // artifact load or shape mismatch
inline constexpr int kExitDivergence = 4;  // numerical divergence / non-convergence

/// Entry point behind the `ctql` binary; also callable in-process (tests pass
/// argument vectors and capture the streams).
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);
int run(int argc, const char* const* argv);

}  // namespace ctql::cli

#pragma once

namespace ptlearn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNumericError = 3;

// Entry point behind the ptlearn binary; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace ptlearn::cli

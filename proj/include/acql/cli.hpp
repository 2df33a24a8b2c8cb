#pragma once

namespace acql::cli {

// Entry point behind the acql binary; returns the process exit code.
// 0 = success, 2 = config error, 3 = unsupported formula, 4 = runtime failure.
int run(int argc, const char* const* argv);

}  // namespace acql::cli

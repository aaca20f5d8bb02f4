#pragma once

namespace cverr {

// Exit codes: 0 success (all checks pass), 1 usage error, 2 data error,
// 3 numerical error (rank deficiency), 4 verification failure.
int run_cli(int argc, const char* const* argv);

}  // namespace cverr

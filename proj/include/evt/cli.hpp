#pragma once

namespace evt::cli {

/// Runs one evt-cli subcommand. Returns 0 on success, 2 on a usage error
/// (bad flags, unknown ids) and 1 on a runtime failure.
int dispatch(int argc, char** argv);

}  // namespace evt::cli

#pragma once

// Command-line entry point (exposed as a function so tests can drive it).
//
// Subcommands: run, replicate, verify, schedule-info.
// Exit codes: 0 success; 1 configuration/usage error (the offending field is
// named); 2 verification-suite failure (failed checks are listed).

namespace falcon {

int cli_main(int argc, const char* const* argv);

}  // namespace falcon

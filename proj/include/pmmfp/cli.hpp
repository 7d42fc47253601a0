// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

namespace pmmfp {

// Parses argv and runs one subcommand (fit, bootstrap, simulate).
//
// Exit codes: 0 success, 2 finished but with warnings attached to the
// report, 1 runtime failure (data or numerical), 64 usage or configuration
// mistakes.
int run_cli(int argc, const char* const* argv);

}  // namespace pmmfp

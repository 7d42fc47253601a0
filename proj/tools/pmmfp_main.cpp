// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/cli.hpp"

int main(int argc, char** argv) { return pmmfp::run_cli(argc, argv); }

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace parastrat::cli {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitResource = 2;

/// Entry point behind the `parastrat` binary.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace parastrat::cli

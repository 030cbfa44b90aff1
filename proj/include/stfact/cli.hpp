// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stfact {

/// Entry point of the `stfact` tool. Returns the process exit code:
/// 0 success, 1 configuration, 2 input, 3 backend, 4 internal.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace stfact

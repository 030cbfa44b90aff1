// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/cli.hpp"

int main(int argc, char** argv) { return stfact::run_cli(argc, argv); }

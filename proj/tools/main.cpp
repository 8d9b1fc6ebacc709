// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The enerv Authors

#include <iostream>

#include "enerv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return enerv::cli::run(args, std::cout, std::cerr);
}

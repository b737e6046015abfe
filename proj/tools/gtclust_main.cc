#include <iostream>
#include <string>
#include <vector>

#include "gtclust/cli.h"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return gtclust::cli::main_entry(args, std::cout, std::cerr);
}

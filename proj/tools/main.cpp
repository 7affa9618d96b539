#include <string>
#include <vector>

#include "modecause/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return modecause::cli::run(args);
}

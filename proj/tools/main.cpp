#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const auto outcome = lumigeo::cli::run(args);
  if (outcome.result.is_null()) {
    std::cout << outcome.text;
  } else {
    if (!outcome.text.empty()) std::cerr << outcome.text;
    std::cout << outcome.result.dump() << '\n';
  }
  return outcome.exit_code;
}

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lumigeo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct Outcome {
  int exit_code = kExitOk;
  nlohmann::json result;  ///< the JSON line; null for help output
  std::string text;       ///< usage or help text for stderr / stdout
};

/// Parses and runs one command line (without the program name).
Outcome run(const std::vector<std::string>& args);

}  // namespace lumigeo::cli

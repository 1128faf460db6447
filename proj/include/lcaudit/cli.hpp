#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace lcaudit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

// Default output directory when neither --out nor the config sets one.
inline constexpr const char* kOutDirEnv = "LCAUDIT_OUT_DIR";

// args[0] is the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace lcaudit

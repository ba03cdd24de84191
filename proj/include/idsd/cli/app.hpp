#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "idsd/error.hpp"

namespace idsd::cli {

/// 2 parse and usage errors, 3 physics errors, 4 failed verification.
int exit_code_for(ErrorCode code) noexcept;

/// Entry point of the idsd tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace idsd::cli

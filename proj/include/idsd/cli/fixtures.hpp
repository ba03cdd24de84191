#pragma once

#include <string>
#include <vector>

namespace idsd::cli {

/// Outcome of one bundled example: a state, a trace and the closed-form
/// values it must reproduce.
struct FixtureResult {
  std::string name;
  bool passed = false;
  std::string detail;  // first failed expectation, or the error message
};

inline constexpr double kFixtureTol = 1e-10;

std::vector<FixtureResult> run_fixtures();

}  // namespace idsd::cli

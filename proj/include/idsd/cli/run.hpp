#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idsd/cli/dsl.hpp"
#include "idsd/schmidt.hpp"
#include "idsd/trace.hpp"
#include "json.hpp"

namespace idsd::cli {

/// Parsed --trace argument.
///   global
///   local:L            every label whose leading part is L
///   local:L:up,R:dn    explicit labels
///   fixed:L            label part 0 fixed to L
///   fixed:A=L          parts named A, B, C... or by index (fixed:1=up)
struct TraceMode {
  TraceKind kind = TraceKind::global;
  std::vector<BasisLabel> subspace;
  std::string fixed_value;
  std::size_t fixed_part = 0;
  std::string text = "global";
};

TraceMode parse_trace_mode(std::string_view text);

ReducedDensity apply_trace(const TwoParticleState& state, const TraceMode& mode);

struct OracleCheck {
  enum class Status { pass, fail, skipped };
  Status status = Status::skipped;
  double max_deviation = 0.0;
};

std::string_view to_string(OracleCheck::Status s) noexcept;

inline constexpr double kOracleTol = 1e-10;

struct RunOptions {
  TraceMode trace;
  bool oracle = true;
  double zero_tol = kDefaultZeroTol;
  ParamMap params;  // overrides of declared parameters
  /// Called as soon as a warning arises, before any later error.
  std::function<void(const std::string&)> on_warning;
};

struct ResultRecord {
  std::string input;  // canonical text of the spec
  Statistics statistics = Statistics::boson();
  std::vector<BasisLabel> basis;
  ParamMap parameters;
  TraceMode trace;
  std::vector<BasisLabel> reduced_basis;
  bool overlapping = false;
  SchmidtDecomposition sd;
  OracleCheck oracle;
  std::vector<std::string> warnings;
};

/// Compares the reduced spectrum against the labeled oracle. Fixed-observable
/// traces are compared with the local trace on the fixed value, which only
/// holds without overlap; overlapping inputs are skipped.
OracleCheck check_against_oracle(const StateSpec& spec, const BasisPtr& basis, const ParamMap& params,
                                 const TraceMode& mode, const ReducedDensity& rho);

ResultRecord run_decompose(const StateSpec& spec, const RunOptions& opts);

/// Rounds to 12 significant digits; -0 becomes 0.
double round12(double x);

nlohmann::json to_json(const ResultRecord& r);

/// to_json(r).dump(2) plus a trailing newline.
std::string to_json_text(const ResultRecord& r);

struct SweepRange {
  double start = 0.0;
  double end = 0.0;
  std::size_t steps = 0;

  double at(std::size_t k) const;
};

/// "start:end:steps"; start and end may be constant expressions such as 2*pi.
SweepRange parse_range(std::string_view text);

struct SweepRow {
  double value = 0.0;
  bool flagged = false;  // the decomposition failed at this point
  std::string message;
  double entropy = 0.0;
  std::size_t schmidt_number = 0;
  std::vector<double> spectrum;
  OracleCheck oracle;
};

struct SweepTable {
  std::string parameter;
  std::vector<SweepRow> rows;  // ordered by grid index
};

/// Names of parameters referenced by the state's coefficients.
std::vector<std::string> referenced_parameters(const StateSpec& spec);

/// Evaluates every grid point; rows that fail are flagged and the sweep goes
/// on. `threads` = 0 picks the hardware concurrency.
SweepTable run_sweep(const StateSpec& spec, const std::string& parameter, const SweepRange& range,
                     const RunOptions& opts, unsigned threads = 0);

/// Header "param,entropy_bits,schmidt_number,lambda_1..lambda_d".
std::string to_csv(const SweepTable& table);

}  // namespace idsd::cli

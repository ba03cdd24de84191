#include "idsd/cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "idsd/cli/fixtures.hpp"
#include "idsd/cli/run.hpp"

namespace idsd::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::invalid_argument:
      return 2;
    case ErrorCode::basis_mismatch:
    case ErrorCode::statistics_mismatch:
    case ErrorCode::unsupported_basis:
    case ErrorCode::degenerate_state:
    case ErrorCode::no_support:
    case ErrorCode::pauli_violation:
    case ErrorCode::zero_eigenvalue:
      return 3;
    case ErrorCode::decomposition_failure:
    case ErrorCode::verification_failure:
      return 4;
  }
  return 4;
}

namespace {

struct Options {
  std::string state;
  std::string trace = "global";
  std::string oracle = "on";
  std::string json;
  std::string csv;
  double zero_tol = kDefaultZeroTol;
  std::vector<std::string> params;
  std::string vary;
  std::string range;
  unsigned threads = 0;
};

// --state takes a path when one exists, otherwise the state text itself.
std::string read_state(const std::string& arg) {
  std::error_code ec;
  if (arg.find('|') == std::string::npos && std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read state file '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  return arg;
}

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::invalid_argument, "--param expects name=value, got '" + item + "'");
    out[item.substr(0, eq)] = evaluate_constant(item.substr(eq + 1));
  }
  return out;
}

RunOptions run_options(const Options& o) {
  RunOptions r;
  r.trace = parse_trace_mode(o.trace);
  r.oracle = o.oracle == "on";
  r.zero_tol = o.zero_tol;
  r.params = parse_params(o.params);
  return r;
}

// "-" or empty writes to `out`.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::invalid_argument, "cannot write '" + path + "'");
  f << text;
}

int do_decompose(const Options& o, std::ostream& out, std::ostream& err) {
  auto spec = parse_state(read_state(o.state));
  auto opts = run_options(o);
  opts.on_warning = [&err](const std::string& w) { err << "warning: " << w << "\n"; };
  auto record = run_decompose(spec, opts);
  emit(o.json, to_json_text(record), out);
  if (record.oracle.status == OracleCheck::Status::fail) {
    err << "error: oracle check failed, max deviation " << record.oracle.max_deviation << "\n";
    return 4;
  }
  return 0;
}

int do_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  auto spec = parse_state(read_state(o.state));
  auto opts = run_options(o);
  auto table = run_sweep(spec, o.vary, parse_range(o.range), opts, o.threads);
  int code = 0;
  for (const auto& row : table.rows) {
    if (row.flagged) err << "warning: " << o.vary << "=" << round12(row.value) << " flagged: " << row.message << "\n";
    if (row.oracle.status == OracleCheck::Status::fail) {
      err << "error: oracle check failed at " << o.vary << "=" << round12(row.value) << ", max deviation "
          << row.oracle.max_deviation << "\n";
      code = 4;
    }
  }
  emit(o.csv, to_csv(table), out);
  return code;
}

int do_check(const Options& o, std::ostream& out) {
  auto results = run_fixtures();
  std::size_t failed = 0;
  nlohmann::json report = nlohmann::json::array();
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) out << ": " << r.detail;
    out << "\n";
    failed += r.passed ? 0 : 1;
    report.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  out << results.size() - failed << "/" << results.size() << " fixtures passed\n";
  if (!o.json.empty()) emit(o.json, report.dump(2) + "\n", out);
  return failed ? 4 : 0;
}

void add_state_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--state", o.state, "State file or inline state text")->required();
  cmd->add_option("--trace", o.trace, "global | local:<labels> | fixed:<A=a>");
  cmd->add_option("--oracle", o.oracle, "Cross-check against the labeled oracle")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--zero-tol", o.zero_tol, "Eigenvalues below this count as zero")->check(CLI::PositiveNumber);
  cmd->add_option("--param", o.params, "Override a parameter, name=value");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schmidt decomposition of two identical particles", "idsd"};
  app.require_subcommand(1);
  Options o;

  auto* dec = app.add_subcommand("decompose", "Reduce, decompose and report one state as JSON");
  add_state_options(dec, o);
  dec->add_option("--json", o.json, "Output path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "Entropy and spectrum over a parameter grid as CSV");
  add_state_options(sweep, o);
  sweep->add_option("--vary", o.vary, "Parameter to sweep")->required();
  sweep->add_option("--range", o.range, "start:end:steps, e.g. 0:pi:101")->required();
  sweep->add_option("--csv", o.csv, "Output path (default stdout)");
  sweep->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* check = app.add_subcommand("check", "Run the bundled example fixtures");
  check->add_option("--json", o.json, "Also write the results as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (dec->parsed()) return do_decompose(o, out, err);
    if (sweep->parsed()) return do_sweep(o, out, err);
    return do_check(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace idsd::cli

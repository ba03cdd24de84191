#include "idsd/cli/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "idsd/oracle.hpp"

namespace idsd::cli {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_trace(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::invalid_argument, "bad trace '" + std::string(text) + "': " + why);
}

}  // namespace

TraceMode parse_trace_mode(std::string_view text) {
  TraceMode mode;
  mode.text = std::string(text);
  if (text == "global") return mode;
  if (text.starts_with("local:")) {
    mode.kind = TraceKind::local;
    for (const auto& item : split(text.substr(6), ',')) {
      if (item.empty()) bad_trace(text, "empty label");
      try {
        mode.subspace.push_back(parse_label(item));
      } catch (const Error& e) {
        bad_trace(text, e.what());
      }
    }
    return mode;
  }
  if (text.starts_with("fixed:")) {
    mode.kind = TraceKind::fixed_observable;
    std::string_view rest = text.substr(6);
    auto eq = rest.find('=');
    if (eq == std::string_view::npos) {
      mode.fixed_value = std::string(rest);
    } else {
      std::string_view part = rest.substr(0, eq);
      mode.fixed_value = std::string(rest.substr(eq + 1));
      if (part.size() == 1 && part[0] >= 'A' && part[0] <= 'Z') {
        mode.fixed_part = static_cast<std::size_t>(part[0] - 'A');
      } else if (!part.empty() && std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        mode.fixed_part = static_cast<std::size_t>(std::stoul(std::string(part)));
      } else {
        bad_trace(text, "observable must be a letter A, B, ... or a part index");
      }
    }
    if (mode.fixed_value.empty()) bad_trace(text, "missing value");
    return mode;
  }
  bad_trace(text, "expected global, local:<labels> or fixed:<A=a>");
}

ReducedDensity apply_trace(const TwoParticleState& state, const TraceMode& mode) {
  switch (mode.kind) {
    case TraceKind::global: return reduce_global(state);
    case TraceKind::local: return reduce_local(state, label_prefix_set(mode.subspace), mode.text);
    case TraceKind::fixed_observable: return reduce_fixed_observable(state, mode.fixed_value, mode.fixed_part);
  }
  throw Error(ErrorCode::invalid_argument, "unknown trace kind");
}

std::string_view to_string(OracleCheck::Status s) noexcept {
  switch (s) {
    case OracleCheck::Status::pass: return "pass";
    case OracleCheck::Status::fail: return "fail";
    case OracleCheck::Status::skipped: return "skipped";
  }
  return "unknown";
}

OracleCheck check_against_oracle(const StateSpec& spec, const BasisPtr& basis, const ParamMap& params,
                                 const TraceMode& mode, const ReducedDensity& rho) {
  OracleCheck out;
  if (mode.kind == TraceKind::fixed_observable && rho.overlapping) return out;
  auto labeled = oracle::symmetrize(product_terms(spec, basis, params), spec.statistics);
  Eigen::MatrixXcd reference;
  switch (mode.kind) {
    case TraceKind::global: reference = oracle::oracle_reduce_global(labeled); break;
    case TraceKind::local: reference = oracle::oracle_reduce_local(labeled, label_prefix_set(mode.subspace)); break;
    case TraceKind::fixed_observable:
      reference = oracle::oracle_reduce_local(labeled, observable_equals(mode.fixed_part, mode.fixed_value));
      break;
  }
  out.max_deviation = oracle::spectrum_deviation(oracle::spectrum(rho.matrix), oracle::spectrum(reference));
  out.status = out.max_deviation <= kOracleTol ? OracleCheck::Status::pass : OracleCheck::Status::fail;
  return out;
}

namespace {

struct Evaluation {
  ReducedDensity rho;
  SchmidtDecomposition sd;
  OracleCheck oracle;
};

Evaluation evaluate_point(const StateSpec& spec, const BasisPtr& basis, const ParamMap& params,
                          const RunOptions& opts, std::vector<std::string>* warnings) {
  auto state = build_state(spec, basis, params).normalized();
  auto rho = apply_trace(state, opts.trace);
  OracleCheck check;
  if (opts.oracle) {
    check = check_against_oracle(spec, basis, params, opts.trace, rho);
    if (warnings && check.status == OracleCheck::Status::skipped) {
      warnings->push_back("fixed-observable trace with support on several values of the fixed observable; oracle check skipped");
      if (opts.on_warning) opts.on_warning(warnings->back());
    }
  }
  auto sd = decompose(state, rho, opts.zero_tol);
  return {std::move(rho), std::move(sd), check};
}

}  // namespace

ResultRecord run_decompose(const StateSpec& spec, const RunOptions& opts) {
  auto basis = make_basis(spec);
  ResultRecord r;
  r.input = to_text(spec);
  r.statistics = spec.statistics;
  r.basis = basis->labels();
  r.parameters = effective_parameters(spec, opts.params);
  r.trace = opts.trace;
  auto ev = evaluate_point(spec, basis, r.parameters, opts, &r.warnings);
  r.reduced_basis = ev.rho.basis->labels();
  r.overlapping = ev.rho.overlapping;
  r.sd = std::move(ev.sd);
  r.oracle = ev.oracle;
  return r;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  double y = std::strtod(buf, nullptr);
  return y == 0.0 ? 0.0 : y;
}

namespace {

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({round12(z.real()), round12(z.imag())}); }

nlohmann::json ket_json(const Ket& k) {
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < k.dim(); ++i) arr.push_back(complex_json(k[i]));
  return arr;
}

nlohmann::json labels_json(const std::vector<BasisLabel>& labels) {
  auto arr = nlohmann::json::array();
  for (const auto& l : labels) arr.push_back(l.str());
  return arr;
}

}  // namespace

nlohmann::json to_json(const ResultRecord& r) {
  nlohmann::json j;
  j["input"] = r.input;
  j["statistics"] = r.statistics.name();
  j["basis"] = labels_json(r.basis);
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : r.parameters) params[k] = round12(v);
  j["parameters"] = params;
  j["trace"] = r.trace.text;
  j["trace_kind"] = to_string(r.trace.kind);
  j["reduced_basis"] = labels_json(r.reduced_basis);
  j["overlapping"] = r.overlapping;
  auto eig = nlohmann::json::array();
  for (double l : r.sd.spectrum) eig.push_back(round12(l));
  j["eigenvalues"] = eig;
  auto terms = nlohmann::json::array();
  for (const auto& t : r.sd.terms) {
    terms.push_back({{"lambda", round12(t.lambda)},
                     {"coefficient", complex_json(t.coefficient)},
                     {"ket", ket_json(t.ket)},
                     {"ket_tilde", ket_json(t.ket_tilde)}});
  }
  j["terms"] = terms;
  j["schmidt_number"] = r.sd.schmidt_number;
  j["entropy_bits"] = round12(r.sd.entropy);
  j["reconstruction_fidelity"] = round12(r.sd.reconstruction_fidelity);
  j["prefactor"] = complex_json(r.sd.prefactor);
  j["oracle_check"] = {{"status", std::string(to_string(r.oracle.status))},
                       {"max_deviation", round12(r.oracle.max_deviation)}};
  j["warnings"] = r.warnings;
  return j;
}

std::string to_json_text(const ResultRecord& r) { return to_json(r).dump(2) + "\n"; }

// ---------------------------------------------------------------- sweeps

double SweepRange::at(std::size_t k) const {
  if (steps <= 1 || k == 0) return start;
  if (k + 1 == steps) return end;
  return start + (end - start) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

SweepRange parse_range(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 3)
    throw Error(ErrorCode::invalid_argument, "range must be start:end:steps, got '" + std::string(text) + "'");
  SweepRange r;
  r.start = evaluate_constant(parts[0]);
  r.end = evaluate_constant(parts[1]);
  const std::string& n = parts[2];
  if (n.empty() || !std::all_of(n.begin(), n.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      std::stoul(n) < 1)
    throw Error(ErrorCode::invalid_argument, "range steps must be a positive integer, got '" + n + "'");
  r.steps = std::stoul(n);
  return r;
}

namespace {

void collect_params(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::param) out.insert(e.name);
  for (const auto& a : e.args) collect_params(*a, out);
}

}  // namespace

std::vector<std::string> referenced_parameters(const StateSpec& spec) {
  std::set<std::string> names;
  for (const auto& t : spec.terms) collect_params(*t.coefficient, names);
  return {names.begin(), names.end()};
}

SweepTable run_sweep(const StateSpec& spec, const std::string& parameter, const SweepRange& range,
                     const RunOptions& opts, unsigned threads) {
  auto used = referenced_parameters(spec);
  if (std::find(used.begin(), used.end(), parameter) == used.end())
    throw Error(ErrorCode::invalid_argument, "parameter '" + parameter + "' does not appear in any coefficient");
  if (range.steps == 0) throw Error(ErrorCode::invalid_argument, "empty sweep range");

  auto basis = make_basis(spec);
  const ParamMap base = effective_parameters(spec, opts.params);
  SweepTable table;
  table.parameter = parameter;
  table.rows.resize(range.steps);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < range.steps; k = next++) {
      SweepRow& row = table.rows[k];
      row.value = range.at(k);
      ParamMap params = base;
      params[parameter] = row.value;
      try {
        auto ev = evaluate_point(spec, basis, params, opts, nullptr);
        row.entropy = ev.sd.entropy;
        row.schmidt_number = ev.sd.schmidt_number;
        row.spectrum = ev.sd.spectrum;
        row.oracle = ev.oracle;
      } catch (const Error& e) {
        row.flagged = true;
        row.message = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, range.steps));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return table;
}

std::string to_csv(const SweepTable& table) {
  std::size_t d = 0;
  for (const auto& row : table.rows) d = std::max(d, row.spectrum.size());
  std::string out = "param,entropy_bits,schmidt_number";
  for (std::size_t i = 1; i <= d; ++i) out += ",lambda_" + std::to_string(i);
  out += "\n";
  char buf[40];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.12g", round12(x));
    return std::string(buf);
  };
  for (const auto& row : table.rows) {
    out += num(row.value);
    if (row.flagged) {
      out += ",nan,0";
      for (std::size_t i = 0; i < d; ++i) out += ",nan";
    } else {
      out += "," + num(row.entropy) + "," + std::to_string(row.schmidt_number);
      for (std::size_t i = 0; i < d; ++i) out += "," + num(i < row.spectrum.size() ? row.spectrum[i] : 0.0);
    }
    out += "\n";
  }
  return out;
}

}  // namespace idsd::cli

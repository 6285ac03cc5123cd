// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

// covdiff: solve, tabulate and verify the all-at-once diffusion covariance
// system with alpha-circulant preconditioners.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "covdiff/dense_oracle.hpp"
#include "covdiff/experiment.hpp"

namespace {

using covdiff::ExperimentConfig;
using covdiff::PrecondKind;
using nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kNotConverged = 1;
constexpr int kInvalid = 2;
constexpr int kVerifyFailed = 3;

struct Options {
  std::vector<int> nx;
  std::vector<int> ell;
  std::vector<double> alpha;
  std::vector<double> eta;
  std::vector<std::string> precond;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string inner = "mg";
  std::string mg_coarse = "rediscretized";
  double inner_tol = 1e-6;
  double amg_equiv = 80.0;
  int max_outer = 5000;
  std::string rhs = "normal";
  std::string out;
  std::string format = "csv";
  bool allow_nonconverged = false;
  bool full = false;
  int table_id = 0;
  int inner_block = 0;
};

void add_common(CLI::App* cmd, Options& o, bool lists) {
  auto* nx = cmd->add_option("--nx", o.nx, "Interior grid points per direction");
  auto* ell = cmd->add_option("--ell", o.ell, "Number of blocks (even, > 2)");
  auto* alpha = cmd->add_option("--alpha", o.alpha, "Circulant parameter");
  auto* eta = cmd->add_option("--eta", o.eta, "Inner budget factor");
  auto* pc = cmd->add_option("--precond", o.precond, "none|exact|nc1|nc2|sp");
  for (auto* opt : {nx, ell, alpha, eta, pc}) {
    if (lists)
      opt->delimiter(',');
    else
      opt->expected(1);
  }
  pc->check(CLI::IsMember({"none", "exact", "nc1", "nc2", "sp"}));
  cmd->add_option("--tol", o.tol, "Outer relative residual tolerance");
  cmd->add_option("--seed", o.seed, "Right-hand side seed");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--inner-precond", o.inner, "mg|jacobi|identity")
      ->check(CLI::IsMember({"mg", "jacobi", "identity"}));
  cmd->add_option("--mg-coarse", o.mg_coarse, "rediscretized|galerkin coarse operators")
      ->check(CLI::IsMember({"rediscretized", "galerkin"}));
  cmd->add_option("--inner-tol", o.inner_tol, "Inner relative tolerance for sp");
  cmd->add_option("--amg-matvec-equiv", o.amg_equiv, "Matvecs charged per AMG setup");
  cmd->add_option("--max-outer", o.max_outer, "Outer iteration cap");
  cmd->add_option("--rhs", o.rhs, "normal|uniform")->check(CLI::IsMember({"normal", "uniform"}));
  cmd->add_option("--out", o.out, "Write output to this path");
  cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
}

ExperimentConfig base_config(const Options& o) {
  ExperimentConfig c;
  if (!o.nx.empty()) c.nx = o.nx.front();
  if (!o.ell.empty()) c.ell = o.ell.front();
  if (!o.alpha.empty()) c.alpha = o.alpha.front();
  if (!o.eta.empty()) c.eta = o.eta.front();
  if (!o.precond.empty()) c.kind = covdiff::parse_precond_kind(o.precond.front());
  c.tol = o.tol;
  c.seed = o.seed;
  c.threads = o.threads;
  c.inner = covdiff::parse_inner_precond(o.inner);
  c.inner_tol = o.inner_tol;
  c.mg_coarse = o.mg_coarse == "galerkin" ? covdiff::CoarseOperator::galerkin
                                          : covdiff::CoarseOperator::rediscretized;
  c.amg_matvec_equiv = o.amg_equiv;
  c.max_outer = o.max_outer;
  c.rhs = o.rhs == "uniform" ? covdiff::RhsDistribution::uniform : covdiff::RhsDistribution::normal;
  return c;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw std::runtime_error("cannot open " + o.out);
  f << text;
}

std::string table_text(const covdiff::Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json obj;
      for (std::size_t i = 0; i < t.header.size(); ++i) obj[t.header[i]] = row[i];
      arr.push_back(obj);
    }
    os << arr.dump(2) << '\n';
  } else {
    t.write_csv(os);
  }
  return os.str();
}

std::string solve_text(const covdiff::ReportRow& r, const std::string& format) {
  const auto& c = r.config;
  if (format == "json") {
    ordered_json j;
    j["nx"] = c.nx;
    j["ell"] = c.ell;
    j["D"] = c.daley_length;
    j["alpha"] = c.alpha;
    j["eta"] = c.eta;
    j["precond"] = covdiff::to_string(c.kind);
    j["inner_precond"] = covdiff::to_string(c.inner);
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["outer_iterations"] = r.outer_iterations;
    j["converged"] = r.converged;
    j["matvecs"] = r.matvecs;
    j["mg_setups"] = r.mg_setups;
    j["vcycles"] = r.vcycles;
    j["amg_setups"] = r.nominal_amg_setups;
    j["amg_matvec_equiv"] = c.amg_matvec_equiv;
    j["equivalent_matvecs"] = r.equivalent_matvecs;
    j["final_residual"] = r.final_residual;
    j["allocation"] = r.allocation;
    j["residuals"] = r.residuals;
    return j.dump(2) + "\n";
  }
  covdiff::Table t;
  t.header = {"nx",        "ell",     "alpha",     "eta",     "precond",    "inner_precond",
              "tol",       "seed",    "outer",     "converged", "matvecs",  "mg_setups",
              "vcycles",   "amg_setups", "equivalent_matvecs", "final_residual"};
  using covdiff::format_double;
  t.rows.push_back({std::to_string(c.nx), std::to_string(c.ell), format_double(c.alpha),
                    format_double(c.eta), covdiff::to_string(c.kind), covdiff::to_string(c.inner),
                    format_double(c.tol), std::to_string(c.seed),
                    std::to_string(r.outer_iterations), r.converged ? "1" : "0",
                    std::to_string(r.matvecs), std::to_string(r.mg_setups),
                    std::to_string(r.vcycles), std::to_string(r.nominal_amg_setups),
                    format_double(r.equivalent_matvecs), format_double(r.final_residual)});
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

int run_verify(const Options& o) {
  const auto reports = covdiff::run_oracle_suite();
  bool ok = true;
  covdiff::Table t;
  t.header = {"check", "pass", "max_deviation", "detail"};
  for (const auto& r : reports) {
    ok = ok && r.pass;
    t.rows.push_back({r.check, r.pass ? "1" : "0", covdiff::format_double(r.max_deviation),
                      "\"" + r.detail + "\""});
  }
  emit(o, table_text(t, o.format));
  std::fprintf(stderr, "%zu checks, %s\n", reports.size(), ok ? "all passed" : "FAILURES");
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preconditioned all-at-once solves for diffusion covariance operators"};
  app.require_subcommand(1);

  Options solve_o, table_o, sweep_o, trace_o, verify_o;
  auto* solve = app.add_subcommand("solve", "Run one outer solve");
  add_common(solve, solve_o, false);
  solve->add_flag("--allow-nonconverged", solve_o.allow_nonconverged,
                  "Exit 0 even when the tolerance is not reached");

  auto* table = app.add_subcommand("table", "Reproduce one of the result tables (2-8)");
  add_common(table, table_o, true);
  table->add_option("id", table_o.table_id, "Table id")->required()->check(CLI::Range(2, 8));
  table->add_flag("--full", table_o.full, "Run the full size sweep");

  auto* sweep = app.add_subcommand("sweep-alpha", "Outer iterations against alpha");
  add_common(sweep, sweep_o, true);

  auto* trace = app.add_subcommand("trace", "Residual trace of one solve");
  add_common(trace, trace_o, false);
  trace->add_option("--inner-block", trace_o.inner_block,
                    "Trace the inner Chebyshev solve of block j (1-based) instead");
  trace->add_flag("--allow-nonconverged", trace_o.allow_nonconverged,
                  "Exit 0 even when the tolerance is not reached");

  auto* verify = app.add_subcommand("verify", "Run the dense oracle suite");
  verify->add_option("--out", verify_o.out, "Write output to this path");
  verify->add_option("--format", verify_o.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*verify) return run_verify(verify_o);

    if (*solve) {
      const auto cfg = base_config(solve_o);
      covdiff::validate(cfg);
      const auto row = covdiff::run_solve(cfg);
      emit(solve_o, solve_text(row, solve_o.format));
      return row.converged || solve_o.allow_nonconverged ? kOk : kNotConverged;
    }

    if (*table) {
      covdiff::TableOptions opts;
      opts.nx = table_o.nx;
      opts.ell = table_o.ell;
      opts.alpha = table_o.alpha;
      opts.eta = table_o.eta;
      opts.full = table_o.full;
      opts.base = base_config(table_o);
      if (table->count("--rhs")) opts.inner_rhs = opts.base.rhs;
      // Layout keys are swept by make_table; keep the base at its defaults.
      opts.base.nx = ExperimentConfig{}.nx;
      if (table_o.ell.size() == 1) opts.base.ell = table_o.ell.front();
      else opts.base.ell = ExperimentConfig{}.ell;
      covdiff::validate(opts.base);
      emit(table_o, table_text(covdiff::make_table(table_o.table_id, opts), table_o.format));
      return kOk;
    }

    if (*sweep) {
      auto base = base_config(sweep_o);
      std::vector<double> alphas = sweep_o.alpha;
      if (alphas.empty()) alphas = {1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
      std::vector<PrecondKind> kinds;
      for (const auto& s : sweep_o.precond) kinds.push_back(covdiff::parse_precond_kind(s));
      if (kinds.empty()) kinds = {PrecondKind::exact};
      base.alpha = alphas.front();
      base.kind = kinds.front();
      covdiff::validate(base);
      emit(sweep_o, table_text(covdiff::sweep_alpha(base, alphas, kinds), sweep_o.format));
      return kOk;
    }

    if (*trace) {
      const auto cfg = base_config(trace_o);
      covdiff::validate(cfg);
      std::optional<int> block;
      if (trace_o.inner_block > 0) block = trace_o.inner_block;
      const auto t = covdiff::trace_table(cfg, block);
      emit(trace_o, table_text(t, trace_o.format));
      if (block || trace_o.allow_nonconverged) return kOk;
      const double last = t.rows.empty() ? 1.0 : std::stod(t.rows.back()[1]);
      return last < cfg.tol ? kOk : kNotConverged;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNotConverged;
  }
  return kOk;
}

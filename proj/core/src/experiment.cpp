// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/experiment.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "covdiff/chebyshev.hpp"
#include "covdiff/spectral.hpp"

namespace covdiff {

namespace {

constexpr std::array<std::array<int, 10>, 10> kTable2 = {{
    {93, 34, 23, 18, 15, 15, 15, 18, 23, 34},
    {166, 62, 42, 33, 28, 26, 28, 33, 42, 62},
    {240, 89, 60, 47, 40, 38, 40, 47, 60, 89},
    {314, 116, 79, 62, 53, 49, 53, 62, 79, 116},
    {388, 143, 97, 76, 65, 61, 65, 76, 97, 143},
    {463, 170, 114, 90, 78, 72, 78, 90, 114, 170},
    {535, 196, 132, 105, 90, 84, 90, 105, 132, 196},
    {611, 222, 150, 119, 103, 95, 103, 119, 150, 222},
    {683, 248, 167, 133, 115, 107, 115, 133, 167, 248},
    {760, 274, 184, 147, 128, 118, 128, 147, 184, 274},
}};

constexpr std::array<std::array<int, 10>, 10> kTable5 = {{
    {2, 5, 4, 4, 4, 1, 4, 4, 4, 5},
    {2, 8, 6, 6, 6, 2, 6, 6, 6, 8},
    {3, 10, 10, 10, 8, 2, 8, 10, 10, 10},
    {3, 12, 12, 12, 10, 3, 10, 12, 12, 12},
    {4, 16, 16, 14, 12, 3, 12, 14, 16, 16},
    {5, 18, 18, 18, 14, 4, 14, 18, 18, 18},
    {5, 20, 20, 20, 16, 4, 16, 20, 20, 20},
    {6, 24, 22, 22, 18, 5, 18, 22, 22, 24},
    {6, 26, 26, 24, 22, 5, 22, 24, 26, 26},
    {7, 28, 28, 28, 24, 6, 24, 28, 28, 28},
}};

// {outer, matvecs} for NC1 eta = 0.1, 0.2, 0.3 then NC2 eta = 0.1, 0.2, 0.3.
using NcRow = std::array<std::pair<int, int>, 6>;

const std::map<int, NcRow> kTable3Alpha1 = {
    {50, {{{164, 9840}, {62, 6820}, {35, 5600}, {70, 3710}, {20, 2040}, {12, 1848}}}},
    {100, {{{140, 15400}, {56, 11760}, {33, 10230}, {47, 4794}, {16, 3248}, {11, 3355}}}},
    {200, {{{113, 23730}, {51, 20910}, {28, 17080}, {37, 7511}, {15, 6075}, {10, 6040}}}},
    {300, {{{103, 31930}, {46, 28060}, {27, 24570}, {34, 10370}, {14, 8456}, {10, 9050}}}},
    {400, {{{92, 37720}, {44, 35640}, {26, 31460}, {31, 12555}, {13, 10452}, {10, 12050}}}},
    {500, {{{87, 44370}, {40, 40400}, {25, 37750}, {30, 15150}, {12, 12060}, {10, 15040}}}},
};
const std::map<int, NcRow> kTable3Alpha001 = {
    {50, {{{38, 2280}, {13, 1430}, {7, 1120}, {27, 1512}, {10, 1050}, {7, 1085}}}},
    {100, {{{33, 3630}, {12, 2520}, {7, 2170}, {21, 2205}, {8, 1640}, {6, 1824}}}},
    {200, {{{31, 6510}, {11, 4510}, {6, 3660}, {19, 3895}, {8, 3240}, {6, 3636}}}},
    {300, {{{30, 9300}, {10, 6100}, {6, 5460}, {18, 5472}, {7, 4242}, {5, 4520}}}},
    {400, {{{29, 11890}, {10, 8100}, {6, 7260}, {18, 7290}, {7, 5628}, {5, 6030}}}},
    {500, {{{28, 14280}, {10, 10100}, {6, 9060}, {17, 8602}, {7, 7035}, {4, 6020}}}},
};
const std::map<int, NcRow> kTable4Alpha1 = {
    {6, {{{118, 7788}, {50, 6300}, {28, 5208}, {58, 3596}, {18, 2214}, {11, 2002}}}},
    {10, {{{135, 14850}, {57, 11970}, {33, 10230}, {48, 4896}, {17, 3451}, {11, 3355}}}},
    {16, {{{152, 26752}, {61, 20496}, {35, 17360}, {35, 5915}, {14, 4592}, {11, 5379}}}},
    {20, {{{163, 35860}, {64, 26880}, {35, 21700}, {31, 6603}, {14, 5768}, {11, 6721}}}},
    {30, {{{168, 55440}, {65, 40950}, {37, 34410}, {26, 8320}, {13, 8034}, {11, 10120}}}},
    {40, {{{176, 77440}, {66, 55440}, {37, 45880}, {27, 11313}, {12, 9852}, {11, 13387}}}},
    {50, {{{185, 101750}, {71, 74550}, {39, 60450}, {24, 12576}, {12, 12300}, {11, 16786}}}},
};
const std::map<int, NcRow> kTable4Alpha001 = {
    {6, {{{41, 2706}, {13, 1638}, {8, 1488}, {32, 1984}, {10, 1230}, {6, 1104}}}},
    {10, {{{34, 3740}, {12, 2520}, {7, 2170}, {21, 2205}, {8, 1640}, {6, 1824}}}},
    {16, {{{31, 5456}, {11, 3696}, {7, 3472}, {17, 2856}, {8, 2640}, {5, 2445}}}},
    {20, {{{30, 6600}, {11, 4620}, {7, 4340}, {15, 3135}, {8, 3272}, {4, 2440}}}},
    {30, {{{29, 9570}, {10, 6300}, {6, 5580}, {18, 5706}, {6, 3690}, {4, 3664}}}},
    {40, {{{28, 12320}, {10, 8400}, {6, 7440}, {20, 8420}, {6, 4938}, {4, 4884}}}},
    {50, {{{28, 15400}, {10, 10500}, {7, 10850}, {20, 10500}, {6, 6144}, {4, 6112}}}},
};

// {outer, amg, matvecs}
using SpCell = std::tuple<int, int, int>;
const std::map<int, std::pair<SpCell, SpCell>> kTable6 = {
    {50, {{9, 90, 1602}, {3, 30, 534}}},   {100, {{9, 90, 2394}, {2, 20, 508}}},
    {200, {{8, 80, 2128}, {2, 20, 516}}},  {300, {{8, 80, 2147}, {2, 20, 500}}},
    {400, {{8, 80, 2172}, {2, 20, 516}}},  {500, {{7, 70, 1862}, {2, 20, 508}}},
};
const std::map<int, std::pair<SpCell, SpCell>> kTable7 = {
    {6, {{8, 48, 1136}, {2, 12, 252}}},       {10, {{9, 90, 2398}, {2, 20, 508}}},
    {16, {{9, 144, 4032}, {2, 32, 896}}},     {20, {{10, 200, 5800}, {2, 40, 1144}}},
    {30, {{10, 300, 8876}, {2, 60, 1756}}},   {40, {{10, 400, 11924}, {2, 80, 2376}}},
    {50, {{11, 550, 16607}, {3, 150, 4467}}},
};
// nx -> {NC2 outer, NC2 matvecs}, {SP outer, amg, matvecs}
const std::map<int, std::pair<std::pair<int, int>, SpCell>> kTable8 = {
    {500, {{7, 7035}, {2, 20, 532}}},     {750, {{7, 10535}, {2, 20, 516}}},
    {1000, {{7, 14056}, {2, 20, 516}}},   {1250, {{7, 17535}, {2, 20, 532}}},
    {1500, {{6, 18030}, {2, 20, 516}}},
};

int eta_index(double eta) {
  for (int k = 0; k < 3; ++k)
    if (std::abs(eta - 0.1 * (k + 1)) < 1e-12) return k;
  return -1;
}

std::optional<ReferenceCell> nc_lookup(const std::map<int, NcRow>& m, int key, PrecondKind kind,
                                   double eta) {
  const int e = eta_index(eta);
  if (e < 0 || (kind != PrecondKind::nc1 && kind != PrecondKind::nc2)) return std::nullopt;
  const auto it = m.find(key);
  if (it == m.end()) return std::nullopt;
  const auto& [o, mv] = it->second[(kind == PrecondKind::nc1 ? 0 : 3) + e];
  return ReferenceCell{o, mv};
}

bool is_alpha(double a, double ref) { return std::abs(a - ref) <= 1e-12 * ref; }

std::string cell(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

std::vector<int> or_default(const std::vector<int>& v, std::vector<int> d) {
  return v.empty() ? d : v;
}
std::vector<double> or_default(const std::vector<double>& v, std::vector<double> d) {
  return v.empty() ? d : v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

PreconditionerSpec ExperimentConfig::spec() const {
  PreconditionerSpec s;
  s.kind = kind;
  s.alpha = alpha;
  s.eta = eta;
  s.inner = inner;
  s.inner_tol = inner_tol;
  s.mg.coarse = mg_coarse;
  s.threads = threads;
  return s;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.nx < 2) throw std::invalid_argument("nx must be at least 2");
  if (cfg.ell <= 2 || cfg.ell % 2 != 0) throw std::invalid_argument("ell must be even and > 2");
  if (!(cfg.daley_length > 0)) throw std::invalid_argument("Daley lengthscale must be positive");
  if (!(cfg.tol > 0 && cfg.tol < 1)) throw std::invalid_argument("tol must lie in (0, 1)");
  if (cfg.max_outer < 1) throw std::invalid_argument("max outer iterations must be positive");
  if (cfg.threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (!(cfg.amg_matvec_equiv >= 0)) throw std::invalid_argument("AMG equivalence must be >= 0");
  const DiffusionOperator op(cfg.nx, cfg.ell, cfg.daley_length);
  validate(cfg.spec(), op);
}

ReportRow run_solve(const ExperimentConfig& cfg) {
  validate(cfg);
  const DiffusionOperator op(cfg.nx, cfg.ell, cfg.daley_length);
  const BlockVector b = build_rhs(op.N(), op.ell(), cfg.seed, cfg.rhs);
  MatvecCounter counter;
  const SolveReport rep = solve_outer(op, cfg.spec(), b, cfg.tol, cfg.max_outer, counter);
  ReportRow row;
  row.config = cfg;
  row.outer_iterations = rep.outer_iterations;
  row.converged = rep.converged;
  row.matvecs = rep.counts.matvecs;
  row.mg_setups = rep.counts.mg_setups;
  row.vcycles = rep.counts.vcycles;
  row.nominal_amg_setups = rep.nominal_amg_setups;
  row.equivalent_matvecs =
      static_cast<double>(row.matvecs) + cfg.amg_matvec_equiv * static_cast<double>(row.nominal_amg_setups);
  row.final_residual = rep.final_residual;
  row.allocation = rep.allocation.per_block;
  row.residuals = rep.residuals;
  row.cumulative_matvecs = rep.cumulative_matvecs;
  return row;
}

void Table::write_csv(std::ostream& os) const {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

// ---------------------------------------------------------------- inner counts

namespace {

std::vector<int> first_below(const std::vector<double>& res, const std::vector<double>& tols) {
  std::vector<int> out;
  for (double t : tols) {
    int hit = -1;
    for (std::size_t k = 0; k < res.size(); ++k)
      if (res[k] < t) {
        hit = static_cast<int>(k);
        break;
      }
    out.push_back(hit);
  }
  return out;
}

double smallest(const std::vector<double>& v) {
  double m = 1.0;
  for (double x : v) m = std::min(m, x);
  return m;
}

}  // namespace

std::vector<std::vector<int>> inner_chebyshev_counts(const ExperimentConfig& cfg,
                                                     const std::vector<double>& tolerances) {
  const DiffusionOperator op(cfg.nx, cfg.ell, cfg.daley_length);
  const SpectralBounds bounds = extreme_eigenvalues(op);
  const auto lam = scaled_roots_of_unity(cfg.ell, cfg.alpha);
  const Eigen::VectorXcd b = random_vector(op.N(), cfg.seed, cfg.rhs).cast<cplx>();
  std::vector<std::vector<int>> cols;
  for (int j = 0; j < cfg.ell; ++j) {
    const ShiftedOperator B(op, lam[j]);
    ChebyshevConfig cc;
    cc.xi_lo = bounds.mu_min - lam[j];
    cc.xi_hi = bounds.mu_max - lam[j];
    cc.stop = StopRule::tolerance(smallest(tolerances), 100000);
    auto apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
      out.resize(in.size());
      B.apply(in.data(), out.data());
    };
    Eigen::VectorXcd x;
    const SolveTrace t = chebyshev_solve(apply, b, x, cc);
    cols.push_back(first_below(t.residuals, tolerances));
  }
  return cols;
}

std::vector<std::vector<int>> inner_sp_counts(const ExperimentConfig& cfg,
                                              const std::vector<double>& tolerances) {
  const DiffusionOperator op(cfg.nx, cfg.ell, cfg.daley_length);
  MGOptions mg;
  mg.coarse = cfg.mg_coarse;
  SaddlePointPreconditioner sp(op, cfg.alpha, 100000, smallest(tolerances) * 0.999, cfg.inner, mg);
  const Eigen::VectorXcd b = random_vector(op.N(), cfg.seed, cfg.rhs).cast<cplx>();
  std::vector<std::vector<int>> cols;
  for (int j = 0; j < cfg.ell; ++j) {
    SolveTrace t;
    sp.solve_block(j, b, nullptr, &t);
    cols.push_back(first_below(t.residuals, tolerances));
  }
  return cols;
}

// ---------------------------------------------------------------- reference values

std::optional<int> reference_table2(int tol_exponent, int column) {
  if (tol_exponent < 1 || tol_exponent > 10 || column < 0 || column >= 10) return std::nullopt;
  return kTable2[tol_exponent - 1][column];
}

std::optional<int> reference_table5(int tol_exponent, int column) {
  if (tol_exponent < 1 || tol_exponent > 10 || column < 0 || column >= 10) return std::nullopt;
  return kTable5[tol_exponent - 1][column];
}

std::optional<ReferenceCell> reference_table3(double alpha, int nx, PrecondKind kind, double eta) {
  if (is_alpha(alpha, 1.0)) return nc_lookup(kTable3Alpha1, nx, kind, eta);
  if (is_alpha(alpha, 0.01)) return nc_lookup(kTable3Alpha001, nx, kind, eta);
  return std::nullopt;
}

std::optional<ReferenceCell> reference_table4(double alpha, int ell, PrecondKind kind, double eta) {
  if (is_alpha(alpha, 1.0)) return nc_lookup(kTable4Alpha1, ell, kind, eta);
  if (is_alpha(alpha, 0.01)) return nc_lookup(kTable4Alpha001, ell, kind, eta);
  return std::nullopt;
}

namespace {
std::optional<ReferenceCell> sp_lookup(const std::map<int, std::pair<SpCell, SpCell>>& m, double alpha,
                                   int key) {
  const auto it = m.find(key);
  if (it == m.end()) return std::nullopt;
  const SpCell* c = nullptr;
  if (is_alpha(alpha, 1.0)) c = &it->second.first;
  if (is_alpha(alpha, 0.01)) c = &it->second.second;
  if (!c) return std::nullopt;
  return ReferenceCell{std::get<0>(*c), std::get<2>(*c), std::get<1>(*c)};
}
}  // namespace

std::optional<ReferenceCell> reference_table6(double alpha, int nx) { return sp_lookup(kTable6, alpha, nx); }
std::optional<ReferenceCell> reference_table7(double alpha, int ell) {
  return sp_lookup(kTable7, alpha, ell);
}

std::optional<ReferenceCell> reference_table8(int nx, PrecondKind kind) {
  const auto it = kTable8.find(nx);
  if (it == kTable8.end()) return std::nullopt;
  if (kind == PrecondKind::nc2) return ReferenceCell{it->second.first.first, it->second.first.second};
  if (kind == PrecondKind::sp) {
    const auto& [o, a, m] = it->second.second;
    return ReferenceCell{o, m, a};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- tables

namespace {

const std::vector<std::string> kRootNames = {"1",    "l2",  "l3",  "-conj_l3", "-conj_l2",
                                             "-1",   "-l2", "-l3", "conj_l3",  "conj_l2"};

Table inner_table(const ExperimentConfig& cfg, bool saddle) {
  std::vector<double> tols;
  for (int e = 10; e >= 1; --e) tols.push_back(std::pow(10.0, -e));
  const auto cols = saddle ? inner_sp_counts(cfg, tols) : inner_chebyshev_counts(cfg, tols);
  const bool reference = cfg.ell == 10 && cfg.nx == 100 && is_alpha(cfg.alpha, 1.0);
  Table t;
  t.header.push_back("eps");
  for (int j = 0; j < cfg.ell; ++j)
    t.header.push_back(cfg.ell == 10 ? kRootNames[j] : "lambda_" + std::to_string(j + 1));
  if (reference)
    for (int j = 0; j < cfg.ell; ++j) t.header.push_back("ref_" + kRootNames[j]);
  for (std::size_t r = 0; r < tols.size(); ++r) {
    const int e = 10 - static_cast<int>(r);
    std::vector<std::string> row{"1e-" + std::to_string(e)};
    for (int j = 0; j < cfg.ell; ++j) row.push_back(std::to_string(cols[j][r]));
    if (reference)
      for (int j = 0; j < cfg.ell; ++j)
        row.push_back(cell(saddle ? reference_table5(e, j) : reference_table2(e, j)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> solve_cells(const ReportRow& r) {
  return {std::to_string(r.outer_iterations), r.converged ? "1" : "0", std::to_string(r.matvecs),
          std::to_string(r.nominal_amg_setups), format_double(r.equivalent_matvecs),
          format_double(r.final_residual)};
}

const std::vector<std::string> kSolveHeader = {"outer", "converged", "matvecs", "amg_setups",
                                               "equivalent_matvecs", "final_residual"};

void append(std::vector<std::string>& a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
}

std::vector<std::string> reference_cells(const std::optional<ReferenceCell>& p, bool amg) {
  std::vector<std::string> out{p ? std::to_string(p->outer) : "",
                               p ? std::to_string(p->matvecs) : ""};
  if (amg) out.push_back(p && p->amg >= 0 ? std::to_string(p->amg) : "");
  return out;
}

}  // namespace

Table make_table(int id, const TableOptions& opts) {
  ExperimentConfig base = opts.base;
  switch (id) {
    case 2: {
      base.alpha = opts.alpha.empty() ? 1.0 : opts.alpha.front();
      if (!opts.nx.empty()) base.nx = opts.nx.front();
      if (!opts.ell.empty()) base.ell = opts.ell.front();
      base.rhs = opts.inner_rhs.value_or(RhsDistribution::uniform);
      return inner_table(base, false);
    }
    case 5: {
      base.alpha = opts.alpha.empty() ? 1.0 : opts.alpha.front();
      if (!opts.nx.empty()) base.nx = opts.nx.front();
      if (!opts.ell.empty()) base.ell = opts.ell.front();
      base.rhs = opts.inner_rhs.value_or(base.rhs);
      return inner_table(base, true);
    }
    case 3:
    case 4: {
      const bool by_nx = id == 3;
      const auto keys = by_nx ? or_default(opts.nx, opts.full ? std::vector<int>{50, 100, 200, 300, 400, 500}
                                                              : std::vector<int>{100})
                              : or_default(opts.ell, opts.full ? std::vector<int>{6, 10, 16, 20, 30, 40, 50}
                                                               : std::vector<int>{10});
      const auto alphas = or_default(opts.alpha, {1.0, 0.01});
      const auto etas = or_default(opts.eta, {0.1, 0.2, 0.3});
      Table t;
      t.header = {"alpha", by_nx ? "nx" : "ell", "precond", "eta"};
      append(t.header, kSolveHeader);
      append(t.header, {"ref_outer", "ref_matvecs"});
      for (double a : alphas)
        for (int key : keys)
          for (PrecondKind kind : {PrecondKind::nc1, PrecondKind::nc2})
            for (double eta : etas) {
              ExperimentConfig c = base;
              c.alpha = a;
              (by_nx ? c.nx : c.ell) = key;
              c.kind = kind;
              c.eta = eta;
              const ReportRow r = run_solve(c);
              std::vector<std::string> row{format_double(a), std::to_string(key), to_string(kind),
                                           format_double(eta)};
              append(row, solve_cells(r));
              append(row, reference_cells(by_nx ? reference_table3(a, key, kind, eta)
                                            : reference_table4(a, key, kind, eta),
                                      false));
              t.rows.push_back(std::move(row));
            }
      return t;
    }
    case 6:
    case 7: {
      const bool by_nx = id == 6;
      const auto keys = by_nx ? or_default(opts.nx, opts.full ? std::vector<int>{50, 100, 200, 300, 400, 500}
                                                              : std::vector<int>{100})
                              : or_default(opts.ell, opts.full ? std::vector<int>{6, 10, 16, 20, 30, 40, 50}
                                                               : std::vector<int>{10});
      const auto alphas = or_default(opts.alpha, {1.0, 0.01});
      const double eta = opts.eta.empty() ? 0.2 : opts.eta.front();
      Table t;
      t.header = {"alpha", by_nx ? "nx" : "ell", "precond", "eta"};
      append(t.header, kSolveHeader);
      append(t.header, {"ref_outer", "ref_matvecs", "nominal_amg_setups"});
      for (double a : alphas)
        for (int key : keys) {
          ExperimentConfig c = base;
          c.alpha = a;
          (by_nx ? c.nx : c.ell) = key;
          c.kind = PrecondKind::sp;
          c.eta = eta;
          const ReportRow r = run_solve(c);
          std::vector<std::string> row{format_double(a), std::to_string(key), "sp",
                                       format_double(eta)};
          append(row, solve_cells(r));
          const bool ref_eta = std::abs(eta - 0.2) < 1e-12;
          append(row, reference_cells(ref_eta ? (by_nx ? reference_table6(a, key) : reference_table7(a, key))
                                          : std::nullopt,
                                  true));
          t.rows.push_back(std::move(row));
        }
      return t;
    }
    case 8: {
      const auto keys =
          or_default(opts.nx, opts.full ? std::vector<int>{500, 750, 1000, 1250, 1500}
                                        : std::vector<int>{500});
      const double a = opts.alpha.empty() ? 0.01 : opts.alpha.front();
      const double eta = opts.eta.empty() ? 0.2 : opts.eta.front();
      const bool reference = is_alpha(a, 0.01) && std::abs(eta - 0.2) < 1e-12 && base.ell == 10;
      Table t;
      t.header = {"alpha", "nx", "precond", "eta"};
      append(t.header, kSolveHeader);
      append(t.header, {"ref_outer", "ref_matvecs", "nominal_amg_setups"});
      for (int nx : keys)
        for (PrecondKind kind : {PrecondKind::nc2, PrecondKind::sp}) {
          ExperimentConfig c = base;
          c.alpha = a;
          c.nx = nx;
          c.kind = kind;
          c.eta = eta;
          const ReportRow r = run_solve(c);
          std::vector<std::string> row{format_double(a), std::to_string(nx), to_string(kind),
                                       format_double(eta)};
          append(row, solve_cells(r));
          append(row, reference_cells(reference ? reference_table8(nx, kind) : std::nullopt, true));
          t.rows.push_back(std::move(row));
        }
      return t;
    }
    default: throw std::invalid_argument("unknown table id " + std::to_string(id));
  }
}

Table sweep_alpha(const ExperimentConfig& base, const std::vector<double>& alphas,
                  const std::vector<PrecondKind>& kinds) {
  Table t;
  t.header = {"alpha", "precond", "eta"};
  append(t.header, kSolveHeader);
  t.header.push_back("gamma_condition_number");
  for (PrecondKind kind : kinds)
    for (double a : alphas) {
      ExperimentConfig c = base;
      c.alpha = a;
      c.kind = kind;
      const ReportRow r = run_solve(c);
      std::vector<std::string> row{format_double(a), to_string(kind), format_double(c.eta)};
      append(row, solve_cells(r));
      row.push_back(format_double(gamma_condition_number(c.ell, a)));
      t.rows.push_back(std::move(row));
    }
  return t;
}

Table trace_table(const ExperimentConfig& cfg, std::optional<int> inner_block) {
  Table t;
  if (inner_block) {
    validate(cfg);
    const int j = *inner_block;
    if (j < 1 || j > cfg.ell) throw std::invalid_argument("inner block must lie in 1..ell");
    const DiffusionOperator op(cfg.nx, cfg.ell, cfg.daley_length);
    const SpectralBounds bounds = extreme_eigenvalues(op);
    const cplx lam = scaled_roots_of_unity(cfg.ell, cfg.alpha)[j - 1];
    const ShiftedOperator B(op, lam);
    ChebyshevConfig cc;
    cc.xi_lo = bounds.mu_min - lam;
    cc.xi_hi = bounds.mu_max - lam;
    cc.stop = StopRule::tolerance(cfg.tol, 100000);
    auto apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
      out.resize(in.size());
      B.apply(in.data(), out.data());
    };
    const Eigen::VectorXcd b = random_vector(op.N(), cfg.seed, cfg.rhs).cast<cplx>();
    Eigen::VectorXcd x;
    const SolveTrace tr = chebyshev_solve(apply, b, x, cc);
    const double sigma = convergence_factor_bound(bounds, lam);
    t.header = {"iteration", "residual", "bound", "matvecs"};
    for (std::size_t k = 0; k < tr.residuals.size(); ++k)
      t.rows.push_back({std::to_string(k), format_double(tr.residuals[k]),
                        format_double(std::pow(sigma, static_cast<double>(k))),
                        std::to_string(k)});
    return t;
  }
  const ReportRow r = run_solve(cfg);
  t.header = {"iteration", "residual", "matvecs", "equivalent_matvecs"};
  for (std::size_t k = 0; k < r.residuals.size(); ++k) {
    const std::int64_t mv = k < r.cumulative_matvecs.size() ? r.cumulative_matvecs[k] : r.matvecs;
    const double amg = cfg.kind == PrecondKind::sp ? static_cast<double>(cfg.ell) * k : 0.0;
    t.rows.push_back({std::to_string(k), format_double(r.residuals[k]), std::to_string(mv),
                      format_double(static_cast<double>(mv) + cfg.amg_matvec_equiv * amg)});
  }
  return t;
}

}  // namespace covdiff

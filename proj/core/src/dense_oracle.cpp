// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#include "covdiff/dense_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "covdiff/chebyshev.hpp"

namespace covdiff {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

template <class X, class Y>
Eigen::Matrix<typename X::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(const X& a, const Y& b) {
  using S = typename X::Scalar;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b.template cast<S>();
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

OracleReport make(std::string check, double dev, double tol, std::string detail = {}) {
  OracleReport r;
  r.check = std::move(check);
  r.max_deviation = dev;
  r.pass = std::isfinite(dev) && dev <= tol;
  r.detail = detail.empty() ? "max deviation " + fmt(dev) + " (tol " + fmt(tol) + ")" : detail;
  return r;
}

std::string tag(const DenseInstance& inst) {
  std::ostringstream s;
  s << "nx=" << inst.nx << " ell=" << inst.ell << " alpha=" << inst.alpha;
  return s.str();
}

// alpha equal to some mu^ell makes P singular; reported, not thrown.
bool admissible(const DenseInstance& inst, std::string* why) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(inst.A, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = std::pow(es.eigenvalues()[i], inst.ell);
    if (std::abs(p - inst.alpha) <= 1e-10 * std::max(1.0, p)) {
      if (why) *why = "precondition violated: alpha equals mu_j^ell = " + fmt(p);
      return false;
    }
  }
  return true;
}

}  // namespace

DenseInstance build_dense_instance(const DiffusionOperator& op, double alpha) {
  if (op.N() * op.ell() > 600) throw std::invalid_argument("dense instance too large");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  DenseInstance d;
  d.nx = op.nx();
  d.ell = op.ell();
  d.alpha = alpha;
  const int l = op.ell();
  const Eigen::Index n = op.N();
  d.A = op.dense();
  MatrixXd S = MatrixXd::Zero(l, l);
  for (int j = 1; j < l; ++j) S(j, j - 1) = 1.0;
  d.C = S;
  d.C(0, l - 1) = alpha;
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd Il = MatrixXd::Identity(l, l);
  d.Acal = kron(Il, d.A) - kron(S, I);
  d.P = kron(Il, d.A) - kron(d.C, I);
  d.gamma.resize(l);
  d.U.resize(l, l);
  d.lambda.resize(l);
  for (int k = 0; k < l; ++k) {
    d.gamma[k] = std::pow(alpha, static_cast<double>(k) / l);
    d.lambda[k] = std::polar(std::pow(alpha, 1.0 / l), 2.0 * std::numbers::pi * k / l);
    for (int j = 0; j < l; ++j)
      d.U(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(l)),
                             2.0 * std::numbers::pi * j * k / l);
  }
  return d;
}

double multiset_distance(std::vector<std::complex<double>> got,
                         std::vector<std::complex<double>> expected) {
  if (got.size() != expected.size()) return std::numeric_limits<double>::infinity();
  auto by_real = [](const std::complex<double>& a, const std::complex<double>& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  std::sort(got.begin(), got.end(), by_real);
  std::sort(expected.begin(), expected.end(), by_real);
  std::vector<bool> used(got.size(), false);
  double worst = 0.0;
  for (const auto& e : expected) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (used[i]) continue;
      const double dist = std::abs(got[i] - e);
      if (dist < best) {
        best = dist;
        arg = i;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best / std::max(1.0, std::abs(e)));
  }
  return worst;
}

OracleReport verify_preconditioned_spectrum(const DenseInstance& inst, double tol) {
  const std::string name = "preconditioned spectrum " + tag(inst);
  std::string why;
  if (!admissible(inst, &why)) return {name, false, std::numeric_limits<double>::infinity(), why};
  const MatrixXd M = inst.P.partialPivLu().solve(inst.Acal);
  Eigen::EigenSolver<MatrixXd> es(M, false);
  std::vector<std::complex<double>> got(es.eigenvalues().data(),
                                        es.eigenvalues().data() + es.eigenvalues().size());

  Eigen::SelfAdjointEigenSolver<MatrixXd> ea(inst.A, Eigen::EigenvaluesOnly);
  const Eigen::Index n = inst.A.rows();
  std::vector<std::complex<double>> expected(static_cast<std::size_t>((inst.ell - 1) * n), 1.0);
  double mu_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = ea.eigenvalues()[i];
    mu_min = std::min(mu_min, mu);
    const double p = std::pow(mu, inst.ell);
    expected.emplace_back(p / (p - inst.alpha));
  }
  double dev = multiset_distance(got, expected);

  if (inst.alpha < std::pow(mu_min, inst.ell)) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& z : got) {
      lo = std::min(lo, z.real());
      hi = std::max(hi, z.real());
    }
    const double p = std::pow(mu_min, inst.ell);
    const double hi_expected = p / (p - inst.alpha);
    dev = std::max({dev, std::abs(lo - 1.0), std::abs(hi - hi_expected) / hi_expected});
  }
  return make(name, dev, tol);
}

OracleReport verify_factorization(const DenseInstance& inst, double tol) {
  const std::string name = "scaled DFT factorization " + tag(inst);
  const int l = inst.ell;
  const Eigen::Index n = inst.A.rows();
  const MatrixXcd G = inst.gamma.asDiagonal();
  const MatrixXcd Gi = inst.gamma.cwiseInverse().asDiagonal();
  const MatrixXcd fwd = inst.U * G;                // block j pairs with lambda_j
  const MatrixXcd inv = Gi * inst.U.adjoint();
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXcd mid = MatrixXcd::Zero(l * n, l * n);
  for (int j = 0; j < l; ++j)
    mid.block(j * n, j * n, n, n) = inst.A.cast<std::complex<double>>() - inst.lambda[j] * I;
  const MatrixXcd rebuilt = kron(inv, I) * mid * kron(fwd, I);
  const double dev = (rebuilt - inst.P.cast<std::complex<double>>()).cwiseAbs().maxCoeff();
  return make(name, dev, tol);
}

OracleReport verify_sherman_morrison(const DenseInstance& inst, double tol) {
  const std::string name = "Woodbury inverse " + tag(inst);
  std::string why;
  if (!admissible(inst, &why)) return {name, false, std::numeric_limits<double>::infinity(), why};
  const int l = inst.ell;
  const Eigen::Index n = inst.A.rows();
  const MatrixXd Ainv = inst.Acal.inverse();
  const MatrixXd Pinv = inst.P.inverse();
  const MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd Al = I;
  for (int k = 0; k < l; ++k) Al = Al * inst.A;
  const MatrixXd Aml = Al.inverse();
  const MatrixXd Z = (I - inst.alpha * Aml) / inst.alpha;
  const MatrixXd AE1 = Ainv.leftCols(n);        // Acal^{-1} E_1
  const MatrixXd ElA = Ainv.bottomRows(n);      // E_ell^T Acal^{-1}
  const MatrixXd wood = Ainv + AE1 * Z.inverse() * ElA;
  const double scale = std::max(1.0, Pinv.cwiseAbs().maxCoeff());
  const double dev1 = (wood - Pinv).cwiseAbs().maxCoeff() / scale;
  const MatrixXd corner = Ainv.block((l - 1) * n, 0, n, n);
  const double dev2 =
      (corner - Aml).cwiseAbs().maxCoeff() / std::max(1.0, Aml.cwiseAbs().maxCoeff());
  return make(name, std::max(dev1, dev2), tol,
              "inverse deviation " + fmt(dev1) + ", corner block deviation " + fmt(dev2));
}

OracleReport verify_diagonalizable(const DenseInstance& inst) {
  const std::string name = "diagonalizable " + tag(inst);
  std::string why;
  if (!admissible(inst, &why)) return {name, false, std::numeric_limits<double>::infinity(), why};
  const MatrixXd M = inst.P.partialPivLu().solve(inst.Acal);
  Eigen::EigenSolver<MatrixXd> es(M, true);
  MatrixXcd V = es.eigenvectors();
  for (Eigen::Index j = 0; j < V.cols(); ++j) V.col(j).normalize();
  Eigen::JacobiSVD<MatrixXcd> svd(V);
  const auto& s = svd.singularValues();
  const double cond = s[0] / s[s.size() - 1];
  OracleReport r;
  r.check = name;
  r.max_deviation = cond;
  r.pass = std::isfinite(cond) && cond < 1e10;
  r.detail = "eigenvector condition number " + fmt(cond);
  return r;
}

OracleReport verify_saddle_spectrum(const MatrixXd& phi, const MatrixXd& psi, double tol) {
  const Eigen::Index n = phi.rows();
  MatrixXd S(2 * n, 2 * n);
  S << phi, psi, psi, -phi;
  const MatrixXd D = phi + psi;
  Eigen::LLT<MatrixXd> llt(D);
  if (llt.info() != Eigen::Success)
    return {"saddle spectrum", false, std::numeric_limits<double>::infinity(),
            "Phi + Psi is not positive definite"};
  const MatrixXd L = llt.matrixL();
  const MatrixXd Li = L.inverse();
  MatrixXd Bi = MatrixXd::Zero(2 * n, 2 * n);
  Bi.topLeftCorner(n, n) = Li;
  Bi.bottomRightCorner(n, n) = Li;
  const MatrixXd T = Bi * S * Bi.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd(0.5 * (T + T.transpose())),
                                             Eigen::EigenvaluesOnly);
  double dev = 0.0;
  double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double a = std::abs(es.eigenvalues()[i]);
    amin = std::min(amin, a);
    amax = std::max(amax, a);
    dev = std::max({dev, 1.0 / std::sqrt(2.0) - a, a - 1.0});
  }
  OracleReport r;
  r.check = "saddle spectrum n=" + std::to_string(n);
  r.max_deviation = std::max(dev, 0.0);
  r.pass = dev <= tol;
  r.detail = "|theta| in [" + fmt(amin) + ", " + fmt(amax) + "]";
  return r;
}

OracleReport verify_saddle_spectrum(const DiffusionOperator& op, std::complex<double> lambda,
                                    double tol) {
  if (!(lambda.imag() > 0)) lambda = std::conj(lambda);
  const Eigen::Index n = op.N();
  const MatrixXd phi = lambda.imag() * MatrixXd::Identity(n, n);
  const MatrixXd psi = op.dense() - lambda.real() * MatrixXd::Identity(n, n);
  OracleReport r = verify_saddle_spectrum(phi, psi, tol);
  std::ostringstream s;
  s << "saddle spectrum nx=" << op.nx() << " lambda=" << lambda.real() << "+" << lambda.imag()
    << "i";
  r.check = s.str();
  return r;
}

Eigen::MatrixXcd random_normal_matrix(const Eigen::VectorXcd& eigs, unsigned seed) {
  const Eigen::Index n = eigs.size();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  MatrixXcd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = {nd(gen), nd(gen)};
  const MatrixXcd Q = Eigen::HouseholderQR<MatrixXcd>(G).householderQ();
  return Q * eigs.asDiagonal() * Q.adjoint();
}

OracleReport verify_chebyshev_polynomial_contract(const MatrixXcd& M, std::complex<double> xi_lo,
                                                  std::complex<double> xi_hi, int p, double tol) {
  const Eigen::Index n = M.rows();
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd xt(n);
  for (Eigen::Index i = 0; i < n; ++i) xt[i] = {nd(gen), nd(gen)};
  const Eigen::VectorXcd b = M * xt;

  ChebyshevConfig cfg;
  cfg.xi_lo = xi_lo;
  cfg.xi_hi = xi_hi;
  cfg.stop = StopRule::iterations(p);
  auto op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { out = M * in; };
  Eigen::VectorXcd x;
  chebyshev_solve(op, b, x, cfg);
  const Eigen::VectorXcd ep = xt - x;

  const std::complex<double> c = cfg.center();
  const std::complex<double> d = cfg.half_width();
  Eigen::VectorXcd expected;
  double scale = xt.norm();
  if (std::abs(d) == 0.0) {
    expected = xt;
    for (int k = 0; k < p; ++k) expected = expected - M * expected / c;
  } else {
    const MatrixXcd Z = (c * MatrixXcd::Identity(n, n) - M) / d;
    Eigen::VectorXcd v0 = xt, v1 = Z * xt;
    if (p == 0) v1 = v0;
    for (int k = 1; k < p; ++k) {
      Eigen::VectorXcd v2 = 2.0 * (Z * v1) - v0;
      v0 = v1;
      v1 = v2;
    }
    const std::complex<double> tp = chebyshev_t(p, c / d);
    expected = v1 / tp;
    scale /= std::abs(tp);
  }
  const double dev = (ep - expected).norm() / scale;
  std::ostringstream s;
  s << "Chebyshev contract n=" << n << " p=" << p;
  return make(s.str(), dev, tol);
}

std::vector<OracleReport> run_oracle_suite() {
  std::vector<OracleReport> out;
  for (int nx : {2, 3, 4})
    for (int ell : {4, 6})
      for (double alpha : {1.0, 0.1, 0.01}) {
        const DiffusionOperator op(nx, ell, 0.2);
        const DenseInstance inst = build_dense_instance(op, alpha);
        out.push_back(verify_preconditioned_spectrum(inst));
        out.push_back(verify_factorization(inst));
        out.push_back(verify_sherman_morrison(inst));
        out.push_back(verify_diagonalizable(inst));
      }
  const DiffusionOperator op3(3, 10, 0.2);
  const double tp = 2.0 * std::numbers::pi / 10.0;
  out.push_back(verify_saddle_spectrum(op3, std::polar(1.0, tp)));
  out.push_back(verify_saddle_spectrum(op3, std::polar(std::pow(0.01, 0.1), 2.0 * tp)));
  {
    const MatrixXd one = MatrixXd::Constant(1, 1, 0.7);
    OracleReport r = verify_saddle_spectrum(one, one);
    r.check = "saddle spectrum Phi = Psi";
    out.push_back(r);
  }
  for (int nx : {2, 3, 4})
    for (int ell : {4, 6}) {
      const DiffusionOperator op(nx, ell, 0.2);
      for (int j = 1; j < ell; ++j) {
        const auto lam = std::polar(1.0, 2.0 * std::numbers::pi * j / ell);
        if (lam.imag() > 1e-12) out.push_back(verify_saddle_spectrum(op, lam));
      }
    }
  {
    Eigen::VectorXcd e(12);
    for (int i = 0; i < 12; ++i) e[i] = 1.0 + 2.0 * i / 11.0;
    out.push_back(verify_chebyshev_polynomial_contract(random_normal_matrix(e, 1), 1.0, 3.0, 6));
    for (int i = 0; i < 12; ++i) e[i] = std::complex<double>(1.0 + 2.0 * i / 11.0, 0.5);
    out.push_back(verify_chebyshev_polynomial_contract(random_normal_matrix(e, 2), {1.0, 0.5},
                                                       {3.0, 0.5}, 6));
    e.setConstant(2.5);
    out.push_back(
        verify_chebyshev_polynomial_contract(random_normal_matrix(e, 3), 2.5, 2.5, 1));
  }
  return out;
}

}  // namespace covdiff

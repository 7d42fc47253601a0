// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmmfp/errors.hpp"

namespace pmmfp {

namespace {

constexpr double kRankTol = 1e-10;

bool finite(const Vector& v) { return v.allFinite(); }

}  // namespace

Vector least_squares_solve(const Matrix& X, const Vector& y) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (k < 1) throw InvalidConfig("least_squares_solve: design has no columns");
  if (y.size() != n)
    throw InvalidConfig("least_squares_solve: y length does not match X rows");
  if (n < k)
    throw TooFewObservations("least_squares_solve: fewer rows than columns");

  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  // The R factor shares its singular values with X, so the rank decision can
  // be made on a k-by-k problem regardless of n.
  Matrix R = qr.matrixR().topRows(k).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(R);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smax > 0.0) || smin <= kRankTol * smax)
    throw RankDeficient("least_squares_solve: effective rank below column count");

  Vector beta = qr.solve(y);
  if (!finite(beta))
    throw RankDeficient("least_squares_solve: non-finite solution");
  return beta;
}

SymmetricSolve symmetric_solve(const Matrix& A, const Vector& b, double ridge) {
  const auto d = A.rows();
  if (A.cols() != d) throw NotSymmetric("symmetric_solve: matrix not square");
  if (b.size() != d)
    throw InvalidConfig("symmetric_solve: b length does not match A");
  if (ridge < 0.0) throw InvalidConfig("symmetric_solve: negative ridge");

  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw NotSymmetric("symmetric_solve: matrix not symmetric within 1e-10");

  const double a_inf = A.cwiseAbs().rowwise().sum().maxCoeff();

  auto attempt = [&](double r, Vector* out) -> bool {
    Matrix M = A;
    M.diagonal().array() += r;
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) return false;
    Vector x = llt.solve(b);
    if (!finite(x)) return false;
    // Guard against a factorisation that "succeeded" on a near-singular
    // system: the returned solution must actually satisfy the ridged system.
    const double resid = (M * x - b).cwiseAbs().maxCoeff();
    const double bound = 1e-9 * (a_inf + r) * std::max(x.cwiseAbs().maxCoeff(), 1.0) +
                         std::numeric_limits<double>::min();
    if (resid > bound) return false;
    *out = std::move(x);
    return true;
  };

  Vector x;
  if (attempt(ridge, &x)) return {std::move(x), ridge};

  if (ridge == 0.0) {
    double retry = 1e-8 * std::abs(A.trace()) / static_cast<double>(d);
    if (retry <= 0.0) retry = 1e-8;
    if (attempt(retry, &x)) return {std::move(x), retry};
  }
  throw SingularSystem("symmetric_solve: factorisation failed even with ridge");
}

SpectralReport spectral_analyze(const Matrix& A) {
  if (A.rows() < 1 || A.cols() < 1)
    throw InvalidConfig("spectral_analyze: empty matrix");

  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& sv = svd.singularValues();

  SpectralReport rep;
  rep.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = rep.singular_values.front();
  const double smin = rep.singular_values.back();
  const double eps = std::numeric_limits<double>::epsilon();
  const double zero_tol =
      smax * eps * static_cast<double>(std::max(A.rows(), A.cols()));
  if (smin <= zero_tol) {
    rep.condition_infinite = true;
    rep.condition_number = std::numeric_limits<double>::infinity();
  } else {
    rep.condition_infinite = false;
    rep.condition_number = smax / smin;
  }
  return rep;
}

}  // namespace pmmfp

// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "qbrown/master_equation.hpp"

namespace qbrown {

/// Dense superoperator matrix of the generator (free part included),
/// acting on column-major vec(rho). Feasible only for small lattices.
inline MatrixXcd build_superoperator(const Generator& gen) {
  const int n = gen.dimension();
  if (n > 32)
    throw std::length_error(
        "build_superoperator: lattice too large for dense superoperator work");
  const int n2 = n * n;
  MatrixXcd sup = MatrixXcd::Zero(n2, n2);
  MatrixXcd basis = MatrixXcd::Zero(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      basis(r, c) = 1.0;
      const MatrixXcd img = gen.apply(basis);
      basis(r, c) = 0.0;
      sup.col(r + c * n) = Eigen::Map<const Eigen::VectorXcd>(img.data(), n2);
    }
  return sup;
}

/// Choi matrix of the map whose superoperator (on column-major vec) is
/// given: C = sum_{ik} |i><k| (x) Phi(|i><k|).
inline MatrixXcd choi_matrix(const MatrixXcd& sup) {
  const int n2 = static_cast<int>(sup.rows());
  const int n = static_cast<int>(std::lround(std::sqrt(double(n2))));
  if (n * n != n2) throw std::invalid_argument("choi_matrix: not a superoperator");
  MatrixXcd choi(n2, n2);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const Eigen::VectorXcd col = sup.col(i + k * n);  // vec Phi(|i><k|)
      choi.block(i * n, k * n, n, n) =
          Eigen::Map<const MatrixXcd>(col.data(), n, n);
    }
  return choi;
}

/// Minimum eigenvalue of the Choi matrix of exp(dt L). Nonnegative (up to
/// roundoff) iff the finite step is completely positive.
inline double choi_min_eigenvalue(const Generator& gen, double dt) {
  if (dt < 0.0) throw std::domain_error("choi_min_eigenvalue: dt must be >= 0");
  const MatrixXcd sup = build_superoperator(gen);
  const MatrixXcd step = (dt * sup).exp();
  MatrixXcd choi = choi_matrix(step);
  choi = ((choi + choi.adjoint()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(choi,
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace qbrown

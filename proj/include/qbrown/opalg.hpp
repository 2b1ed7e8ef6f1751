// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "qbrown/core.hpp"
#include "qbrown/transport.hpp"

namespace qbrown {

using Eigen::MatrixXcd;

/// Position, momentum and ladder operators in a truncated number basis.
/// The ladder algebra [A, A+] = I holds exactly below the truncation edge;
/// identity checks exclude the top `interior_margin` levels per direction.
struct LadderSet {
  int N = 0;
  double beta = 1.0;
  double M = 1.0;
  double hbar = 1.0;
  double lambda = 1.0;  ///< sqrt(hbar^2 beta / M)
  int interior_margin = 2;
  MatrixXcd X, P, A, ADag;
};

inline LadderSet build_ladder(int N, double beta, double M, double hbar) {
  if (N < 8) throw std::domain_error("build_ladder: N must be >= 8");
  if (!(beta > 0.0) || !(M > 0.0) || !(hbar > 0.0))
    throw std::domain_error("build_ladder: beta, M, hbar must be > 0");
  LadderSet s;
  s.N = N;
  s.beta = beta;
  s.M = M;
  s.hbar = hbar;
  s.lambda = std::sqrt(hbar * hbar * beta / M);
  s.A = MatrixXcd::Zero(N, N);
  for (int n = 1; n < N; ++n) s.A(n - 1, n) = std::sqrt(double(n));
  s.ADag = s.A.adjoint();
  // A = sqrt(2)/lambda (X + i lambda^2/(4 hbar) P)
  s.X = s.lambda / (2.0 * std::sqrt(2.0)) * (s.A + s.ADag);
  s.P = std::complex<double>(0.0, -1.0) * std::sqrt(2.0) * hbar / s.lambda *
        (s.A - s.ADag);
  return s;
}

/// One (X_i, P_i) pair per Cartesian direction, as dense matrices on the
/// full (tensor-product) space.
struct DirectionOperators {
  std::vector<MatrixXcd> X, P;
  double lambda = 1.0;
  double hbar = 1.0;
  int N = 0;    ///< levels per direction
  int dims = 1;
};

namespace detail {

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

inline DirectionOperators tensor_operators(const LadderSet& s, int dims) {
  if (dims < 1 || dims > 2)
    throw std::domain_error("tensor_operators: dims must be 1 or 2");
  DirectionOperators ops;
  ops.lambda = s.lambda;
  ops.hbar = s.hbar;
  ops.N = s.N;
  ops.dims = dims;
  if (dims == 1) {
    ops.X = {s.X};
    ops.P = {s.P};
  } else {
    const MatrixXcd id = MatrixXcd::Identity(s.N, s.N);
    ops.X = {detail::kron(s.X, id), detail::kron(id, s.X)};
    ops.P = {detail::kron(s.P, id), detail::kron(id, s.P)};
  }
  return ops;
}

enum class LadderForm { DoubleCommutator, ExplicitLindblad };

/// Dissipative generator specification: which algebraic form to expand,
/// built from one set of transport coefficients, in 1 or 2 directions.
struct GeneratorForm {
  LadderForm form = LadderForm::DoubleCommutator;
  FPCoefficients coeffs;
  int dims = 1;
};

namespace detail {

inline void check_dims(const GeneratorForm& spec, const DirectionOperators& ops,
                       const MatrixXcd& m) {
  if (spec.dims != ops.dims)
    throw std::invalid_argument("apply_form: dims mismatch with operator set");
  if (m.rows() != ops.X[0].rows() || m.cols() != ops.X[0].cols())
    throw std::invalid_argument("apply_form: matrix dimension mismatch");
}

}  // namespace detail

/// Dissipative action L[rho] (free commutator excluded) built from the
/// given operator pairs, so covariance checks can pass transformed ones.
///
/// DoubleCommutator:
///   -D_pp/h^2 sum [X,[X,rho]] - D_xx/h^2 sum [P,[P,rho]]
///   - i gamma/h sum [X,{P,rho}]
/// ExplicitLindblad, with A_i = sqrt(2)/lambda (X_i + i lambda^2/(4h) P_i):
///   -D_pp lambda^2/(4h^2) sum [A^2 - A+^2, rho]
///   + D_pp lambda^2/h^2 sum (A rho A+ - 1/2 {A+A, rho})
/// The two coincide as finite-matrix identities on the truncation interior
/// exactly when gamma/D_pp = beta/2M and D_xx = (beta h/4M)^2 D_pp.
inline MatrixXcd apply_form_with(const GeneratorForm& spec,
                                 const DirectionOperators& ops,
                                 const MatrixXcd& rho) {
  detail::check_dims(spec, ops, rho);
  const double h = spec.coeffs.hbar;
  const double Dpp = spec.coeffs.effective_D_pp();
  const double Dxx = spec.coeffs.effective_D_xx();
  const double g = spec.coeffs.effective_gamma();
  const double lam = std::sqrt(h * h * spec.coeffs.beta / spec.coeffs.M);
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  const std::complex<double> iu(0.0, 1.0);
  for (int d = 0; d < spec.dims; ++d) {
    const MatrixXcd& X = ops.X[d];
    const MatrixXcd& P = ops.P[d];
    if (spec.form == LadderForm::DoubleCommutator) {
      const MatrixXcd cx = X * rho - rho * X;
      const MatrixXcd cp = P * rho - rho * P;
      const MatrixXcd ap = P * rho + rho * P;
      out -= Dpp / (h * h) * (X * cx - cx * X);
      out -= Dxx / (h * h) * (P * cp - cp * P);
      out -= iu * g / h * (X * ap - ap * X);
    } else {
      const MatrixXcd A =
          std::sqrt(2.0) / lam * (X + iu * lam * lam / (4.0 * h) * P);
      const MatrixXcd Ad = A.adjoint();
      const MatrixXcd B = A * A - Ad * Ad;
      const MatrixXcd AdA = Ad * A;
      out -= Dpp * lam * lam / (4.0 * h * h) * (B * rho - rho * B);
      out += Dpp * lam * lam / (h * h) *
             (A * rho * Ad - 0.5 * (AdA * rho + rho * AdA));
    }
  }
  return out;
}

inline MatrixXcd apply_form(const GeneratorForm& spec, const LadderSet& s,
                            const MatrixXcd& rho) {
  return apply_form_with(spec, tensor_operators(s, spec.dims), rho);
}

/// Adjoint (Heisenberg-picture) dissipative action L'[A]; note the
/// anticommutator sits outside the commutator in the friction term.
inline MatrixXcd adjoint_apply_with(const GeneratorForm& spec,
                                    const DirectionOperators& ops,
                                    const MatrixXcd& obs) {
  detail::check_dims(spec, ops, obs);
  const double h = spec.coeffs.hbar;
  const double Dpp = spec.coeffs.effective_D_pp();
  const double Dxx = spec.coeffs.effective_D_xx();
  const double g = spec.coeffs.effective_gamma();
  const double lam = std::sqrt(h * h * spec.coeffs.beta / spec.coeffs.M);
  MatrixXcd out = MatrixXcd::Zero(obs.rows(), obs.cols());
  const std::complex<double> iu(0.0, 1.0);
  for (int d = 0; d < spec.dims; ++d) {
    const MatrixXcd& X = ops.X[d];
    const MatrixXcd& P = ops.P[d];
    if (spec.form == LadderForm::DoubleCommutator) {
      const MatrixXcd cx = X * obs - obs * X;
      const MatrixXcd cp = P * obs - obs * P;
      out -= Dpp / (h * h) * (X * cx - cx * X);
      out -= Dxx / (h * h) * (P * cp - cp * P);
      out += iu * g / h * (P * cx + cx * P);
    } else {
      const MatrixXcd A =
          std::sqrt(2.0) / lam * (X + iu * lam * lam / (4.0 * h) * P);
      const MatrixXcd Ad = A.adjoint();
      const MatrixXcd B = A * A - Ad * Ad;
      const MatrixXcd AdA = Ad * A;
      out += Dpp * lam * lam / (4.0 * h * h) * (B * obs - obs * B);
      out += Dpp * lam * lam / (h * h) *
             (Ad * obs * A - 0.5 * (AdA * obs + obs * AdA));
    }
  }
  return out;
}

inline MatrixXcd adjoint_apply(const GeneratorForm& spec, const LadderSet& s,
                               const MatrixXcd& obs) {
  return adjoint_apply_with(spec, tensor_operators(s, spec.dims), obs);
}

/// Zeroes the top `margin` levels per direction (rows and columns).
inline MatrixXcd interior_project(const MatrixXcd& m, int N, int dims,
                                  int margin) {
  Eigen::VectorXd keep = Eigen::VectorXd::Ones(m.rows());
  const int dim2 = dims == 2 ? N : 1;
  for (int i = 0; i < m.rows(); ++i) {
    const int n0 = dims == 2 ? i / dim2 : i;
    const int n1 = dims == 2 ? i % dim2 : 0;
    if (n0 >= N - margin || (dims == 2 && n1 >= N - margin)) keep[i] = 0.0;
  }
  return keep.asDiagonal() * m * keep.asDiagonal();
}

inline double max_abs_interior(const MatrixXcd& m, int N, int dims,
                               int margin) {
  return interior_project(m, N, dims, margin).cwiseAbs().maxCoeff();
}

namespace detail {

/// Random Hermitian matrix supported on the truncation interior, scaled to
/// unit max-norm.
inline MatrixXcd random_interior_hermitian(int N, int dims, int margin,
                                           std::mt19937_64& rng) {
  const int n = dims == 2 ? N * N : N;
  std::normal_distribution<double> dist;
  MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = {dist(rng), dist(rng)};
  m = ((m + m.adjoint()) / 2.0).eval();
  m = interior_project(m, N, dims, margin);
  return m / m.cwiseAbs().maxCoeff();
}

}  // namespace detail

struct Translate {
  double a = 0.0;
};
struct Rotate2D {
  double theta = 0.0;
};

inline DirectionOperators transformed(const DirectionOperators& ops,
                                      const Translate& t) {
  DirectionOperators out = ops;
  const MatrixXcd id = MatrixXcd::Identity(ops.X[0].rows(), ops.X[0].cols());
  for (auto& X : out.X) X = (X + t.a * id).eval();
  return out;
}

inline DirectionOperators transformed(const DirectionOperators& ops,
                                      const Rotate2D& r) {
  if (ops.dims != 2)
    throw std::invalid_argument("Rotate2D requires a 2-direction operator set");
  DirectionOperators out = ops;
  const double c = std::cos(r.theta), s = std::sin(r.theta);
  out.X[0] = c * ops.X[0] - s * ops.X[1];
  out.X[1] = s * ops.X[0] + c * ops.X[1];
  out.P[0] = c * ops.P[0] - s * ops.P[1];
  out.P[1] = s * ops.P[0] + c * ops.P[1];
  return out;
}

/// Max interior residual of L_transformed[rho] - L[rho] over random
/// interior-supported unit-norm Hermitian test matrices.
template <class Transform>
inline double covariance_check(const GeneratorForm& spec, const LadderSet& s,
                               const Transform& t, int trials = 4,
                               unsigned seed = 11) {
  const DirectionOperators ops = tensor_operators(s, spec.dims);
  const DirectionOperators tops = transformed(ops, t);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const MatrixXcd rho =
        detail::random_interior_hermitian(s.N, spec.dims, s.interior_margin, rng);
    const MatrixXcd diff =
        apply_form_with(spec, tops, rho) - apply_form_with(spec, ops, rho);
    worst = std::max(worst,
                     max_abs_interior(diff, s.N, spec.dims, s.interior_margin));
  }
  return worst;
}

/// Full verification bundle for the truncated-algebra identities.
struct OpalgReport {
  double residual_equivalence = 0.0;  ///< DC vs Lindblad, interior
  double residual_negative_control = 0.0;  ///< same with gamma scaled 1.1x
  double residual_translate = 0.0;
  double residual_rotate = 0.0;
  double duality_gap = 0.0;  ///< |Tr(L'[A] rho) - Tr(A L[rho])|
  double truncation_leakage = 0.0;  ///< DC vs Lindblad on the excluded edge
};

inline OpalgReport run_opalg_checks(int N, const FPCoefficients& coeffs,
                                    unsigned seed = 29, int trials = 4) {
  const LadderSet s1 = build_ladder(N, coeffs.beta, coeffs.M, coeffs.hbar);
  const GeneratorForm dc{LadderForm::DoubleCommutator, coeffs, 1};
  const GeneratorForm li{LadderForm::ExplicitLindblad, coeffs, 1};
  const DirectionOperators ops1 = tensor_operators(s1, 1);
  const int margin = s1.interior_margin;

  OpalgReport rep;
  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    const MatrixXcd rho = detail::random_interior_hermitian(N, 1, margin, rng);
    const MatrixXcd diff =
        apply_form_with(dc, ops1, rho) - apply_form_with(li, ops1, rho);
    rep.residual_equivalence =
        std::max(rep.residual_equivalence, max_abs_interior(diff, N, 1, margin));
    rep.truncation_leakage =
        std::max(rep.truncation_leakage, diff.cwiseAbs().maxCoeff());

    const MatrixXcd obs = detail::random_interior_hermitian(N, 1, margin, rng);
    const std::complex<double> gap =
        (adjoint_apply_with(dc, ops1, obs) * rho).trace() -
        (obs * apply_form_with(dc, ops1, rho)).trace();
    rep.duality_gap = std::max(rep.duality_gap, std::abs(gap));
  }

  GeneratorForm broken = dc;
  broken.coeffs.gamma *= 1.1;  // violates gamma/D_pp = beta/2M
  for (int k = 0; k < trials; ++k) {
    const MatrixXcd rho = detail::random_interior_hermitian(N, 1, margin, rng);
    const MatrixXcd diff =
        apply_form_with(broken, ops1, rho) - apply_form_with(li, ops1, rho);
    rep.residual_negative_control = std::max(
        rep.residual_negative_control, max_abs_interior(diff, N, 1, margin));
  }

  // Translation is checked on the ladder form, where the shift enters the
  // jump operator and cancels only through the commutator term.
  rep.residual_translate =
      covariance_check(li, s1, Translate{3.7}, trials, seed + 1);

  const int N2 = std::min(N, 24);
  const LadderSet s2 = build_ladder(N2, coeffs.beta, coeffs.M, coeffs.hbar);
  const GeneratorForm dc2{LadderForm::DoubleCommutator, coeffs, 2};
  rep.residual_rotate =
      covariance_check(dc2, s2, Rotate2D{pi / 5.0}, trials, seed + 2);
  return rep;
}

}  // namespace qbrown

// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "qbrown/core.hpp"
#include "qbrown/transport.hpp"

namespace qbrown {

/// Phase-space (or momentum-only) distribution on a rectangular grid.
/// x is periodic on [0, nx dx); p sites are half-integer multiples of dp,
/// symmetric about zero. values(j, i) = f(x_i, p_j).
struct WignerField {
  enum class Mode { FullPhaseSpace, MomentumOnly };
  Mode mode = Mode::MomentumOnly;
  int nx = 1;
  int np = 64;
  double dx = 1.0;
  double dp = 0.1;
  Eigen::MatrixXd values;

  void validate() const {
    if (np < 4 || !(dp > 0.0))
      throw std::domain_error("WignerField: invalid momentum grid");
    if (mode == Mode::FullPhaseSpace && (nx < 4 || !(dx > 0.0)))
      throw std::domain_error("WignerField: invalid position grid");
    if (mode == Mode::MomentumOnly && nx != 1)
      throw std::domain_error("WignerField: momentum-only mode requires nx = 1");
    if (values.rows() != np || values.cols() != nx)
      throw std::domain_error("WignerField: values shape mismatch");
  }

  double p_at(int j) const { return (j + 0.5 - 0.5 * np) * dp; }
  double x_at(int i) const { return i * dx; }
  double cell() const {
    return mode == Mode::MomentumOnly ? dp : dp * dx;
  }
  double mass() const { return values.sum() * cell(); }

  void normalize() { values /= mass(); }
};

struct WignerMoments {
  double mass = 0.0;
  double mean_p = 0.0;
  double energy = 0.0;  ///< <p^2/2M>, mass-normalized
};

inline WignerMoments wigner_moments(const WignerField& f, double M) {
  WignerMoments m;
  m.mass = f.mass();
  double sp = 0.0, se = 0.0;
  for (int j = 0; j < f.np; ++j) {
    const double p = f.p_at(j);
    const double row = f.values.row(j).sum();
    sp += p * row;
    se += p * p / (2.0 * M) * row;
  }
  sp *= f.cell();
  se *= f.cell();
  m.mean_p = sp / m.mass;
  m.energy = se / m.mass;
  return m;
}

struct WignerEvolveOptions {
  double t = 1.0;
  double dt = 1e-3;
  int checkpoint_stride = 0;
};

using WignerCallback =
    std::function<void(int step, double time, const WignerField&)>;

namespace detail {

inline double bernoulli(double w) {
  // w / (e^w - 1), the Scharfetter-Gummel face weight
  if (std::fabs(w) < 1e-12) return 1.0 - 0.5 * w;
  return w / std::expm1(w);
}

}  // namespace detail

/// Advances df/dt = -(p/M) d_x f + D_pp d^2_p f + D_xx d^2_x f
///                  + 2 gamma d_p (p f),
/// with the statistics factor folded into the dissipative coefficients.
/// The momentum direction uses a conservative drift-diffusion flux whose
/// face weights make the sampled canonical Gaussian an exact discrete fixed
/// point; streaming and position diffusion use centered periodic stencils.
/// Method of lines with classical RK4; mass is conserved to roundoff.
inline WignerField evolve_wigner(const FPCoefficients& coeffs, WignerField f,
                                 const WignerEvolveOptions& opt,
                                 const WignerCallback& on_checkpoint = nullptr) {
  f.validate();
  if (!(opt.dt > 0.0) || opt.t < 0.0)
    throw std::invalid_argument("evolve_wigner: t >= 0 and dt > 0 required");
  const double Dp = coeffs.effective_D_pp();
  const double Dx = coeffs.effective_D_xx();
  const double g = coeffs.effective_gamma();
  const double M = coeffs.M;
  const bool full = f.mode == WignerField::Mode::FullPhaseSpace;
  const double pmax = std::max(std::fabs(f.p_at(0)), std::fabs(f.p_at(f.np - 1)));

  // Explicit-step stability bounds, checked up front and reported by name.
  const double diff_p = opt.dt * 2.0 * Dp / (f.dp * f.dp);
  if (diff_p > 0.7)
    throw contract_violation(
        "evolve_wigner: momentum-diffusion stability bound violated "
        "(dt * 2 D_pp / dp^2 = " + std::to_string(diff_p) + " > 0.7)");
  const double drift_p = opt.dt * 2.0 * g * pmax / f.dp;
  if (drift_p > 0.7)
    throw contract_violation(
        "evolve_wigner: momentum-drift stability bound violated "
        "(dt * 2 gamma p_max / dp = " + std::to_string(drift_p) + " > 0.7)");
  if (full) {
    const double adv_x = opt.dt * pmax / M / f.dx;
    if (adv_x > 1.0)
      throw contract_violation(
          "evolve_wigner: streaming stability bound violated "
          "(dt * p_max / (M dx) = " + std::to_string(adv_x) + " > 1.0)");
    const double diff_x = opt.dt * 2.0 * Dx / (f.dx * f.dx);
    if (diff_x > 0.7)
      throw contract_violation(
          "evolve_wigner: position-diffusion stability bound violated "
          "(dt * 2 D_xx / dx^2 = " + std::to_string(diff_x) + " > 0.7)");
  }

  // Face weights for the momentum flux. U(p) = gamma p^2 / D_pp is the
  // potential whose Boltzmann factor is the canonical Gaussian.
  const int np = f.np, nx = f.nx;
  Eigen::VectorXd bm(np + 1), bp(np + 1);  // B(-w), B(w) per face
  for (int j = 1; j < np; ++j) {
    const double pj = f.p_at(j - 1), pj1 = f.p_at(j);
    const double w = Dp > 0.0 ? g * (pj * pj - pj1 * pj1) / Dp : 0.0;
    bm[j] = detail::bernoulli(-w);
    bp[j] = detail::bernoulli(w);
  }

  Eigen::MatrixXd flux(np + 1, nx);
  auto rhs = [&](const Eigen::MatrixXd& v) {
    Eigen::MatrixXd out(np, nx);
    flux.row(0).setZero();
    flux.row(np).setZero();
    for (int i = 0; i < nx; ++i)
      for (int j = 1; j < np; ++j)
        flux(j, i) = Dp / f.dp * (bm[j] * v(j - 1, i) - bp[j] * v(j, i));
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < np; ++j)
        out(j, i) = -(flux(j + 1, i) - flux(j, i)) / f.dp;
    if (full) {
      for (int i = 0; i < nx; ++i) {
        const int il = (i + nx - 1) % nx, ir = (i + 1) % nx;
        for (int j = 0; j < np; ++j) {
          const double v_adv = f.p_at(j) / M;
          out(j, i) += -v_adv * (v(j, ir) - v(j, il)) / (2.0 * f.dx) +
                       Dx * (v(j, ir) - 2.0 * v(j, i) + v(j, il)) /
                           (f.dx * f.dx);
        }
      }
    }
    return out;
  };

  const int nsteps = static_cast<int>(std::llround(opt.t / opt.dt));
  if (on_checkpoint) on_checkpoint(0, 0.0, f);
  for (int step = 1; step <= nsteps; ++step) {
    const Eigen::MatrixXd k1 = rhs(f.values);
    const Eigen::MatrixXd k2 = rhs(f.values + (0.5 * opt.dt) * k1);
    const Eigen::MatrixXd k3 = rhs(f.values + (0.5 * opt.dt) * k2);
    const Eigen::MatrixXd k4 = rhs(f.values + opt.dt * k3);
    f.values += (opt.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (on_checkpoint && opt.checkpoint_stride > 0 &&
        (step % opt.checkpoint_stride == 0 || step == nsteps))
      on_checkpoint(step, step * opt.dt, f);
  }
  return f;
}

/// Gaussian in p (and uniform in x for phase-space fields), centered at p0
/// with width sigma, normalized to unit mass.
inline WignerField gaussian_wigner(WignerField::Mode mode, int nx, double dx,
                                   int np, double dp, double p0, double sigma) {
  WignerField f;
  f.mode = mode;
  f.nx = mode == WignerField::Mode::MomentumOnly ? 1 : nx;
  f.np = np;
  f.dx = dx;
  f.dp = dp;
  f.values.resize(np, f.nx);
  for (int j = 0; j < np; ++j) {
    const double p = f.p_at(j);
    const double w = std::exp(-0.5 * (p - p0) * (p - p0) / (sigma * sigma));
    for (int i = 0; i < f.nx; ++i) f.values(j, i) = w;
  }
  f.validate();
  f.normalize();
  return f;
}

}  // namespace qbrown

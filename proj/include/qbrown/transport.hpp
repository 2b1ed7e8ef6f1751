// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "qbrown/core.hpp"
#include "qbrown/gas.hpp"

namespace qbrown {

/// Brownian-limit transport bundle. D_xx and gamma are tied to D_pp by
/// exact relations; the quantum-statistics factor multiplies all three
/// dissipative coefficients jointly, so the gamma/D_pp ratio survives.
struct FPCoefficients {
  double D_pp = 0.0;        ///< momentum diffusion
  double D_xx = 0.0;        ///< position diffusion, (beta hbar / 4M)^2 D_pp
  double gamma = 0.0;       ///< friction, (beta / 2M) D_pp
  double stat_factor = 1.0; ///< 1, 1/(1-z) (Bose) or 1/(1+z) (Fermi)
  int dim = 3;
  double beta = 1.0;
  double M = 1.0;
  double hbar = 1.0;

  double effective_D_pp() const { return stat_factor * D_pp; }
  double effective_D_xx() const { return stat_factor * D_xx; }
  double effective_gamma() const { return stat_factor * gamma; }
};

/// Friction/diffusion coefficients of the long-wavelength limit, by
/// adaptive quadrature of the radial momentum-transfer integral. The
/// angular factor is analytic; `dim` generalizes the d = 3 case (the
/// isotropy factor <q_i^2> = q^2/d) for cheap low-dimensional runs.
inline FPCoefficients compute_coefficients(const GasSpec& gas, double M,
                                           const KernelSpec& kernel,
                                           int dim = 3) {
  gas.validate();
  kernel.validate();
  if (!(M > 0.0)) throw std::domain_error("compute_coefficients: M must be > 0");
  if (dim < 1 || dim > 3)
    throw std::domain_error("compute_coefficients: dim must be 1..3");

  const double c = gas.beta / (8.0 * gas.m);
  auto radial = [&](double q) {
    return std::pow(q, dim) * kernel.squared(q) * std::exp(-c * q * q);
  };
  const double solid_angle = dim == 1 ? 2.0 : (dim == 2 ? 2.0 * pi : 4.0 * pi);

  namespace bq = boost::math::quadrature;
  double err = 0.0;
  const double integral = bq::gauss_kronrod<double, 15>::integrate(
      radial, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12, &err);
  if (!(integral >= 0.0) || !std::isfinite(integral) ||
      (integral > 0.0 && err > 1e-9 * integral))
    throw contract_violation("compute_coefficients: quadrature did not converge");

  FPCoefficients out;
  out.dim = dim;
  out.beta = gas.beta;
  out.M = M;
  out.hbar = gas.hbar;
  out.D_pp = gas.z * (2.0 / dim) * pi * pi * gas.m * gas.m /
             (gas.beta * gas.hbar) * solid_angle * integral;
  const double r = gas.beta * gas.hbar / (4.0 * M);
  out.D_xx = r * r * out.D_pp;
  out.gamma = gas.beta / (2.0 * M) * out.D_pp;
  switch (gas.statistics) {
    case Statistics::MaxwellBoltzmann: out.stat_factor = 1.0; break;
    case Statistics::Bose: out.stat_factor = 1.0 / (1.0 - gas.z); break;
    case Statistics::Fermi: out.stat_factor = 1.0 / (1.0 + gas.z); break;
  }
  return out;
}

struct Moments {
  Vec3 p = {0.0, 0.0, 0.0};
  double E = 0.0;
};

/// Closed-form relaxation of the first moments: <p>(t) = p0 e^{-2 gamma t},
/// <E>(t) = d/(2 beta) + (E0 - d/(2 beta)) e^{-4 gamma t}, with the
/// statistics-corrected friction.
inline Moments closed_form_moments(const FPCoefficients& c, const Vec3& p0,
                                   double E0, double t) {
  const double g = c.effective_gamma();
  Moments out;
  const double fp = std::exp(-2.0 * g * t);
  for (int a = 0; a < 3; ++a) out.p[a] = p0[a] * fp;
  const double Einf = c.dim / (2.0 * c.beta);
  out.E = Einf + (E0 - Einf) * std::exp(-4.0 * g * t);
  return out;
}

}  // namespace qbrown

// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qbrown/master_equation.hpp"
#include "qbrown/transport.hpp"

namespace qbrown {

/// Side-by-side moment comparison between the lattice master equation and
/// the Brownian-limit closed forms. The long-wavelength reduction is an
/// expansion in the momentum transfer, so the discrepancy must shrink as
/// the kernel width does; this report is the raw material for that check.
struct KramersMoyalReport {
  std::vector<double> t;
  std::vector<Vec3> p_me, p_fp;
  std::vector<double> E_me, E_fp;
  double max_rel_p = 0.0;  ///< max |<p>_me - <p>_fp| / |p(0)|
  double max_rel_E = 0.0;  ///< max |<E>_me - <E>_fp| / |E(0) - E_inf|
};

inline KramersMoyalReport kramers_moyal_check(const GeneratorSpec& spec,
                                              const FPCoefficients& coeffs,
                                              const MatrixXcd& rho0,
                                              const EvolveOptions& opt) {
  const Generator gen(spec);
  const MomentSeries me = moment_trajectory(gen, rho0, opt);

  KramersMoyalReport rep;
  rep.t = me.t;
  rep.p_me = me.p;
  rep.E_me = me.E;

  const Vec3 p0 = me.p.front();
  const double E0 = me.E.front();
  const double Einf = coeffs.dim / (2.0 * coeffs.beta);
  const double p_scale = std::max(norm(p0), 1e-300);
  const double E_scale = std::max(std::fabs(E0 - Einf), 1e-300);

  for (std::size_t k = 0; k < me.t.size(); ++k) {
    const Moments fp = closed_form_moments(coeffs, p0, E0, me.t[k]);
    rep.p_fp.push_back(fp.p);
    rep.E_fp.push_back(fp.E);
    Vec3 dp;
    for (int a = 0; a < 3; ++a) dp[a] = me.p[k][a] - fp.p[a];
    rep.max_rel_p = std::max(rep.max_rel_p, norm(dp) / p_scale);
    rep.max_rel_E =
        std::max(rep.max_rel_E, std::fabs(me.E[k] - fp.E) / E_scale);
  }
  return rep;
}

}  // namespace qbrown

// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qbrown/core.hpp"
#include "qbrown/gas.hpp"

namespace qbrown {

/// Spectral weight per unit energy, binned over [edges[i], edges[i+1]).
struct EnergyHistogram {
  std::vector<double> edges;    ///< nbins + 1 monotone bin edges
  std::vector<double> density;  ///< weight / bin width
  double total_weight = 0.0;    ///< in-range integrated weight

  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

/// Equilibrium mode occupation of the ideal gas.
inline double mode_occupation(const GasSpec& g, double p_squared) {
  const double t = g.z * std::exp(-0.5 * g.beta * p_squared / g.m);
  switch (g.statistics) {
    case Statistics::MaxwellBoltzmann: return t;
    case Statistics::Bose: return t / (1.0 - t);
    case Statistics::Fermi: return t / (1.0 + t);
  }
  return 0.0;
}

/// Brute-force discrete-sum oracle for S(q,E): sums the delta-function
/// contributions of scattering a gas mode p -> p - q, weighted by
/// <n_p>(1 +- <n_{p-q}>), over a cubic momentum-mode grid symmetric about
/// zero with `sites` modes of spacing `dp` per axis. Bin averages converge
/// to the continuum closed forms as the grid refines.
inline EnergyHistogram dsf_discrete_oracle(const GasSpec& gas, int sites,
                                           double dp, const Vec3& q,
                                           double e_min, double e_max,
                                           int nbins) {
  gas.validate();
  if (sites < 2 || dp <= 0.0)
    throw std::domain_error("dsf_discrete_oracle: invalid mode grid");
  if (nbins < 1 || !(e_max > e_min))
    throw std::domain_error("dsf_discrete_oracle: invalid energy bins");
  const double qn = norm(q);
  if (!(qn > 0.0))
    throw std::domain_error(
        "dsf_discrete_oracle: q = 0 (forward term) is excluded");

  EnergyHistogram h;
  h.edges.resize(nbins + 1);
  const double width = (e_max - e_min) / nbins;
  for (int i = 0; i <= nbins; ++i) h.edges[i] = e_min + width * i;
  h.density.assign(nbins, 0.0);

  const double sign = gas.statistics == Statistics::Fermi ? -1.0 : 1.0;
  const bool classical = gas.statistics == Statistics::MaxwellBoltzmann;
  const double twopih = 2.0 * pi * gas.hbar;
  // Continuum normalization 1/N sum_mu -> (1/(n (2 pi hbar)^3)) integral d^3p.
  const double cell = dp * dp * dp / (gas.n * twopih * twopih * twopih);

  auto coord = [&](int i) { return (i + 0.5 - 0.5 * sites) * dp; };

  for (int ix = 0; ix < sites; ++ix) {
    const double px = coord(ix);
    for (int iy = 0; iy < sites; ++iy) {
      const double py = coord(iy);
      for (int iz = 0; iz < sites; ++iz) {
        const double pz = coord(iz);
        const double pq = px * q[0] + py * q[1] + pz * q[2];
        const double E = pq / gas.m - qn * qn / (2.0 * gas.m);
        if (E < e_min || E >= e_max) continue;
        const double p2 = px * px + py * py + pz * pz;
        double w = mode_occupation(gas, p2);
        if (!classical) {
          const double rx = px - q[0], ry = py - q[1], rz = pz - q[2];
          w *= 1.0 + sign * mode_occupation(gas, rx * rx + ry * ry + rz * rz);
        }
        const int b = static_cast<int>((E - e_min) / width);
        h.density[static_cast<std::size_t>(b)] += w * cell;
        h.total_weight += w * cell;
      }
    }
  }
  for (auto& d : h.density) d /= width;
  return h;
}

}  // namespace qbrown

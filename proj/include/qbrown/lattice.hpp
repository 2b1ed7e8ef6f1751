// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <stdexcept>

#include "qbrown/core.hpp"

namespace qbrown {

/// Finite momentum lattice, symmetric about p = 0: site momenta are
/// half-integer multiples of the spacing, so that -p is a site whenever p
/// is. Shifts act periodically when wrap is set.
struct MomentumLattice {
  int dim = 1;
  std::array<int, 3> sites = {8, 1, 1};  ///< site count per active axis, even
  double dp = 1.0;
  bool wrap = true;

  void validate() const {
    if (dim < 1 || dim > 3) throw std::domain_error("MomentumLattice: dim must be 1..3");
    if (!(dp > 0.0)) throw std::domain_error("MomentumLattice: dp must be > 0");
    for (int a = 0; a < dim; ++a)
      if (sites[a] < 2 || sites[a] % 2 != 0)
        throw std::domain_error("MomentumLattice: site counts must be even and >= 2");
    for (int a = dim; a < 3; ++a)
      if (sites[a] != 1)
        throw std::domain_error("MomentumLattice: inactive axes must have 1 site");
  }

  int size() const { return sites[0] * sites[1] * sites[2]; }

  std::array<int, 3> unflatten(int idx) const {
    std::array<int, 3> c{};
    c[0] = idx % sites[0];
    c[1] = (idx / sites[0]) % sites[1];
    c[2] = idx / (sites[0] * sites[1]);
    return c;
  }

  int flatten(const std::array<int, 3>& c) const {
    return c[0] + sites[0] * (c[1] + sites[1] * c[2]);
  }

  double axis_momentum(int axis, int i) const {
    return (i + 0.5 - 0.5 * sites[axis]) * dp;
  }

  Vec3 momentum(int idx) const {
    const auto c = unflatten(idx);
    return {axis_momentum(0, c[0]), axis_momentum(1, c[1]),
            axis_momentum(2, c[2])};
  }

  /// Site index shifted by -shift (the source site p - q for a transfer q
  /// of shift[a]*dp along each axis); -1 if it falls off a non-wrapping
  /// lattice.
  int source_index(int idx, const std::array<int, 3>& shift) const {
    auto c = unflatten(idx);
    for (int a = 0; a < 3; ++a) {
      int v = c[a] - shift[a];
      if (wrap) {
        v %= sites[a];
        if (v < 0) v += sites[a];
      } else if (v < 0 || v >= sites[a]) {
        return -1;
      }
      c[a] = v;
    }
    return flatten(c);
  }
};

}  // namespace qbrown

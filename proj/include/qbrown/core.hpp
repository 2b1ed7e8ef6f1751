// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qbrown {

inline constexpr double pi = 3.14159265358979323846;

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Thrown when a numerical contract (trace preservation, positivity,
/// stability bound, ...) is violated at runtime. The CLI maps this to
/// exit code 2, as opposed to plain validation errors (exit code 1).
struct contract_violation : std::runtime_error {
  explicit contract_violation(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace qbrown

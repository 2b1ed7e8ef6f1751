// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "qbrown/dsf.hpp"

using namespace qbrown;

namespace {

GasSpec make_gas(Statistics st, double m, double beta, double z, double n = 1.0) {
  GasSpec g;
  g.statistics = st;
  g.m = m;
  g.beta = beta;
  g.z = z;
  g.n = n;
  return g;
}

double quantum(const GasSpec& g, double q, double E, bool log_form) {
  const bool bose = g.statistics == Statistics::Bose;
  DsfForm f = log_form ? (bose ? DsfForm::BoseLog : DsfForm::FermiLog)
                       : (bose ? DsfForm::BoseArth : DsfForm::FermiArth);
  return evaluate_dsf(g, Kinematics{q, E}, DsfModel{f, 0.0});
}

}  // namespace

TEST_CASE("reference value at the zero of the Gaussian exponent") {
  // m = beta = n = hbar = 1, q = 1, E = -q^2/2m: the MB exponent vanishes
  // and S = z * (2 pi m^2)/(n beta q) / (2 pi)^3 = z / (2 pi)^2.
  const GasSpec g = make_gas(Statistics::MaxwellBoltzmann, 1.0, 1.0, 0.3);
  const double s = evaluate_dsf(g, {1.0, -0.5}, {DsfForm::MB, 0.0});
  REQUIRE(s == Catch::Approx(0.3 / (4.0 * pi * pi)).epsilon(1e-14));
}

TEST_CASE("log and arth representations agree to near machine precision") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> um(0.1, 3.0), uq(0.1, 3.0),
      ue(-8.0, 8.0), uz(0.0, 0.95);
  for (int k = 0; k < 5000; ++k) {
    GasSpec g = make_gas(k % 2 ? Statistics::Bose : Statistics::Fermi,
                         um(rng), um(rng), uz(rng), um(rng));
    const double q = uq(rng), E = ue(rng);
    const double a = quantum(g, q, E, true);
    const double b = quantum(g, q, E, false);
    REQUIRE(std::fabs(a - b) <= 1e-12 * std::max(a, 1e-300));
  }
}

TEST_CASE("detailed balance S(q,E) = e^{-beta E} S(q,-E)") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> um(0.1, 3.0), uq(0.1, 3.0),
      ue(-8.0, 8.0), uz(0.0, 0.95);
  for (int k = 0; k < 3000; ++k) {
    GasSpec g = make_gas(k % 3 == 0 ? Statistics::MaxwellBoltzmann
                                    : (k % 3 == 1 ? Statistics::Bose
                                                  : Statistics::Fermi),
                         um(rng), um(rng), uz(rng), um(rng));
    const DsfForm f = k % 3 == 0 ? DsfForm::MB
                                 : (k % 3 == 1 ? DsfForm::BoseLog
                                               : DsfForm::FermiLog);
    const double q = uq(rng), E = ue(rng);
    const double a = evaluate_dsf(g, {q, E}, {f, 0.0});
    const double b = evaluate_dsf(g, {q, -E}, {f, 0.0});
    REQUIRE(std::fabs(a - std::exp(-g.beta * E) * b) <=
            1e-10 * std::max(a, 1e-300));
    REQUIRE(a >= 0.0);
  }
}

TEST_CASE("quantum forms reduce to Maxwell-Boltzmann at first order in z") {
  auto worst = [](double z) {
    double w = 0.0;
    for (double q = 0.3; q < 3.0; q += 0.45)
      for (double E = -3.0; E <= 3.0; E += 0.6)
        for (int st = 0; st < 2; ++st) {
          GasSpec g = make_gas(st ? Statistics::Bose : Statistics::Fermi, 1.0,
                               1.0, z);
          GasSpec gm = make_gas(Statistics::MaxwellBoltzmann, 1.0, 1.0, z);
          const double a = quantum(g, q, E, true);
          const double b = evaluate_dsf(gm, {q, E}, {DsfForm::MB, 0.0});
          w = std::max(w, std::fabs(a / b - 1.0));
        }
    return w;
  };
  const double w3 = worst(1e-3);
  const double w4 = worst(5e-4);
  REQUIRE(w3 < 5e-3);
  // the deviation is first order in z: halving z halves the residual
  REQUIRE(w3 / w4 == Catch::Approx(2.0).margin(0.2));
}

TEST_CASE("MB factorization identity with the Gaussian correction factor") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> um(0.3, 2.0), uq(0.5, 3.0),
      ue(-2.0, 2.0), uz(0.01, 0.95);
  for (int k = 0; k < 3000; ++k) {
    GasSpec g = make_gas(Statistics::MaxwellBoltzmann, um(rng), um(rng),
                         uz(rng), um(rng));
    const double q = uq(rng), E1 = ue(rng), E2 = ue(rng);
    const DsfModel mb{DsfForm::MB, 0.0};
    const double lhs = evaluate_dsf(g, {q, 0.5 * (E1 + E2)}, mb);
    const double rhs =
        std::sqrt(evaluate_dsf(g, {q, E1}, mb) * evaluate_dsf(g, {q, E2}, mb)) *
        std::exp(g.beta * g.m / (8.0 * q * q) * (E1 - E2) * (E1 - E2));
    REQUIRE(std::fabs(lhs / rhs - 1.0) < 1e-12);
  }
}

TEST_CASE("Brownian-limit form factorizes exactly, no correction factor") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> um(0.3, 2.0), uq(0.5, 3.0),
      ue(-2.0, 2.0), uz(0.01, 0.95);
  for (int k = 0; k < 3000; ++k) {
    GasSpec g = make_gas(Statistics::MaxwellBoltzmann, um(rng), um(rng),
                         uz(rng), um(rng));
    const double q = uq(rng), E1 = ue(rng), E2 = ue(rng);
    const DsfModel br{DsfForm::BrownianLimitMB, 0.0};
    const double lhs = evaluate_dsf(g, {q, 0.5 * (E1 + E2)}, br);
    const double rhs =
        std::sqrt(evaluate_dsf(g, {q, E1}, br) * evaluate_dsf(g, {q, E2}, br));
    REQUIRE(std::fabs(lhs / rhs - 1.0) < 1e-12);
  }
}

TEST_CASE("Brownian limit of the MB form as the mass ratio vanishes") {
  // For E = q^2/2M + q p/M the two forms differ by a factor that tends to 1
  // as alpha = m/M -> 0; check the known finite-alpha ratio at p = 0, where
  // S_MB / S_brownian = exp(-(beta q^2 / 8m) alpha^2).
  const double q = 1.3, m = 0.8, beta = 1.1;
  const GasSpec g = make_gas(Statistics::MaxwellBoltzmann, m, beta, 0.4);
  for (double M : {2.0, 10.0, 100.0}) {
    const double alpha = m / M;
    const double E = q * q / (2.0 * M);
    const double a = evaluate_dsf(g, {q, E}, {DsfForm::MB, 0.0});
    const double b = evaluate_dsf(g, {q, E}, {DsfForm::BrownianLimitMB, 0.0});
    const double expected =
        std::exp(-beta * q * q / (8.0 * m) * alpha * alpha);
    REQUIRE(a / b == Catch::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("stability at extreme |beta E| (no overflow, NaN or negative)") {
  for (double E : {-500.0, -50.0, 50.0, 500.0})
    for (int st = 0; st < 2; ++st) {
      GasSpec g = make_gas(st ? Statistics::Bose : Statistics::Fermi, 1.0,
                           2.0, 0.9);
      const double a = quantum(g, 1.0, E, true);
      const double b = quantum(g, 1.0, E, false);
      REQUIRE(std::isfinite(a));
      REQUIRE(a >= 0.0);
      REQUIRE(std::fabs(a - b) <= 1e-12 * std::max(a, 1e-300));
    }
}

TEST_CASE("removable pole at E = 0 matches the one-sided limits") {
  GasSpec g = make_gas(Statistics::Bose, 1.0, 1.0, 0.7);
  const double s0 = quantum(g, 1.0, 0.0, true);
  const double sp = quantum(g, 1.0, 1e-9, true);
  const double sm = quantum(g, 1.0, -1e-9, true);
  REQUIRE(sp == Catch::Approx(s0).epsilon(1e-6));
  REQUIRE(sm == Catch::Approx(s0).epsilon(1e-6));
}

TEST_CASE("cross-section composition") {
  const GasSpec g = make_gas(Statistics::MaxwellBoltzmann, 1.0, 1.0, 0.3);
  KernelSpec ker{KernelSpec::Form::Gaussian, 0.7, 1.2};
  const double M = 5.0;
  const DsfModel mb{DsfForm::MB, 0.0};
  const Vec3 p_in = {2.0, 0.0, 0.0};
  const Vec3 p_out = {1.0, 1.0, 0.0};

  const Vec3 q = {p_out[0] - p_in[0], p_out[1] - p_in[1], p_out[2] - p_in[2]};
  const double qn = norm(q);
  const double E = (dot(p_out, p_out) - dot(p_in, p_in)) / (2.0 * M);
  const double f3 = std::pow(2.0 * pi * g.hbar, 3.0);
  const double amp = M / (2.0 * pi * g.hbar * g.hbar);
  const double expected = f3 * f3 * amp * amp * (norm(p_out) / norm(p_in)) *
                          ker.squared(qn) *
                          evaluate_dsf(g, {qn, E}, mb);
  REQUIRE(cross_section(g, ker, M, mb, p_in, p_out) ==
          Catch::Approx(expected).epsilon(1e-14));

  // elastic forward limit keeps the kinematic ratio at one
  const Vec3 p_el = {0.0, 2.0, 0.0};
  const double el = cross_section(g, ker, M, mb, p_in, p_el);
  REQUIRE(el > 0.0);
}

TEST_CASE("validation errors name the offending field") {
  GasSpec g = make_gas(Statistics::Bose, 1.0, 1.0, 1.2);
  REQUIRE_THROWS_WITH(evaluate_dsf(g, {1.0, 0.0}, {DsfForm::BoseLog, 0.0}),
                      Catch::Matchers::ContainsSubstring("z"));
  GasSpec bad = make_gas(Statistics::MaxwellBoltzmann, -1.0, 1.0, 0.1);
  REQUIRE_THROWS_WITH(evaluate_dsf(bad, {1.0, 0.0}, {DsfForm::MB, 0.0}),
                      Catch::Matchers::ContainsSubstring("m"));
  GasSpec ok = make_gas(Statistics::MaxwellBoltzmann, 1.0, 1.0, 0.1);
  REQUIRE_THROWS_WITH(evaluate_dsf(ok, {0.0, 0.0}, {DsfForm::MB, 0.0}),
                      Catch::Matchers::ContainsSubstring("q"));
  REQUIRE_THROWS_AS(evaluate_dsf(ok, {1.0, 0.0}, {DsfForm::BoseLog, 0.0}),
                    std::domain_error);
  REQUIRE_THROWS_AS(dsf_form_from_string("nope"), std::domain_error);
}

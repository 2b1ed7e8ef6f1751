// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "qbrown/transport.hpp"

using namespace qbrown;

namespace {

GasSpec unit_gas(Statistics st = Statistics::MaxwellBoltzmann, double z = 1.0) {
  GasSpec g;
  g.statistics = st;
  g.z = z;
  return g;
}

}  // namespace

TEST_CASE("Gaussian-kernel momentum diffusion matches the closed form") {
  // With |t(q)|^2 = t0^2 e^{-q^2/2 sigma^2} the radial integral is analytic:
  // D_pp = (4 pi^3 / 3) m^2 t0^2 / (beta hbar alpha^2),
  // alpha = 1/(2 sigma^2) + beta/(8 m).
  const GasSpec g = unit_gas();
  const KernelSpec k{KernelSpec::Form::Gaussian, 1.0, 1.0};
  const FPCoefficients c = compute_coefficients(g, 1.0, k, 3);
  const double alpha = 0.5 + 1.0 / 8.0;
  const double closed = 4.0 * pi * pi * pi / 3.0 / alpha / alpha;
  REQUIRE(std::fabs(c.D_pp / closed - 1.0) < 1e-8);
  REQUIRE(c.D_pp == Catch::Approx(105.834757735).epsilon(1e-8));
}

TEST_CASE("contact-kernel coefficients scale analytically") {
  // |t|^2 = t0^2: integral_0^inf q^3 e^{-beta q^2 / 8m} dq = 32 m^2/beta^2.
  const GasSpec g = unit_gas();
  const KernelSpec k{KernelSpec::Form::Contact, 2.0, 0.0};
  const FPCoefficients c = compute_coefficients(g, 1.0, k, 3);
  const double closed =
      1.0 * (2.0 / 3.0) * pi * pi * 4.0 * pi * 4.0 * 32.0;  // z .. t0^2 ..
  REQUIRE(c.D_pp == Catch::Approx(closed).epsilon(1e-8));
}

TEST_CASE("exact coefficient relations") {
  const GasSpec g = unit_gas(Statistics::MaxwellBoltzmann, 0.7);
  const KernelSpec k{KernelSpec::Form::Gaussian, 0.8, 1.3};
  for (double M : {1.0, 4.0, 25.0}) {
    const FPCoefficients c = compute_coefficients(g, M, k, 3);
    const double r = g.beta * g.hbar / (4.0 * M);
    REQUIRE(c.D_xx == Catch::Approx(r * r * c.D_pp).epsilon(1e-14));
    REQUIRE(c.gamma ==
            Catch::Approx(g.beta / (2.0 * M) * c.D_pp).epsilon(1e-14));
  }
}

TEST_CASE("quantum statistics scale all dissipative coefficients jointly") {
  const KernelSpec k{KernelSpec::Form::Gaussian, 1.0, 1.0};
  const FPCoefficients mb =
      compute_coefficients(unit_gas(Statistics::MaxwellBoltzmann, 0.5), 1.0, k);
  const FPCoefficients bose =
      compute_coefficients(unit_gas(Statistics::Bose, 0.5), 1.0, k);
  const FPCoefficients fermi =
      compute_coefficients(unit_gas(Statistics::Fermi, 0.5), 1.0, k);
  REQUIRE(bose.stat_factor == Catch::Approx(2.0).epsilon(1e-14));
  REQUIRE(fermi.stat_factor == Catch::Approx(1.0 / 1.5).epsilon(1e-14));
  REQUIRE(bose.effective_D_pp() ==
          Catch::Approx(2.0 * mb.effective_D_pp()).epsilon(1e-12));
  REQUIRE(fermi.effective_gamma() ==
          Catch::Approx(mb.effective_gamma() / 1.5).epsilon(1e-12));
  // enhancement ordering: Bose > MB > Fermi
  REQUIRE(bose.effective_D_pp() > mb.effective_D_pp());
  REQUIRE(fermi.effective_D_pp() < mb.effective_D_pp());
  // the friction / diffusion ratio is statistics-independent
  REQUIRE(bose.effective_gamma() / bose.effective_D_pp() ==
          Catch::Approx(mb.gamma / mb.D_pp).epsilon(1e-14));
}

TEST_CASE("dimension generalization") {
  const GasSpec g = unit_gas();
  const KernelSpec k{KernelSpec::Form::Gaussian, 1.0, 1.0};
  const double alpha = 0.5 + 1.0 / 8.0;
  // d = 1: (2/1) pi^2 / beta hbar * 2 * integral q e^{-alpha q^2}
  //      = 4 pi^2 / (2 alpha)
  const FPCoefficients c1 = compute_coefficients(g, 1.0, k, 1);
  REQUIRE(c1.D_pp == Catch::Approx(2.0 * pi * pi / alpha).epsilon(1e-8));
  // d = 2: (2/2) pi^2 * 2 pi * integral q^2 e^{-alpha q^2}
  //      = 2 pi^3 * sqrt(pi) / (4 alpha^{3/2})
  const FPCoefficients c2 = compute_coefficients(g, 1.0, k, 2);
  REQUIRE(c2.D_pp == Catch::Approx(2.0 * pi * pi * pi * std::sqrt(pi) /
                                   (4.0 * std::pow(alpha, 1.5)))
                         .epsilon(1e-8));
  REQUIRE_THROWS_AS(compute_coefficients(g, 1.0, k, 4), std::domain_error);
  REQUIRE_THROWS_AS(compute_coefficients(g, 0.0, k, 3), std::domain_error);
}

TEST_CASE("closed-form moments relax exponentially to equipartition") {
  FPCoefficients c;
  c.D_pp = 1.0;
  c.gamma = 0.5;
  c.D_xx = 1.0 / 16.0;
  c.beta = 2.0;
  c.dim = 3;
  const Vec3 p0 = {2.0, -1.0, 0.5};
  const double E0 = 4.0;
  const Moments m0 = closed_form_moments(c, p0, E0, 0.0);
  REQUIRE(m0.p[0] == Catch::Approx(2.0));
  REQUIRE(m0.E == Catch::Approx(4.0));
  const double t = 0.7;
  const Moments mt = closed_form_moments(c, p0, E0, t);
  for (int a = 0; a < 3; ++a)
    REQUIRE(mt.p[a] == Catch::Approx(p0[a] * std::exp(-2.0 * 0.5 * t)));
  const double Einf = 3.0 / (2.0 * 2.0);
  REQUIRE(mt.E ==
          Catch::Approx(Einf + (E0 - Einf) * std::exp(-4.0 * 0.5 * t)));
  // late times: equipartition
  REQUIRE(closed_form_moments(c, p0, E0, 100.0).E == Catch::Approx(Einf));
}

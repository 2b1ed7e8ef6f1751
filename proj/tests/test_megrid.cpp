// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "qbrown/master_equation.hpp"
#include "qbrown/transport.hpp"

using namespace qbrown;

namespace {

GeneratorSpec base_spec(int sites, double extent) {
  GeneratorSpec gs;
  gs.lattice = MomentumLattice{1, {sites, 1, 1}, extent / sites, true};
  gs.gas.m = 1.0;
  gs.gas.beta = 1.0;
  gs.gas.z = 0.2;
  gs.gas.n = 1.0;
  gs.kernel = KernelSpec{KernelSpec::Form::Gaussian, 1.0, 0.8};
  gs.model = DsfModel{DsfForm::BrownianLimitMB, 1.0};
  return gs;
}

MatrixXcd random_density(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  MatrixXcd r(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) r(i, j) = {dist(rng), dist(rng)};
  MatrixXcd rho = r * r.adjoint();
  rho /= rho.trace().real();
  return rho;
}

}  // namespace

TEST_CASE("zero coupling leaves only the free commutator") {
  GeneratorSpec gs = base_spec(8, 10.0);
  gs.kernel.t0 = 0.0;
  const Generator gen(gs);
  const MatrixXcd rho = random_density(8, 3);
  const MatrixXcd L = gen.apply(rho);
  // the dissipator vanishes ...
  REQUIRE(gen.apply_dissipator(rho).cwiseAbs().maxCoeff() < 1e-14);
  // ... and the remaining commutator has the explicit matrix elements
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) {
      const std::complex<double> expected =
          std::complex<double>(0.0, -1.0) *
          (gen.site_energies()[i] - gen.site_energies()[j]) * rho(i, j);
      REQUIRE(std::abs(L(i, j) - expected) < 1e-14);
    }
}

TEST_CASE("generator output is traceless and Hermiticity-preserving") {
  const Generator gen(base_spec(12, 12.0));
  const MatrixXcd rho = random_density(12, 5);
  const MatrixXcd L = gen.apply(rho);
  REQUIRE(std::abs(L.trace()) < 1e-12);
  REQUIRE((L - L.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("diagonal states follow the classical rate equation exactly") {
  const Generator gen(base_spec(16, 16.0));
  const int n = gen.dimension();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  MatrixXcd rho = MatrixXcd::Zero(n, n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    rho(i, i) = u(rng);
    z += rho(i, i).real();
  }
  rho /= z;
  const MatrixXcd L = gen.apply(rho);
  for (int i = 0; i < n; ++i) {
    // independent scalar rate sum: gain from p - q minus total loss
    double acc = 0.0;
    for (const auto& t : gen.terms()) {
      const int s = t.src[i];
      acc += t.weight *
             (t.S[s] * rho(s, s).real() - t.S[i] * rho(i, i).real());
    }
    REQUIRE(std::abs(L(i, i).real() - acc) < 1e-12);
    for (int j = 0; j < n; ++j)
      if (i != j) REQUIRE(std::abs(L(i, j)) < 1e-14);
  }
}

TEST_CASE("collision rates obey detailed balance") {
  GeneratorSpec gs = base_spec(16, 16.0);
  const Generator gen(gs);
  const int n = gen.dimension();
  for (const auto& t : gen.terms())
    for (int i = 0; i < n; ++i) {
      const std::array<int, 3> back = {-t.shift[0], -t.shift[1], -t.shift[2]};
      const int j = gs.lattice.source_index(i, back);  // site of p + q
      // skip pairs that wrap around the lattice edge
      const auto c = gs.lattice.unflatten(i);
      if (c[0] + t.shift[0] < 0 || c[0] + t.shift[0] >= gs.lattice.sites[0])
        continue;
      double w_back = 0.0;
      for (const auto& u : gen.terms())
        if (u.shift == back) w_back = u.weight * u.S[j];
      REQUIRE(w_back > 0.0);
      const double ratio = t.weight * t.S[i] / w_back;
      REQUIRE(std::fabs(ratio - std::exp(-gs.gas.beta * t.dE[i])) <
              1e-10 * ratio);
    }
}

TEST_CASE("canonical state is stationary") {
  GeneratorSpec gs = base_spec(32, 20.0);
  const Generator gen(gs);
  const MatrixXcd w0 = canonical_state(gs.lattice, gs.gas.beta, 1.0);
  const MatrixXcd L = gen.apply(w0);
  double l1 = 0.0, scale = 0.0;
  for (int i = 0; i < gen.dimension(); ++i) {
    l1 += std::abs(L(i, i).real());
    double loss = 0.0;
    for (const auto& t : gen.terms()) loss += t.weight * t.S[i];
    scale += loss * w0(i, i).real();
  }
  REQUIRE(l1 / scale < 1e-10);
}

TEST_CASE("evolve conserves the trace and reports monitor data") {
  GeneratorSpec gs = base_spec(16, 16.0);
  const Generator gen(gs);
  const MatrixXcd rho0 = random_density(16, 11);
  EvolveOptions opt;
  opt.dt = 0.05 / gen.estimate_norm();
  opt.t = 300 * opt.dt;
  EvolveMonitor mon;
  const MatrixXcd rho = evolve(gen, rho0, opt, &mon);
  REQUIRE(mon.steps == 300);
  REQUIRE(mon.max_trace_drift < 1e-12);
  REQUIRE(std::abs(rho.trace().real() - 1.0) < 1e-12);
  REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(mon.max_boundary_mass <= 1.0);
  REQUIRE(mon.max_boundary_mass > 0.0);
}

TEST_CASE("evolution relaxes toward the canonical state") {
  GeneratorSpec gs = base_spec(32, 20.0);
  gs.kernel.sigma = 0.5;
  const Generator gen(gs);
  const MatrixXcd w0 = canonical_state(gs.lattice, gs.gas.beta, 1.0);
  const MatrixXcd rho0 =
      gaussian_diagonal_state(gs.lattice, {1.5, 0.0, 0.0}, 1.0);

  auto trace_distance = [](const MatrixXcd& a, const MatrixXcd& b) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
  };

  EvolveOptions opt;
  opt.dt = 0.3 / gen.estimate_norm();
  opt.max_dt_norm = 0.4;
  const double d0 = trace_distance(rho0, w0);

  // one relaxation time: clear contraction
  const double g =
      compute_coefficients(gs.gas, 1.0, gs.kernel, 1).effective_gamma();
  opt.t = std::ceil(1.0 / (2.0 * g) / opt.dt) * opt.dt;
  const MatrixXcd r1 = evolve(gen, rho0, opt);
  const double d1 = trace_distance(r1, w0);
  REQUIRE(d1 < 0.7 * d0);

  // five relaxation times: essentially converged
  opt.t = std::ceil(5.0 / (2.0 * g) / opt.dt) * opt.dt;
  const MatrixXcd r5 = evolve(gen, rho0, opt);
  REQUIRE(trace_distance(r5, w0) < 0.05 * d0);
}

TEST_CASE("moment trajectory tracks momentum and energy expectations") {
  GeneratorSpec gs = base_spec(16, 16.0);
  const Generator gen(gs);
  const MatrixXcd rho0 =
      gaussian_diagonal_state(gs.lattice, {1.0, 0.0, 0.0}, 1.0);
  EvolveOptions opt;
  opt.dt = 0.1 / gen.estimate_norm();
  opt.t = 100 * opt.dt;
  opt.checkpoint_stride = 10;
  const MomentSeries s = moment_trajectory(gen, rho0, opt);
  REQUIRE(s.t.size() == 11);
  REQUIRE(s.t.front() == 0.0);
  REQUIRE(s.p.front()[0] == Catch::Approx(1.0).margin(0.05));
  // friction drains the mean momentum monotonically
  for (std::size_t k = 1; k < s.t.size(); ++k) {
    REQUIRE(s.p[k][0] < s.p[k - 1][0] + 1e-12);
    REQUIRE(std::abs(s.trace[k] - 1.0) < 1e-12);
  }
}

TEST_CASE("step-size and state validation") {
  GeneratorSpec gs = base_spec(8, 10.0);
  const Generator gen(gs);
  const MatrixXcd rho0 = random_density(8, 17);
  EvolveOptions opt;
  opt.dt = 10.0 / gen.estimate_norm();  // way past the bound
  opt.t = opt.dt;
  REQUIRE_THROWS_AS(evolve(gen, rho0, opt), std::invalid_argument);

  MatrixXcd bad = rho0;
  bad(0, 1) += std::complex<double>(0.5, 0.0);  // breaks Hermiticity
  opt.dt = 0.05 / gen.estimate_norm();
  REQUIRE_THROWS_AS(evolve(gen, bad, opt), std::invalid_argument);

  REQUIRE_THROWS_AS(gen.apply(MatrixXcd::Zero(4, 4)), std::invalid_argument);

  GeneratorSpec nomass = gs;
  nomass.model.test_mass = 0.0;
  REQUIRE_THROWS_WITH(Generator(nomass),
                      Catch::Matchers::ContainsSubstring("test_mass"));

  GeneratorSpec odd = gs;
  odd.lattice.sites = {7, 1, 1};
  REQUIRE_THROWS_AS(Generator(odd), std::domain_error);
}

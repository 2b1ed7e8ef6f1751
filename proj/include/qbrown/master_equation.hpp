// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbrown/core.hpp"
#include "qbrown/dsf.hpp"
#include "qbrown/gas.hpp"
#include "qbrown/lattice.hpp"

namespace qbrown {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

/// Collisional master equation on a momentum lattice.
///
/// With the geometric-mean factorization of the structure factor the
/// generator is in GKSL form: one jump operator per nonzero momentum
/// transfer q, equal to the lattice shift by q times diag(sqrt(S(q,p))).
struct GeneratorSpec {
  MomentumLattice lattice;
  GasSpec gas;
  KernelSpec kernel;
  DsfModel model;  ///< model.test_mass is the test-particle mass M > 0

  /// Use sqrt(S) rho sqrt(S) (GKSL) gain; when false, the gain carries the
  /// unfactorized arithmetic-mean energy argument, for measuring the
  /// factorization error on quasi-diagonal states.
  bool factorized = true;

  /// Scales the loss (anticommutator) half of the dissipator. Anything but
  /// 1.0 breaks the GKSL balance; kept as a deliberate negative control for
  /// the complete-positivity certification.
  double anticommutator_scale = 1.0;

  /// Collision terms whose peak rate is below this fraction of the largest
  /// one are dropped. The criterion is even in q, so the q <-> -q pairing
  /// behind detailed balance is preserved.
  double term_cutoff = 1e-15;

  void validate() const {
    lattice.validate();
    gas.validate();
    kernel.validate();
    if (!(model.test_mass > 0.0))
      throw std::domain_error("GeneratorSpec: model.test_mass must be > 0");
    detail::check_form_statistics(gas, model.form);
  }
};

class Generator {
 public:
  struct Term {
    std::array<int, 3> shift;  ///< q / dp per axis
    double q_norm;
    double weight;             ///< (2 pi/hbar)(2 pi hbar)^3 n |t(q)|^2 dp^dim
    VectorXd S;                ///< S(q, dE_q(p)) per site
    VectorXd sqrtS;
    VectorXd dE;               ///< dE_q(p) = q^2/2M + q.p/M per site
    std::vector<int> src;      ///< source site of p - q, or -1 off-lattice
    VectorXd amp;              ///< sqrt(weight) * sqrtS[src], wrap only
  };

  explicit Generator(GeneratorSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const auto& lat = spec_.lattice;
    const int n = lat.size();
    const double M = spec_.model.test_mass;
    const double hbar = spec_.gas.hbar;

    energies_.resize(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 p = lat.momentum(i);
      energies_[i] = dot(p, p) / (2.0 * M);
    }

    const double twopih = 2.0 * pi * hbar;
    const double coupling = (2.0 * pi / hbar) * twopih * twopih * twopih *
                            spec_.gas.n * std::pow(lat.dp, lat.dim);

    double peak = 0.0;
    std::vector<Term> all;
    std::array<int, 3> s{};
    for (s[2] = -(lat.sites[2] - 1); s[2] <= lat.sites[2] - 1; ++s[2])
      for (s[1] = -(lat.sites[1] - 1); s[1] <= lat.sites[1] - 1; ++s[1])
        for (s[0] = -(lat.sites[0] - 1); s[0] <= lat.sites[0] - 1; ++s[0]) {
          if (s[0] == 0 && s[1] == 0 && s[2] == 0) continue;  // primed sum
          Term t;
          t.shift = s;
          const Vec3 q = {s[0] * lat.dp, s[1] * lat.dp, s[2] * lat.dp};
          t.q_norm = norm(q);
          t.weight = coupling * spec_.kernel.squared(t.q_norm);
          t.S.resize(n);
          t.dE.resize(n);
          for (int i = 0; i < n; ++i) {
            const Vec3 p = lat.momentum(i);
            t.dE[i] = t.q_norm * t.q_norm / (2.0 * M) + dot(q, p) / M;
            t.S[i] = evaluate_dsf(spec_.gas, Kinematics{t.q_norm, t.dE[i]},
                                  spec_.model);
          }
          t.sqrtS = t.S.cwiseSqrt();
          t.src.resize(n);
          for (int i = 0; i < n; ++i) t.src[i] = lat.source_index(i, s);
          peak = std::max(peak, t.weight * t.S.maxCoeff());
          all.push_back(std::move(t));
        }
    for (auto& t : all)
      if (t.weight * t.S.maxCoeff() >= spec_.term_cutoff * peak)
        terms_.push_back(std::move(t));

    loss_rates_ = VectorXd::Zero(n);
    for (auto& t : terms_) {
      loss_rates_ += t.weight * t.S;
      if (lat.wrap) {
        t.amp.resize(n);
        const double sw = std::sqrt(t.weight);
        for (int i = 0; i < n; ++i) t.amp[i] = sw * t.sqrtS[t.src[i]];
      }
    }
  }

  const GeneratorSpec& spec() const { return spec_; }
  int dimension() const { return spec_.lattice.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const VectorXd& site_energies() const { return energies_; }

  /// d rho/dt, free commutator included.
  MatrixXcd apply(const MatrixXcd& rho) const {
    check_state(rho);
    const int n = dimension();
    // Exactly diagonal states stay diagonal (the shifts are permutations and
    // the free part vanishes), so reduce to the classical rate equation.
    bool diagonal = true;
    for (int j = 0; j < n && diagonal; ++j)
      for (int i = 0; i < n; ++i)
        if (i != j && rho(i, j) != 0.0) {
          diagonal = false;
          break;
        }
    if (diagonal && spec_.anticommutator_scale == 1.0) {
      MatrixXcd out = MatrixXcd::Zero(n, n);
      for (int i = 0; i < n; ++i) out(i, i) = -loss_rates_[i] * rho(i, i);
      for (const Term& t : terms_)
        for (int i = 0; i < n; ++i)
          if (t.src[i] >= 0)
            out(i, i) += t.weight * t.S[t.src[i]] * rho(t.src[i], t.src[i]);
      return out;
    }
    const double hbar = spec_.gas.hbar;
    MatrixXcd out(n, n);
    const std::complex<double> mi(0.0, -1.0 / hbar);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out(i, j) = mi * (energies_[i] - energies_[j]) * rho(i, j);
    add_dissipator(rho, out);
    return out;
  }

  /// Dissipative part alone.
  MatrixXcd apply_dissipator(const MatrixXcd& rho) const {
    check_state(rho);
    MatrixXcd out = MatrixXcd::Zero(dimension(), dimension());
    add_dissipator(rho, out);
    return out;
  }

  /// Crude operator-norm estimate by power iteration on Hermitian inputs,
  /// used for step-size sanity.
  double estimate_norm(int iterations = 15, unsigned seed = 7) const {
    const int n = dimension();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    MatrixXcd v(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) v(i, j) = {dist(rng), dist(rng)};
    v = (v + v.adjoint()).eval() / 2.0;
    v /= v.norm();
    double nrm = 0.0;
    for (int it = 0; it < iterations; ++it) {
      MatrixXcd w = apply(v);
      nrm = w.norm();
      if (nrm == 0.0) return 0.0;
      v = w / nrm;
    }
    return nrm;
  }

 private:
  void check_state(const MatrixXcd& rho) const {
    if (rho.rows() != dimension() || rho.cols() != dimension())
      throw std::invalid_argument("Generator: state dimension mismatch");
  }

  void add_dissipator(const MatrixXcd& rho, MatrixXcd& out) const {
    const int n = dimension();
    const double acs = spec_.anticommutator_scale;
    // Loss (anticommutator) part, summed over terms up front.
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out(i, j) -= acs * 0.5 * (loss_rates_[i] + loss_rates_[j]) * rho(i, j);
    if (spec_.factorized && spec_.lattice.wrap) {
      // Shifts are permutations here, so the gain is a reindexed Schur
      // product with the precomputed jump amplitudes.
      for (const Term& t : terms_)
        for (int j = 0; j < n; ++j) {
          const int sj = t.src[j];
          const double aj = t.amp[j];
          for (int i = 0; i < n; ++i)
            out(i, j) += t.amp[i] * aj * rho(t.src[i], sj);
        }
      return;
    }
    for (const Term& t : terms_) {
      const double w = t.weight;
      for (int j = 0; j < n; ++j) {
        const int sj = t.src[j];
        if (sj < 0) continue;
        for (int i = 0; i < n; ++i) {
          const int si = t.src[i];
          if (si < 0) continue;
          if (spec_.factorized) {
            out(i, j) += w * t.sqrtS[si] * t.sqrtS[sj] * rho(si, sj);
          } else {
            const double Emid = 0.5 * (t.dE[si] + t.dE[sj]);
            out(i, j) += w *
                         evaluate_dsf(spec_.gas, Kinematics{t.q_norm, Emid},
                                      spec_.model) *
                         rho(si, sj);
          }
        }
      }
    }
  }

  GeneratorSpec spec_;
  std::vector<Term> terms_;
  VectorXd energies_;
  VectorXd loss_rates_;  ///< sum_q w(q) S(q, dE_q(p)) per site
};

struct EvolveOptions {
  double t = 1.0;
  double dt = 0.01;
  int checkpoint_stride = 0;  ///< 0: no checkpoints
  double max_step_trace_drift = 1e-12;
  double max_dt_norm = 0.1;  ///< required dt * ||L||; <= 0 skips the check
};

struct EvolveMonitor {
  int steps = 0;
  double max_trace_drift = 0.0;         ///< |Tr rho - Tr rho0| over the run
  double max_hermiticity_defect = 0.0;  ///< largest symmetrization correction
  double max_boundary_mass = 0.0;       ///< population on the outermost sites
};

using EvolveCallback =
    std::function<void(int step, double time, const MatrixXcd& rho)>;

/// Fixed-step classical RK4 integration of d rho/dt = L[rho]. Hermiticity
/// is restored by symmetrization each step and the correction magnitude is
/// recorded; the trace is monitored, never renormalized.
inline MatrixXcd evolve(const Generator& gen, MatrixXcd rho,
                        const EvolveOptions& opt,
                        EvolveMonitor* monitor = nullptr,
                        const EvolveCallback& on_checkpoint = nullptr) {
  if (!(opt.dt > 0.0) || opt.t < 0.0)
    throw std::invalid_argument("evolve: t >= 0 and dt > 0 required");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("evolve: initial state is not Hermitian");
  if (opt.max_dt_norm > 0.0) {
    const double nrm = gen.estimate_norm();
    if (opt.dt * nrm > opt.max_dt_norm)
      throw std::invalid_argument(
          "evolve: dt * ||L|| = " + std::to_string(opt.dt * nrm) +
          " exceeds the step-size bound " + std::to_string(opt.max_dt_norm));
  }

  EvolveMonitor local;
  EvolveMonitor& mon = monitor ? *monitor : local;
  const double trace0 = rho.trace().real();

  // Wrap aliasing is benign only while the state keeps clear of the lattice
  // edge; record the boundary population so runs can audit that assumption.
  const auto& lat = gen.spec().lattice;
  std::vector<int> boundary;
  for (int i = 0; i < lat.size(); ++i) {
    const auto c = lat.unflatten(i);
    for (int a = 0; a < lat.dim; ++a)
      if (c[a] == 0 || c[a] == lat.sites[a] - 1) {
        boundary.push_back(i);
        break;
      }
  }
  auto boundary_mass = [&](const MatrixXcd& r) {
    double m = 0.0;
    for (int i : boundary) m += std::abs(r(i, i));
    return m;
  };
  mon.max_boundary_mass = boundary_mass(rho);
  const int nsteps = static_cast<int>(std::llround(opt.t / opt.dt));
  if (on_checkpoint) on_checkpoint(0, 0.0, rho);

  for (int step = 1; step <= nsteps; ++step) {
    const double trace_before = rho.trace().real();
    const MatrixXcd k1 = gen.apply(rho);
    const MatrixXcd k2 = gen.apply(rho + (0.5 * opt.dt) * k1);
    const MatrixXcd k3 = gen.apply(rho + (0.5 * opt.dt) * k2);
    const MatrixXcd k4 = gen.apply(rho + opt.dt * k3);
    rho += (opt.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const MatrixXcd defect = 0.5 * (rho - rho.adjoint().eval());
    mon.max_hermiticity_defect =
        std::max(mon.max_hermiticity_defect, defect.cwiseAbs().maxCoeff());
    rho -= defect;

    const double step_drift = std::abs(rho.trace().real() - trace_before);
    if (step_drift > opt.max_step_trace_drift)
      throw contract_violation(
          "evolve: trace drift " + std::to_string(step_drift) + " at step " +
          std::to_string(step) + " exceeds the per-step bound");
    mon.max_trace_drift =
        std::max(mon.max_trace_drift, std::abs(rho.trace().real() - trace0));
    mon.max_boundary_mass = std::max(mon.max_boundary_mass, boundary_mass(rho));
    mon.steps = step;

    if (on_checkpoint && opt.checkpoint_stride > 0 &&
        (step % opt.checkpoint_stride == 0 || step == nsteps))
      on_checkpoint(step, step * opt.dt, rho);
  }
  return rho;
}

struct MomentSeries {
  std::vector<double> t;
  std::vector<Vec3> p;       ///< Tr(p rho)
  std::vector<double> E;     ///< Tr(p^2/2M rho)
  std::vector<double> trace;
};

/// Momentum and kinetic-energy expectation values along an evolution,
/// recorded every `stride` steps.
inline MomentSeries moment_trajectory(const Generator& gen,
                                      const MatrixXcd& rho0,
                                      const EvolveOptions& opt,
                                      EvolveMonitor* monitor = nullptr) {
  const auto& lat = gen.spec().lattice;
  const int n = lat.size();
  MomentSeries out;
  EvolveOptions o = opt;
  if (o.checkpoint_stride <= 0) o.checkpoint_stride = 1;
  evolve(gen, rho0, o, monitor,
         [&](int, double time, const MatrixXcd& rho) {
           Vec3 pm = {0.0, 0.0, 0.0};
           double em = 0.0;
           for (int i = 0; i < n; ++i) {
             const double w = rho(i, i).real();
             const Vec3 p = lat.momentum(i);
             for (int a = 0; a < 3; ++a) pm[a] += w * p[a];
             em += w * gen.site_energies()[i];
           }
           out.t.push_back(time);
           out.p.push_back(pm);
           out.E.push_back(em);
           out.trace.push_back(rho.trace().real());
         });
  return out;
}

/// Normalized canonical diagonal state e^{-beta p^2/2M} on the lattice.
inline MatrixXcd canonical_state(const MomentumLattice& lat, double beta,
                                 double M) {
  const int n = lat.size();
  MatrixXcd rho = MatrixXcd::Zero(n, n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = lat.momentum(i);
    const double w = std::exp(-beta * dot(p, p) / (2.0 * M));
    rho(i, i) = w;
    z += w;
  }
  rho /= z;
  return rho;
}

/// Diagonal Gaussian state centered at p0 with width sigma per axis.
inline MatrixXcd gaussian_diagonal_state(const MomentumLattice& lat,
                                         const Vec3& p0, double sigma) {
  if (!(sigma > 0.0))
    throw std::domain_error("gaussian_diagonal_state: sigma must be > 0");
  const int n = lat.size();
  MatrixXcd rho = MatrixXcd::Zero(n, n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = lat.momentum(i);
    double e = 0.0;
    for (int a = 0; a < 3; ++a) e += (p[a] - p0[a]) * (p[a] - p0[a]);
    const double w = std::exp(-0.5 * e / (sigma * sigma));
    rho(i, i) = w;
    z += w;
  }
  rho /= z;
  return rho;
}

}  // namespace qbrown

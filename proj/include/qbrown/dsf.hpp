// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qbrown/core.hpp"
#include "qbrown/gas.hpp"

namespace qbrown {

/// Closed forms of the ideal-gas dynamic structure factor S(q,E).
///
/// The log and arth variants are algebraically identical; both are kept so
/// that either can serve as a cross-check of the other. BrownianLimitMB is
/// the heavy-test-particle limit of the Maxwell-Boltzmann form, for which
/// the geometric-mean factorization in E is exact.
enum class DsfForm { MB, BoseLog, FermiLog, BoseArth, FermiArth, BrownianLimitMB };

inline const char* to_string(DsfForm f) {
  switch (f) {
    case DsfForm::MB: return "MB";
    case DsfForm::BoseLog: return "BoseLog";
    case DsfForm::FermiLog: return "FermiLog";
    case DsfForm::BoseArth: return "BoseArth";
    case DsfForm::FermiArth: return "FermiArth";
    case DsfForm::BrownianLimitMB: return "BrownianLimitMB";
  }
  return "?";
}

inline DsfForm dsf_form_from_string(const std::string& s) {
  if (s == "MB") return DsfForm::MB;
  if (s == "BoseLog") return DsfForm::BoseLog;
  if (s == "FermiLog") return DsfForm::FermiLog;
  if (s == "BoseArth") return DsfForm::BoseArth;
  if (s == "FermiArth") return DsfForm::FermiArth;
  if (s == "BrownianLimitMB") return DsfForm::BrownianLimitMB;
  throw std::domain_error("unknown DSF form: " + s);
}

struct DsfModel {
  DsfForm form = DsfForm::MB;
  /// Test-particle mass; only consulted by the lattice generator when it
  /// maps momenta to transferred energies, and required > 0 there.
  double test_mass = 0.0;
};

namespace detail {

/// Common prefactor (2 pi m^2)/(n beta q) / (2 pi hbar)^3 of all forms.
inline double dsf_prefactor(const GasSpec& g, double q) {
  const double twopih = 2.0 * pi * g.hbar;
  return (2.0 * pi * g.m * g.m) / (g.n * g.beta * q) / (twopih * twopih * twopih);
}

/// Boltzmann suppression exponents A+- = (beta/8m) (2mE +- q^2)^2 / q^2.
/// Both are >= 0, so z e^{-A} never overflows.
inline void dsf_exponents(const GasSpec& g, double q, double E, double& Ap,
                          double& Am) {
  const double c = g.beta / (8.0 * g.m * q * q);
  const double u = 2.0 * g.m * E;
  Ap = c * (u + q * q) * (u + q * q);
  Am = c * (u - q * q) * (u - q * q);
}

/// tp - tm computed without cancellation or overflow, where tp = z e^{-A+},
/// tm = z e^{-A-} and A+ - A- = beta E exactly.
inline double occupation_difference(double tp, double tm, double eps) {
  return eps >= 0.0 ? tm * std::expm1(-eps) : -tp * std::expm1(eps);
}

/// Quantum-statistics forms via the log representation; s = +1 Bose,
/// s = -1 Fermi.
inline double dsf_quantum_log(const GasSpec& g, double q, double E, double s) {
  double Ap, Am;
  dsf_exponents(g, q, E, Ap, Am);
  const double tp = g.z * std::exp(-Ap);
  const double tm = g.z * std::exp(-Am);
  const double pref = dsf_prefactor(g, q);
  const double eps = g.beta * E;
  if (eps == 0.0) return pref * tm / (1.0 - s * tm);  // removable pole at E=0
  const double d = occupation_difference(tp, tm, eps);
  const double arg = -s * d / (1.0 - s * tm);
  return s * pref * std::log1p(arg) / std::expm1(eps);
}

/// Same function through the arth (atanh) representation.
inline double dsf_quantum_arth(const GasSpec& g, double q, double E, double s) {
  double Ap, Am;
  dsf_exponents(g, q, E, Ap, Am);
  const double tp = g.z * std::exp(-Ap);
  const double tm = g.z * std::exp(-Am);
  const double pref = dsf_prefactor(g, q);
  const double eps = g.beta * E;
  if (eps == 0.0) return pref * tm / (1.0 - s * tm);
  // u sinh(eps/2) = (tm - tp)/2 and u cosh(eps/2) = (tp + tm)/2, so the
  // atanh argument stays bounded for any beta E.
  const double d = occupation_difference(tp, tm, eps);
  const double x = s * (-d) * 0.5 / (1.0 - s * (tp + tm) * 0.5);
  if (!(std::fabs(x) < 1.0))
    throw std::domain_error("dsf: arth argument left (-1,1); fugacity out of range");
  return s * pref * 2.0 * std::atanh(x) / std::expm1(eps);
}

/// Maxwell-Boltzmann closed form.
inline double dsf_mb(const GasSpec& g, double q, double E) {
  const double w = E + q * q / (2.0 * g.m);
  return dsf_prefactor(g, q) * g.z *
         std::exp(-g.beta * g.m / (2.0 * q * q) * w * w);
}

/// Brownian-limit MB form: recoil Gaussian with plain e^{-beta E/2}.
inline double dsf_brownian_mb(const GasSpec& g, double q, double E) {
  return dsf_prefactor(g, q) * g.z *
         std::exp(-g.beta * q * q / (8.0 * g.m) - 0.5 * g.beta * E);
}

inline void check_form_statistics(const GasSpec& g, DsfForm f) {
  const Statistics st = g.statistics;
  const bool ok =
      ((f == DsfForm::MB || f == DsfForm::BrownianLimitMB) &&
       st == Statistics::MaxwellBoltzmann) ||
      ((f == DsfForm::BoseLog || f == DsfForm::BoseArth) && st == Statistics::Bose) ||
      ((f == DsfForm::FermiLog || f == DsfForm::FermiArth) && st == Statistics::Fermi);
  if (!ok)
    throw std::domain_error(std::string("dsf form ") + to_string(f) +
                            " inconsistent with gas statistics " + to_string(st));
}

}  // namespace detail

/// Dynamic structure factor S(q,E) of the ideal gas, in the requested
/// closed form. Stable for any |beta E|; never returns NaN on valid input.
inline double evaluate_dsf(const GasSpec& gas, const Kinematics& kin,
                           const DsfModel& model) {
  gas.validate();
  kin.validate();
  detail::check_form_statistics(gas, model.form);
  switch (model.form) {
    case DsfForm::MB: return detail::dsf_mb(gas, kin.q, kin.E);
    case DsfForm::BoseLog: return detail::dsf_quantum_log(gas, kin.q, kin.E, +1.0);
    case DsfForm::FermiLog: return detail::dsf_quantum_log(gas, kin.q, kin.E, -1.0);
    case DsfForm::BoseArth: return detail::dsf_quantum_arth(gas, kin.q, kin.E, +1.0);
    case DsfForm::FermiArth: return detail::dsf_quantum_arth(gas, kin.q, kin.E, -1.0);
    case DsfForm::BrownianLimitMB:
      return detail::dsf_brownian_mb(gas, kin.q, kin.E);
  }
  return 0.0;
}

/// Brownian-limit structure factor for a test particle of mass M with
/// momentum p receiving momentum q; the energy transfer includes the
/// recoil term q^2/2M.
inline double evaluate_dsf_brownian(const GasSpec& gas, double M, const Vec3& q,
                                    const Vec3& p) {
  gas.validate();
  if (!(M > 0.0)) throw std::domain_error("evaluate_dsf_brownian: M must be > 0");
  const double qn = norm(q);
  if (!(qn > 0.0)) throw std::domain_error("evaluate_dsf_brownian: q must be nonzero");
  const double E = qn * qn / (2.0 * M) + dot(q, p) / M;
  return detail::dsf_brownian_mb(gas, qn, E);
}

/// Double-differential scattering cross-section per target particle for a
/// probe of mass M scattering from p_in to p_out off the gas.
inline double cross_section(const GasSpec& gas, const KernelSpec& kernel,
                            double M, const DsfModel& model, const Vec3& p_in,
                            const Vec3& p_out) {
  gas.validate();
  kernel.validate();
  if (!(M > 0.0)) throw std::domain_error("cross_section: M must be > 0");
  const double p = norm(p_in);
  const double pp = norm(p_out);
  if (!(p > 0.0))
    throw std::domain_error("cross_section: incident momentum must be nonzero");
  const Vec3 q = {p_out[0] - p_in[0], p_out[1] - p_in[1], p_out[2] - p_in[2]};
  const double qn = norm(q);
  if (!(qn > 0.0))
    throw std::domain_error("cross_section: momentum transfer must be nonzero");
  const double E = (pp * pp - p * p) / (2.0 * M);
  const double twopih = 2.0 * pi * gas.hbar;
  const double f = twopih * twopih * twopih;  // (2 pi hbar)^3
  const double amp = M / (2.0 * pi * gas.hbar * gas.hbar);
  return f * f * amp * amp * (pp / p) * kernel.squared(qn) *
         evaluate_dsf(gas, Kinematics{qn, E}, model);
}

}  // namespace qbrown

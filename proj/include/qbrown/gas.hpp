// Copyright 2026 the qbrown developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qbrown/core.hpp"

namespace qbrown {

enum class Statistics { MaxwellBoltzmann, Bose, Fermi };

inline const char* to_string(Statistics s) {
  switch (s) {
    case Statistics::MaxwellBoltzmann: return "MaxwellBoltzmann";
    case Statistics::Bose: return "Bose";
    case Statistics::Fermi: return "Fermi";
  }
  return "?";
}

/// Thermodynamic state of the host gas. Natural units with configurable
/// hbar; all formulas carry hbar explicitly.
struct GasSpec {
  Statistics statistics = Statistics::MaxwellBoltzmann;
  double m = 1.0;     ///< gas-particle mass
  double beta = 1.0;  ///< inverse temperature
  double z = 0.1;     ///< fugacity
  double n = 1.0;     ///< number density
  double hbar = 1.0;

  void validate() const {
    if (!(m > 0.0)) throw std::domain_error("GasSpec: field m must be > 0");
    if (!(beta > 0.0))
      throw std::domain_error("GasSpec: field beta must be > 0");
    if (!(n > 0.0)) throw std::domain_error("GasSpec: field n must be > 0");
    if (!(hbar > 0.0))
      throw std::domain_error("GasSpec: field hbar must be > 0");
    if (!(z >= 0.0)) throw std::domain_error("GasSpec: field z must be >= 0");
    if (statistics == Statistics::Bose && !(z < 1.0))
      throw std::domain_error(
          "GasSpec: field z must satisfy 0 <= z < 1 for Bose statistics");
  }

  /// Thermal momentum spread of a single gas particle.
  double thermal_momentum() const { return std::sqrt(m / beta); }
};

/// Momentum and energy transferred to the test particle in a collision.
struct Kinematics {
  double q = 1.0;  ///< transferred momentum magnitude, > 0
  double E = 0.0;  ///< transferred energy, any sign

  void validate() const {
    if (!(q > 0.0)) throw std::domain_error("Kinematics: q must be > 0");
  }
};

/// Fourier trace |t~(q)|^2 of the interaction; depends on |q| only.
struct KernelSpec {
  enum class Form { Contact, Gaussian };
  Form form = Form::Contact;
  double t0 = 1.0;     ///< amplitude
  double sigma = 1.0;  ///< momentum width (Gaussian only)

  void validate() const {
    if (form == Form::Gaussian && !(sigma > 0.0))
      throw std::domain_error("KernelSpec: field sigma must be > 0");
  }

  /// |t~(q)|^2
  double squared(double q) const {
    switch (form) {
      case Form::Contact: return t0 * t0;
      case Form::Gaussian:
        return t0 * t0 * std::exp(-q * q / (2.0 * sigma * sigma));
    }
    return 0.0;
  }
};

}  // namespace qbrown

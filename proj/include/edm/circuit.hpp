#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edm/constants.hpp"
#include "edm/errors.hpp"

namespace edm {

enum class Units { SI, ResonatorUnits };

// Parameter set of the extended Dicke model
//   H = omega_r a^dag a + omega_q S_z + g (a + a^dag) S_x + D S_x^2,
// with D = g^2/omega_r + delta. Frequencies are angular (rad/s in SI mode,
// multiples of omega_r otherwise). omega_q and g are per-qubit lists; the
// uniform model requires all entries equal.
struct ModelParams {
  double omega_r = 1.0;
  std::vector<double> omega_q;
  std::vector<double> g;
  double D = 0.0;
  double delta = 0.0;
  int n_qubits = 1;
  Units units = Units::ResonatorUnits;

  static ModelParams uniform(double omega_r, double omega_q, double g, double delta, int n_qubits,
                             Units units = Units::ResonatorUnits);
  // Standard Dicke model: the collective qubit-qubit term is dropped (D = 0).
  static ModelParams dicke(double omega_r, double omega_q, double g, int n_qubits,
                           Units units = Units::ResonatorUnits);

  bool is_uniform(double rtol = 1e-12) const;
  double omega_q0() const;  // uniform qubit splitting
  double g0() const;        // uniform coupling

  double gamma() const { return g0() / omega_r; }
  double g_usc() const { return std::sqrt(omega_r * omega_q0()); }
  double zeta() const { return g0() * g0() / (omega_r * omega_q0()); }

  // Same parameter point with a different uniform coupling; D follows from
  // the stored delta.
  ModelParams with_coupling(double new_g) const;
  ModelParams to_resonator_units() const;
};

// Charge-coupled circuit: N Cooper-pair boxes attached to one LC resonator
// through gate capacitances C_g. All values SI.
struct ChargeCircuit {
  double C_r = 10e-15;   // resonator capacitance, F
  double C_q = 0.5e-15;  // qubit island capacitance, F
  double C_g = 1e-15;    // coupling capacitance, F
  double L_r = 1e-9;     // resonator inductance, H
  double E_J = 0.0;      // Josephson energy, J
  double n_g = 0.5;      // gate charge in Cooper pairs
  int n_qubits = 1;

  void validate() const;
};

// Capacitances renormalized by the coupling network.
struct DerivedCapacitances {
  double Cbar_sq = 0.0;  // F^2
  double Cbar_q = 0.0;
  double Cbar_r = 0.0;
  double Cbar_g = 0.0;
  double Cbar_qq = 0.0;
};

DerivedCapacitances derive_capacitances(const ChargeCircuit& c);

// (N+1)x(N+1) node capacitance matrix, resonator node first.
Eigen::MatrixXd capacitance_matrix(const ChargeCircuit& c);

// Numerical inverse with a condition-number guard.
Eigen::MatrixXd invert_capacitance_matrix(const ChargeCircuit& c);

// Closed-form inverse used as the cross-check for the numerical one.
Eigen::MatrixXd capacitance_inverse_closed_form(const ChargeCircuit& c);

// Cooper-pair-box spectrum in the truncated charge basis n in [-n_cut, n_cut]:
//   H = 4 E_C (n - n_g)^2 - (E_J/2) sum_n (|n><n+1| + h.c.)
struct CpbSpectrum {
  double omega_q = 0.0;        // (E1 - E0)/hbar, rad/s
  double Q0_q = 0.0;           // 2e |<1|n|0>|, C
  std::vector<double> levels;  // E_i - E_0, J, lowest few
  double anharmonicity = 0.0;  // (E2-E1) - (E1-E0), J
  int n_cut = 0;               // cutoff actually used
};

CpbSpectrum cpb_spectrum(double E_C, double E_J, double n_g, int n_cut = 20);

// Full charge pipeline: renormalized capacitances, numerically solved qubit,
// and the resulting model parameters (SI angular frequencies).
struct ChargeCompilation {
  ModelParams params;
  DerivedCapacitances caps;
  CpbSpectrum cpb;
  double E_C = 0.0;   // e^2/(2 Cbar_q), J
  double Q0_r = 0.0;  // resonator zero-point charge, C
};

ChargeCompilation compile_charge(const ChargeCircuit& c);
ModelParams charge_model_params(const ChargeCircuit& c);

// Coupling parameter zeta = (g/g_usc)^2 in the transmon limit; always < 1.
double zeta_transmon(const ChargeCircuit& c);

// Same quantity in the charge-qubit limit; unbounded as E_J decreases.
double zeta_charge(const ChargeCircuit& c, double E_C);

// Flux qubits sharing a coupling inductance L_g with the resonator.
struct FluxCircuit {
  double C_r = 0.25e-12;  // F
  double L_r = 1e-9;      // H
  double L_g = 1.5e-9;    // H
  double Phi_q0 = 0.0;    // qubit flux matrix element, Wb
  double omega_q = 0.0;   // qubit splitting, rad/s (design input)
  int n_qubits = 2;

  void validate() const;
};

struct FluxCompilation {
  ModelParams params;
  double Lbar_r = 0.0;  // parallel combination of L_r and L_g
};

FluxCompilation compile_flux(const FluxCircuit& c);
ModelParams flux_model_params(const FluxCircuit& c);

}  // namespace edm

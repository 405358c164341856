#pragma once

#include <Eigen/Dense>

#include "edm/circuit.hpp"

namespace edm {

// Linearized (Holstein-Primakoff) two-mode theory. The collective spin is
// replaced by a boson, giving a quadratic Hamiltonian with normal-mode
// frequencies omega_{+-}; the ground photon number follows in closed form.
struct HPResult {
  double G = 0.0;         // g sqrt(N) / 2
  double D_N = 0.0;       // N D / 4
  double Omega_q2 = 0.0;  // omega_q (omega_q + 4 D_N)
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double omega_minus_sq = 0.0;  // kept signed; negative marks instability
  double cos2theta = 0.0;
  double A_plus = 0.0;
  double A_minus = 0.0;
  double n_photon = 0.0;  // NaN when unstable
  bool stable = true;     // omega_-^2 >= 0
};

HPResult hp_frequencies(const ModelParams& p);

// Normal-phase instability test of the plain Dicke model (D forced to 0):
// true iff sqrt(N) g >= sqrt(omega_r omega_q).
bool srt_condition_dm(const ModelParams& p);

// Ground photon number from the full quadratic theory ...
double hp_photon_number(const ModelParams& p);
// ... and its small-g limit N g^2 w_q / {4 (w_r+w_q)^2 [w_q + N(D - g^2/w_r)]}.
double hp_photon_number_smallg(const ModelParams& p);

// Exact eigenenergies of the model with the qubit splitting switched off:
// E = delta m_x^2 + omega_r n.
double h0_energy(double s, double m_x, int n, const ModelParams& p);

// <s, m_to|S_z|s, m_from> in the S_x eigenbasis, nonzero for m_to = m_from +- 1:
// (1/2) sqrt(s(s+1) - m_from m_to).
double sz_ladder_element(double s, double m_to, double m_from);

// Matrix element of the qubit term between polaron-frame eigenstates
// <Psi_{s,m_to,n}| omega_q S_z |Psi_{s,m_from,0}>.
double h1_matrix_element(double s, double m_to, double m_from, int n, const ModelParams& p);

// Effective collective-spin Hamiltonian in the |s, m_x> basis:
//   diagonal (delta + c2) m_x^2 - c2 s(s+1),  off-diagonal c1 * ladder,
// with c1 = omega_q exp(-gamma^2/2) and c2 = omega_q^2 omega_r / (2 g^2).
struct EffectiveModel {
  double s = 0.0;
  double gamma = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double delta = 0.0;
  Eigen::MatrixXd h_eff;  // (2s+1) x (2s+1), basis m_x = -s..s
  bool valid = false;     // perturbative validity bound satisfied and gamma >= 1
  bool warn_small_gamma = false;  // gamma < 2: series approximation untested
};

EffectiveModel effective_hamiltonian(const ModelParams& p, double s);

// Strong-coupling scalings of the ground-state observables.
struct StrongCouplingAsymptotics {
  double n_photon_even = 0.0;  // N(N+2) g^6 / (2 w_r^4 w_q^2) exp(-gamma^2)
  double gap_even = 0.0;       // w_r w_q^2 / (2 g^2)
  double n_photon_odd = 0.0;   // gamma^2 / 4
  double gap_odd = 0.0;        // (N+1) w_q exp(-gamma^2/2)
  double sz_tail = 0.0;        // -N(N+2) w_q w_r / (4 g^2)
};

StrongCouplingAsymptotics asymptotics(const ModelParams& p);

// Perturbative validity: sqrt(s(s+1)) omega_q / 2 < g^2 / omega_r (strict).
bool validity_check(const ModelParams& p, double s);

}  // namespace edm

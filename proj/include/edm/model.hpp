#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "edm/circuit.hpp"
#include "edm/hilbert.hpp"

namespace edm {

// H = omega_r a^dag a + omega_q S_z + g (a + a^dag) S_x + D S_x^2
// Requires uniform per-qubit parameters.
SparseOperator build_edm(const HilbertSpace& space, const ModelParams& p);

// How the collective qubit-qubit term generalizes under disorder.
//   PolaronConsistent: (sum_i g_i sigma_x^i / 2)^2 / omega_r + delta S_x^2,
//     which keeps the displacement cancellation exact per qubit.
//   UniformD: a single caller-supplied D S_x^2.
enum class DisorderDTerm { PolaronConsistent, UniformD };

SparseOperator build_disordered(const HilbertSpace& space, std::span<const double> omega_q,
                                std::span<const double> g, double omega_r, double delta,
                                DisorderDTerm d_term = DisorderDTerm::PolaronConsistent,
                                double uniform_D = 0.0);

// Two boson modes (lower mode index 0), qubit register of exactly two qubits.
// Index convention: i = (i_q * (n_low_max+1) + n_low) * (n_high_max+1) + n_high.
struct TwoModeSpace {
  int n_qubits = 2;
  int fock_cutoff_low = 0;
  int fock_cutoff_high = 0;

  TwoModeSpace(int n_qubits_, int n_low, int n_high)
      : n_qubits(n_qubits_), fock_cutoff_low(n_low), fock_cutoff_high(n_high) {
    if (n_qubits < 1) throw InvalidInput("TwoModeSpace requires at least one qubit");
    if (n_low < 0 || n_high < 0) throw InvalidInput("Fock cutoffs must be >= 0");
  }

  int qubit_dim() const { return 1 << n_qubits; }
  int dim() const { return qubit_dim() * (fock_cutoff_low + 1) * (fock_cutoff_high + 1); }
};

// Operators on the two-mode space.
SparseOperator two_mode_number(const TwoModeSpace& space, int mode);
SparseOperator two_mode_position(const TwoModeSpace& space, int mode);  // a_k + a_k^dag
SparseOperator two_mode_pauli(const TwoModeSpace& space, int qubit, Axis axis);
SparseOperator two_mode_collective_spin(const TwoModeSpace& space, Axis axis);
SparseOperator two_mode_parity(const TwoModeSpace& space);

// H = sum_k omega_k a_k^dag a_k + sum_i omega_q^i sigma_z^i / 2
//     + sum_{ik} g_ik (a_k + a_k^dag) sigma_x^i / 2 + D S_x^2
// g_ik row index = qubit, column index = mode.
SparseOperator build_two_mode(const TwoModeSpace& space, double omega_low, double omega_high,
                              std::span<const double> omega_q, const Eigen::Matrix2d& g_ik,
                              double D);

// Qubit-sector eigenvalues of <alpha|H|alpha> for a classical real field
// amplitude alpha, i.e. the Born-Oppenheimer potential curves.
struct BOResult {
  std::vector<double> alpha;
  Eigen::MatrixXd curves;  // (n_alpha x k), ascending within each row
};

BOResult semiclassical_potentials(const ModelParams& p, const std::vector<double>& alpha_grid,
                                  int k);

// Uniform grid of `points` amplitudes spanning +-(N/2 * gamma + 3), wide
// enough to contain every displaced minimum.
std::vector<double> default_alpha_grid(const ModelParams& p, int points = 801);

// Pi = exp[i pi (a^dag a + S_z + N/2)], diagonal +-1.
SparseOperator parity_operator(const HilbertSpace& space);

// Starting Fock cutoff for the auto-convergence policy:
// ceil(gamma^2 N^2/4 + 3 gamma N + 20).
int fock_cutoff_estimate(const ModelParams& p);

}  // namespace edm

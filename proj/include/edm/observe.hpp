#pragma once

#include <vector>

#include <Eigen/Dense>

#include "edm/hilbert.hpp"
#include "edm/solve.hpp"

namespace edm {

// <psi|A|psi> for hermitian A; the imaginary residue must vanish.
double expectation(const Eigen::VectorXcd& state, const SparseOperator& a);
Complex expectation_complex(const Eigen::VectorXcd& state, const SparseOperator& a);

// rho_q = Tr_boson |psi><psi|, a (2^N x 2^N) density matrix.
Eigen::MatrixXcd reduced_qubit_density(const Eigen::VectorXcd& state, const HilbertSpace& space);

// rho_boson = Tr_qubits |psi><psi|; shares the Schmidt spectrum with rho_q.
Eigen::MatrixXcd reduced_boson_density(const Eigen::VectorXcd& state, const HilbertSpace& space);

// Partial trace over the qubits not in `keep` (little-endian bit convention).
Eigen::MatrixXcd partial_trace_qubits(const Eigen::MatrixXcd& rho_q, int n_qubits,
                                      const std::vector<int>& keep);

// -Tr{rho log2 rho} in bits; eigenvalues below -1e-12 are rejected.
double entanglement_entropy(const Eigen::MatrixXcd& rho);

// Husimi-style overlap with product coherent spin states
//   |n> = prod_i [cos(theta/2)|1>_i + e^{i phi} sin(theta/2)|0>_i],
// theta = 0 pointing along +z. Coincides with the spin-s coherent state on
// the permutation-symmetric sector.
struct QFunctionMap {
  std::vector<double> theta;  // [0, pi], inclusive
  std::vector<double> phi;    // [0, 2 pi), periodic
  Eigen::MatrixXd values;     // (n_theta x n_phi)
};

QFunctionMap spin_q_function(const Eigen::MatrixXcd& rho_q, int n_qubits, int n_theta, int n_phi);

// Everything reported per parameter point of a ground-state sweep. The *_avg
// fields average over the near-degenerate ground cluster (splitting below
// degeneracy_tol), since the lowest vector of an almost exactly degenerate
// manifold is solver noise.
struct GroundStateReport {
  double energy = 0.0;
  double gap = 0.0;
  double n_photon = 0.0;
  double S_z = 0.0;
  double S_x = 0.0;
  double S_x2 = 0.0;
  double entropy_q = 0.0;  // bits
  double entropy_1 = 0.0;  // bits
  double parity = 0.0;
  double n_photon_avg = 0.0;
  double S_z_avg = 0.0;
  double S_x_avg = 0.0;
  double S_x2_avg = 0.0;
  double parity_avg = 0.0;
  int n_degenerate = 1;
  int n_max = -1;
  bool converged = false;
};

GroundStateReport ground_report(const SpectrumResult& result, const HilbertSpace& space,
                                double degeneracy_tol = 1e-8);

}  // namespace edm

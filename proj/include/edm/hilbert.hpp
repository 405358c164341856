#pragma once

#include <utility>

#include "edm/sparse.hpp"

namespace edm {

// Composite space of N qubits and one truncated boson mode.
//
// Basis index convention (fixed so golden files are bit-exact):
//   i = i_q * (n_max + 1) + n
// where n is the Fock occupation and i_q encodes the qubit register with
// qubit 0 as the least significant bit. Bit value b is the sigma_z eigenstate
// with eigenvalue 2b - 1.
struct HilbertSpace {
  int n_qubits = 1;
  int fock_cutoff = 0;  // highest retained Fock state n_max

  HilbertSpace(int n_qubits_, int fock_cutoff_) : n_qubits(n_qubits_), fock_cutoff(fock_cutoff_) {
    if (n_qubits < 1) throw InvalidInput("HilbertSpace requires at least one qubit");
    if (fock_cutoff < 0) throw InvalidInput("Fock cutoff must be >= 0");
    if (n_qubits > 24) throw InvalidInput("qubit register too large");
  }

  int qubit_dim() const { return 1 << n_qubits; }
  int fock_dim() const { return fock_cutoff + 1; }
  int dim() const { return qubit_dim() * fock_dim(); }

  int index(int qubit_bits, int n) const { return qubit_bits * fock_dim() + n; }
  std::pair<int, int> decode(int i) const {
    return {i / fock_dim(), i % fock_dim()};
  }
};

enum class Axis { X, Y, Z };

// sigma_axis on one qubit, identity elsewhere.
// Convention: sigma_z|b> = (2b-1)|b>, sigma_x|b> = |1-b>, sigma_y|b> = i(2b-1)|1-b>,
// which fixes sigma_x sigma_y = i sigma_z.
SparseOperator pauli(const HilbertSpace& space, int qubit, Axis axis);

// S_k = (1/2) sum_i sigma_k^i
SparseOperator collective_spin(const HilbertSpace& space, Axis axis);

// a|n> = sqrt(n)|n-1>, hard cutoff: a^dagger|n_max> = 0.
SparseOperator boson_annihilate(const HilbertSpace& space);
SparseOperator boson_create(const HilbertSpace& space);
SparseOperator boson_number(const HilbertSpace& space);

SparseOperator identity_op(const HilbertSpace& space);

}  // namespace edm

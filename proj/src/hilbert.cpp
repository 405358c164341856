#include "edm/hilbert.hpp"

#include <bit>
#include <cmath>

namespace edm {

namespace {
const Complex kI(0.0, 1.0);
}

SparseOperator pauli(const HilbertSpace& space, int qubit, Axis axis) {
  if (qubit < 0 || qubit >= space.n_qubits)
    throw DimensionError("pauli: qubit index " + std::to_string(qubit) + " out of range for N=" +
                         std::to_string(space.n_qubits));
  const int nq = space.qubit_dim();
  const int nf = space.fock_dim();
  std::vector<SparseOperator::Triplet> trips;
  trips.reserve(static_cast<std::size_t>(space.dim()));
  for (int iq = 0; iq < nq; ++iq) {
    const int b = (iq >> qubit) & 1;
    const int flipped = iq ^ (1 << qubit);
    for (int n = 0; n < nf; ++n) {
      const int col = space.index(iq, n);
      switch (axis) {
        case Axis::X:
          trips.emplace_back(space.index(flipped, n), col, Complex(1.0, 0.0));
          break;
        case Axis::Y:
          trips.emplace_back(space.index(flipped, n), col, kI * static_cast<double>(2 * b - 1));
          break;
        case Axis::Z:
          trips.emplace_back(col, col, Complex(2 * b - 1, 0.0));
          break;
      }
    }
  }
  return SparseOperator::from_triplets(space.dim(), trips);
}

SparseOperator collective_spin(const HilbertSpace& space, Axis axis) {
  const int nq = space.qubit_dim();
  const int nf = space.fock_dim();
  std::vector<SparseOperator::Triplet> trips;
  if (axis == Axis::Z) {
    trips.reserve(static_cast<std::size_t>(space.dim()));
    for (int iq = 0; iq < nq; ++iq) {
      const double sz = std::popcount(static_cast<unsigned>(iq)) - 0.5 * space.n_qubits;
      if (sz == 0.0) continue;
      for (int n = 0; n < nf; ++n) {
        const int i = space.index(iq, n);
        trips.emplace_back(i, i, Complex(sz, 0.0));
      }
    }
  } else {
    trips.reserve(static_cast<std::size_t>(space.dim()) * space.n_qubits);
    for (int iq = 0; iq < nq; ++iq)
      for (int q = 0; q < space.n_qubits; ++q) {
        const int b = (iq >> q) & 1;
        const int flipped = iq ^ (1 << q);
        const Complex v = (axis == Axis::X) ? Complex(0.5, 0.0)
                                            : 0.5 * kI * static_cast<double>(2 * b - 1);
        for (int n = 0; n < nf; ++n)
          trips.emplace_back(space.index(flipped, n), space.index(iq, n), v);
      }
  }
  return SparseOperator::from_triplets(space.dim(), trips);
}

SparseOperator boson_annihilate(const HilbertSpace& space) {
  const int nq = space.qubit_dim();
  const int nf = space.fock_dim();
  std::vector<SparseOperator::Triplet> trips;
  trips.reserve(static_cast<std::size_t>(nq) * (nf - 1));
  for (int iq = 0; iq < nq; ++iq)
    for (int n = 1; n < nf; ++n)
      trips.emplace_back(space.index(iq, n - 1), space.index(iq, n),
                         Complex(std::sqrt(static_cast<double>(n)), 0.0));
  return SparseOperator::from_triplets(space.dim(), trips);
}

SparseOperator boson_create(const HilbertSpace& space) {
  return boson_annihilate(space).adjoint();
}

SparseOperator boson_number(const HilbertSpace& space) {
  const int nq = space.qubit_dim();
  const int nf = space.fock_dim();
  std::vector<SparseOperator::Triplet> trips;
  trips.reserve(static_cast<std::size_t>(nq) * (nf - 1));
  for (int iq = 0; iq < nq; ++iq)
    for (int n = 1; n < nf; ++n) {
      const int i = space.index(iq, n);
      trips.emplace_back(i, i, Complex(n, 0.0));
    }
  return SparseOperator::from_triplets(space.dim(), trips);
}

SparseOperator identity_op(const HilbertSpace& space) {
  return SparseOperator::identity(space.dim());
}

}  // namespace edm

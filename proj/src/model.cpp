#include "edm/model.hpp"

#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace edm {

SparseOperator build_edm(const HilbertSpace& space, const ModelParams& p) {
  if (p.n_qubits != space.n_qubits)
    throw DimensionError("parameter qubit count does not match the space");
  if (!p.is_uniform())
    throw InvalidInput("build_edm requires uniform parameters; use build_disordered");

  const SparseOperator n_op = boson_number(space);
  const SparseOperator sz = collective_spin(space, Axis::Z);
  const SparseOperator sx = collective_spin(space, Axis::X);
  const SparseOperator a = boson_annihilate(space);
  const SparseOperator position = a + a.adjoint();

  SparseOperator h = p.omega_r * n_op;
  h += p.omega_q0() * sz;
  h += p.g0() * (position * sx);
  h += p.D * (sx * sx);
  return h;
}

SparseOperator build_disordered(const HilbertSpace& space, std::span<const double> omega_q,
                                std::span<const double> g, double omega_r, double delta,
                                DisorderDTerm d_term, double uniform_D) {
  const int n = space.n_qubits;
  if (static_cast<int>(omega_q.size()) != n || static_cast<int>(g.size()) != n)
    throw DimensionError("per-qubit parameter lists must have length N");

  const SparseOperator a = boson_annihilate(space);
  const SparseOperator position = a + a.adjoint();

  SparseOperator h = omega_r * boson_number(space);
  SparseOperator weighted_sx(space.dim());  // sum_i g_i sigma_x^i / 2
  for (int q = 0; q < n; ++q) {
    h += (0.5 * omega_q[q]) * pauli(space, q, Axis::Z);
    weighted_sx += (0.5 * g[q]) * pauli(space, q, Axis::X);
  }
  h += position * weighted_sx;

  const SparseOperator sx = collective_spin(space, Axis::X);
  if (d_term == DisorderDTerm::PolaronConsistent) {
    h += (1.0 / omega_r) * (weighted_sx * weighted_sx);
    if (delta != 0.0) h += delta * (sx * sx);
  } else {
    h += uniform_D * (sx * sx);
  }
  return h;
}

namespace {

// Mode operators as small single-factor matrices for kron assembly.
SparseOperator fock_annihilate(int n_max) {
  std::vector<SparseOperator::Triplet> trips;
  for (int n = 1; n <= n_max; ++n)
    trips.emplace_back(n - 1, n, Complex(std::sqrt(static_cast<double>(n)), 0.0));
  return SparseOperator::from_triplets(n_max + 1, trips);
}

SparseOperator fock_number(int n_max) {
  std::vector<SparseOperator::Triplet> trips;
  for (int n = 1; n <= n_max; ++n) trips.emplace_back(n, n, Complex(n, 0.0));
  return SparseOperator::from_triplets(n_max + 1, trips);
}

}  // namespace

SparseOperator two_mode_number(const TwoModeSpace& space, int mode) {
  const HilbertSpace qubits(space.n_qubits, 0);
  const SparseOperator iq = identity_op(qubits);
  const SparseOperator i_low = SparseOperator::identity(space.fock_cutoff_low + 1);
  const SparseOperator i_high = SparseOperator::identity(space.fock_cutoff_high + 1);
  if (mode == 0) return kron(kron(iq, fock_number(space.fock_cutoff_low)), i_high);
  if (mode == 1) return kron(kron(iq, i_low), fock_number(space.fock_cutoff_high));
  throw DimensionError("mode index must be 0 or 1");
}

SparseOperator two_mode_position(const TwoModeSpace& space, int mode) {
  const HilbertSpace qubits(space.n_qubits, 0);
  const SparseOperator iq = identity_op(qubits);
  const SparseOperator i_low = SparseOperator::identity(space.fock_cutoff_low + 1);
  const SparseOperator i_high = SparseOperator::identity(space.fock_cutoff_high + 1);
  if (mode == 0) {
    SparseOperator x = fock_annihilate(space.fock_cutoff_low);
    x += x.adjoint();
    return kron(kron(iq, x), i_high);
  }
  if (mode == 1) {
    SparseOperator x = fock_annihilate(space.fock_cutoff_high);
    x += x.adjoint();
    return kron(kron(iq, i_low), x);
  }
  throw DimensionError("mode index must be 0 or 1");
}

SparseOperator two_mode_pauli(const TwoModeSpace& space, int qubit, Axis axis) {
  const HilbertSpace qubits(space.n_qubits, 0);
  const int boson_dim = (space.fock_cutoff_low + 1) * (space.fock_cutoff_high + 1);
  return kron(pauli(qubits, qubit, axis), SparseOperator::identity(boson_dim));
}

SparseOperator two_mode_collective_spin(const TwoModeSpace& space, Axis axis) {
  const HilbertSpace qubits(space.n_qubits, 0);
  const int boson_dim = (space.fock_cutoff_low + 1) * (space.fock_cutoff_high + 1);
  return kron(collective_spin(qubits, axis), SparseOperator::identity(boson_dim));
}

SparseOperator two_mode_parity(const TwoModeSpace& space) {
  const int nq = space.qubit_dim();
  const int f1 = space.fock_cutoff_low + 1;
  const int f2 = space.fock_cutoff_high + 1;
  std::vector<SparseOperator::Triplet> trips;
  trips.reserve(static_cast<std::size_t>(space.dim()));
  for (int iq = 0; iq < nq; ++iq) {
    const int pq = std::popcount(static_cast<unsigned>(iq));
    for (int n1 = 0; n1 < f1; ++n1)
      for (int n2 = 0; n2 < f2; ++n2) {
        const int i = (iq * f1 + n1) * f2 + n2;
        trips.emplace_back(i, i, Complex(((pq + n1 + n2) % 2 == 0) ? 1.0 : -1.0, 0.0));
      }
  }
  return SparseOperator::from_triplets(space.dim(), trips);
}

SparseOperator build_two_mode(const TwoModeSpace& space, double omega_low, double omega_high,
                              std::span<const double> omega_q, const Eigen::Matrix2d& g_ik,
                              double D) {
  if (space.n_qubits != 2) throw InvalidInput("two-mode model is defined for N = 2 qubits");
  if (static_cast<int>(omega_q.size()) != 2)
    throw DimensionError("two-mode model needs two qubit splittings");

  SparseOperator h = omega_low * two_mode_number(space, 0);
  h += omega_high * two_mode_number(space, 1);
  for (int q = 0; q < 2; ++q) h += (0.5 * omega_q[q]) * two_mode_pauli(space, q, Axis::Z);
  for (int k = 0; k < 2; ++k) {
    const SparseOperator pos = two_mode_position(space, k);
    for (int q = 0; q < 2; ++q)
      if (g_ik(q, k) != 0.0) h += (0.5 * g_ik(q, k)) * (pos * two_mode_pauli(space, q, Axis::X));
  }
  const SparseOperator sx = two_mode_collective_spin(space, Axis::X);
  h += D * (sx * sx);
  return h;
}

BOResult semiclassical_potentials(const ModelParams& p, const std::vector<double>& alpha_grid,
                                  int k) {
  if (!p.is_uniform()) throw InvalidInput("semiclassical potentials require uniform parameters");
  if (alpha_grid.empty()) throw InvalidInput("alpha grid must be non-empty");
  const HilbertSpace qubits(p.n_qubits, 0);
  if (k < 1 || k > qubits.dim()) throw InvalidInput("k must be in [1, 2^N]");

  const Eigen::MatrixXcd sz = collective_spin(qubits, Axis::Z).dense();
  const Eigen::MatrixXcd sx = collective_spin(qubits, Axis::X).dense();
  const Eigen::MatrixXcd sx2 = sx * sx;
  const int d = qubits.dim();

  BOResult out;
  out.alpha = alpha_grid;
  out.curves.resize(static_cast<Eigen::Index>(alpha_grid.size()), k);
  Eigen::MatrixXcd h(d, d);
  for (std::size_t ia = 0; ia < alpha_grid.size(); ++ia) {
    const double alpha = alpha_grid[ia];
    h = p.omega_q0() * sz + (2.0 * alpha * p.g0()) * sx + p.D * sx2;
    h.diagonal().array() += p.omega_r * alpha * alpha;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    for (int j = 0; j < k; ++j) out.curves(static_cast<Eigen::Index>(ia), j) = es.eigenvalues()[j];
  }
  return out;
}

std::vector<double> default_alpha_grid(const ModelParams& p, int points) {
  if (points < 2) throw InvalidInput("alpha grid needs at least two points");
  const double span = 0.5 * p.n_qubits * std::abs(p.gamma()) + 3.0;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = -span + 2.0 * span * static_cast<double>(i) / (points - 1);
  return grid;
}

SparseOperator parity_operator(const HilbertSpace& space) {
  const int nq = space.qubit_dim();
  const int nf = space.fock_dim();
  std::vector<SparseOperator::Triplet> trips;
  trips.reserve(static_cast<std::size_t>(space.dim()));
  for (int iq = 0; iq < nq; ++iq) {
    const int pq = std::popcount(static_cast<unsigned>(iq));
    for (int n = 0; n < nf; ++n) {
      const int i = space.index(iq, n);
      trips.emplace_back(i, i, Complex(((pq + n) % 2 == 0) ? 1.0 : -1.0, 0.0));
    }
  }
  return SparseOperator::from_triplets(space.dim(), trips);
}

int fock_cutoff_estimate(const ModelParams& p) {
  double gmax = 0.0;
  for (double gi : p.g) gmax = std::max(gmax, std::abs(gi));
  const double gamma = gmax / p.omega_r;
  const double n = p.n_qubits;
  return static_cast<int>(std::ceil(gamma * gamma * n * n / 4.0 + 3.0 * gamma * n + 20.0));
}

}  // namespace edm

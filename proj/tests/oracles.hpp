// Brute-force constructions used as independent references in tests. These
// deliberately avoid the library's analytic shortcuts: spin matrices come
// from the ladder algebra in the z-basis, basis rotations from explicit
// matrix exponentials, and displaced states from a Taylor-expanded
// exponential applied to a vector.
#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "edm/constants.hpp"
#include "edm/hilbert.hpp"
#include "edm/sparse.hpp"

namespace oracles {

using edm::Complex;

// Spin-s matrices in the |s, m_z> basis, m_z = -s..s (index 0 .. 2s).
struct SpinMatrices {
  Eigen::MatrixXcd sx, sy, sz;
};

inline SpinMatrices spin_matrices(double s) {
  const int d = static_cast<int>(std::lround(2.0 * s)) + 1;
  Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    const double m = -s + i;
    sp(i + 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
  }
  SpinMatrices out;
  out.sx = 0.5 * (sp + sp.adjoint());
  out.sy = Complex(0, -0.5) * (sp - sp.adjoint());
  out.sz = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) out.sz(i, i) = -s + i;
  return out;
}

// exp(A) for a matrix with hermitian or anti-hermitian structure handled via
// the hermitian eigendecomposition of -iA or A.
inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, Complex prefactor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i)
    phases[i] = std::exp(prefactor * es.eigenvalues()[i]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Columns are |s, m_x> (ascending m_x), built by rotating the z-basis with
// exp(-i pi/2 S_y). One fixed gauge; matrix elements of S_z between the
// columns have the standard magnitudes but gauge-dependent signs.
inline Eigen::MatrixXcd x_basis_columns(double s) {
  const SpinMatrices sm = spin_matrices(s);
  return expm_hermitian(sm.sy, Complex(0, -0.5 * edm::constants::pi));
}

// Dicke states |s=N/2, m_z> embedded in the 2^N qubit register
// (unit-normalized symmetric combinations of fixed-popcount bitstrings).
inline Eigen::VectorXcd dicke_z_state(int n_qubits, double m_z) {
  const int n_up = static_cast<int>(std::lround(m_z + 0.5 * n_qubits));
  const int dim = 1 << n_qubits;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  int count = 0;
  for (int iq = 0; iq < dim; ++iq)
    if (std::popcount(static_cast<unsigned>(iq)) == n_up) {
      v[iq] = 1.0;
      ++count;
    }
  v /= std::sqrt(static_cast<double>(count));
  return v;
}

// |s=N/2, m_x> in the full register: rotate the Dicke z-states with the
// full-register exp(-i pi/2 S_y).
inline Eigen::VectorXcd dicke_x_state(int n_qubits, double m_x) {
  const edm::HilbertSpace qubits(n_qubits, 0);
  const Eigen::MatrixXcd sy = edm::collective_spin(qubits, edm::Axis::Y).dense();
  const Eigen::MatrixXcd rot = expm_hermitian(sy, Complex(0, -0.5 * edm::constants::pi));
  return rot * dicke_z_state(n_qubits, m_x);
}

// exp(A) v by scaling-and-squaring with a Taylor series; A is a generic
// (small) sparse operator.
inline Eigen::VectorXcd apply_exp(const edm::SparseOperator& a, Eigen::VectorXcd v) {
  const double norm_est = a.max_abs() * 8.0 + 1.0;
  int squarings = 0;
  double scale = 1.0;
  while (norm_est * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  for (int rep = 0; rep < (1 << squarings); ++rep) {
    Eigen::VectorXcd term = v;
    for (int k = 1; k <= 24; ++k) {
      term = a.apply(term) * (scale / k);
      v += term;
      if (term.norm() < 1e-18 * v.norm()) break;
    }
  }
  return v;
}

// Indices of strict local minima of a sampled curve.
inline std::vector<int> local_minima(const std::vector<double>& x, const Eigen::VectorXd& y) {
  std::vector<int> idx;
  for (int i = 1; i + 1 < static_cast<int>(x.size()); ++i)
    if (y[i] < y[i - 1] && y[i] < y[i + 1]) idx.push_back(i);
  return idx;
}

}  // namespace oracles

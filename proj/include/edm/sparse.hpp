#pragma once

#include <complex>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "edm/errors.hpp"

namespace edm {

using Complex = std::complex<double>;

// Sparse complex operator on a finite Hilbert space.
//
// Storage is compressed row-major with entries sorted by (row, column) and
// duplicates merged, so two operators built from the same physics compare
// entrywise. Entries with |value| < prune_threshold are dropped after every
// arithmetic operation; this keeps structural zeros out of golden files.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>;
  using Triplet = Eigen::Triplet<Complex>;

  static constexpr double prune_threshold = 1e-15;

  SparseOperator() = default;
  explicit SparseOperator(int dim) : mat_(dim, dim) { require_dim(dim); }

  static SparseOperator identity(int dim);
  static SparseOperator from_triplets(int dim, const std::vector<Triplet>& entries);
  static SparseOperator from_matrix(Matrix m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  std::size_t nnz() const { return static_cast<std::size_t>(mat_.nonZeros()); }
  Complex coeff(int row, int col) const { return mat_.coeff(row, col); }

  const Matrix& matrix() const { return mat_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(mat_); }

  // Canonical (row, column, value) list in row-major order.
  std::vector<std::tuple<int, int, Complex>> entries() const;

  // y = A x
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  SparseOperator adjoint() const;

  // max_{ij} |A_ij - (A^dagger)_ij|; zero for hermitian operators.
  double hermiticity_error() const;

  // Largest |A_ij| over stored entries.
  double max_abs() const;

  SparseOperator& operator+=(const SparseOperator& rhs);
  SparseOperator& operator-=(const SparseOperator& rhs);
  SparseOperator& operator*=(Complex scale);

  friend SparseOperator operator+(SparseOperator lhs, const SparseOperator& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend SparseOperator operator-(SparseOperator lhs, const SparseOperator& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend SparseOperator operator*(Complex scale, SparseOperator op) {
    op *= scale;
    return op;
  }
  friend SparseOperator operator*(double scale, SparseOperator op) {
    op *= Complex(scale, 0.0);
    return op;
  }
  friend SparseOperator operator*(const SparseOperator& lhs, const SparseOperator& rhs);

 private:
  static void require_dim(int dim) {
    if (dim < 1) throw DimensionError("operator dimension must be >= 1");
  }
  void check_same_dim(const SparseOperator& other) const {
    if (dim() != other.dim())
      throw DimensionError("operator dimension mismatch: " + std::to_string(dim()) +
                           " vs " + std::to_string(other.dim()));
  }
  void canonicalize();

  Matrix mat_;
};

// Kronecker product, row index = r_a * dim_b + r_b (A is the major factor).
SparseOperator kron(const SparseOperator& a, const SparseOperator& b);

// Rough operator-norm estimate of [A, B] from random-vector applications.
double commutator_norm_estimate(const SparseOperator& a, const SparseOperator& b,
                                int n_vectors = 50, std::uint64_t seed = 7);

}  // namespace edm

#include "edm/sparse.hpp"

#include <cmath>
#include <random>

namespace edm {

SparseOperator SparseOperator::identity(int dim) {
  require_dim(dim);
  SparseOperator op(dim);
  op.mat_.setIdentity();
  return op;
}

SparseOperator SparseOperator::from_triplets(int dim, const std::vector<Triplet>& entries) {
  require_dim(dim);
  SparseOperator op(dim);
  op.mat_.setFromTriplets(entries.begin(), entries.end());
  op.canonicalize();
  return op;
}

SparseOperator SparseOperator::from_matrix(Matrix m) {
  if (m.rows() != m.cols()) throw DimensionError("sparse operator must be square");
  SparseOperator op;
  op.mat_ = std::move(m);
  op.canonicalize();
  return op;
}

std::vector<std::tuple<int, int, Complex>> SparseOperator::entries() const {
  std::vector<std::tuple<int, int, Complex>> out;
  out.reserve(nnz());
  for (int row = 0; row < mat_.outerSize(); ++row)
    for (Matrix::InnerIterator it(mat_, row); it; ++it)
      out.emplace_back(it.row(), it.col(), it.value());
  return out;
}

void SparseOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  if (x.size() != dim())
    throw DimensionError("vector length does not match operator dimension");
  y.noalias() = mat_ * x;
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd y(dim());
  apply(x, y);
  return y;
}

SparseOperator SparseOperator::adjoint() const {
  SparseOperator out;
  out.mat_ = mat_.adjoint();
  out.canonicalize();
  return out;
}

double SparseOperator::hermiticity_error() const {
  Matrix diff = mat_ - Matrix(mat_.adjoint());
  double worst = 0.0;
  for (int row = 0; row < diff.outerSize(); ++row)
    for (Matrix::InnerIterator it(diff, row); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

double SparseOperator::max_abs() const {
  double worst = 0.0;
  for (int row = 0; row < mat_.outerSize(); ++row)
    for (Matrix::InnerIterator it(mat_, row); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

SparseOperator& SparseOperator::operator+=(const SparseOperator& rhs) {
  check_same_dim(rhs);
  mat_ = Matrix(mat_ + rhs.mat_);
  canonicalize();
  return *this;
}

SparseOperator& SparseOperator::operator-=(const SparseOperator& rhs) {
  check_same_dim(rhs);
  mat_ = Matrix(mat_ - rhs.mat_);
  canonicalize();
  return *this;
}

SparseOperator& SparseOperator::operator*=(Complex scale) {
  mat_ *= scale;
  canonicalize();
  return *this;
}

SparseOperator operator*(const SparseOperator& lhs, const SparseOperator& rhs) {
  lhs.check_same_dim(rhs);
  SparseOperator out;
  out.mat_ = lhs.mat_ * rhs.mat_;
  out.canonicalize();
  return out;
}

void SparseOperator::canonicalize() {
  mat_.prune(1.0, prune_threshold);
  if (!mat_.isCompressed()) mat_.makeCompressed();
}

SparseOperator kron(const SparseOperator& a, const SparseOperator& b) {
  const int da = a.dim();
  const int db = b.dim();
  std::vector<SparseOperator::Triplet> trips;
  trips.reserve(a.nnz() * b.nnz());
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  for (int ra = 0; ra < ma.outerSize(); ++ra)
    for (SparseOperator::Matrix::InnerIterator ia(ma, ra); ia; ++ia)
      for (int rb = 0; rb < mb.outerSize(); ++rb)
        for (SparseOperator::Matrix::InnerIterator ib(mb, rb); ib; ++ib)
          trips.emplace_back(ia.row() * db + ib.row(), ia.col() * db + ib.col(),
                             ia.value() * ib.value());
  return SparseOperator::from_triplets(da * db, trips);
}

double commutator_norm_estimate(const SparseOperator& a, const SparseOperator& b,
                                int n_vectors, std::uint64_t seed) {
  if (a.dim() != b.dim()) throw DimensionError("commutator of mismatched operators");
  std::mt19937_64 rng(seed);
  auto unit_real = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  const int n = a.dim();
  double worst = 0.0;
  for (int t = 0; t < n_vectors; ++t) {
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; ++i) x[i] = Complex(unit_real(), unit_real());
    x.normalize();
    Eigen::VectorXcd y = a.apply(b.apply(x)) - b.apply(a.apply(x));
    worst = std::max(worst, y.norm());
  }
  return worst;
}

}  // namespace edm

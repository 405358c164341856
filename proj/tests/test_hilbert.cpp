#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "edm/hilbert.hpp"

using namespace edm;

namespace {
const Complex I(0.0, 1.0);

double max_diff(const SparseOperator& a, const SparseOperator& b) {
  SparseOperator d = a - b;
  return d.max_abs();
}
}  // namespace

TEST_CASE("single-qubit pauli matrices") {
  const HilbertSpace space(1, 0);
  const SparseOperator sx = pauli(space, 0, Axis::X);
  CHECK(sx.coeff(0, 1) == Complex(1, 0));
  CHECK(sx.coeff(1, 0) == Complex(1, 0));
  CHECK(sx.coeff(0, 0) == Complex(0, 0));
  CHECK(sx.nnz() == 2);

  const SparseOperator sz = pauli(space, 0, Axis::Z);
  CHECK(sz.coeff(0, 0) == Complex(-1, 0));
  CHECK(sz.coeff(1, 1) == Complex(1, 0));

  const SparseOperator sy = pauli(space, 0, Axis::Y);
  CHECK(sy.coeff(1, 0) == -I);
  CHECK(sy.coeff(0, 1) == I);
}

TEST_CASE("pauli algebra sigma_x sigma_y = i sigma_z per qubit") {
  const HilbertSpace space(2, 0);
  for (int q = 0; q < 2; ++q) {
    const SparseOperator lhs = pauli(space, q, Axis::X) * pauli(space, q, Axis::Y);
    const SparseOperator rhs = I * pauli(space, q, Axis::Z);
    CHECK(max_diff(lhs, rhs) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("pauli rejects out-of-range qubit") {
  const HilbertSpace space(2, 1);
  CHECK_THROWS_AS(pauli(space, 2, Axis::X), DimensionError);
  CHECK_THROWS_AS(pauli(space, -1, Axis::Z), DimensionError);
}

TEST_CASE("collective spin equals half the pauli sum") {
  const HilbertSpace space(3, 1);
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    SparseOperator sum(space.dim());
    for (int q = 0; q < 3; ++q) sum += 0.5 * pauli(space, q, axis);
    CHECK(max_diff(collective_spin(space, axis), sum) < 1e-15);
  }
}

TEST_CASE("S_z eigenvalue of the fully excited two-qubit state") {
  const HilbertSpace space(2, 2);
  const SparseOperator sz = collective_spin(space, Axis::Z);
  for (int n = 0; n <= 2; ++n) {
    const int i = space.index(3, n);  // bits 11
    CHECK(sz.coeff(i, i) == Complex(1.0, 0.0));
  }
}

TEST_CASE("S_x^2 eigenvalues for two qubits are {0,0,1,1}") {
  const HilbertSpace space(2, 0);
  const SparseOperator sx = collective_spin(space, Axis::X);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((sx * sx).dense());
  const Eigen::VectorXd ev = es.eigenvalues();
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(1.0));
  CHECK(ev[3] == doctest::Approx(1.0));
}

TEST_CASE("angular momentum commutators [Sa,Sb] = i eps_abc Sc") {
  const HilbertSpace space(4, 0);
  const SparseOperator sx = collective_spin(space, Axis::X);
  const SparseOperator sy = collective_spin(space, Axis::Y);
  const SparseOperator sz = collective_spin(space, Axis::Z);
  CHECK(max_diff(sx * sy - sy * sx, I * sz) < 1e-12);
  CHECK(max_diff(sy * sz - sz * sy, I * sx) < 1e-12);
  CHECK(max_diff(sz * sx - sx * sz, I * sy) < 1e-12);
}

TEST_CASE("boson ladder entries and number operator") {
  const HilbertSpace space(1, 2);
  const SparseOperator a = boson_annihilate(space);
  CHECK(a.coeff(space.index(0, 0), space.index(0, 1)) == Complex(1.0, 0.0));
  CHECK(std::abs(a.coeff(space.index(0, 1), space.index(0, 2)) - std::sqrt(2.0)) < 1e-15);

  const SparseOperator n_op = boson_number(space);
  CHECK(max_diff(a.adjoint() * a, n_op) < 1e-15);
  for (int n = 0; n <= 2; ++n)
    CHECK(n_op.coeff(space.index(0, n), space.index(0, n)) == Complex(n, 0.0));
}

TEST_CASE("[a, a^dag] = 1 below the cutoff row") {
  const HilbertSpace space(1, 5);
  const SparseOperator a = boson_annihilate(space);
  const SparseOperator comm = a * a.adjoint() - a.adjoint() * a;
  for (int n = 0; n < 5; ++n)
    CHECK(std::abs(comm.coeff(space.index(0, n), space.index(0, n)) - Complex(1.0, 0.0)) < 1e-12);
  // the hard truncation shows up only in the last Fock row
  CHECK(std::abs(comm.coeff(space.index(0, 5), space.index(0, 5)) - Complex(-5.0, 0.0)) < 1e-12);
}

TEST_CASE("[n, a] = -a below the cutoff row") {
  const HilbertSpace space(2, 6);
  const SparseOperator a = boson_annihilate(space);
  const SparseOperator lhs = boson_number(space) * a - a * boson_number(space);
  CHECK(max_diff(lhs, Complex(-1.0, 0.0) * a) < 1e-12);
}

TEST_CASE("operator algebra basics") {
  const HilbertSpace space(2, 3);
  const SparseOperator a = boson_annihilate(space);
  SUBCASE("A + (-1) A has no entries") {
    SparseOperator zero = a + Complex(-1.0, 0.0) * a;
    CHECK(zero.nnz() == 0);
  }
  SUBCASE("adjoint is an involution") {
    const SparseOperator op = a + Complex(0.0, 0.5) * collective_spin(space, Axis::Y);
    CHECK(max_diff(op.adjoint().adjoint(), op) == 0.0);
  }
  SUBCASE("sigma_x squares to the identity") {
    const SparseOperator sx = pauli(space, 0, Axis::X);
    CHECK(max_diff(sx * sx, identity_op(space)) < 1e-15);
  }
  SUBCASE("dimension mismatch is rejected") {
    const HilbertSpace other(2, 4);
    CHECK_THROWS_AS(boson_annihilate(space) + boson_annihilate(other), DimensionError);
    CHECK_THROWS_AS(boson_annihilate(space) * boson_annihilate(other), DimensionError);
  }
}

TEST_CASE("hermiticity check on generated operators") {
  const HilbertSpace space(3, 4);
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z})
    CHECK(collective_spin(space, axis).hermiticity_error() == 0.0);
  const SparseOperator a = boson_annihilate(space);
  CHECK((a + a.adjoint()).hermiticity_error() == 0.0);
  CHECK(a.hermiticity_error() > 0.9);
}

TEST_CASE("index encode/decode is a bijection") {
  const HilbertSpace space(3, 4);
  std::vector<bool> seen(space.dim(), false);
  for (int iq = 0; iq < space.qubit_dim(); ++iq)
    for (int n = 0; n < space.fock_dim(); ++n) {
      const int i = space.index(iq, n);
      REQUIRE(i >= 0);
      REQUIRE(i < space.dim());
      CHECK(!seen[i]);
      seen[i] = true;
      const auto [iq2, n2] = space.decode(i);
      CHECK(iq2 == iq);
      CHECK(n2 == n);
    }
}

TEST_CASE("invalid spaces are rejected") {
  CHECK_THROWS_AS(HilbertSpace(0, 3), InvalidInput);
  CHECK_THROWS_AS(HilbertSpace(2, -1), InvalidInput);
}

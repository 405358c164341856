#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "edm/sparse.hpp"

namespace edm {

enum class SolverKind { Dense, Iterative };

struct SolveOptions {
  double tol = 1e-10;        // residual tolerance relative to max(1, |E|)
  int dense_threshold = 4096;
  int basis_size = 0;        // Krylov basis per cycle; 0 = auto
  int max_restarts = 300;
  std::uint64_t seed = 0x5eedc0de;  // start-vector seed, fixed for determinism
  std::size_t memory_budget = std::size_t(8) << 30;  // bytes
};

struct SpectrumResult {
  std::vector<double> eigenvalues;   // ascending
  Eigen::MatrixXcd eigenvectors;     // dim x k, unit columns, fixed phase
  std::vector<double> residuals;     // ||H v - E v|| per pair
  int n_max = -1;        // Fock cutoff of the final solve (when applicable)
  int n_max_prev = -1;   // previous cutoff of the convergence ladder
  double ground_shift = 0.0;  // |Delta E0| across the last cutoff doubling
  bool converged = false;
  SolverKind solver = SolverKind::Dense;
  int iterations = 0;    // restart cycles used by the Krylov path
};

// k smallest eigenpairs of a hermitian sparse operator. Dense diagonalization
// below the dimension threshold, thick-restart Lanczos with full
// reorthogonalization above it. Degenerate clusters come back as an
// orthonormal basis of the cluster; every vector's phase is fixed by making
// its largest-magnitude component (first such, on ties) real positive.
SpectrumResult lowest_eigenpairs(const SparseOperator& h, int k, const SolveOptions& opts = {});

// Cutoff-convergence driver: build(n_max) at the starting cutoff, then keep
// doubling until the ground energy moves by less than tol_energy. The result
// carries both final cutoffs and the last energy shift. dim_of, when given,
// predicts the dimension of build(n) so the memory budget can be enforced
// before allocation.
SpectrumResult converge_ground(const std::function<SparseOperator(int)>& build, int n_start,
                               int k, double tol_energy, const SolveOptions& opts = {},
                               const std::function<std::size_t(int)>& dim_of = {});

// Deterministic phase convention used for reported eigenvectors.
void fix_phase(Eigen::VectorXcd& v);

}  // namespace edm

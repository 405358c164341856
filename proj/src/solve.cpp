#include "edm/solve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace edm {

void fix_phase(Eigen::VectorXcd& v) {
  int pivot = 0;
  double best = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > best * (1.0 + 1e-12)) {
      best = m;
      pivot = i;
    }
  }
  if (best == 0.0) return;
  const Complex phase = std::conj(v[pivot]) / best;
  v *= phase;
}

namespace {

double gershgorin_lower_bound(const SparseOperator& h) {
  const auto& m = h.matrix();
  double bound = 0.0;
  bool first = true;
  for (int row = 0; row < m.outerSize(); ++row) {
    double diag = 0.0;
    double radius = 0.0;
    for (SparseOperator::Matrix::InnerIterator it(m, row); it; ++it) {
      if (it.col() == row)
        diag = it.value().real();
      else
        radius += std::abs(it.value());
    }
    const double lo = diag - radius;
    if (first || lo < bound) bound = lo;
    first = false;
  }
  return bound;
}

void check_memory(std::size_t bytes, std::size_t budget, const std::string& what) {
  if (bytes > budget) {
    std::ostringstream msg;
    msg << what << " needs ~" << (bytes >> 20) << " MiB, exceeding the memory budget of "
        << (budget >> 20) << " MiB (EDM_MEMORY_BUDGET_MB)";
    throw ResourceError(msg.str());
  }
}

void finalize(SpectrumResult& r, const SparseOperator& h, double tol) {
  const int k = static_cast<int>(r.eigenvalues.size());
  r.residuals.resize(k);
  bool ok = true;
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXcd col = r.eigenvectors.col(j);
    fix_phase(col);
    r.eigenvectors.col(j) = col;
    const Eigen::VectorXcd resid = h.apply(col) - r.eigenvalues[j] * col;
    r.residuals[j] = resid.norm();
    if (r.residuals[j] > tol * std::max(1.0, std::abs(r.eigenvalues[j]))) ok = false;
  }
  r.converged = ok;
}

SpectrumResult dense_path(const SparseOperator& h, int k, const SolveOptions& opts) {
  const int n = h.dim();
  check_memory(static_cast<std::size_t>(n) * n * sizeof(Complex) +
                   static_cast<std::size_t>(n) * k * sizeof(Complex),
               opts.memory_budget, "dense diagonalization");

  Eigen::MatrixXcd a = h.dense();
  std::vector<double> w(n);
  Eigen::MatrixXcd z(n, k);
  std::vector<int> isuppz(2 * std::max(1, k));
  int found = 0;
  const double abstol = LAPACKE_dlamch('S');
  const int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, k,
                                  abstol, &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0)
    throw NumericError("dense hermitian eigensolver failed with info=" + std::to_string(info));
  if (found < k) throw NumericError("dense eigensolver returned too few eigenpairs");

  SpectrumResult r;
  r.solver = SolverKind::Dense;
  r.eigenvalues.assign(w.begin(), w.begin() + k);
  r.eigenvectors = z.leftCols(k);
  finalize(r, h, opts.tol);
  return r;
}

// Thick-restart Lanczos with full reorthogonalization, plus locking and
// deflation. A single Krylov sequence carries at most one vector per distinct
// eigenvalue, so degenerate copies are recovered by locking each converged
// pair (verified by an explicit residual) and restarting with a fresh random
// vector orthogonal to everything locked. Ghost values cannot appear because
// every basis vector is reorthogonalized against both the active basis and
// the locked set on every step.
SpectrumResult lanczos_path(const SparseOperator& h, int k, const SolveOptions& opts) {
  const int n = h.dim();
  const int m_max =
      std::min(n, opts.basis_size > 0 ? opts.basis_size : std::max(2 * k + 24, 48));
  check_memory(static_cast<std::size_t>(n) * (m_max + k + 6) * sizeof(Complex) +
                   h.nnz() * (sizeof(Complex) + sizeof(int)),
               opts.memory_budget, "Krylov eigensolver");

  const double sigma = gershgorin_lower_bound(h);

  std::mt19937_64 rng(opts.seed);
  auto unit_real = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };

  Eigen::MatrixXcd locked(n, k);
  std::vector<double> locked_vals;
  int nlock = 0;
  int cycles_used = 0;
  double best_resid = std::numeric_limits<double>::infinity();

  Eigen::VectorXcd w(n);
  auto fill_random = [&](Eigen::VectorXcd& x) {
    for (int i = 0; i < n; ++i) x[i] = Complex(unit_real(), unit_real());
  };
  // two-pass orthogonalization against the locked set and the active basis
  auto orthogonalize = [&](Eigen::VectorXcd& x, const Eigen::MatrixXcd& v, int cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (nlock > 0)
        x.noalias() -= locked.leftCols(nlock) * (locked.leftCols(nlock).adjoint() * x);
      if (cols > 0) x.noalias() -= v.leftCols(cols) * (v.leftCols(cols).adjoint() * x);
    }
  };

  while (nlock < k) {
    const int m = std::min(m_max, n - nlock);
    if (m < 1) throw ConvergenceError("Krylov eigensolver ran out of directions");
    Eigen::MatrixXcd v(n, m + 1);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, m + 1);

    Eigen::VectorXcd start(n);
    fill_random(start);
    orthogonalize(start, v, 0);
    if (start.norm() < 1e-8) {
      fill_random(start);
      orthogonalize(start, v, 0);
    }
    v.col(0) = start / start.norm();

    int j0 = 0;
    int carried = 0;  // Ritz vectors kept by the last thick restart
    bool cycle_done = false;
    while (!cycle_done) {
      if (++cycles_used > opts.max_restarts) {
        std::ostringstream msg;
        msg << "Krylov eigensolver did not converge after " << opts.max_restarts
            << " restart cycles; " << nlock << "/" << k
            << " pairs locked, best open residual " << best_resid;
        throw ConvergenceError(msg.str());
      }

      int m_run = m;
      bool invariant = false;
      for (int j = j0; j < m; ++j) {
        h.apply(v.col(j), w);
        w -= sigma * v.col(j);
        if (j == j0 && carried > 0) {
          for (int i = 0; i < carried; ++i) w -= t(i, j) * v.col(i);
        } else if (j > 0) {
          w -= t(j - 1, j) * v.col(j - 1);
        }
        const double alpha = std::real(v.col(j).dot(w));
        t(j, j) = alpha;
        w -= alpha * v.col(j);
        orthogonalize(w, v, j + 1);
        double beta = w.norm();
        if (beta < 1e-13 * std::max(1.0, std::abs(alpha) + std::abs(sigma))) {
          // invariant subspace hit; try a fresh direction in the complement
          fill_random(w);
          orthogonalize(w, v, j + 1);
          beta = w.norm();
          t(j, j + 1) = t(j + 1, j) = 0.0;
          if (beta < 1e-8) {
            m_run = j + 1;
            invariant = true;
            break;
          }
          // hermitian operator: the complement of an invariant subspace is
          // invariant, so the recurrence continues with zero coupling
          v.col(j + 1) = w / beta;
          continue;
        }
        t(j, j + 1) = t(j + 1, j) = beta;
        v.col(j + 1) = w / beta;
      }

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.topLeftCorner(m_run, m_run));
      const Eigen::VectorXd theta = es.eigenvalues();
      const Eigen::MatrixXd s = es.eigenvectors();
      const double beta_last = invariant ? 0.0 : t(m_run - 1, m_run);

      // Lock converged pairs, verified by explicit residuals. Only the
      // bottom Ritz cluster is guaranteed to be the lowest *remaining*
      // eigenvalue: a Krylov sequence sees a limited number of copies of a
      // degenerate value, so anything above the bottom cluster may still
      // hide unexhausted copies and must wait for a later deflated cycle.
      const int want = k - nlock;
      const int cand = std::min(want, m_run);
      const double bottom = theta[0] + sigma;
      const double cluster_width = 4.0 * opts.tol * std::max(1.0, std::abs(bottom));
      int newly = 0;
      for (int i = 0; i < cand; ++i) {
        const double e = theta[i] + sigma;
        if (i > 0 && e - bottom > cluster_width) break;
        Eigen::VectorXcd x = v.leftCols(m_run) * s.col(i);
        x /= x.norm();
        const double resid = (h.apply(x) - e * x).norm();
        if (resid <= opts.tol * std::max(1.0, std::abs(e))) {
          locked.col(nlock) = x;
          locked_vals.push_back(e);
          ++nlock;
          ++newly;
        } else {
          best_resid = std::min(best_resid, resid);
          break;
        }
      }
      if (newly > 0 || nlock >= k || invariant) {
        cycle_done = true;  // deflate and search the complement afresh
        continue;
      }

      // thick restart within this cycle
      const int keep = std::min(want + 8, m_run - 2);
      if (keep < 1) {
        cycle_done = true;
        continue;
      }
      const Eigen::MatrixXcd y = v.leftCols(m_run) * s.leftCols(keep);
      v.leftCols(keep) = y;
      v.col(keep) = v.col(m_run);
      t.setZero();
      for (int i = 0; i < keep; ++i) {
        t(i, i) = theta[i];
        t(i, keep) = t(keep, i) = beta_last * s(m_run - 1, i);
      }
      j0 = keep;
      carried = keep;
    }
  }

  // deflation locks copies of a degenerate value in successive cycles, which
  // can land out of order by rounding; sort for presentation
  std::vector<int> order(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });

  SpectrumResult r;
  r.solver = SolverKind::Iterative;
  r.iterations = cycles_used;
  r.eigenvalues.resize(k);
  r.eigenvectors.resize(n, k);
  for (int i = 0; i < k; ++i) {
    r.eigenvalues[i] = locked_vals[order[static_cast<std::size_t>(i)]];
    r.eigenvectors.col(i) = locked.col(order[static_cast<std::size_t>(i)]);
  }
  finalize(r, h, opts.tol);
  return r;
}

}  // namespace

SpectrumResult lowest_eigenpairs(const SparseOperator& h, int k, const SolveOptions& opts) {
  const int n = h.dim();
  if (k < 1 || k >= n) throw InvalidInput("need 1 <= k < dim");
  const double herm = h.hermiticity_error();
  if (herm > std::max(1e-12, 1e-14 * h.max_abs()))
    throw NumericError("operator is not hermitian; max |A - A^dagger| = " + std::to_string(herm));

  if (n <= opts.dense_threshold) return dense_path(h, k, opts);
  return lanczos_path(h, k, opts);
}

SpectrumResult converge_ground(const std::function<SparseOperator(int)>& build, int n_start,
                               int k, double tol_energy, const SolveOptions& opts,
                               const std::function<std::size_t(int)>& dim_of) {
  if (n_start < 1) throw InvalidInput("starting cutoff must be >= 1");
  auto solve_at = [&](int n_max) {
    if (dim_of) {
      const std::size_t dim = dim_of(n_max);
      const std::size_t m = static_cast<std::size_t>(std::max(3 * k + 24, 48));
      const std::size_t need = (dim <= static_cast<std::size_t>(opts.dense_threshold))
                                   ? dim * dim * sizeof(Complex)
                                   : dim * (m + k + 4) * sizeof(Complex);
      if (need > opts.memory_budget) {
        std::ostringstream msg;
        msg << "cutoff " << n_max << " (dim " << dim << ") needs ~" << (need >> 20)
            << " MiB, exceeding the memory budget of " << (opts.memory_budget >> 20)
            << " MiB (EDM_MEMORY_BUDGET_MB)";
        throw ResourceError(msg.str());
      }
    }
    SpectrumResult r = lowest_eigenpairs(build(n_max), k, opts);
    r.n_max = n_max;
    return r;
  };

  SpectrumResult prev = solve_at(n_start);
  int cut = n_start;
  while (true) {
    const int next = 2 * cut;
    SpectrumResult curr = solve_at(next);
    const double shift = std::abs(curr.eigenvalues[0] - prev.eigenvalues[0]);
    if (shift < tol_energy) {
      curr.n_max_prev = cut;
      curr.ground_shift = shift;
      curr.converged = true;
      return curr;
    }
    prev = std::move(curr);
    cut = next;
  }
}

}  // namespace edm

#include "edm/observe.hpp"

#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "edm/constants.hpp"
#include "edm/model.hpp"

namespace edm {

Complex expectation_complex(const Eigen::VectorXcd& state, const SparseOperator& a) {
  if (state.size() != a.dim()) throw DimensionError("state length does not match operator");
  return state.dot(a.apply(state));
}

double expectation(const Eigen::VectorXcd& state, const SparseOperator& a) {
  const double norm_err = std::abs(state.norm() - 1.0);
  if (norm_err > 1e-10)
    throw InvalidInput("state is not normalized (|norm - 1| = " + std::to_string(norm_err) + ")");
  const Complex v = expectation_complex(state, a);
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
    throw NumericError("expectation value has a non-vanishing imaginary part; operator hermitian?");
  return v.real();
}

Eigen::MatrixXcd reduced_qubit_density(const Eigen::VectorXcd& state, const HilbertSpace& space) {
  if (state.size() != space.dim()) throw DimensionError("state length does not match space");
  const int nq = space.qubit_dim();
  const int nf = space.fock_dim();
  // column iq, row n; rho(iq,jq) = sum_n psi(iq,n) conj(psi(jq,n))
  Eigen::Map<const Eigen::MatrixXcd> psi(state.data(), nf, nq);
  return (psi.adjoint() * psi).transpose();
}

Eigen::MatrixXcd reduced_boson_density(const Eigen::VectorXcd& state, const HilbertSpace& space) {
  if (state.size() != space.dim()) throw DimensionError("state length does not match space");
  const int nq = space.qubit_dim();
  const int nf = space.fock_dim();
  Eigen::Map<const Eigen::MatrixXcd> psi(state.data(), nf, nq);
  return psi * psi.adjoint();  // (n, n') = sum_iq psi(n,iq) conj(psi(n',iq))
}

Eigen::MatrixXcd partial_trace_qubits(const Eigen::MatrixXcd& rho_q, int n_qubits,
                                      const std::vector<int>& keep) {
  if (rho_q.rows() != rho_q.cols() || rho_q.rows() != (1 << n_qubits))
    throw DimensionError("density matrix size does not match qubit count");
  if (keep.empty()) throw InvalidInput("keep set must be non-empty");
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  if (std::unique(kept.begin(), kept.end()) != kept.end())
    throw InvalidInput("duplicate qubit in keep set");
  if (kept.front() < 0 || kept.back() >= n_qubits)
    throw DimensionError("keep set contains an out-of-range qubit");

  std::vector<int> traced;
  for (int q = 0; q < n_qubits; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const int dk = 1 << kept.size();
  const int de = 1 << traced.size();
  auto scatter = [](int bits, const std::vector<int>& positions) {
    int out = 0;
    for (std::size_t t = 0; t < positions.size(); ++t)
      if ((bits >> t) & 1) out |= 1 << positions[t];
    return out;
  };
  std::vector<int> keep_part(dk), trace_part(de);
  for (int a = 0; a < dk; ++a) keep_part[a] = scatter(a, kept);
  for (int e = 0; e < de; ++e) trace_part[e] = scatter(e, traced);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (int a = 0; a < dk; ++a)
    for (int b = 0; b < dk; ++b) {
      Complex s(0.0, 0.0);
      for (int e = 0; e < de; ++e)
        s += rho_q(keep_part[a] | trace_part[e], keep_part[b] | trace_part[e]);
      out(a, b) = s;
    }
  return out;
}

double entanglement_entropy(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-8)
    throw NumericError("density matrix trace deviates from 1 by " +
                       std::to_string(std::abs(trace - 1.0)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double lam : es.eigenvalues()) {
    if (lam < -1e-12)
      throw NumericError("density matrix has a negative eigenvalue " + std::to_string(lam));
    if (lam > 0.0) s -= lam * std::log2(lam);
  }
  return s;
}

QFunctionMap spin_q_function(const Eigen::MatrixXcd& rho_q, int n_qubits, int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 2) throw InvalidInput("Q-function grid must be at least 2x2");
  if (rho_q.rows() != (1 << n_qubits)) throw DimensionError("density matrix size mismatch");

  QFunctionMap map;
  map.theta.resize(n_theta);
  map.phi.resize(n_phi);
  map.values.resize(n_theta, n_phi);
  for (int i = 0; i < n_theta; ++i)
    map.theta[i] = constants::pi * static_cast<double>(i) / (n_theta - 1);
  for (int j = 0; j < n_phi; ++j)
    map.phi[j] = 2.0 * constants::pi * static_cast<double>(j) / n_phi;

  const int nq = 1 << n_qubits;
  Eigen::VectorXcd n_state(nq);
  for (int i = 0; i < n_theta; ++i) {
    const double c = std::cos(0.5 * map.theta[i]);
    const double s = std::sin(0.5 * map.theta[i]);
    for (int j = 0; j < n_phi; ++j) {
      const Complex down = s * std::exp(Complex(0.0, map.phi[j]));
      for (int iq = 0; iq < nq; ++iq) {
        Complex amp(1.0, 0.0);
        for (int q = 0; q < n_qubits; ++q) amp *= ((iq >> q) & 1) ? Complex(c, 0.0) : down;
        n_state[iq] = amp;
      }
      map.values(i, j) = std::real(n_state.dot(rho_q * n_state));
    }
  }
  return map;
}

GroundStateReport ground_report(const SpectrumResult& result, const HilbertSpace& space,
                                double degeneracy_tol) {
  if (result.eigenvalues.empty()) throw InvalidInput("empty spectrum");
  if (result.eigenvectors.rows() != space.dim())
    throw DimensionError("eigenvector length does not match space");

  const SparseOperator n_op = boson_number(space);
  const SparseOperator sz = collective_spin(space, Axis::Z);
  const SparseOperator sx = collective_spin(space, Axis::X);
  const SparseOperator sx2 = sx * sx;
  const SparseOperator pi_op = parity_operator(space);

  const Eigen::VectorXcd ground = result.eigenvectors.col(0);

  GroundStateReport rep;
  rep.energy = result.eigenvalues[0];
  rep.gap = result.eigenvalues.size() > 1
                ? result.eigenvalues[1] - result.eigenvalues[0]
                : std::numeric_limits<double>::quiet_NaN();
  rep.n_photon = expectation(ground, n_op);
  rep.S_z = expectation(ground, sz);
  rep.S_x = expectation(ground, sx);
  rep.S_x2 = expectation(ground, sx2);
  rep.parity = expectation(ground, pi_op);

  const Eigen::MatrixXcd rho_q = reduced_qubit_density(ground, space);
  rep.entropy_q = entanglement_entropy(rho_q);
  rep.entropy_1 = entanglement_entropy(partial_trace_qubits(rho_q, space.n_qubits, {0}));

  int cluster = 1;
  while (cluster < static_cast<int>(result.eigenvalues.size()) &&
         result.eigenvalues[cluster] - result.eigenvalues[0] <= degeneracy_tol)
    ++cluster;
  rep.n_degenerate = cluster;
  double np = 0, zz = 0, xx = 0, x2 = 0, pp = 0;
  for (int i = 0; i < cluster; ++i) {
    const Eigen::VectorXcd v = result.eigenvectors.col(i);
    np += expectation(v, n_op);
    zz += expectation(v, sz);
    xx += expectation(v, sx);
    x2 += expectation(v, sx2);
    pp += expectation(v, pi_op);
  }
  rep.n_photon_avg = np / cluster;
  rep.S_z_avg = zz / cluster;
  rep.S_x_avg = xx / cluster;
  rep.S_x2_avg = x2 / cluster;
  rep.parity_avg = pp / cluster;

  rep.n_max = result.n_max;
  rep.converged = result.converged;
  return rep;
}

}  // namespace edm

#include "edm/circuit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace edm {

using constants::elementary_charge;
using constants::hbar;

ModelParams ModelParams::uniform(double omega_r, double omega_q, double g, double delta,
                                 int n_qubits, Units units) {
  if (omega_r <= 0.0) throw InvalidInput("omega_r must be positive");
  if (n_qubits < 1) throw InvalidInput("need at least one qubit");
  ModelParams p;
  p.omega_r = omega_r;
  p.omega_q.assign(n_qubits, omega_q);
  p.g.assign(n_qubits, g);
  p.delta = delta;
  p.D = g * g / omega_r + delta;
  p.n_qubits = n_qubits;
  p.units = units;
  return p;
}

ModelParams ModelParams::dicke(double omega_r, double omega_q, double g, int n_qubits,
                               Units units) {
  ModelParams p = uniform(omega_r, omega_q, g, 0.0, n_qubits, units);
  p.D = 0.0;
  p.delta = -g * g / omega_r;
  return p;
}

bool ModelParams::is_uniform(double rtol) const {
  auto spread_ok = [rtol](const std::vector<double>& v) {
    if (v.empty()) return false;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double scale = std::max({std::abs(*lo), std::abs(*hi), 1e-300});
    return (*hi - *lo) <= rtol * scale;
  };
  return static_cast<int>(omega_q.size()) == n_qubits &&
         static_cast<int>(g.size()) == n_qubits && spread_ok(omega_q) && spread_ok(g);
}

double ModelParams::omega_q0() const {
  if (!is_uniform()) throw InvalidInput("omega_q0() requires uniform parameters");
  return omega_q.front();
}

double ModelParams::g0() const {
  if (!is_uniform()) throw InvalidInput("g0() requires uniform parameters");
  return g.front();
}

ModelParams ModelParams::with_coupling(double new_g) const {
  ModelParams p = *this;
  p.g.assign(n_qubits, new_g);
  p.D = new_g * new_g / omega_r + delta;
  return p;
}

ModelParams ModelParams::to_resonator_units() const {
  ModelParams p = *this;
  const double w = omega_r;
  p.omega_r = 1.0;
  for (auto& v : p.omega_q) v /= w;
  for (auto& v : p.g) v /= w;
  p.D /= w;
  p.delta /= w;
  p.units = Units::ResonatorUnits;
  return p;
}

void ChargeCircuit::validate() const {
  if (C_r <= 0 || C_q <= 0 || C_g <= 0) throw InvalidInput("capacitances must be positive");
  if (L_r <= 0) throw InvalidInput("L_r must be positive");
  if (E_J < 0) throw InvalidInput("E_J must be >= 0");
  if (n_qubits < 1) throw InvalidInput("need at least one qubit");
}

DerivedCapacitances derive_capacitances(const ChargeCircuit& c) {
  c.validate();
  const double N = c.n_qubits;
  DerivedCapacitances d;
  d.Cbar_sq = c.C_g * c.C_r + c.C_q * (c.C_r + N * c.C_g);
  d.Cbar_q = d.Cbar_sq / (c.C_r + c.C_g + (N - 1) * c.C_g * c.C_q / (c.C_q + c.C_g));
  d.Cbar_r = d.Cbar_sq / (c.C_q + c.C_g);
  d.Cbar_g = d.Cbar_sq / c.C_g;
  d.Cbar_qq = (c.C_g + c.C_q) * d.Cbar_sq / (c.C_g * c.C_g);
  return d;
}

Eigen::MatrixXd capacitance_matrix(const ChargeCircuit& c) {
  c.validate();
  const int n = c.n_qubits + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  m(0, 0) = c.C_r + c.n_qubits * c.C_g;
  for (int i = 1; i < n; ++i) {
    m(0, i) = m(i, 0) = -c.C_g;
    m(i, i) = c.C_q + c.C_g;
  }
  return m;
}

Eigen::MatrixXd invert_capacitance_matrix(const ChargeCircuit& c) {
  const Eigen::MatrixXd m = capacitance_matrix(c);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14))
    throw NumericError("capacitance matrix is numerically singular, condition number ~ " +
                       std::to_string(1.0 / std::max(rcond, 1e-300)));
  return lu.inverse();
}

Eigen::MatrixXd capacitance_inverse_closed_form(const ChargeCircuit& c) {
  c.validate();
  const int n = c.n_qubits + 1;
  const double N = c.n_qubits;
  const double cbar_sq = c.C_g * c.C_r + c.C_q * (c.C_r + N * c.C_g);
  const double x = c.C_r + c.C_g + (N - 1) * c.C_g * c.C_q / (c.C_g + c.C_q);
  const double y = c.C_g * c.C_g / (c.C_g + c.C_q);
  Eigen::MatrixXd inv(n, n);
  inv(0, 0) = c.C_q + c.C_g;
  for (int i = 1; i < n; ++i) {
    inv(0, i) = inv(i, 0) = c.C_g;
    for (int j = 1; j < n; ++j) inv(i, j) = (i == j) ? x : y;
  }
  return inv / cbar_sq;
}

namespace {

// One diagonalization of the charge-basis Hamiltonian; returns absolute
// energies ascending plus the charge matrix element of the lowest pair.
struct CpbSolve {
  Eigen::VectorXd energies;
  double q01_abs = 0.0;  // |<1|n|0>| in Cooper pairs
};

CpbSolve cpb_solve(double E_C, double E_J, double n_g, int n_cut) {
  const int m = 2 * n_cut + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double n = i - n_cut;
    h(i, i) = 4.0 * E_C * (n - n_g) * (n - n_g);
    if (i + 1 < m) h(i, i + 1) = h(i + 1, i) = -0.5 * E_J;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  CpbSolve out;
  out.energies = es.eigenvalues();

  const auto& v = es.eigenvectors();
  const double gap = out.energies[1] - out.energies[0];
  if (gap > 1e-12 * std::max(E_C, E_J)) {
    double q01 = 0.0;
    for (int i = 0; i < m; ++i) q01 += v(i, 1) * v(i, 0) * (i - n_cut);
    out.q01_abs = std::abs(q01);
  } else {
    // Degenerate ground doublet: the matrix element of the limiting
    // eigenbasis equals half the spread of the charge operator restricted
    // to the doublet, which is basis independent.
    Eigen::Matrix2d nk;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += v(i, a) * v(i, b) * (i - n_cut);
        nk(a, b) = s;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es2(nk);
    out.q01_abs = 0.5 * (es2.eigenvalues()[1] - es2.eigenvalues()[0]);
  }
  return out;
}

}  // namespace

CpbSpectrum cpb_spectrum(double E_C, double E_J, double n_g, int n_cut) {
  if (E_C <= 0.0) throw InvalidInput("E_C must be positive");
  if (E_J < 0.0) throw InvalidInput("E_J must be >= 0");
  if (n_cut < 5) throw InvalidInput("charge cutoff must be >= 5");

  const int n_levels = 5;
  const int n_cut_max = 5120;
  CpbSolve prev = cpb_solve(E_C, E_J, n_g, n_cut);
  int cut = n_cut;
  while (true) {
    const int next = 2 * cut;
    if (next > n_cut_max)
      throw CutoffError("Cooper-pair-box spectrum did not converge by charge cutoff " +
                        std::to_string(cut));
    CpbSolve curr = cpb_solve(E_C, E_J, n_g, next);
    double drift = 0.0;
    for (int i = 0; i < n_levels; ++i)
      drift = std::max(drift, std::abs(curr.energies[i] - prev.energies[i]));
    if (drift < 1e-10 * E_C) {
      CpbSpectrum out;
      out.n_cut = next;
      out.omega_q = (curr.energies[1] - curr.energies[0]) / hbar;
      out.Q0_q = 2.0 * elementary_charge * curr.q01_abs;
      out.levels.resize(n_levels);
      for (int i = 0; i < n_levels; ++i) out.levels[i] = curr.energies[i] - curr.energies[0];
      out.anharmonicity =
          (curr.energies[2] - curr.energies[1]) - (curr.energies[1] - curr.energies[0]);
      return out;
    }
    prev = std::move(curr);
    cut = next;
  }
}

ChargeCompilation compile_charge(const ChargeCircuit& c) {
  ChargeCompilation out;
  out.caps = derive_capacitances(c);
  out.E_C = elementary_charge * elementary_charge / (2.0 * out.caps.Cbar_q);
  out.cpb = cpb_spectrum(out.E_C, c.E_J, c.n_g);

  const double omega_r = 1.0 / std::sqrt(c.L_r * out.caps.Cbar_r);
  out.Q0_r = std::sqrt(hbar * out.caps.Cbar_r * omega_r / 2.0);
  const double g = 2.0 * out.Q0_r * out.cpb.Q0_q / (hbar * out.caps.Cbar_g);
  const double D = 2.0 * out.cpb.Q0_q * out.cpb.Q0_q / (hbar * out.caps.Cbar_qq);
  const double delta = D - g * g / omega_r;

  ModelParams p;
  p.omega_r = omega_r;
  p.omega_q.assign(c.n_qubits, out.cpb.omega_q);
  p.g.assign(c.n_qubits, g);
  p.D = D;
  p.delta = delta;
  p.n_qubits = c.n_qubits;
  p.units = Units::SI;
  out.params = std::move(p);
  return out;
}

ModelParams charge_model_params(const ChargeCircuit& c) { return compile_charge(c).params; }

double zeta_transmon(const ChargeCircuit& c) {
  c.validate();
  const double N = c.n_qubits;
  return c.C_g * c.C_g /
         (c.C_r * (c.C_g + c.C_q) + c.C_g * (c.C_g + N * c.C_q));
}

double zeta_charge(const ChargeCircuit& c, double E_C) {
  if (c.E_J <= 0.0) throw InvalidInput("zeta in the charge limit requires E_J > 0");
  return 4.0 * zeta_transmon(c) * E_C / c.E_J;
}

void FluxCircuit::validate() const {
  if (C_r <= 0) throw InvalidInput("C_r must be positive");
  if (L_r <= 0 || L_g <= 0) throw InvalidInput("inductances must be positive");
  if (n_qubits < 1) throw InvalidInput("need at least one qubit");
}

FluxCompilation compile_flux(const FluxCircuit& c) {
  c.validate();
  FluxCompilation out;
  out.Lbar_r = c.L_r * c.L_g / (c.L_r + c.L_g);
  const double omega_r = 1.0 / std::sqrt(out.Lbar_r * c.C_r);
  const double phi_zp = std::sqrt(hbar / (2.0 * c.C_r * omega_r));
  const double g = 2.0 * c.Phi_q0 * phi_zp / (hbar * c.L_g);
  const double D = 2.0 * c.Phi_q0 * c.Phi_q0 / (hbar * c.L_g);
  const double delta = D - g * g / omega_r;

  ModelParams p;
  p.omega_r = omega_r;
  p.omega_q.assign(c.n_qubits, c.omega_q);
  p.g.assign(c.n_qubits, g);
  p.D = D;
  p.delta = delta;
  p.n_qubits = c.n_qubits;
  p.units = Units::SI;
  out.params = std::move(p);
  return out;
}

ModelParams flux_model_params(const FluxCircuit& c) { return compile_flux(c).params; }

}  // namespace edm

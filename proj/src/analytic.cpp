#include "edm/analytic.hpp"

#include <cmath>
#include <limits>

namespace edm {

HPResult hp_frequencies(const ModelParams& p) {
  if (!p.is_uniform()) throw InvalidInput("linearized theory requires uniform parameters");
  const double wr = p.omega_r;
  const double wq = p.omega_q0();
  const double g = p.g0();
  const double n = p.n_qubits;

  HPResult r;
  r.G = 0.5 * g * std::sqrt(n);
  r.D_N = 0.25 * n * p.D;
  r.Omega_q2 = wq * (wq + 4.0 * r.D_N);

  const double disc =
      std::sqrt(std::pow(wr * wr - r.Omega_q2, 2) + 16.0 * r.G * r.G * wr * wq);
  const double wp2 = 0.5 * (wr * wr + r.Omega_q2 + disc);
  const double wm2 = 0.5 * (wr * wr + r.Omega_q2 - disc);
  r.omega_plus = std::sqrt(wp2);
  r.omega_minus_sq = wm2;
  r.stable = wm2 >= 0.0;
  r.omega_minus = r.stable ? std::sqrt(wm2) : std::numeric_limits<double>::quiet_NaN();

  r.cos2theta = (disc > 0.0) ? (wr * wr - r.Omega_q2) / disc : 1.0;
  if (r.stable && r.omega_minus > 0.0) {
    const double wp = r.omega_plus;
    const double wm = r.omega_minus;
    r.A_plus = (wp * wm + wr * wr) * (wp + wm) / (wr * wp * wm);
    r.A_minus = (wp * wm - wr * wr) * (wp - wm) / (wr * wp * wm);
    r.n_photon = (r.cos2theta * r.A_minus + r.A_plus - 4.0) / 8.0;
  } else {
    r.A_plus = r.A_minus = r.n_photon = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

bool srt_condition_dm(const ModelParams& p) {
  if (!p.is_uniform()) throw InvalidInput("instability test requires uniform parameters");
  const double g = p.g0();
  return p.n_qubits * g * g >= p.omega_r * p.omega_q0();
}

double hp_photon_number(const ModelParams& p) {
  const HPResult r = hp_frequencies(p);
  if (!r.stable || !(r.omega_minus > 0.0))
    throw NumericError("linearized theory unstable: omega_-^2 = " +
                       std::to_string(r.omega_minus_sq));
  return r.n_photon;
}

double hp_photon_number_smallg(const ModelParams& p) {
  if (!p.is_uniform()) throw InvalidInput("linearized theory requires uniform parameters");
  const double wr = p.omega_r;
  const double wq = p.omega_q0();
  const double g = p.g0();
  const double n = p.n_qubits;
  const double shifted = wq + n * (p.D - g * g / wr);
  if (shifted <= 0.0)
    throw NumericError("small-g photon number diverges: softened qubit frequency <= 0");
  return n * g * g * wq / (4.0 * (wr + wq) * (wr + wq) * shifted);
}

namespace {
void check_spin_labels(double s, double m) {
  const double two_s = std::round(2.0 * s);
  const double two_m = std::round(2.0 * m);
  if (s < 0.0 || std::abs(2.0 * s - two_s) > 1e-9)
    throw InvalidInput("total spin must be half-integer");
  if (std::abs(2.0 * m - two_m) > 1e-9 || std::fmod(std::abs(two_s - two_m), 2.0) != 0.0)
    throw InvalidInput("projection must differ from s by an integer");
  if (std::abs(m) > s + 1e-9) throw InvalidInput("|m| must not exceed s");
}
}  // namespace

double h0_energy(double s, double m_x, int n, const ModelParams& p) {
  check_spin_labels(s, m_x);
  if (n < 0) throw InvalidInput("photon number must be >= 0");
  return p.delta * m_x * m_x + p.omega_r * n;
}

double sz_ladder_element(double s, double m_to, double m_from) {
  check_spin_labels(s, m_to);
  check_spin_labels(s, m_from);
  if (std::abs(std::abs(m_to - m_from) - 1.0) > 1e-9) return 0.0;
  return 0.5 * std::sqrt(s * (s + 1.0) - m_from * m_to);
}

double h1_matrix_element(double s, double m_to, double m_from, int n, const ModelParams& p) {
  if (n < 0) throw InvalidInput("photon number must be >= 0");
  const double ladder = sz_ladder_element(s, m_to, m_from);
  if (ladder == 0.0) return 0.0;
  const double gamma = p.gamma();
  const double dm = m_from - m_to;
  // gamma^n (m_to - m_from)^n / sqrt(n!) with the exponential displacement overlap
  const double log_mag = n * std::log(std::max(gamma, 1e-300)) - 0.5 * std::lgamma(n + 1.0);
  const double sign = (n % 2 == 0) ? 1.0 : (m_to - m_from > 0 ? 1.0 : -1.0);
  return p.omega_q0() * std::exp(-0.5 * gamma * gamma * dm * dm + log_mag) * sign * ladder;
}

EffectiveModel effective_hamiltonian(const ModelParams& p, double s) {
  check_spin_labels(s, s);
  if (!p.is_uniform()) throw InvalidInput("effective model requires uniform parameters");
  const double g = p.g0();
  if (g <= 0.0) throw InvalidInput("effective model requires g > 0");

  EffectiveModel m;
  m.s = s;
  m.gamma = p.gamma();
  m.c1 = p.omega_q0() * std::exp(-0.5 * m.gamma * m.gamma);
  m.c2 = p.omega_q0() * p.omega_q0() * p.omega_r / (2.0 * g * g);
  m.delta = p.delta;
  m.valid = validity_check(p, s) && m.gamma >= 1.0;
  m.warn_small_gamma = m.gamma < 2.0;

  const int dim = static_cast<int>(std::round(2.0 * s)) + 1;
  m.h_eff = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double mx = -s + i;
    m.h_eff(i, i) = (p.delta + m.c2) * mx * mx - m.c2 * s * (s + 1.0);
    if (i + 1 < dim) {
      const double elem = m.c1 * sz_ladder_element(s, mx + 1.0, mx);
      m.h_eff(i, i + 1) = m.h_eff(i + 1, i) = elem;
    }
  }
  return m;
}

StrongCouplingAsymptotics asymptotics(const ModelParams& p) {
  if (!p.is_uniform()) throw InvalidInput("asymptotics require uniform parameters");
  const double wr = p.omega_r;
  const double wq = p.omega_q0();
  const double g = p.g0();
  const double gamma = g / wr;
  const double n = p.n_qubits;

  StrongCouplingAsymptotics a;
  a.n_photon_even =
      n * (n + 2.0) * std::pow(g, 6) / (2.0 * std::pow(wr, 4) * wq * wq) * std::exp(-gamma * gamma);
  a.gap_even = wr * wq * wq / (2.0 * g * g);
  a.n_photon_odd = 0.25 * gamma * gamma;
  a.gap_odd = (n + 1.0) * wq * std::exp(-0.5 * gamma * gamma);
  a.sz_tail = -n * (n + 2.0) * wq * wr / (4.0 * g * g);
  return a;
}

bool validity_check(const ModelParams& p, double s) {
  const double g = p.g0();
  return std::sqrt(s * (s + 1.0)) * p.omega_q0() / 2.0 < g * g / p.omega_r;
}

}  // namespace edm

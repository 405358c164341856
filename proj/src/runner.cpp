#include "edm/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "edm/analytic.hpp"
#include "edm/circuit.hpp"
#include "edm/constants.hpp"
#include "edm/model.hpp"
#include "edm/observe.hpp"
#include "edm/solve.hpp"

namespace edm::runner {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// config access with field-path diagnostics

const json* find_path(const json& cfg, const std::string& path) {
  const json* node = &cfg;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

template <typename T>
T get_as(const json& node, const std::string& path) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + path + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& cfg, const std::string& path, T fallback) {
  const json* node = find_path(cfg, path);
  if (!node || node->is_null()) return fallback;
  return get_as<T>(*node, path);
}

template <typename T>
T require(const json& cfg, const std::string& path) {
  const json* node = find_path(cfg, path);
  if (!node || node->is_null()) throw ConfigError("config field '" + path + "' is required");
  return get_as<T>(*node, path);
}

// ---------------------------------------------------------------------------
// resolved settings

struct SweepSpec {
  std::string variable = "gamma";
  double from = 0.0;
  double to = 0.0;
  int points = 1;

  std::vector<double> grid() const {
    if (points < 1) throw ConfigError("sweep.points must be >= 1");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
      g[i] = points == 1 ? from : from + (to - from) * static_cast<double>(i) / (points - 1);
    return g;
  }
};

struct SolverSpec {
  int k = 2;
  double tol = 1e-10;
  std::string fock = "auto";  // "auto" or a fixed cutoff as text
  int fock_fixed = -1;
  double tol_energy = 1e-8;
  double degeneracy_tol = 1e-8;
  int dense_threshold = 4096;
  SolveOptions options() const {
    SolveOptions o;
    o.tol = tol;
    o.dense_threshold = dense_threshold;
    o.memory_budget = memory_budget;
    return o;
  }
  std::size_t memory_budget = std::size_t(8) << 30;
};

struct ModelSpec {
  std::string source = "explicit";
  int n_qubits = 2;
  double omega_q = 0.5;  // resonator units
  double delta = 0.0;
  std::string d_mode = "edm";  // or "dm"
  double gamma = 1.0;          // coupling for single-point commands
};

struct Resolved {
  std::string subcommand;
  ModelSpec model;
  SweepSpec sweep;
  bool has_sweep = false;
  SolverSpec solver;
  json raw;
};

std::size_t memory_budget_from_env() {
  if (const char* env = std::getenv("EDM_MEMORY_BUDGET_MB")) {
    char* end = nullptr;
    const double mb = std::strtod(env, &end);
    if (end != env && mb > 0) return static_cast<std::size_t>(mb * 1048576.0);
  }
  return std::size_t(8) << 30;
}

Resolved resolve(const json& cfg) {
  Resolved r;
  r.raw = cfg;
  r.subcommand = require<std::string>(cfg, "subcommand");
  const int schema = get_or<int>(cfg, "schema_version", kSchemaVersion);
  if (schema != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(schema));

  r.model.source = get_or<std::string>(cfg, "model.source", "explicit");
  r.model.n_qubits = get_or<int>(cfg, "model.N", 2);
  r.model.omega_q = get_or<double>(cfg, "model.omega_q", 0.5);
  r.model.delta = get_or<double>(cfg, "model.delta", 0.0);
  r.model.d_mode = get_or<std::string>(cfg, "model.d_mode", "edm");
  r.model.gamma = get_or<double>(cfg, "model.gamma", 1.0);
  if (r.model.d_mode != "edm" && r.model.d_mode != "dm")
    throw ConfigError("config field 'model.d_mode' must be \"edm\" or \"dm\"");
  if (r.model.n_qubits < 1) throw ConfigError("config field 'model.N' must be >= 1");

  if (find_path(cfg, "sweep")) {
    r.has_sweep = true;
    r.sweep.variable = get_or<std::string>(cfg, "sweep.variable", "gamma");
    r.sweep.from = require<double>(cfg, "sweep.from");
    r.sweep.to = require<double>(cfg, "sweep.to");
    r.sweep.points = require<int>(cfg, "sweep.points");
    if (r.sweep.points < 1) throw ConfigError("config field 'sweep.points' must be >= 1");
  }

  r.solver.k = get_or<int>(cfg, "solver.k", 2);
  r.solver.tol = get_or<double>(cfg, "solver.tol", 1e-10);
  r.solver.tol_energy = get_or<double>(cfg, "solver.tol_energy", 1e-8);
  r.solver.degeneracy_tol = get_or<double>(cfg, "solver.degeneracy_tol", 1e-8);
  r.solver.dense_threshold = get_or<int>(cfg, "solver.dense_threshold", 4096);
  r.solver.memory_budget = memory_budget_from_env();
  if (const json* f = find_path(cfg, "solver.fock"); f && !f->is_null()) {
    if (f->is_number_integer()) {
      r.solver.fock = "fixed";
      r.solver.fock_fixed = f->get<int>();
      if (r.solver.fock_fixed < 0) throw ConfigError("config field 'solver.fock' must be >= 0");
    } else if (f->is_string() && f->get<std::string>() == "auto") {
      r.solver.fock = "auto";
    } else {
      throw ConfigError("config field 'solver.fock' must be \"auto\" or an integer");
    }
  }
  if (r.solver.k < 1) throw ConfigError("config field 'solver.k' must be >= 1");
  return r;
}

ChargeCircuit charge_from_config(const json& cfg) {
  ChargeCircuit c;
  c.C_r = get_or<double>(cfg, "circuit.C_r_fF", 10.0) * constants::femtofarad;
  c.C_q = get_or<double>(cfg, "circuit.C_q_fF", 0.5) * constants::femtofarad;
  c.C_g = get_or<double>(cfg, "circuit.C_g_fF", 1.0) * constants::femtofarad;
  c.L_r = get_or<double>(cfg, "circuit.L_r_nH", 1.0) * constants::nanohenry;
  c.E_J = get_or<double>(cfg, "circuit.EJ_over_h_GHz", 2.0) * 1e9 * constants::planck_h;
  c.n_g = get_or<double>(cfg, "circuit.n_g", 0.5);
  c.n_qubits = get_or<int>(cfg, "circuit.N", 1);
  return c;
}

FluxCircuit flux_from_config(const json& cfg) {
  FluxCircuit f;
  f.C_r = get_or<double>(cfg, "flux.C_r_fF", 250.0) * constants::femtofarad;
  f.L_r = get_or<double>(cfg, "flux.L_r_nH", 1.0) * constants::nanohenry;
  f.L_g = get_or<double>(cfg, "flux.L_g_nH", 1.5) * constants::nanohenry;
  // flux matrix element in units of the reduced flux quantum hbar/2e
  const double phi0 = constants::hbar / (2.0 * constants::elementary_charge);
  f.Phi_q0 = get_or<double>(cfg, "flux.Phi_q0_over_Phi0", 1.0) * phi0;
  f.omega_q = get_or<double>(cfg, "flux.omega_q_GHz", 2.5) * 2.0 * constants::pi * 1e9;
  f.n_qubits = get_or<int>(cfg, "flux.N", 2);
  return f;
}

// Base model in resonator units; the sweep replaces the coupling.
ModelParams base_params(const Resolved& r) {
  if (r.model.source == "explicit") {
    return ModelParams::uniform(1.0, r.model.omega_q, 0.0, r.model.delta, r.model.n_qubits);
  }
  if (r.model.source == "charge-circuit") {
    const ModelParams p = charge_model_params(charge_from_config(r.raw));
    return p.to_resonator_units();
  }
  if (r.model.source == "flux-circuit") {
    const ModelParams p = flux_model_params(flux_from_config(r.raw));
    return p.to_resonator_units();
  }
  throw ConfigError("config field 'model.source' must be explicit|charge-circuit|flux-circuit");
}

ModelParams params_at(const Resolved& r, const ModelParams& base, double sweep_value) {
  double g = sweep_value;
  if (r.sweep.variable == "sqrtN_gamma")
    g = sweep_value / std::sqrt(static_cast<double>(base.n_qubits));
  else if (r.has_sweep && r.sweep.variable != "gamma")
    throw ConfigError("config field 'sweep.variable' must be gamma|sqrtN_gamma for model sweeps");
  if (r.model.d_mode == "dm")
    return ModelParams::dicke(base.omega_r, base.omega_q.front(), g * base.omega_r,
                              base.n_qubits);
  return base.with_coupling(g * base.omega_r);
}

// ---------------------------------------------------------------------------
// parallel map with deterministic ordering

void parallel_for(int n, int threads, const std::function<void(int)>& work) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          work(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// ground-state solves shared by several subcommands

struct PointResult {
  SpectrumResult spectrum;
  GroundStateReport report;
};

PointResult solve_uniform_point(const Resolved& r, const ModelParams& p) {
  const int n_qubits = p.n_qubits;
  const SolveOptions opts = r.solver.options();
  auto build = [&](int n_max) { return build_edm(HilbertSpace(n_qubits, n_max), p); };
  auto dim_of = [&](int n_max) {
    return static_cast<std::size_t>(1 << n_qubits) * (n_max + 1);
  };

  PointResult out;
  if (r.solver.fock == "auto") {
    const int start = fock_cutoff_estimate(p);
    out.spectrum = converge_ground(build, start, r.solver.k,
                                   r.solver.tol_energy * p.omega_r, opts, dim_of);
  } else {
    out.spectrum = lowest_eigenpairs(build(r.solver.fock_fixed), r.solver.k, opts);
    out.spectrum.n_max = r.solver.fock_fixed;
  }
  out.report = ground_report(out.spectrum, HilbertSpace(n_qubits, out.spectrum.n_max),
                             r.solver.degeneracy_tol * p.omega_r);
  return out;
}

std::vector<Cell> ground_row(double sweep_value, const GroundStateReport& rep) {
  return {sweep_value,
          rep.energy,
          rep.gap,
          rep.n_photon,
          rep.S_z,
          rep.S_x,
          rep.S_x2,
          rep.entropy_q,
          rep.entropy_1,
          rep.parity,
          static_cast<std::int64_t>(rep.n_max),
          rep.converged,
          rep.n_photon_avg,
          rep.S_z_avg,
          rep.S_x_avg,
          rep.S_x2_avg,
          rep.parity_avg,
          static_cast<std::int64_t>(rep.n_degenerate)};
}

const std::vector<std::string> kGroundColumns = {
    "sweep_value", "E0",           "gap",    "n_photon", "Sz",     "Sx",
    "Sx2",         "entropy_q",    "entropy_1", "parity", "n_max",  "converged",
    "n_photon_avg", "Sz_avg",      "Sx_avg", "Sx2_avg",  "parity_avg", "n_degenerate"};

// ---------------------------------------------------------------------------
// subcommands

struct CommandResult {
  Table table;
  std::vector<double> residuals;  // max residual per row (when meaningful)
};

CommandResult cmd_ground_sweep(const Resolved& r, std::ostream& log) {
  if (!r.has_sweep) throw ConfigError("ground-sweep requires a 'sweep' section");
  const ModelParams base = base_params(r);
  const std::vector<double> grid = r.sweep.grid();
  const int threads = get_or<int>(r.raw, "parallelism", 1);

  std::vector<PointResult> points(grid.size());
  parallel_for(static_cast<int>(grid.size()), threads, [&](int i) {
    points[static_cast<std::size_t>(i)] =
        solve_uniform_point(r, params_at(r, base, grid[static_cast<std::size_t>(i)]));
  });

  CommandResult out;
  out.table.columns = kGroundColumns;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.table.add_row(ground_row(grid[i], points[i].report));
    const auto& res = points[i].spectrum.residuals;
    out.residuals.push_back(res.empty() ? 0.0 : *std::max_element(res.begin(), res.end()));
  }
  log << "ground-sweep: " << grid.size() << " points, N=" << base.n_qubits << "\n";
  return out;
}

CommandResult cmd_spectrum(const Resolved& r, std::ostream& log) {
  if (!r.has_sweep) throw ConfigError("spectrum requires a 'sweep' section");
  const ModelParams base = base_params(r);
  const std::vector<double> grid = r.sweep.grid();
  const int k = std::max(2, r.solver.k);
  const int threads = get_or<int>(r.raw, "parallelism", 1);

  std::vector<SpectrumResult> points(grid.size());
  parallel_for(static_cast<int>(grid.size()), threads, [&](int i) {
    Resolved rr = r;
    rr.solver.k = k;
    points[static_cast<std::size_t>(i)] =
        solve_uniform_point(rr, params_at(r, base, grid[static_cast<std::size_t>(i)])).spectrum;
  });

  CommandResult out;
  out.table.columns = {"sweep_value", "E0"};
  for (int j = 1; j < k; ++j) out.table.columns.push_back("dE_" + std::to_string(j));
  out.table.columns.push_back("n_max");
  out.table.columns.push_back("converged");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<Cell> row{grid[i], points[i].eigenvalues[0]};
    for (int j = 1; j < k; ++j)
      row.emplace_back(points[i].eigenvalues[static_cast<std::size_t>(j)] -
                       points[i].eigenvalues[0]);
    row.emplace_back(static_cast<std::int64_t>(points[i].n_max));
    row.emplace_back(points[i].converged);
    out.table.add_row(std::move(row));
    const auto& res = points[i].residuals;
    out.residuals.push_back(res.empty() ? 0.0 : *std::max_element(res.begin(), res.end()));
  }
  log << "spectrum: " << grid.size() << " points, k=" << k << "\n";
  return out;
}

CommandResult cmd_hp(const Resolved& r, std::ostream& log) {
  if (!r.has_sweep) throw ConfigError("hp requires a 'sweep' section");
  const ModelParams base = base_params(r);
  const std::vector<double> grid = r.sweep.grid();

  CommandResult out;
  out.table.columns = {"sweep_value", "omega_plus", "omega_minus",
                       "n_photon_hp", "n_photon_smallg", "stable"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double v : grid) {
    const ModelParams p = params_at(r, base, v);
    const HPResult hp = hp_frequencies(p);
    double smallg = nan;
    try {
      smallg = hp_photon_number_smallg(p);
    } catch (const NumericError&) {
    }
    out.table.add_row({v, hp.omega_plus, hp.omega_minus,
                       hp.stable ? hp.n_photon : nan, smallg, hp.stable});
  }
  log << "hp: " << grid.size() << " points\n";
  return out;
}

CommandResult cmd_effective(const Resolved& r, std::ostream& log) {
  if (!r.has_sweep) throw ConfigError("effective requires a 'sweep' section");
  const ModelParams base = base_params(r);
  const std::vector<double> grid = r.sweep.grid();
  const double s = 0.5 * base.n_qubits;
  const int levels = base.n_qubits + 1;

  CommandResult out;
  out.table.columns = {"sweep_value", "valid", "warn_small_gamma", "c1", "c2"};
  for (int j = 0; j < levels; ++j) out.table.columns.push_back("E_eff_" + std::to_string(j));
  out.table.columns.insert(out.table.columns.end(),
                           {"gap_eff", "asym_n_photon_even", "asym_gap_even",
                            "asym_n_photon_odd", "asym_gap_odd", "asym_sz_tail"});
  for (double v : grid) {
    const ModelParams p = params_at(r, base, v);
    const EffectiveModel m = effective_hamiltonian(p, s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.h_eff, Eigen::EigenvaluesOnly);
    const StrongCouplingAsymptotics a = asymptotics(p);
    std::vector<Cell> row{v, m.valid, m.warn_small_gamma, m.c1, m.c2};
    for (int j = 0; j < levels; ++j) row.emplace_back(es.eigenvalues()[j]);
    row.emplace_back(es.eigenvalues()[1] - es.eigenvalues()[0]);
    row.emplace_back(a.n_photon_even);
    row.emplace_back(a.gap_even);
    row.emplace_back(a.n_photon_odd);
    row.emplace_back(a.gap_odd);
    row.emplace_back(a.sz_tail);
    out.table.add_row(std::move(row));
  }
  log << "effective: " << grid.size() << " points, s=" << s << "\n";
  return out;
}

CommandResult cmd_bo_potential(const Resolved& r, std::ostream& log) {
  const ModelParams base = base_params(r);
  const ModelParams p = base.with_coupling(r.model.gamma * base.omega_r);
  const int k = get_or<int>(r.raw, "bo.k", 2);
  const int points = get_or<int>(r.raw, "bo.points", 801);

  std::vector<double> grid;
  const json* amin = find_path(r.raw, "bo.alpha_min");
  const json* amax = find_path(r.raw, "bo.alpha_max");
  if (amin && amax) {
    const double lo = get_as<double>(*amin, "bo.alpha_min");
    const double hi = get_as<double>(*amax, "bo.alpha_max");
    for (int i = 0; i < points; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / (points - 1));
  } else {
    grid = default_alpha_grid(p, points);
  }

  const BOResult bo = semiclassical_potentials(p, grid, k);
  CommandResult out;
  out.table.columns = {"alpha"};
  for (int j = 0; j < k; ++j) out.table.columns.push_back("E_" + std::to_string(j));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<Cell> row{grid[i]};
    for (int j = 0; j < k; ++j) row.emplace_back(bo.curves(static_cast<Eigen::Index>(i), j));
    out.table.add_row(std::move(row));
  }
  log << "bo-potential: " << grid.size() << " amplitudes, k=" << k << "\n";
  return out;
}

CommandResult cmd_qfunc(const Resolved& r, std::ostream& log) {
  const ModelParams base = base_params(r);
  const ModelParams p = base.with_coupling(r.model.gamma * base.omega_r);
  const int n_theta = get_or<int>(r.raw, "qfunc.n_theta", 61);
  const int n_phi = get_or<int>(r.raw, "qfunc.n_phi", 121);

  const PointResult point = solve_uniform_point(r, p);
  const HilbertSpace space(p.n_qubits, point.spectrum.n_max);
  const Eigen::MatrixXcd rho_q =
      reduced_qubit_density(point.spectrum.eigenvectors.col(0), space);
  const QFunctionMap map = spin_q_function(rho_q, p.n_qubits, n_theta, n_phi);

  CommandResult out;
  out.table.columns = {"theta", "phi", "Q"};
  for (int i = 0; i < n_theta; ++i)
    for (int j = 0; j < n_phi; ++j)
      out.table.add_row({map.theta[static_cast<std::size_t>(i)],
                         map.phi[static_cast<std::size_t>(j)], map.values(i, j)});
  log << "qfunc: " << n_theta << "x" << n_phi << " grid at gamma=" << r.model.gamma << "\n";
  return out;
}

struct DisorderDraws {
  std::vector<double> omega_q_factor;
  std::vector<double> g_factor;
};

DisorderDraws draw_factors(std::uint64_t base_seed, int sample, int n, double w_omega_q,
                           double w_g) {
  std::mt19937_64 rng(base_seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(sample + 1)));
  auto u01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  DisorderDraws d;
  d.omega_q_factor.resize(n);
  d.g_factor.resize(n);
  for (int i = 0; i < n; ++i) d.omega_q_factor[i] = 1.0 + w_omega_q * (2.0 * u01() - 1.0);
  for (int i = 0; i < n; ++i) d.g_factor[i] = 1.0 + w_g * (2.0 * u01() - 1.0);
  return d;
}

CommandResult cmd_disorder(const Resolved& r, std::ostream& log) {
  if (!r.has_sweep) throw ConfigError("disorder requires a 'sweep' section");
  if (!find_path(r.raw, "disorder.seed"))
    throw ConfigError("config field 'disorder.seed' is required for reproducible disorder draws");
  const std::uint64_t seed = require<std::uint64_t>(r.raw, "disorder.seed");
  const int samples = get_or<int>(r.raw, "disorder.seeds", 10);
  const double w_g = get_or<double>(r.raw, "disorder.w_g", 0.3);
  const double w_wq = get_or<double>(r.raw, "disorder.w_omega_q", 0.0);
  const std::string d_term_name = get_or<std::string>(r.raw, "disorder.d_term", "coupled");
  if (d_term_name != "coupled" && d_term_name != "uniform")
    throw ConfigError("config field 'disorder.d_term' must be \"coupled\" or \"uniform\"");
  const DisorderDTerm d_term = d_term_name == "coupled" ? DisorderDTerm::PolaronConsistent
                                                        : DisorderDTerm::UniformD;
  if (samples < 1) throw ConfigError("config field 'disorder.seeds' must be >= 1");

  const ModelParams base = base_params(r);
  const std::vector<double> grid = r.sweep.grid();
  const int n = base.n_qubits;
  const int threads = get_or<int>(r.raw, "parallelism", 1);
  const SolveOptions opts = r.solver.options();

  struct Job {
    int sample;
    int point;
  };
  std::vector<Job> jobs;
  for (int s = 0; s < samples; ++s)
    for (std::size_t i = 0; i < grid.size(); ++i) jobs.push_back({s, static_cast<int>(i)});

  std::vector<GroundStateReport> reports(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), threads, [&](int idx) {
    const Job job = jobs[static_cast<std::size_t>(idx)];
    const DisorderDraws draws = draw_factors(seed, job.sample, n, w_wq, w_g);
    const ModelParams p = params_at(r, base, grid[static_cast<std::size_t>(job.point)]);
    std::vector<double> wq(static_cast<std::size_t>(n)), gs(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
      wq[static_cast<std::size_t>(q)] = p.omega_q0() * draws.omega_q_factor[static_cast<std::size_t>(q)];
      gs[static_cast<std::size_t>(q)] = p.g0() * draws.g_factor[static_cast<std::size_t>(q)];
    }
    const double uniform_D = p.D;
    auto build = [&](int n_max) {
      return build_disordered(HilbertSpace(n, n_max), wq, gs, p.omega_r, p.delta, d_term,
                              uniform_D);
    };
    auto dim_of = [&](int n_max) { return static_cast<std::size_t>(1 << n) * (n_max + 1); };

    ModelParams estimate = p;
    estimate.omega_q = wq;
    estimate.g = gs;
    SpectrumResult spec;
    if (r.solver.fock == "auto") {
      spec = converge_ground(build, fock_cutoff_estimate(estimate), r.solver.k,
                             r.solver.tol_energy * p.omega_r, opts, dim_of);
    } else {
      spec = lowest_eigenpairs(build(r.solver.fock_fixed), r.solver.k, opts);
      spec.n_max = r.solver.fock_fixed;
    }
    reports[static_cast<std::size_t>(idx)] = ground_report(
        spec, HilbertSpace(n, spec.n_max), r.solver.degeneracy_tol * p.omega_r);
  });

  CommandResult out;
  out.table.columns = {"seed",      "sweep_value", "E0",        "gap",    "n_photon",
                       "Sz",        "Sx",          "Sx2",       "entropy_q", "entropy_1",
                       "parity",    "n_max",       "converged"};
  auto emit = [&](std::int64_t sample, double v, const GroundStateReport& rep) {
    out.table.add_row({sample, v, rep.energy, rep.gap, rep.n_photon, rep.S_z, rep.S_x, rep.S_x2,
                       rep.entropy_q, rep.entropy_1, rep.parity,
                       static_cast<std::int64_t>(rep.n_max), rep.converged});
  };
  for (int s = 0; s < samples; ++s)
    for (std::size_t i = 0; i < grid.size(); ++i)
      emit(s, grid[i], reports[static_cast<std::size_t>(s) * grid.size() + i]);

  // mean curve rows carry seed = -1
  for (std::size_t i = 0; i < grid.size(); ++i) {
    GroundStateReport mean;
    bool all_converged = true;
    int n_max = 0;
    for (int s = 0; s < samples; ++s) {
      const auto& rep = reports[static_cast<std::size_t>(s) * grid.size() + i];
      mean.energy += rep.energy;
      mean.gap += rep.gap;
      mean.n_photon += rep.n_photon;
      mean.S_z += rep.S_z;
      mean.S_x += rep.S_x;
      mean.S_x2 += rep.S_x2;
      mean.entropy_q += rep.entropy_q;
      mean.entropy_1 += rep.entropy_1;
      mean.parity += rep.parity;
      all_converged = all_converged && rep.converged;
      n_max = std::max(n_max, rep.n_max);
    }
    const double inv = 1.0 / samples;
    mean.energy *= inv;
    mean.gap *= inv;
    mean.n_photon *= inv;
    mean.S_z *= inv;
    mean.S_x *= inv;
    mean.S_x2 *= inv;
    mean.entropy_q *= inv;
    mean.entropy_1 *= inv;
    mean.parity *= inv;
    mean.n_max = n_max;
    mean.converged = all_converged;
    emit(-1, grid[i], mean);
  }
  log << "disorder: " << samples << " samples x " << grid.size() << " points\n";
  return out;
}

CommandResult cmd_two_mode(const Resolved& r, std::ostream& log) {
  if (!r.has_sweep) throw ConfigError("two-mode requires a 'sweep' section");
  const ModelParams base = base_params(r);
  if (base.n_qubits != 2) throw ConfigError("two-mode runs require model.N = 2");
  const double omega_ex = require<double>(r.raw, "two_mode.omega_ex");
  const double r12 = get_or<double>(r.raw, "two_mode.g12_over_g", 0.0);
  const double r21 = get_or<double>(r.raw, "two_mode.g21_over_g", 1.0);
  const double r22 = get_or<double>(r.raw, "two_mode.g22_over_g", 0.0);
  const double d_over_g2 = get_or<double>(r.raw, "two_mode.D_over_g2", 1.0);
  const int fock_high0 = get_or<int>(r.raw, "two_mode.fock_high", 12);
  const std::vector<double> grid = r.sweep.grid();
  const int threads = get_or<int>(r.raw, "parallelism", 1);
  const SolveOptions opts = r.solver.options();

  struct Row {
    SpectrumResult spec;
    double n_low = 0, n_high = 0, sz = 0, sx2 = 0, parity = 0;
    int n_max_high = 0;
  };
  std::vector<Row> rows(grid.size());
  parallel_for(static_cast<int>(grid.size()), threads, [&](int i) {
    const ModelParams p = params_at(r, base, grid[static_cast<std::size_t>(i)]);
    const double g = p.g0();
    Eigen::Matrix2d gik;
    gik << g, r12 * g, r21 * g, r22 * g;
    const double D = d_over_g2 * g * g / p.omega_r;
    const std::vector<double> wq = p.omega_q;

    const int low0 = std::max(fock_cutoff_estimate(p), 8);
    auto cutoffs = [&](int n_low) {
      const int n_high = std::max(4, static_cast<int>(std::lround(
                                          static_cast<double>(fock_high0) * n_low / low0)));
      return std::pair<int, int>(n_low, n_high);
    };
    auto build = [&](int n_low) {
      const auto [nl, nh] = cutoffs(n_low);
      return build_two_mode(TwoModeSpace(2, nl, nh), p.omega_r, omega_ex * p.omega_r, wq, gik, D);
    };
    auto dim_of = [&](int n_low) {
      const auto [nl, nh] = cutoffs(n_low);
      return static_cast<std::size_t>(4) * (nl + 1) * (nh + 1);
    };

    SpectrumResult spec;
    if (r.solver.fock == "auto") {
      spec = converge_ground(build, low0, r.solver.k, r.solver.tol_energy * p.omega_r, opts,
                             dim_of);
    } else {
      spec = lowest_eigenpairs(build(r.solver.fock_fixed), r.solver.k, opts);
      spec.n_max = r.solver.fock_fixed;
    }
    const auto [nl, nh] = cutoffs(spec.n_max);
    const TwoModeSpace space(2, nl, nh);
    const Eigen::VectorXcd ground = spec.eigenvectors.col(0);
    Row& row = rows[static_cast<std::size_t>(i)];
    row.n_low = expectation(ground, two_mode_number(space, 0));
    row.n_high = expectation(ground, two_mode_number(space, 1));
    row.sz = expectation(ground, two_mode_collective_spin(space, Axis::Z));
    const SparseOperator sx = two_mode_collective_spin(space, Axis::X);
    row.sx2 = expectation(ground, sx * sx);
    row.parity = expectation(ground, two_mode_parity(space));
    row.n_max_high = nh;
    row.spec = std::move(spec);
  });

  CommandResult out;
  out.table.columns = {"sweep_value", "E0",    "gap",        "n_photon_low", "n_photon_high",
                       "Sz",          "Sx2",   "parity",     "n_max_low",    "n_max_high",
                       "converged"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Row& row = rows[i];
    out.table.add_row({grid[i], row.spec.eigenvalues[0],
                       row.spec.eigenvalues.size() > 1
                           ? row.spec.eigenvalues[1] - row.spec.eigenvalues[0]
                           : std::numeric_limits<double>::quiet_NaN(),
                       row.n_low, row.n_high, row.sz, row.sx2, row.parity,
                       static_cast<std::int64_t>(row.spec.n_max),
                       static_cast<std::int64_t>(row.n_max_high), row.spec.converged});
    const auto& res = row.spec.residuals;
    out.residuals.push_back(res.empty() ? 0.0 : *std::max_element(res.begin(), res.end()));
  }
  log << "two-mode: " << grid.size() << " points, omega_ex=" << omega_ex << "\n";
  return out;
}

std::vector<Cell> charge_point_row(double ratio, const ChargeCircuit& c) {
  const ChargeCompilation comp = compile_charge(c);
  const ModelParams& p = comp.params;
  const double fF = constants::femtofarad;
  return {ratio,
          c.C_g / fF,
          comp.caps.Cbar_sq / (fF * fF),
          comp.caps.Cbar_q / fF,
          comp.caps.Cbar_r / fF,
          comp.caps.Cbar_g / fF,
          comp.caps.Cbar_qq / fF,
          constants::ghz_from_energy(comp.E_C),
          constants::ghz_from_angular(p.omega_q.front()),
          constants::ghz_from_energy(comp.cpb.anharmonicity),
          comp.cpb.Q0_q / constants::elementary_charge,
          constants::ghz_from_angular(p.omega_r),
          constants::ghz_from_angular(p.g.front()),
          constants::ghz_from_angular(p.D),
          constants::ghz_from_angular(p.delta),
          p.D != 0.0 ? p.delta / p.D : 0.0,
          p.gamma(),
          p.zeta(),
          zeta_charge(c, comp.E_C),
          zeta_transmon(c),
          static_cast<std::int64_t>(comp.cpb.n_cut)};
}

CommandResult cmd_circuit_charge(const Resolved& r, std::ostream& log) {
  ChargeCircuit c = charge_from_config(r.raw);
  CommandResult out;
  out.table.columns = {"Cg_over_Cr",   "C_g_fF",      "Cbar_sq_fF2",    "Cbar_q_fF",
                       "Cbar_r_fF",    "Cbar_g_fF",   "Cbar_qq_fF",     "E_C_GHz",
                       "omega_q_GHz",  "anharmonicity_GHz", "Q0_q_over_e", "omega_r_GHz",
                       "g_GHz",        "D_GHz",       "delta_GHz",      "delta_over_D",
                       "gamma",        "zeta",        "zeta_charge_formula",
                       "zeta_transmon_formula", "n_cut"};
  if (r.has_sweep) {
    if (r.sweep.variable != "Cg_over_Cr")
      throw ConfigError("circuit-charge sweeps support sweep.variable = Cg_over_Cr");
    for (double ratio : r.sweep.grid()) {
      if (ratio <= 0.0) throw ConfigError("Cg_over_Cr values must be positive");
      ChargeCircuit ci = c;
      ci.C_g = ratio * c.C_r;
      out.table.add_row(charge_point_row(ratio, ci));
    }
  } else {
    out.table.add_row(charge_point_row(c.C_g / c.C_r, c));
  }
  log << "circuit-charge: " << out.table.rows.size() << " rows\n";
  return out;
}

CommandResult cmd_circuit_flux(const Resolved& r, std::ostream& log) {
  const FluxCircuit f = flux_from_config(r.raw);
  const FluxCompilation comp = compile_flux(f);
  const ModelParams& p = comp.params;
  CommandResult out;
  out.table.columns = {"Lbar_r_nH",  "omega_r_GHz", "omega_q_GHz", "g_GHz",
                       "D_GHz",      "delta_GHz",   "delta_over_D", "gamma", "zeta"};
  out.table.add_row({comp.Lbar_r / constants::nanohenry,
                     constants::ghz_from_angular(p.omega_r),
                     constants::ghz_from_angular(p.omega_q.front()),
                     constants::ghz_from_angular(p.g.front()),
                     constants::ghz_from_angular(p.D), constants::ghz_from_angular(p.delta),
                     p.D != 0.0 ? p.delta / p.D : 0.0, p.gamma(), p.zeta()});
  log << "circuit-flux: 1 row\n";
  return out;
}

CommandResult dispatch(const Resolved& r, std::ostream& log) {
  if (r.subcommand == "ground-sweep") return cmd_ground_sweep(r, log);
  if (r.subcommand == "spectrum") return cmd_spectrum(r, log);
  if (r.subcommand == "hp") return cmd_hp(r, log);
  if (r.subcommand == "effective") return cmd_effective(r, log);
  if (r.subcommand == "bo-potential") return cmd_bo_potential(r, log);
  if (r.subcommand == "qfunc") return cmd_qfunc(r, log);
  if (r.subcommand == "disorder") return cmd_disorder(r, log);
  if (r.subcommand == "two-mode") return cmd_two_mode(r, log);
  if (r.subcommand == "circuit-charge") return cmd_circuit_charge(r, log);
  if (r.subcommand == "circuit-flux") return cmd_circuit_flux(r, log);
  throw ConfigError("unknown subcommand '" + r.subcommand + "'");
}

json cell_to_json(const Cell& c) {
  switch (c.index()) {
    case 0: {
      const double v = std::get<double>(c);
      if (std::isnan(v) || std::isinf(v)) return nullptr;
      return v;
    }
    case 1: return std::get<std::int64_t>(c);
    case 2: return std::get<bool>(c);
    default: return std::get<std::string>(c);
  }
}

}  // namespace

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
}

RunOutput run(const nlohmann::json& config, std::ostream& log) {
  const Resolved r = resolve(config);
  const CommandResult result = dispatch(r, log);

  const std::string format = get_or<std::string>(config, "output.format", "csv");
  if (format != "csv" && format != "json")
    throw ConfigError("config field 'output.format' must be \"csv\" or \"json\"");
  const std::string default_path = "edm_" + r.subcommand + "." + format;
  const std::string path = get_or<std::string>(config, "output.path", default_path);

  RunOutput out;
  out.path = path;
  out.table = result.table;
  out.meta = {{"version", kVersion},
              {"schema_version", kSchemaVersion},
              {"subcommand", r.subcommand},
              {"config_hash", to_hex(fnv1a64(config.dump()))},
              {"columns", result.table.columns}};
  if (!result.residuals.empty()) out.meta["residuals"] = result.residuals;

  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  if (format == "csv") {
    file << result.table.to_csv();
  } else {
    json doc;
    doc["metadata"] = out.meta;
    json rows = json::array();
    for (const auto& row : result.table.rows) {
      json obj;
      for (std::size_t i = 0; i < row.size(); ++i)
        obj[result.table.columns[i]] = cell_to_json(row[i]);
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    file << doc.dump(2) << "\n";
  }
  file.close();
  log << "wrote " << path << " (" << result.table.rows.size() << " rows)\n";
  return out;
}

std::string validate_config(const nlohmann::json& config) {
  std::ostringstream report;
  std::vector<std::string> problems;
  report << "validate: dry run\n";
  try {
    const Resolved r = resolve(config);
    report << "subcommand: " << r.subcommand << "\n";

    if (r.subcommand == "circuit-charge" || r.model.source == "charge-circuit") {
      const ChargeCompilation comp = compile_charge(charge_from_config(config));
      const ModelParams q = comp.params.to_resonator_units();
      report << "charge circuit: omega_r=" << constants::ghz_from_angular(comp.params.omega_r)
             << " GHz, omega_q/omega_r=" << q.omega_q.front() << ", gamma=" << q.gamma()
             << ", zeta=" << q.zeta() << ", delta/omega_r=" << q.delta << "\n";
    }
    if (r.subcommand == "circuit-flux" || r.model.source == "flux-circuit") {
      const FluxCompilation comp = compile_flux(flux_from_config(config));
      const ModelParams q = comp.params.to_resonator_units();
      report << "flux circuit: omega_r=" << constants::ghz_from_angular(comp.params.omega_r)
             << " GHz, gamma=" << q.gamma() << ", delta/omega_r=" << q.delta
             << (q.delta > 0 ? " (delta > 0)" : "") << "\n";
    }

    const bool model_command = r.subcommand != "circuit-charge" && r.subcommand != "circuit-flux";
    if (model_command) {
      const ModelParams base = base_params(r);
      report << "model: N=" << base.n_qubits << ", omega_q/omega_r=" << base.omega_q.front()
             << ", delta/omega_r=" << base.delta << ", d_mode=" << r.model.d_mode << "\n";
      double gamma_max = r.model.gamma;
      if (r.has_sweep) {
        report << "sweep: " << r.sweep.variable << " in [" << r.sweep.from << ", " << r.sweep.to
               << "], " << r.sweep.points << " points\n";
        gamma_max = std::max(std::abs(r.sweep.from), std::abs(r.sweep.to));
        if (r.sweep.variable == "sqrtN_gamma") gamma_max /= std::sqrt(double(base.n_qubits));
      }
      const ModelParams worst = base.with_coupling(gamma_max * base.omega_r);
      const int n_max = r.solver.fock == "auto" ? fock_cutoff_estimate(worst)
                                                : r.solver.fock_fixed;
      const std::size_t dim = static_cast<std::size_t>(1 << base.n_qubits) * (n_max + 1);
      const std::size_t budget = memory_budget_from_env();
      const std::size_t bytes =
          dim <= static_cast<std::size_t>(r.solver.dense_threshold)
              ? dim * dim * sizeof(Complex)
              : dim * static_cast<std::size_t>(std::max(3 * r.solver.k + 24, 48) + r.solver.k + 4) *
                    sizeof(Complex);
      report << "estimate: n_max=" << n_max << ", dim=" << dim << ", ~" << (bytes >> 20)
             << " MiB (budget " << (budget >> 20) << " MiB)\n";
      if (bytes > budget) problems.push_back("estimated memory exceeds the configured budget");

      if (r.subcommand == "effective") {
        const bool valid = validity_check(worst, 0.5 * base.n_qubits);
        report << "effective-model validity at gamma=" << gamma_max << ": "
               << (valid ? "satisfied" : "violated") << "\n";
        if (!valid) problems.push_back("perturbative validity bound violated at the sweep end");
      }
      if (r.subcommand == "disorder" && !find_path(config, "disorder.seed"))
        problems.push_back("disorder requested without disorder.seed");
      if (r.subcommand == "two-mode" && !find_path(config, "two_mode.omega_ex"))
        problems.push_back("two-mode requested without two_mode.omega_ex");
    }
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }

  if (problems.empty()) {
    report << "no problems found\n";
  } else {
    report << "problems:\n";
    for (const auto& p : problems) report << "  - " << p << "\n";
  }
  return report.str();
}

int run_cli(const nlohmann::json& config, std::ostream& log, std::ostream& err) {
  try {
    run(config, log);
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const CutoffError& e) {
    err << "cutoff error: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kResourceBudget;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace edm::runner

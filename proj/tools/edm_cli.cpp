// Command-line driver: every subcommand reads an optional JSON config and
// applies flag overrides on top, so figure recipes can live in version
// control while quick experiments stay on the command line.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edm/errors.hpp"
#include "edm/runner.hpp"

namespace {

using nlohmann::json;

// "model.N=4" -> config["model"]["N"] = 4 (parsed as JSON when possible)
void apply_set(json& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw edm::ConfigError("--set expects key.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &cfg;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw edm::ConfigError("--set has an empty key segment in '" + path + "'");
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::vector<std::string> sets;
  int parallelism = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "JSON config file");
  cmd->add_option("-o,--out", flags.out_path, "output file path");
  cmd->add_option("--format", flags.format, "output format: csv or json");
  cmd->add_option("--set", flags.sets, "override any config field, e.g. --set model.N=4");
  cmd->add_option("-j,--parallel", flags.parallelism, "worker threads for sweep points");
}

json build_config(const std::string& subcommand, const CommonFlags& flags,
                  const std::vector<std::pair<std::string, json>>& overrides) {
  json cfg = json::object();
  if (!flags.config_path.empty()) cfg = edm::runner::load_config_file(flags.config_path);
  cfg["subcommand"] = subcommand;
  for (const auto& [path, value] : overrides) {
    json* node = &cfg;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }
  for (const auto& s : flags.sets) apply_set(cfg, s);
  if (!flags.out_path.empty()) cfg["output"]["path"] = flags.out_path;
  if (!flags.format.empty()) cfg["output"]["format"] = flags.format;
  if (flags.parallelism > 0) cfg["parallelism"] = flags.parallelism;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extended Dicke model toolkit: circuit compilation, exact diagonalization, "
               "analytic cross-checks"};
  app.require_subcommand(1);

  struct SubState {
    CommonFlags flags;
    // optional value holders; only applied when the flag was given
    double omega_q = 0, delta = 0, gamma = 0, from = 0, to = 0;
    int n_qubits = 0, points = 0, k = 0, seeds = 0;
    long long seed = 0;
    double w_g = 0, w_omega_q = 0;
    std::string sweep_var, fock;
  };

  std::vector<std::string> model_cmds = {"ground-sweep", "spectrum", "hp",       "effective",
                                         "bo-potential", "qfunc",    "disorder", "two-mode"};
  std::vector<std::string> all_cmds = model_cmds;
  all_cmds.insert(all_cmds.end(), {"circuit-charge", "circuit-flux"});

  std::map<std::string, SubState> state;
  std::map<std::string, CLI::App*> cmds;
  for (const auto& name : all_cmds) {
    CLI::App* cmd = app.add_subcommand(name, "");
    SubState& st = state[name];
    add_common(cmd, st.flags);
    if (std::find(model_cmds.begin(), model_cmds.end(), name) != model_cmds.end()) {
      cmd->add_option("-N,--qubits", st.n_qubits, "qubit count");
      cmd->add_option("--omega-q", st.omega_q, "qubit splitting in units of omega_r");
      cmd->add_option("--delta", st.delta, "qubit-qubit offset delta in units of omega_r");
      cmd->add_option("--gamma", st.gamma, "coupling g/omega_r for single-point commands");
      cmd->add_option("--sweep-var", st.sweep_var, "sweep variable: gamma or sqrtN_gamma");
      cmd->add_option("--from", st.from, "sweep start");
      cmd->add_option("--to", st.to, "sweep end");
      cmd->add_option("--points", st.points, "sweep point count");
      cmd->add_option("-k,--eigenpairs", st.k, "number of eigenpairs");
      cmd->add_option("--fock", st.fock, "Fock policy: auto or a fixed cutoff");
    }
    if (name == "disorder") {
      cmd->add_option("--seeds", st.seeds, "number of disorder samples");
      cmd->add_option("--seed", st.seed, "base RNG seed (required)");
      cmd->add_option("--w-g", st.w_g, "relative width of the coupling disorder");
      cmd->add_option("--w-omega-q", st.w_omega_q, "relative width of the splitting disorder");
    }
    cmds[name] = cmd;
  }

  CLI::App* validate_cmd = app.add_subcommand("validate", "dry-run a config file");
  std::string validate_path;
  std::vector<std::string> validate_sets;
  validate_cmd->add_option("-c,--config", validate_path, "JSON config file")->required();
  validate_cmd->add_option("--set", validate_sets, "override any config field");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) {
      nlohmann::json cfg = edm::runner::load_config_file(validate_path);
      for (const auto& s : validate_sets) apply_set(cfg, s);
      std::cout << edm::runner::validate_config(cfg);
      return edm::runner::kOk;
    }

    for (const auto& name : all_cmds) {
      CLI::App* cmd = cmds[name];
      if (!cmd->parsed()) continue;
      const SubState& st = state.at(name);
      std::vector<std::pair<std::string, json>> overrides;
      auto given = [&](const std::string& flag) { return cmd->count(flag) > 0; };
      if (given("--qubits")) overrides.emplace_back("model.N", st.n_qubits);
      if (given("--omega-q")) overrides.emplace_back("model.omega_q", st.omega_q);
      if (given("--delta")) overrides.emplace_back("model.delta", st.delta);
      if (given("--gamma")) overrides.emplace_back("model.gamma", st.gamma);
      if (given("--sweep-var")) overrides.emplace_back("sweep.variable", st.sweep_var);
      if (given("--from")) overrides.emplace_back("sweep.from", st.from);
      if (given("--to")) overrides.emplace_back("sweep.to", st.to);
      if (given("--points")) overrides.emplace_back("sweep.points", st.points);
      if (given("--eigenpairs")) overrides.emplace_back("solver.k", st.k);
      if (given("--fock")) {
        try {
          overrides.emplace_back("solver.fock", std::stoi(st.fock));
        } catch (...) {
          overrides.emplace_back("solver.fock", st.fock);
        }
      }
      if (name == "disorder") {
        if (given("--seeds")) overrides.emplace_back("disorder.seeds", st.seeds);
        if (given("--seed")) overrides.emplace_back("disorder.seed", st.seed);
        if (given("--w-g")) overrides.emplace_back("disorder.w_g", st.w_g);
        if (given("--w-omega-q")) overrides.emplace_back("disorder.w_omega_q", st.w_omega_q);
      }
      const nlohmann::json cfg = build_config(name, st.flags, overrides);
      return edm::runner::run_cli(cfg, std::cout, std::cerr);
    }
    std::cerr << "no subcommand selected\n";
    return edm::runner::kFailure;
  } catch (const edm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return edm::runner::kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return edm::runner::kFailure;
  }
}

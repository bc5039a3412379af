// dos-lab: sharing-vs-defection sweeps for distributed cross-entropy
// optimization with utility sharing.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime or numeric error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "doslab/config.hpp"
#include "doslab/experiment.hpp"
#include "doslab/output.hpp"
#include "doslab/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

using nlohmann::json;

std::size_t worker_count() {
  const char* env = std::getenv("DOS_LAB_THREADS");
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (env == nullptr || *env == '\0') return hw;
  try {
    const long v = std::stol(env);
    if (v < 1) throw std::invalid_argument("non-positive");
    return std::min<std::size_t>(static_cast<std::size_t>(v), hw);
  } catch (const std::exception&) {
    throw doslab::ConfigError("DOS_LAB_THREADS must be a positive integer, got '" +
                              std::string(env) + "'");
  }
}

struct RunFlags {
  std::string config;
  std::optional<std::string> domain;
  std::optional<std::size_t> agents;
  std::vector<std::size_t> sharers;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> iters;
  std::optional<int> samples;
  std::optional<double> elite_frac;
  std::optional<double> lr;
  std::optional<double> sigma_min;
  std::optional<double> mu0;
  std::optional<double> sigma0;
  std::optional<double> amin;
  std::optional<double> amax;

  json to_layer() const {
    json layer = json::object();
    if (domain) layer["domain_kind"] = *domain;
    if (agents) layer["n"] = *agents;
    if (!sharers.empty()) layer["sharer_counts"] = sharers;
    if (runs) layer["runs"] = *runs;
    if (seed) layer["master_seed"] = *seed;
    if (out) layer["output_dir"] = *out;
    json ce = json::object();
    if (iters) ce["n_iter"] = *iters;
    if (samples) ce["n_sample"] = *samples;
    if (elite_frac) ce["psi"] = *elite_frac;
    if (lr) ce["alpha"] = *lr;
    if (sigma_min) ce["sigma_min"] = *sigma_min;
    if (mu0) ce["mu0"] = *mu0;
    if (sigma0) ce["sigma0"] = *sigma0;
    if (amin) ce["a_min"] = *amin;
    if (amax) ce["a_max"] = *amax;
    if (!ce.empty()) layer["ce"] = ce;
    return layer;
  }
};

int run_command(const RunFlags& flags) {
  doslab::ExperimentSpec spec;
  std::size_t threads = 1;
  try {
    const json file = flags.config.empty() ? json::object()
                                            : doslab::read_config_file(flags.config);
    spec = doslab::parse_config(file, flags.to_layer());
    threads = worker_count();
  } catch (const doslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    doslab::prepare_output_dir(spec.output_dir);
    doslab::SweepOptions options;
    options.threads = threads;
    const doslab::SweepOutput sweep =
        doslab::run_sweep(spec.domain_kind, spec.n, spec.sharer_counts, spec.runs, spec.ce,
                          spec.master_seed, options);
    doslab::emit_outputs(sweep, spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  std::cout << "wrote " << spec.output_dir << "/{curves.csv,schelling.csv,meta.json}\n";
  return 0;
}

int validate_command(const std::string& path) {
  try {
    const doslab::ExperimentSpec spec = doslab::parse_config(doslab::read_config_file(path));
    std::cout << doslab::to_json(spec).dump(2) << '\n';
  } catch (const doslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed cross-entropy optimization with utility sharing"};
  app.set_version_flag("--version", doslab::kToolVersion);
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run = app.add_subcommand("run", "Run a sharer-count sweep and write CSV outputs");
  run->add_option("--config", flags.config, "JSON config file (flags override it)");
  run->add_option("--domain", flags.domain, "simple or logistic");
  run->add_option("--agents", flags.agents, "Number of agents");
  run->add_option("--sharers", flags.sharers, "Sharer counts, comma separated")->delimiter(',');
  run->add_option("--runs", flags.runs, "Seeded runs per sharer count");
  run->add_option("--seed", flags.seed, "Master seed");
  run->add_option("--out", flags.out, "Output directory");
  run->add_option("--iters", flags.iters, "CE iterations");
  run->add_option("--samples", flags.samples, "Samples per agent and iteration");
  run->add_option("--elite-frac", flags.elite_frac, "Elite fraction psi");
  run->add_option("--lr", flags.lr, "Learning rate alpha");
  run->add_option("--sigma-min", flags.sigma_min, "Lower bound on policy deviations");
  run->add_option("--mu0", flags.mu0, "Prior mean");
  run->add_option("--sigma0", flags.sigma0, "Prior standard deviation");
  run->add_option("--amin", flags.amin, "Lower action bound");
  run->add_option("--amax", flags.amax, "Upper action bound");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Resolve and print a config file");
  validate->add_option("config", validate_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) return run_command(flags);
  return validate_command(validate_path);
}

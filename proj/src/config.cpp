#include "doslab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "doslab/experiment.hpp"
#include "doslab/version.hpp"

namespace doslab {
namespace {

using nlohmann::json;

const std::set<std::string> kTopKeys = {"domain_kind", "n",          "sharer_counts",
                                        "runs",        "master_seed", "output_dir",
                                        "ce",          "tool_version"};
const std::set<std::string> kCeKeys = {"n_iter", "n_sample", "mu0",   "sigma0", "sigma_min",
                                       "psi",    "alpha",    "a_min", "a_max"};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                std::vector<std::string>& unknown) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) unknown.push_back(where + key);
  }
}

void check_layer(const json& layer, const char* name) {
  if (!layer.is_object()) throw ConfigError(std::string(name) + " must be a JSON object");
  std::vector<std::string> unknown;
  check_keys(layer, kTopKeys, "", unknown);
  if (layer.contains("ce")) {
    if (!layer["ce"].is_object()) throw ConfigError("field 'ce' must be an object");
    check_keys(layer["ce"], kCeKeys, "ce.", unknown);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
}

// Recursive merge where `over` wins.
void merge_into(json& base, const json& over) {
  for (const auto& [key, value] : over.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object()) {
      merge_into(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + path + "' has the wrong type");
  }
}

std::size_t get_count(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
    throw ConfigError("field '" + path + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("field '" + path + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("field '" + path + "' must be finite");
  return x;
}

void range_check(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError("field '" + field + "' out of range: " + rule);
}

}  // namespace

std::vector<std::size_t> default_sharer_grid(std::size_t n) {
  std::vector<std::size_t> grid;
  const std::size_t steps = std::min<std::size_t>(n, 10);
  for (std::size_t i = 0; i <= steps; ++i) {
    grid.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(i) * static_cast<double>(n) / static_cast<double>(steps))));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ExperimentSpec parse_config(const json& file_layer, const json& flag_layer) {
  const json file = file_layer.is_null() ? json::object() : file_layer;
  const json flags = flag_layer.is_null() ? json::object() : flag_layer;
  check_layer(file, "config file");
  check_layer(flags, "flags");

  json merged = json::object();
  merge_into(merged, file);
  merge_into(merged, flags);

  ExperimentSpec spec;
  if (!merged.contains("domain_kind")) throw ConfigError("missing required field 'domain_kind'");
  if (!merged.contains("n")) throw ConfigError("missing required field 'n'");
  try {
    spec.domain_kind = parse_domain_kind(get_field<std::string>(merged, "domain_kind", "domain_kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'domain_kind': ") + e.what());
  }
  spec.n = get_count(merged, "n", "n");
  range_check(spec.n >= 2, "n", "need at least 2 agents");

  if (merged.contains("runs")) spec.runs = get_count(merged, "runs", "runs");
  range_check(spec.runs >= 1, "runs", "need at least 1 run");
  if (merged.contains("master_seed")) {
    const json& v = merged["master_seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError("field 'master_seed' must be a non-negative integer");
    }
    spec.master_seed = v.get<std::uint64_t>();
  }
  if (merged.contains("output_dir")) {
    spec.output_dir = get_field<std::string>(merged, "output_dir", "output_dir");
  }
  if (merged.contains("tool_version") && !merged["tool_version"].is_string()) {
    throw ConfigError("field 'tool_version' must be a string");
  }

  if (merged.contains("sharer_counts")) {
    const json& v = merged["sharer_counts"];
    if (!v.is_array()) throw ConfigError("field 'sharer_counts' must be an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer() || v[i].get<long long>() < 0) {
        throw ConfigError("field 'sharer_counts' must hold non-negative integers");
      }
      spec.sharer_counts.push_back(v[i].get<std::size_t>());
    }
  } else {
    spec.sharer_counts = default_sharer_grid(spec.n);
  }
  try {
    spec.sharer_counts = normalize_grid(spec.sharer_counts, spec.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'sharer_counts' out of range: ") + e.what());
  }

  CeConfig& ce = spec.ce;
  if (merged.contains("ce")) {
    const json& c = merged["ce"];
    auto count = [&](const char* key, int& dst) {
      if (!c.contains(key)) return;
      const std::size_t v = get_count(c, key, std::string("ce.") + key);
      range_check(v >= 1 && v <= 1'000'000, std::string("ce.") + key, "must be in [1, 1000000]");
      dst = static_cast<int>(v);
    };
    auto real = [&](const char* key, double& dst) {
      if (c.contains(key)) dst = get_real(c, key, std::string("ce.") + key);
    };
    count("n_iter", ce.n_iter);
    count("n_sample", ce.n_sample);
    real("mu0", ce.mu0);
    real("sigma0", ce.sigma0);
    real("sigma_min", ce.sigma_min);
    real("psi", ce.psi);
    real("alpha", ce.alpha);
    real("a_min", ce.a_min);
    real("a_max", ce.a_max);
  }
  range_check(ce.psi > 0.0 && ce.psi <= 1.0, "ce.psi", "must lie in (0, 1]");
  range_check(ce.alpha > 0.0 && ce.alpha <= 1.0, "ce.alpha", "must lie in (0, 1]");
  range_check(ce.sigma0 > 0.0, "ce.sigma0", "must be > 0");
  range_check(ce.sigma_min > 0.0, "ce.sigma_min", "must be > 0");
  range_check(ce.a_min < ce.a_max, "ce.a_min", "must be < ce.a_max");
  if (spec.domain_kind == DomainKind::kSimple) {
    range_check(ce.a_min > 0.0, "ce.a_min", "must be > 0 in the simple market");
  }
  return spec;
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

json to_json(const ExperimentSpec& spec) {
  const CeConfig& ce = spec.ce;
  return json{
      {"tool_version", kToolVersion},
      {"domain_kind", to_string(spec.domain_kind)},
      {"n", spec.n},
      {"sharer_counts", spec.sharer_counts},
      {"runs", spec.runs},
      {"master_seed", spec.master_seed},
      {"output_dir", spec.output_dir},
      {"ce",
       {{"n_iter", ce.n_iter},
        {"n_sample", ce.n_sample},
        {"mu0", ce.mu0},
        {"sigma0", ce.sigma0},
        {"sigma_min", ce.sigma_min},
        {"psi", ce.psi},
        {"alpha", ce.alpha},
        {"a_min", ce.a_min},
        {"a_max", ce.a_max}}},
  };
}

}  // namespace doslab

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doslab/ce_engine.hpp"
#include "doslab/domains.hpp"

namespace doslab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fully resolved experiment. Config files and meta.json use the same field
// names:
//
//   {"domain_kind": "simple", "n": 10, "sharer_counts": [0, 5, 10],
//    "runs": 10, "master_seed": 1, "output_dir": "out",
//    "ce": {"n_iter": 100, "n_sample": 100, "mu0": 0, "sigma0": 1,
//           "sigma_min": 0.2, "psi": 0.25, "alpha": 0.5,
//           "a_min": 0.1, "a_max": 4}}
//
// meta.json additionally carries "tool_version", which is accepted and
// otherwise ignored on input.
struct ExperimentSpec {
  DomainKind domain_kind = DomainKind::kSimple;
  std::size_t n = 0;
  std::vector<std::size_t> sharer_counts;
  std::size_t runs = 10;
  std::uint64_t master_seed = 0;
  std::string output_dir = "dos-lab-out";
  CeConfig ce;

  bool operator==(const ExperimentSpec&) const = default;
};

// About eleven evenly spaced sharer counts from 0 to n inclusive.
std::vector<std::size_t> default_sharer_grid(std::size_t n);

// Merges layers with precedence flags > file > defaults and validates the
// result. Both layers are JSON objects in the config schema; either may be
// empty. Throws ConfigError for unknown keys (all of them listed), wrong
// types, missing domain_kind/n, and out-of-range values.
ExperimentSpec parse_config(const nlohmann::json& file_layer,
                            const nlohmann::json& flag_layer = nlohmann::json::object());

nlohmann::json read_config_file(const std::filesystem::path& path);

// Config-schema JSON for a resolved spec, including tool_version.
nlohmann::json to_json(const ExperimentSpec& spec);

}  // namespace doslab

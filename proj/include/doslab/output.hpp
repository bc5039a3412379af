#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "doslab/config.hpp"
#include "doslab/experiment.hpp"

namespace doslab {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCurvesHeader =
    "domain,n,run,k_sharers,iteration,global_utility,mean_share";
inline constexpr const char* kSchellingHeader =
    "domain,n,k_sharers,role,mean_utility,ci_lo,ci_hi";

// %.17g, locale independent.
std::string format_real(double x);

// One row per (run, k, iteration), in that order.
void write_curves_csv(std::ostream& out, const SweepResult& result, const TraceTable& traces);

// One row per schelling_points() entry.
void write_schelling_csv(std::ostream& out, const SweepResult& result);

// Creates the directory if needed and checks that files can be written to it.
void prepare_output_dir(const std::filesystem::path& dir);

// Writes curves.csv, schelling.csv and meta.json into spec.output_dir.
void emit_outputs(const SweepOutput& sweep, const ExperimentSpec& spec);

}  // namespace doslab

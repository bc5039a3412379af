#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "doslab/ce_engine.hpp"
#include "doslab/domains.hpp"

namespace doslab {

struct Interval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

// mean +- 1.96 * s / sqrt(R) with s the sample standard deviation. Fewer than
// two samples give the degenerate interval (mean, mean, mean).
Interval confidence_interval(std::span<const double> samples);

// Roles for a population with the first k agents sharing.
std::vector<AgentRole> canonical_roles(std::size_t n, std::size_t sharers);

struct RoleOutcome {
  // Per-run role means of final-iteration per-agent mean utility. Empty when
  // the role has no members at this grid point.
  std::vector<double> sharer_runs;
  std::vector<double> defector_runs;
  std::optional<Interval> sharer;
  std::optional<Interval> defector;
};

struct SweepResult {
  DomainKind domain = DomainKind::kSimple;
  std::size_t n = 0;
  std::size_t runs = 0;
  std::vector<std::size_t> grid;  // sharer counts, ascending
  // [grid index][iteration], statistics across runs.
  std::vector<std::vector<Interval>> global_utility;
  std::vector<std::vector<Interval>> mean_share;
  std::vector<RoleOutcome> final_roles;  // [grid index]

  std::size_t grid_index(std::size_t sharers) const;
};

// traces[run][grid index]
using TraceTable = std::vector<std::vector<RunTrace>>;

struct SweepOutput {
  SweepResult result;
  TraceTable traces;
  std::vector<DomainParams> params;  // one per run, shared across the grid
};

// Called after every iteration of every (run, grid point) cell. With more
// than one worker it is invoked concurrently.
using CellObserver = std::function<void(std::size_t run, std::size_t sharers,
                                        std::size_t iteration, const EvaluatedBatch& batch,
                                        std::span<const Policy> policies)>;

struct SweepOptions {
  std::size_t threads = 1;  // 0 = hardware concurrency
  CellObserver observer;
};

// Sorted copy of sharer_counts; throws std::invalid_argument for k > n or a
// repeated k.
std::vector<std::size_t> normalize_grid(std::span<const std::size_t> sharer_counts,
                                        std::size_t n);

// Per run r, samples domain parameters once from the run's domain stream and
// runs CE-DOS for every grid point on them. Agent streams depend only on
// (master_seed, run, agent), so every grid point of a run sees the same
// random draws.
SweepOutput run_sweep(DomainKind domain, std::size_t n,
                      std::span<const std::size_t> sharer_counts, std::size_t runs,
                      const CeConfig& cfg, std::uint64_t master_seed,
                      const SweepOptions& options = {});

// Cross-run statistics from a complete trace table.
SweepResult aggregate_sweep(DomainKind domain, std::size_t n, std::vector<std::size_t> grid,
                            const TraceTable& traces);

struct SchellingRow {
  std::size_t sharers = 0;
  AgentRole role = AgentRole::kSharer;
  Interval utility;

  bool operator==(const SchellingRow&) const = default;
};

// One sharer row per k >= 1 and one defector row per k <= n - 1, ordered by
// (k, role name).
std::vector<SchellingRow> schelling_points(const SweepResult& result);

}  // namespace doslab

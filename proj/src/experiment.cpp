#include "doslab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace doslab {

Interval confidence_interval(std::span<const double> samples) {
  if (samples.empty()) return {};
  const auto count = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / count;
  if (samples.size() < 2) return {mean, mean, mean};
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (count - 1.0));
  const double half = 1.96 * sd / std::sqrt(count);
  return {mean, mean - half, mean + half};
}

std::vector<AgentRole> canonical_roles(std::size_t n, std::size_t sharers) {
  std::vector<AgentRole> roles(n, AgentRole::kDefector);
  std::fill_n(roles.begin(), std::min(sharers, n), AgentRole::kSharer);
  return roles;
}

std::size_t SweepResult::grid_index(std::size_t sharers) const {
  const auto it = std::find(grid.begin(), grid.end(), sharers);
  if (it == grid.end()) {
    throw std::out_of_range("sharer count " + std::to_string(sharers) + " not in sweep grid");
  }
  return static_cast<std::size_t>(it - grid.begin());
}

std::vector<std::size_t> normalize_grid(std::span<const std::size_t> sharer_counts,
                                        std::size_t n) {
  if (sharer_counts.empty()) throw std::invalid_argument("sharer_counts must not be empty");
  std::vector<std::size_t> grid(sharer_counts.begin(), sharer_counts.end());
  std::sort(grid.begin(), grid.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > n) {
      throw std::invalid_argument("sharer count " + std::to_string(grid[i]) +
                                  " exceeds agent count " + std::to_string(n));
    }
    if (i > 0 && grid[i] == grid[i - 1]) {
      throw std::invalid_argument("sharer count " + std::to_string(grid[i]) + " listed twice");
    }
  }
  return grid;
}

SweepOutput run_sweep(DomainKind domain, std::size_t n,
                      std::span<const std::size_t> sharer_counts, std::size_t runs,
                      const CeConfig& cfg, std::uint64_t master_seed,
                      const SweepOptions& options) {
  if (n < 2) throw std::invalid_argument("agent count must be >= 2");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  cfg.validate();
  std::vector<std::size_t> grid = normalize_grid(sharer_counts, n);

  SweepOutput out;
  out.params.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng = domain_stream(master_seed, r);
    out.params.push_back(sample_domain_params(domain, n, rng));
  }
  out.traces.assign(runs, std::vector<RunTrace>(grid.size()));

  const std::size_t cells = runs * grid.size();
  std::size_t workers = options.threads == 0 ? std::thread::hardware_concurrency()
                                             : options.threads;
  workers = std::clamp<std::size_t>(workers, 1, cells);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (std::size_t cell = next++; cell < cells && !failed; cell = next++) {
      const std::size_t r = cell / grid.size();
      const std::size_t g = cell % grid.size();
      const std::size_t k = grid[g];
      try {
        IterationObserver hook;
        if (options.observer) {
          hook = [&, r, k](std::size_t t, const EvaluatedBatch& batch,
                           std::span<const Policy> policies) {
            options.observer(r, k, t, batch, policies);
          };
        }
        GamePop pop = make_population(canonical_roles(n, k), make_reward_fn(out.params[r]), cfg);
        out.traces[r][g] = run_cedos(std::move(pop), cfg, master_seed, r, hook);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  out.result = aggregate_sweep(domain, n, std::move(grid), out.traces);
  return out;
}

SweepResult aggregate_sweep(DomainKind domain, std::size_t n, std::vector<std::size_t> grid,
                            const TraceTable& traces) {
  SweepResult res;
  res.domain = domain;
  res.n = n;
  res.runs = traces.size();
  res.grid = std::move(grid);
  const std::size_t points = res.grid.size();
  res.global_utility.resize(points);
  res.mean_share.resize(points);
  res.final_roles.resize(points);
  if (traces.empty()) return res;

  for (std::size_t g = 0; g < points; ++g) {
    const std::size_t k = res.grid[g];
    const std::size_t iters = traces.front().at(g).iterations.size();
    std::vector<double> globals(res.runs);
    std::vector<double> shares(res.runs);
    for (std::size_t t = 0; t < iters; ++t) {
      for (std::size_t r = 0; r < res.runs; ++r) {
        const IterationRecord& rec = traces[r].at(g).iterations.at(t);
        globals[r] = rec.global_utility;
        shares[r] = rec.mean_share;
      }
      res.global_utility[g].push_back(confidence_interval(globals));
      res.mean_share[g].push_back(confidence_interval(shares));
    }

    RoleOutcome& roles = res.final_roles[g];
    for (std::size_t r = 0; r < res.runs; ++r) {
      const RunTrace& trace = traces[r][g];
      if (trace.iterations.empty()) continue;
      const std::vector<double>& u = trace.iterations.back().per_agent_mean_utility;
      if (k >= 1) {
        roles.sharer_runs.push_back(std::accumulate(u.begin(), u.begin() + k, 0.0) /
                                    static_cast<double>(k));
      }
      if (k + 1 <= n) {
        roles.defector_runs.push_back(std::accumulate(u.begin() + k, u.end(), 0.0) /
                                      static_cast<double>(n - k));
      }
    }
    if (!roles.sharer_runs.empty()) roles.sharer = confidence_interval(roles.sharer_runs);
    if (!roles.defector_runs.empty()) roles.defector = confidence_interval(roles.defector_runs);
  }
  return res;
}

std::vector<SchellingRow> schelling_points(const SweepResult& result) {
  std::vector<SchellingRow> rows;
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    const RoleOutcome& roles = result.final_roles[g];
    // "defector" sorts before "sharer".
    if (roles.defector) rows.push_back({result.grid[g], AgentRole::kDefector, *roles.defector});
    if (roles.sharer) rows.push_back({result.grid[g], AgentRole::kSharer, *roles.sharer});
  }
  return rows;
}

}  // namespace doslab

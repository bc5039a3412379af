#pragma once

#include <vector>

#include "doslab/experiment.hpp"

namespace doslab::testing {

// Two runs of a three-agent population over sharer counts {0, 1, 3}, two
// iterations each. Only the last iteration's per-agent utilities feed the
// Schelling statistics.
inline TraceTable synthetic_traces() {
  auto trace = [](std::size_t k, std::vector<double> first, std::vector<double> last,
                  double share0, double share1) {
    RunTrace t;
    t.roles = canonical_roles(3, k);
    auto record = [](std::size_t it, std::vector<double> u, double share) {
      IterationRecord rec;
      rec.iteration = it;
      rec.global_utility = u[0] + u[1] + u[2];
      rec.mean_share = share;
      rec.per_agent_mean_utility = std::move(u);
      return rec;
    };
    t.iterations = {record(0, std::move(first), share0), record(1, std::move(last), share1)};
    return t;
  };
  return {
      {trace(0, {0, 1, 1}, {1, 2, 3}, 0.0, 0.0), trace(1, {1, 1, 1}, {1, 4, 6}, 0.5, 0.25),
       trace(3, {2, 2, 2}, {2, 3, 4}, 0.125, 0.375)},
      {trace(0, {1, 1, 2}, {3, 4, 5}, 0.0, 0.0), trace(1, {0, 0, 0}, {3, 2, 2}, 0.75, 0.5),
       trace(3, {3, 3, 3}, {5, 5, 5}, 0.25, 0.625)},
  };
}

inline SweepResult synthetic_result() {
  return aggregate_sweep(DomainKind::kSimple, 3, {0, 1, 3}, synthetic_traces());
}

}  // namespace doslab::testing

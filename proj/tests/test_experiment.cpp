#include <doctest.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "doslab/experiment.hpp"
#include "fixtures.hpp"

using namespace doslab;

namespace {

CeConfig quick_config() {
  CeConfig cfg;
  cfg.n_iter = 12;
  cfg.n_sample = 40;
  return cfg;
}

void check_interval(const Interval& got, double mean, double lo, double hi) {
  CHECK(got.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(got.lo == doctest::Approx(lo).epsilon(1e-12));
  CHECK(got.hi == doctest::Approx(hi).epsilon(1e-12));
}

}  // namespace

TEST_CASE("confidence_interval: hand-checked cases") {
  CHECK(confidence_interval(std::vector{2.5, 2.5, 2.5}) == Interval{2.5, 2.5, 2.5});
  // mean 1, s = sqrt(2), s / sqrt(2) = 1
  check_interval(confidence_interval(std::vector{0.0, 2.0}), 1.0, -0.96, 2.96);
  CHECK(confidence_interval(std::vector{4.0}) == Interval{4.0, 4.0, 4.0});

  const Interval sym = confidence_interval(std::vector{-3.0, -1.0, 1.0, 3.0});
  CHECK(sym.mean == 0.0);
  CHECK(sym.hi == doctest::Approx(-sym.lo).epsilon(1e-15));
  CHECK(sym.lo <= sym.mean);
  CHECK(sym.mean <= sym.hi);
}

TEST_CASE("canonical roles put sharers first") {
  const auto roles = canonical_roles(4, 2);
  CHECK(roles == std::vector{AgentRole::kSharer, AgentRole::kSharer, AgentRole::kDefector,
                             AgentRole::kDefector});
}

TEST_CASE("normalize_grid sorts and rejects bad sharer counts") {
  CHECK(normalize_grid(std::vector<std::size_t>{5, 0, 10}, 10) == std::vector<std::size_t>{0, 5, 10});
  CHECK_THROWS_AS(normalize_grid(std::vector<std::size_t>{11}, 10), std::invalid_argument);
  CHECK_THROWS_AS(normalize_grid(std::vector<std::size_t>{2, 2}, 10), std::invalid_argument);
  CHECK_THROWS_AS(normalize_grid(std::vector<std::size_t>{}, 10), std::invalid_argument);
}

TEST_CASE("schelling_points on a hand-filled fixture") {
  const SweepResult res = testing::synthetic_result();
  const auto rows = schelling_points(res);
  REQUIRE(rows.size() == 4);

  // k = 0: defector means (2, 4)
  CHECK(rows[0].sharers == 0);
  CHECK(rows[0].role == AgentRole::kDefector);
  check_interval(rows[0].utility, 3.0, 1.04, 4.96);
  // k = 1: defector means (5, 2), s = 3/sqrt(2), half width 1.96 * 1.5
  CHECK(rows[1].sharers == 1);
  CHECK(rows[1].role == AgentRole::kDefector);
  check_interval(rows[1].utility, 3.5, 0.56, 6.44);
  // k = 1: sharer means (1, 3)
  CHECK(rows[2].role == AgentRole::kSharer);
  check_interval(rows[2].utility, 2.0, 0.04, 3.96);
  // k = 3: sharer means (3, 5); no defectors exist
  CHECK(rows[3].sharers == 3);
  CHECK(rows[3].role == AgentRole::kSharer);
  check_interval(rows[3].utility, 4.0, 2.04, 5.96);

  CHECK_FALSE(res.final_roles[res.grid_index(0)].sharer.has_value());
  CHECK_FALSE(res.final_roles[res.grid_index(3)].defector.has_value());
}

TEST_CASE("aggregate_sweep builds per-iteration curves across runs") {
  const SweepResult res = testing::synthetic_result();
  CHECK(res.runs == 2);
  REQUIRE(res.global_utility.size() == 3);
  REQUIRE(res.global_utility[1].size() == 2);
  // k = 1, iteration 1: globals (11, 7), shares (0.25, 0.5)
  CHECK(res.global_utility[1][1].mean == 9.0);
  CHECK(res.mean_share[1][1].mean == 0.375);
  CHECK(res.mean_share[0][0] == Interval{0.0, 0.0, 0.0});
  CHECK_THROWS_AS(res.grid_index(2), std::out_of_range);
}

TEST_CASE("run_sweep covers the whole grid with paired runs") {
  const CeConfig cfg = quick_config();
  const std::vector<std::size_t> grid{4, 0, 2};
  const SweepOutput out = run_sweep(DomainKind::kSimple, 4, grid, 3, cfg, 11);

  CHECK(out.result.grid == std::vector<std::size_t>{0, 2, 4});
  CHECK(out.result.runs == 3);
  REQUIRE(out.traces.size() == 3);
  REQUIRE(out.params.size() == 3);
  for (const auto& row : out.traces) {
    REQUIRE(row.size() == 3);
    for (const RunTrace& t : row) CHECK(t.iterations.size() == 12);
  }
  // Nobody shares when k = 0.
  for (const auto& row : out.traces) {
    for (const auto& rec : row[0].iterations) CHECK(rec.mean_share == 0.0);
  }
  // Empty groups have no statistics.
  CHECK_FALSE(out.result.final_roles[0].sharer.has_value());
  CHECK(out.result.final_roles[0].defector.has_value());
  CHECK(out.result.final_roles[2].sharer.has_value());
  CHECK_FALSE(out.result.final_roles[2].defector.has_value());
}

TEST_CASE("run_sweep is reproducible and independent of the worker count") {
  const CeConfig cfg = quick_config();
  const std::vector<std::size_t> grid{0, 1, 3};
  const SweepOutput a = run_sweep(DomainKind::kLogistic, 3, grid, 4, cfg, 5, {.threads = 1});
  const SweepOutput b = run_sweep(DomainKind::kLogistic, 3, grid, 4, cfg, 5, {.threads = 3});
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto& ta = a.traces[r][g].iterations;
      const auto& tb = b.traces[r][g].iterations;
      REQUIRE(ta.size() == tb.size());
      for (std::size_t t = 0; t < ta.size(); ++t) {
        CHECK(ta[t].global_utility == tb[t].global_utility);
        CHECK(ta[t].per_agent_mean_utility == tb[t].per_agent_mean_utility);
      }
    }
  }
  CHECK(schelling_points(a.result) == schelling_points(b.result));
}

TEST_CASE("recorded global utility equals the batch mean of summed rewards") {
  const CeConfig cfg = quick_config();
  std::mutex mu;
  // [run][k][iteration] mean of sum_i r_i, recomputed from raw rewards.
  std::vector<std::vector<std::vector<double>>> expected(2, std::vector<std::vector<double>>(4));
  SweepOptions options;
  options.threads = 2;
  options.observer = [&](std::size_t run, std::size_t k, std::size_t, const EvaluatedBatch& batch,
                         std::span<const Policy>) {
    double total = 0.0;
    for (std::size_t s = 0; s < batch.samples(); ++s) {
      for (std::size_t i = 0; i < batch.agents(); ++i) total += batch.rewards(s, i);
    }
    std::lock_guard lock(mu);
    expected[run][k].push_back(total / static_cast<double>(batch.samples()));
  };
  const std::vector<std::size_t> grid{0, 1, 2, 3};
  const SweepOutput out = run_sweep(DomainKind::kSimple, 3, grid, 2, cfg, 9, options);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& recs = out.traces[r][k].iterations;
      REQUIRE(recs.size() == expected[r][k].size());
      for (std::size_t t = 0; t < recs.size(); ++t) {
        CHECK(recs[t].global_utility == doctest::Approx(expected[r][k][t]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("domain parameters are shared across sharer counts within a run") {
  const CeConfig cfg = quick_config();
  const std::vector<std::size_t> grid{0, 2};
  const SweepOutput a = run_sweep(DomainKind::kLogistic, 2, grid, 2, cfg, 21);
  const std::vector<std::size_t> other{1};
  const SweepOutput b = run_sweep(DomainKind::kLogistic, 2, other, 2, cfg, 21);
  for (std::size_t r = 0; r < 2; ++r) {
    const auto& pa = std::get<LogisticMarketParams>(a.params[r]);
    const auto& pb = std::get<LogisticMarketParams>(b.params[r]);
    CHECK(pa.price.offset == pb.price.offset);
    CHECK(pa.production[1].steepness == pb.production[1].steepness);
  }
  CHECK(std::get<LogisticMarketParams>(a.params[0]).price.offset !=
        std::get<LogisticMarketParams>(a.params[1]).price.offset);
}

TEST_CASE("run_sweep rejects invalid requests") {
  const CeConfig cfg = quick_config();
  const std::vector<std::size_t> too_many{5};
  CHECK_THROWS_AS(run_sweep(DomainKind::kSimple, 4, too_many, 1, cfg, 0), std::invalid_argument);
  const std::vector<std::size_t> ok{1};
  CHECK_THROWS_AS(run_sweep(DomainKind::kSimple, 4, ok, 0, cfg, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(DomainKind::kSimple, 1, ok, 1, cfg, 0), std::invalid_argument);
}

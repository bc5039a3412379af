#include "doslab/ce_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

namespace doslab {
namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

std::string to_string(AgentRole role) {
  return role == AgentRole::kSharer ? "sharer" : "defector";
}

void CeConfig::validate() const {
  require(n_iter >= 1, "n_iter must be >= 1");
  require(n_sample >= 1, "n_sample must be >= 1");
  require(std::isfinite(mu0), "mu0 must be finite");
  require(std::isfinite(sigma0) && sigma0 > 0.0, "sigma0 must be > 0");
  require(std::isfinite(sigma_min) && sigma_min > 0.0, "sigma_min must be > 0");
  require(psi > 0.0 && psi <= 1.0, "psi must lie in (0, 1]");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(std::isfinite(a_min) && std::isfinite(a_max) && a_min < a_max,
          "a_min must be < a_max");
}

std::size_t CeConfig::elite_count() const {
  return doslab::elite_count(static_cast<std::size_t>(n_sample), psi);
}

std::size_t elite_count(std::size_t samples, double psi) {
  if (samples == 0) return 0;
  const long k = std::lround(psi * static_cast<double>(samples));
  return static_cast<std::size_t>(std::clamp<long>(k, 1, static_cast<long>(samples)));
}

Policy init_policy(AgentRole role, const CeConfig& cfg) {
  const std::size_t dim = role == AgentRole::kSharer ? 2 : 1;
  return Policy{std::vector<double>(dim, cfg.mu0), std::vector<double>(dim, cfg.sigma0)};
}

Matrix sample_policy(const Policy& policy, std::size_t n_sample, const CeConfig& cfg,
                     Rng& rng) {
  Matrix rows(n_sample, policy.dim());
  std::normal_distribution<double> normal;
  for (std::size_t r = 0; r < n_sample; ++r) {
    for (std::size_t d = 0; d < policy.dim(); ++d) {
      double x = policy.mu[d] + policy.sigma[d] * normal(rng);
      if (d == kActionDim) {
        x = std::clamp(x, cfg.a_min, cfg.a_max);
      } else {
        x = std::max(x, 0.0);
      }
      rows(r, d) = x;
    }
  }
  return rows;
}

std::vector<JointSample> build_joint(std::span<const Matrix> per_agent_rows) {
  if (per_agent_rows.empty()) return {};
  const std::size_t n = per_agent_rows.size();
  const std::size_t samples = per_agent_rows.front().rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (per_agent_rows[i].rows() != samples) {
      throw std::invalid_argument("build_joint: agent " + std::to_string(i) + " sent " +
                                  std::to_string(per_agent_rows[i].rows()) +
                                  " samples, expected " + std::to_string(samples));
    }
  }

  std::vector<JointSample> pairs(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    pairs[k].actions.resize(n);
    pairs[k].shares.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix& rows = per_agent_rows[i];
      pairs[k].actions[i] = rows(k, kActionDim);
      if (rows.cols() > kShareDim) pairs[k].shares[i] = rows(k, kShareDim);
    }
  }
  return pairs;
}

EvaluatedBatch evaluate_batch(std::vector<JointSample> pairs, const RewardFn& rewards,
                              std::size_t n) {
  EvaluatedBatch batch;
  batch.rewards = Matrix(pairs.size(), n);
  batch.utilities = Matrix(pairs.size(), n);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    JointSample& pair = pairs[k];
    const RewardVector r = rewards(pair.actions);
    if (r.size() != n) {
      throw NumericError("pair " + std::to_string(k) + ": domain returned " +
                         std::to_string(r.size()) + " rewards for " + std::to_string(n) +
                         " agents");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(r[i])) {
        throw NumericError("pair " + std::to_string(k) + ": non-finite reward for agent " +
                           std::to_string(i));
      }
    }
    pair.shares = clip_shares_to_reward(pair.shares, r);
    const UtilityVector u = sharing_utility(r, pair.shares);
    std::copy(r.begin(), r.end(), batch.rewards.row(k).begin());
    std::copy(u.begin(), u.end(), batch.utilities.row(k).begin());
  }
  batch.joint = std::move(pairs);
  return batch;
}

std::vector<std::size_t> select_elite(std::span<const double> utilities, double psi) {
  const std::size_t total = utilities.size();
  if (total == 0) return {};
  const std::size_t count = elite_count(total, psi);

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Strict total order: higher utility first, then lower index.
  auto better = [&](std::size_t a, std::size_t b) {
    if (utilities[a] != utilities[b]) return utilities[a] > utilities[b];
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + (count - 1), order.end(), better);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

Policy update_policy(const Policy& policy, const Matrix& elite_rows, const CeConfig& cfg) {
  if (elite_rows.rows() == 0) throw std::invalid_argument("update_policy: empty elite set");
  if (elite_rows.cols() != policy.dim()) {
    throw std::invalid_argument("update_policy: elite rows do not match policy dimension");
  }
  const auto k = static_cast<double>(elite_rows.rows());
  Policy next = policy;
  for (std::size_t d = 0; d < policy.dim(); ++d) {
    double mean = 0.0;
    for (std::size_t r = 0; r < elite_rows.rows(); ++r) mean += elite_rows(r, d);
    mean /= k;
    double var = 0.0;
    for (std::size_t r = 0; r < elite_rows.rows(); ++r) {
      const double dev = elite_rows(r, d) - mean;
      var += dev * dev;
    }
    const double sd = std::sqrt(var / k);

    next.mu[d] = (1.0 - cfg.alpha) * policy.mu[d] + cfg.alpha * mean;
    next.sigma[d] =
        std::max((1.0 - cfg.alpha) * policy.sigma[d] + cfg.alpha * sd, cfg.sigma_min);
  }
  return next;
}

GamePop make_population(std::vector<AgentRole> roles, RewardFn reward, const CeConfig& cfg) {
  GamePop pop{std::move(roles), std::move(reward), {}};
  pop.policies.reserve(pop.roles.size());
  for (AgentRole role : pop.roles) pop.policies.push_back(init_policy(role, cfg));
  return pop;
}

namespace {

IterationRecord summarize(std::size_t iteration, const EvaluatedBatch& batch,
                          std::span<const AgentRole> roles) {
  const std::size_t n = batch.agents();
  const auto samples = static_cast<double>(batch.samples());
  IterationRecord rec;
  rec.iteration = iteration;
  rec.per_agent_mean_utility.assign(n, 0.0);

  double global = 0.0;
  double share_sum = 0.0;
  for (std::size_t k = 0; k < batch.samples(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = batch.utilities(k, i);
      global += u;
      rec.per_agent_mean_utility[i] += u;
      if (roles[i] == AgentRole::kSharer) share_sum += batch.joint[k].shares[i];
    }
  }
  for (double& u : rec.per_agent_mean_utility) u /= samples;
  rec.global_utility = global / samples;

  const auto sharers = static_cast<double>(
      std::count(roles.begin(), roles.end(), AgentRole::kSharer));
  rec.mean_share = sharers > 0 ? share_sum / (samples * sharers) : 0.0;
  return rec;
}

Matrix own_elite_rows(const EvaluatedBatch& batch, std::size_t agent,
                      std::span<const std::size_t> elite, std::size_t dim) {
  Matrix rows(elite.size(), dim);
  for (std::size_t r = 0; r < elite.size(); ++r) {
    const JointSample& pair = batch.joint[elite[r]];
    rows(r, kActionDim) = pair.actions[agent];
    if (dim > kShareDim) rows(r, kShareDim) = pair.shares[agent];
  }
  return rows;
}

}  // namespace

RunTrace run_cedos(GamePop pop, const CeConfig& cfg, std::span<Rng> agent_rngs,
                   const IterationObserver& observer) {
  cfg.validate();
  const std::size_t n = pop.size();
  if (n < 2) throw std::invalid_argument("run_cedos: need at least two agents");
  if (pop.policies.size() != n || agent_rngs.size() != n) {
    throw std::invalid_argument("run_cedos: roles, policies and rng streams differ in size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t want = pop.roles[i] == AgentRole::kSharer ? 2 : 1;
    if (pop.policies[i].dim() != want) {
      throw std::invalid_argument("run_cedos: policy " + std::to_string(i) +
                                  " does not match its role");
    }
  }

  const auto n_sample = static_cast<std::size_t>(cfg.n_sample);
  RunTrace trace;
  trace.roles = pop.roles;
  trace.iterations.reserve(static_cast<std::size_t>(cfg.n_iter));
  std::vector<Matrix> rows(n);

  for (std::size_t t = 0; t < static_cast<std::size_t>(cfg.n_iter); ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      rows[i] = sample_policy(pop.policies[i], n_sample, cfg, agent_rngs[i]);
    }
    EvaluatedBatch batch;
    try {
      batch = evaluate_batch(build_joint(rows), pop.reward, n);
    } catch (const std::exception& e) {
      throw NumericError("iteration " + std::to_string(t) + ": " + e.what());
    }

    // Every agent reads the same batch; policies for t+1 are written into a
    // separate vector so no agent sees another's update within iteration t.
    std::vector<Policy> next(n);
    batch.elite.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> own = batch.utilities.column(i);
      batch.elite[i] = select_elite(own, cfg.psi);
      next[i] = update_policy(
          pop.policies[i], own_elite_rows(batch, i, batch.elite[i], pop.policies[i].dim()),
          cfg);
    }
    pop.policies = std::move(next);

    trace.iterations.push_back(summarize(t, batch, pop.roles));
    if (observer) observer(t, batch, pop.policies);
  }

  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = sample_policy(pop.policies[i], 1, cfg, agent_rngs[i]);
  }
  EvaluatedBatch final_batch;
  try {
    final_batch = evaluate_batch(build_joint(rows), pop.reward, n);
  } catch (const std::exception& e) {
    throw NumericError(std::string("execution step: ") + e.what());
  }
  const JointSample& executed = final_batch.joint.front();
  trace.executed.actions = executed.actions;
  trace.executed.shares = executed.shares;
  const auto r = final_batch.rewards.row(0);
  const auto u = final_batch.utilities.row(0);
  trace.executed.rewards.assign(r.begin(), r.end());
  trace.executed.utilities.assign(u.begin(), u.end());
  trace.final_policies = std::move(pop.policies);
  return trace;
}

RunTrace run_cedos(GamePop pop, const CeConfig& cfg, std::uint64_t master_seed,
                   std::uint64_t run_index, const IterationObserver& observer) {
  std::vector<Rng> streams;
  streams.reserve(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    streams.push_back(agent_stream(master_seed, run_index, i));
  }
  return run_cedos(std::move(pop), cfg, streams, observer);
}

}  // namespace doslab

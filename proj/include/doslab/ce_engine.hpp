#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "doslab/domains.hpp"
#include "doslab/game.hpp"
#include "doslab/matrix.hpp"
#include "doslab/rng.hpp"

// Cross-entropy optimization with utility sharing. Every agent keeps an
// independent Gaussian over its own (action[, share]) and refits it to the
// elite fraction of a batch of joint samples that all agents evaluate in
// lock step.

namespace doslab {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AgentRole { kSharer, kDefector };

std::string to_string(AgentRole role);

// Column layout of a policy and of its sample rows.
inline constexpr std::size_t kActionDim = 0;
inline constexpr std::size_t kShareDim = 1;

struct CeConfig {
  int n_iter = 100;
  int n_sample = 100;
  double mu0 = 0.0;
  double sigma0 = 1.0;
  double sigma_min = 0.2;
  double psi = 0.25;    // elite fraction, (0, 1]
  double alpha = 0.5;   // learning rate, (0, 1]
  double a_min = 0.1;
  double a_max = 4.0;

  // Throws std::invalid_argument naming the first offending field.
  void validate() const;

  // max(1, round(psi * n_sample))
  std::size_t elite_count() const;

  bool operator==(const CeConfig&) const = default;
};

// Independent normal per dimension. Sharers carry [action, share],
// defectors only [action].
struct Policy {
  std::vector<double> mu;
  std::vector<double> sigma;

  std::size_t dim() const { return mu.size(); }
  bool shares() const { return dim() > kShareDim; }
  bool operator==(const Policy&) const = default;
};

Policy init_policy(AgentRole role, const CeConfig& cfg);

// n_sample x policy.dim() draws. Actions are clamped into [a_min, a_max],
// shares to [0, inf).
Matrix sample_policy(const Policy& policy, std::size_t n_sample, const CeConfig& cfg,
                     Rng& rng);

struct JointSample {
  JointAction actions;
  JointShare shares;
};

// Pair k takes row k of every agent. Agents whose rows have no share column
// contribute a share of exactly 0. Throws if row counts differ.
std::vector<JointSample> build_joint(std::span<const Matrix> per_agent_rows);

struct EvaluatedBatch {
  std::vector<JointSample> joint;  // shares already clipped to the reward
  Matrix rewards;                  // n_sample x n
  Matrix utilities;                // n_sample x n
  // elite[i] holds agent i's elite sample indices, ascending. Empty until
  // the engine runs selection.
  std::vector<std::vector<std::size_t>> elite;

  std::size_t samples() const { return joint.size(); }
  std::size_t agents() const { return rewards.cols(); }
};

// Rewards from the domain, shares clipped to those rewards, then the sharing
// transform. Throws NumericError naming the pair on a non-finite reward.
EvaluatedBatch evaluate_batch(std::vector<JointSample> pairs, const RewardFn& rewards,
                              std::size_t n);

// max(1, round(psi * samples)), capped at samples.
std::size_t elite_count(std::size_t samples, double psi);

// Indices of the elite_count highest utilities, ties going to the lower
// index. Returned in ascending index order.
std::vector<std::size_t> select_elite(std::span<const double> utilities, double psi);

// Blends the elite mean and population standard deviation into the policy
// with rate alpha, then floors sigma at sigma_min.
Policy update_policy(const Policy& policy, const Matrix& elite_rows, const CeConfig& cfg);

struct GamePop {
  std::vector<AgentRole> roles;
  RewardFn reward;
  std::vector<Policy> policies;

  std::size_t size() const { return roles.size(); }
};

// Fresh population with every policy at the prior.
GamePop make_population(std::vector<AgentRole> roles, RewardFn reward, const CeConfig& cfg);

struct IterationRecord {
  std::size_t iteration = 0;
  double global_utility = 0.0;  // batch mean of sum_i u_i
  double mean_share = 0.0;      // mean clipped share over samples and sharers
  std::vector<double> per_agent_mean_utility;
};

struct ExecutedOutcome {
  JointAction actions;
  JointShare shares;  // clipped
  RewardVector rewards;
  UtilityVector utilities;
};

struct RunTrace {
  std::vector<AgentRole> roles;
  std::vector<IterationRecord> iterations;
  std::vector<Policy> final_policies;
  ExecutedOutcome executed;
};

// Called once per iteration after every agent has updated. `batch` carries
// the elite sets; `policies` are the iteration t+1 policies.
using IterationObserver =
    std::function<void(std::size_t iteration, const EvaluatedBatch& batch,
                       std::span<const Policy> policies)>;

// Runs n_iter synchronous sample/evaluate/update rounds, then executes one
// joint draw from the final policies. agent_rngs holds one stream per agent.
RunTrace run_cedos(GamePop pop, const CeConfig& cfg, std::span<Rng> agent_rngs,
                   const IterationObserver& observer = {});

// Same, with agent streams derived from (master_seed, run_index, agent).
RunTrace run_cedos(GamePop pop, const CeConfig& cfg, std::uint64_t master_seed,
                   std::uint64_t run_index, const IterationObserver& observer = {});

}  // namespace doslab

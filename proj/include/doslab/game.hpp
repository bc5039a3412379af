#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Single-state stochastic game primitives: per-agent reward vectors and the
// uniform utility-sharing transform applied on top of them.

namespace doslab {

// Agents are indexed densely 0..n-1.
using AgentId = std::size_t;

// One real-valued action per agent (resource/energy amount).
using JointAction = std::vector<double>;
// One non-negative share per agent, in utility units.
using JointShare = std::vector<double>;
using RewardVector = std::vector<double>;
using UtilityVector = std::vector<double>;

// u_i = r_i - s_i + (sum_{j != i} s_j) / (n - 1)
//
// Each agent gives away s_i and receives an equal cut of every other agent's
// share. Total utility equals total reward. Throws std::invalid_argument for
// n < 2, mismatched lengths or a negative share.
UtilityVector sharing_utility(std::span<const double> rewards,
                              std::span<const double> shares);

// out_i = min(s_i, max(r_i, 0)): an agent cannot give away more than it
// earned on this joint action, and nothing when the reward is negative.
JointShare clip_shares_to_reward(std::span<const double> shares,
                                 std::span<const double> rewards);

}  // namespace doslab

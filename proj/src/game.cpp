#include "doslab/game.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace doslab {

UtilityVector sharing_utility(std::span<const double> rewards,
                              std::span<const double> shares) {
  const std::size_t n = rewards.size();
  if (shares.size() != n) {
    throw std::invalid_argument("sharing_utility: rewards and shares differ in length");
  }
  if (n < 2) {
    throw std::invalid_argument("sharing_utility: need at least two agents");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (shares[i] < 0.0) {
      throw std::invalid_argument("sharing_utility: negative share at agent " +
                                  std::to_string(i));
    }
  }

  const double total_share = std::accumulate(shares.begin(), shares.end(), 0.0);
  const double others = static_cast<double>(n - 1);
  UtilityVector utilities(n);
  for (std::size_t i = 0; i < n; ++i) {
    utilities[i] = rewards[i] - shares[i] + (total_share - shares[i]) / others;
  }
  return utilities;
}

JointShare clip_shares_to_reward(std::span<const double> shares,
                                 std::span<const double> rewards) {
  if (shares.size() != rewards.size()) {
    throw std::invalid_argument("clip_shares_to_reward: length mismatch");
  }
  JointShare out(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    out[i] = std::min(shares[i], std::max(rewards[i], 0.0));
  }
  return out;
}

}  // namespace doslab

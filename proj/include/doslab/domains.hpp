#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "doslab/game.hpp"
#include "doslab/rng.hpp"

namespace doslab {

enum class DomainKind { kSimple, kLogistic };

// "simple" / "logistic"; throws std::invalid_argument otherwise.
DomainKind parse_domain_kind(std::string_view name);
std::string to_string(DomainKind kind);

// r_i = a_i / (sum_j a_j)^xi
struct SimpleMarketParams {
  double xi = 2.0;
};

// Sigmoid 1 / (1 + exp(-steepness * (x - offset))).
struct LogisticCurve {
  double steepness = 1.0;
  double offset = 1.0;
};

struct LogisticMarketParams {
  std::vector<LogisticCurve> production;  // one per agent
  LogisticCurve price;                    // mirrored into a falling price curve
};

using DomainParams = std::variant<SimpleMarketParams, LogisticMarketParams>;

// Maps a joint action to one reward per agent.
using RewardFn = std::function<RewardVector(std::span<const double>)>;

RewardVector simple_market_rewards(std::span<const double> actions,
                                   const SimpleMarketParams& params);

// Units produced by one agent for a given energy input, in (0, 1).
double logistic_production(double action, const LogisticCurve& curve);

// Price per unit at a given global production, in (0, 1), decreasing.
double market_price(double total_production, const LogisticCurve& curve);

RewardVector logistic_market_rewards(std::span<const double> actions,
                                     const LogisticMarketParams& params);

// Draws xi ~ U[2, 4] (simple) or every steepness/offset ~ U[1, 3]
// (logistic: n production curves plus one price curve).
DomainParams sample_domain_params(DomainKind kind, std::size_t n, Rng& rng);

DomainKind kind_of(const DomainParams& params);
RewardFn make_reward_fn(DomainParams params);

}  // namespace doslab

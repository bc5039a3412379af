#include "doslab/domains.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace doslab {
namespace {

// Evaluates 1 / (1 + exp(-z)) without overflowing exp for large |z|.
double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

DomainKind parse_domain_kind(std::string_view name) {
  if (name == "simple") return DomainKind::kSimple;
  if (name == "logistic") return DomainKind::kLogistic;
  throw std::invalid_argument("unknown domain kind '" + std::string(name) +
                              "' (expected simple or logistic)");
}

std::string to_string(DomainKind kind) {
  return kind == DomainKind::kSimple ? "simple" : "logistic";
}

RewardVector simple_market_rewards(std::span<const double> actions,
                                   const SimpleMarketParams& params) {
  const double total = std::accumulate(actions.begin(), actions.end(), 0.0);
  if (!(total > 0.0)) {
    throw std::domain_error("simple market: total production must be positive");
  }
  const double denom = std::pow(total, params.xi);
  RewardVector rewards(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) rewards[i] = actions[i] / denom;
  return rewards;
}

double logistic_production(double action, const LogisticCurve& curve) {
  return stable_sigmoid(curve.steepness * (action - curve.offset));
}

double market_price(double total_production, const LogisticCurve& curve) {
  // 1 - sigmoid(z) == sigmoid(-z), which keeps precision near saturation.
  return stable_sigmoid(-curve.steepness * (total_production - curve.offset));
}

RewardVector logistic_market_rewards(std::span<const double> actions,
                                     const LogisticMarketParams& params) {
  if (actions.size() != params.production.size()) {
    throw std::invalid_argument("logistic market: expected " +
                                std::to_string(params.production.size()) +
                                " actions, got " + std::to_string(actions.size()));
  }
  RewardVector produced(actions.size());
  double total = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    produced[i] = logistic_production(actions[i], params.production[i]);
    total += produced[i];
  }
  const double price = market_price(total, params.price);
  for (double& p : produced) p *= price;
  return produced;
}

DomainParams sample_domain_params(DomainKind kind, std::size_t n, Rng& rng) {
  switch (kind) {
    case DomainKind::kSimple: {
      std::uniform_real_distribution<double> xi(2.0, 4.0);
      return SimpleMarketParams{xi(rng)};
    }
    case DomainKind::kLogistic: {
      std::uniform_real_distribution<double> u(1.0, 3.0);
      LogisticMarketParams params;
      params.production.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double c = u(rng);
        const double o = u(rng);
        params.production.push_back({c, o});
      }
      const double c = u(rng);
      const double o = u(rng);
      params.price = {c, o};
      return params;
    }
  }
  throw std::invalid_argument("unknown domain kind");
}

DomainKind kind_of(const DomainParams& params) {
  return std::holds_alternative<SimpleMarketParams>(params) ? DomainKind::kSimple
                                                            : DomainKind::kLogistic;
}

RewardFn make_reward_fn(DomainParams params) {
  return std::visit(
      [](auto p) -> RewardFn {
        using P = decltype(p);
        if constexpr (std::is_same_v<P, SimpleMarketParams>) {
          return [p](std::span<const double> a) { return simple_market_rewards(a, p); };
        } else {
          return [p](std::span<const double> a) { return logistic_market_rewards(a, p); };
        }
      },
      std::move(params));
}

}  // namespace doslab

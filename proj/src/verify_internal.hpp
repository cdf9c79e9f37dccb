#pragma once

#include "genproj/verify.hpp"

#include <map>

namespace genproj::detail {

/// Accumulators keyed by check id, reported in first-use order.
class AccumulatorSet {
  public:
    explicit AccumulatorSet(std::uint64_t seed) : seed_(seed) {}

    CheckAccumulator &get(const std::string &id, bool informational = false);
    std::vector<CheckReport> finish(const nlohmann::json &context) const;

  private:
    std::uint64_t seed_;
    std::vector<CheckAccumulator> accs_;
    std::map<std::string, std::size_t> index_;
};

/// Norm inequalities, duality-map identities and V2 bounds on one pair.
void inequality_corpus(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y, AccumulatorSet &acc);

void strong_uniqueness(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xbar,
                       std::span<const PrimalVector> xi_samples, AccumulatorSet &acc);

void operator_properties(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                         std::span<const PrimalVector> xi_samples,
                         std::span<const std::pair<PrimalVector, PrimalVector>> pairs, const InnerSolverConfig &inner,
                         AccumulatorSet &acc);

} // namespace genproj::detail

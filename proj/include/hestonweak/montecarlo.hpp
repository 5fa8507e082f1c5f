#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hestonweak/core.hpp"
#include "hestonweak/payoffs.hpp"
#include "hestonweak/rng.hpp"
#include "hestonweak/schemes.hpp"

namespace heston {

struct McEstimate {
    double mean;
    double std_error;
    std::int64_t n_paths;
    std::size_t n_steps;
};

struct McOptions {
    int n_workers = 1;
    // Global index of the first path. Disjoint ranges of the same seed give
    // statistically independent batches (streams are indexed by global path).
    std::int64_t path_offset = 0;
};

/// Single-pass (count, mean, M2) moments with compensated accumulation.
/// merge() folds another accumulator in via the standard pairwise
/// combination; the engine merges chunks in fixed index order, so results
/// are bit-identical for any worker count.
struct MomentAccumulator {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const MomentAccumulator& other);
};

/// Paths per work chunk. Partitions aligned to this size merge bit-exactly.
inline constexpr std::int64_t kChunkPaths = 4096;

/// Engine core: simulates n_paths terminal states once and accumulates every
/// payoff's samples. One accumulator per payoff, in input order.
[[nodiscard]] std::vector<MomentAccumulator> accumulate_terminal(
    const HestonParams& params, const TimeGrid& grid,
    std::span<const PayoffSpec> payoffs, Scheme scheme, std::int64_t n_paths,
    const RngStreamSpec& rng, const McOptions& opts = {});

[[nodiscard]] McEstimate estimate(const HestonParams& params,
                                  const TimeGrid& grid,
                                  const PayoffSpec& payoff, Scheme scheme,
                                  std::int64_t n_paths,
                                  const RngStreamSpec& rng,
                                  const McOptions& opts = {});

/// Shared-path estimates of several functionals of the same terminal price.
[[nodiscard]] std::vector<McEstimate> estimate_multi(
    const HestonParams& params, const TimeGrid& grid,
    std::span<const PayoffSpec> payoffs, Scheme scheme, std::int64_t n_paths,
    const RngStreamSpec& rng, const McOptions& opts = {});

/// Sample mean and standard error of v_k for every grid time k = 0..N.
/// Index 0 is the deterministic initial value (zero standard error).
[[nodiscard]] std::vector<McEstimate> estimate_v_moments(
    const HestonParams& params, const TimeGrid& grid, Scheme scheme,
    std::int64_t n_paths, const RngStreamSpec& rng, const McOptions& opts = {});

}  // namespace heston

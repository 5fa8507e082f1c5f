#pragma once

#include <array>
#include <cstdint>

namespace heston {

/// Philox4x32-10 counter-based block cipher (Salmon et al.). One call maps a
/// 128-bit counter and 64-bit key to four 32-bit outputs; distinct counters
/// give independent outputs, so streams can be indexed rather than advanced.
[[nodiscard]] std::array<std::uint32_t, 4>
philox4x32(const std::array<std::uint32_t, 4>& counter,
           const std::array<std::uint32_t, 2>& key);

/// Inverse of the standard normal CDF (Wichura's AS241, double precision).
/// Requires u in (0, 1).
[[nodiscard]] double inverse_normal_cdf(double u);

/// Deterministic assignment of independent Gaussian substreams to path
/// indices. The generator is stateless: draw k of path i is a pure function
/// of (seed, i, k), so results do not depend on how paths are distributed
/// across workers.
struct RngStreamSpec {
    std::uint64_t seed = 0;

    /// Two independent N(0,1) draws for one (path, step) cell. The first
    /// output drives W (the volatility driver), the second drives B; all
    /// consumers rely on this order so coupled schemes see identical dW.
    void normal_pair(std::uint64_t path_index, std::uint64_t step_index,
                     double& z_w, double& z_b) const;
};

}  // namespace heston

#pragma once

#include <span>
#include <string>
#include <vector>

#include "hestonweak/core.hpp"

namespace heston {

/// One path's state: log-price x and discretized variance v.
struct PathState {
    double x;
    double v;
};

/// Brownian increments of (W, B) over one step of length dt. dw and db are
/// the caller's responsibility to be N(0, dt) draws.
struct NoiseIncrement {
    double dw;
    double db;
    double dt;
};

/// State of the square-root Euler approximation of the CIR process.
struct CirState {
    double a;
};

enum class Scheme { milstein_d, milstein_d_trunc, sqrt_euler };

[[nodiscard]] Scheme scheme_from_name(const std::string& name);
[[nodiscard]] const char* scheme_name(Scheme scheme);
[[nodiscard]] inline bool is_truncated(Scheme s) {
    return s == Scheme::milstein_d_trunc;
}

/// Drift-implicit Milstein update of the variance, evaluated in the squared
/// closed form
///   v' = ((sqrt(v) + (theta/2) dW)^2 + (kappa lambda - theta^2/4) dt)
///        / (1 + kappa dt),
/// which is nonnegative whenever 4 kappa lambda / theta^2 >= 1.
[[nodiscard]] double milstein_v_step(double v, const NoiseIncrement& noise,
                                     const HestonParams& params);

/// Same update with sqrt(v) replaced by sqrt(max(v, 0)). Only the square
/// root is truncated; the linear v term is kept, so the output can go
/// negative when 4 kappa lambda / theta^2 < 1.
[[nodiscard]] double milstein_v_step_truncated(double v,
                                               const NoiseIncrement& noise,
                                               const HestonParams& params);

/// One step of the coupled log-price/variance scheme: Euler for x reading
/// the old v, implicit Milstein for v. With `truncated`, sqrt(v) becomes
/// sqrt(max(v, 0)) in both the diffusion and the variance update; the
/// -v/2 dt drift keeps the untruncated v.
[[nodiscard]] PathState scheme_d_step(const PathState& state,
                                      const NoiseIncrement& noise,
                                      const HestonParams& params,
                                      bool truncated);

/// Drift-implicit square-root Euler update of the CIR process,
///   a' = ( y/(2 + kappa dt)
///          + sqrt( y^2/(2 + kappa dt)^2
///                  + (kappa lambda - theta^2/4) dt / (2 + kappa dt) ) )^2,
/// with y = sqrt(a) + (theta/2) dW. Rejects parameter sets with
/// 4 kappa lambda / theta^2 < 1, where the radicand may go negative.
[[nodiscard]] CirState sqrt_euler_step(const CirState& state,
                                       const NoiseIncrement& noise,
                                       const HestonParams& params);

/// Terminal state after stepping the coupled scheme across the whole grid
/// from (log(s0), v0). The noise stream must have one increment per grid
/// step with matching dt. Rejects Scheme::sqrt_euler, which has no price
/// component; see simulate_cir_path. If `record` is given it receives the
/// full path including the initial state.
[[nodiscard]] PathState simulate_path(const TimeGrid& grid,
                                      const HestonParams& params,
                                      std::span<const NoiseIncrement> noise,
                                      Scheme scheme,
                                      std::vector<PathState>* record = nullptr);

/// Terminal square-root Euler state across the whole grid from a_0 = v0.
/// Only the dw component of each increment is consumed.
[[nodiscard]] CirState simulate_cir_path(const TimeGrid& grid,
                                         const HestonParams& params,
                                         std::span<const NoiseIncrement> noise,
                                         std::vector<CirState>* record = nullptr);

/// Structural per-step floor of the Milstein variance when
/// kappa lambda >= theta^2/4:
///   v_k >= (kappa lambda - theta^2/4) dt_k / (1 + kappa T).
[[nodiscard]] inline double milstein_step_floor(const HestonParams& params,
                                                double t_horizon, double dt) {
    return cir_drift_excess(params) * dt / (1.0 + params.kappa * t_horizon);
}

}  // namespace heston

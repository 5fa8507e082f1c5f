#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

#include "hestonweak/core.hpp"

namespace heston {

struct QuadratureConfig {
    double abs_tol = 1e-9;
    int max_nodes = 200000;
    // Tail policy: the semi-infinite integral is covered by doubling
    // segments [0,1], [1,2], [2,4], ...; this caps how far they extend.
    int max_doublings = 48;
};

struct ReferencePrice {
    double value;
    double est_error;
    std::optional<double> p1;
    std::optional<double> p2;
};

/// Raised when the quadrature cannot meet abs_tol within the node budget.
/// Carries the best estimate reached so far.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double best_estimate,
                    double est_error)
        : std::runtime_error(what),
          best_estimate(best_estimate),
          est_error(est_error) {}
    double best_estimate;
    double est_error;
};

/// Characteristic function E exp(i u log S_t) of the log-price at time t.
/// Evaluated in the branch-stable formulation: the (beta - d)/theta^2
/// factor is rationalized to avoid cancellation, the log term is computed
/// through log1p with a small-|g| series, and the principal square root
/// keeps Re d >= 0 so the complex logarithm never wraps. cf(0) = 1 exactly.
[[nodiscard]] std::complex<double> heston_cf(std::complex<double> u,
                                             const HestonParams& params,
                                             double t);

/// C = S0 P1 - K e^{-mu T} P2, with P1 and P2 from the half-line inversion
/// integrals evaluated by adaptive 7/15 Gauss-Kronrod quadrature.
[[nodiscard]] ReferencePrice call_price(const HestonParams& params,
                                        double strike,
                                        const QuadratureConfig& cfg = {});

/// P = C - S0 + K e^{-mu T} (parity applied to call_price's output).
[[nodiscard]] ReferencePrice put_price(const HestonParams& params,
                                       double strike,
                                       const QuadratureConfig& cfg = {});

/// e^{-mu T} (1 - P2): the reference value of the indicator functional.
[[nodiscard]] ReferencePrice digital_price(const HestonParams& params,
                                           double strike,
                                           const QuadratureConfig& cfg = {});

}  // namespace heston

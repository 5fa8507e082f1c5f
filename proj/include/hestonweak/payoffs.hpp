#pragma once

#include <array>
#include <functional>
#include <string>

#include "hestonweak/core.hpp"

namespace heston {

enum class PayoffKind { put, smoothed_put, indicator, call, custom };

/// A scalar functional of the terminal price s = exp(x_N). All built-in
/// payoffs carry the discount factor e^{-mu T} inside the functional:
///   put        s -> e^{-mu T} max(K - s, 0)
///   indicator  s -> e^{-mu T} 1{s <= K}      (boundary pays)
///   call       s -> e^{-mu T} max(s - K, 0)
///   smoothed_put: equals the put outside [0.9K, 1.1K]; on that interval a
///   degree-7 polynomial bridge matches the put's value and first three
///   derivatives at both endpoints, making the functional C^3.
struct PayoffSpec {
    PayoffKind kind;
    double strike;
    double discount;
    // Bridge coefficients c[j] of z^j in the scaled variable
    // z = (s - K) / (0.1 K) on [-1, 1]; populated only for smoothed_put.
    std::array<double, 8> smoothing_poly{};
    std::function<double(double)> custom_fn;
};

[[nodiscard]] PayoffSpec make_put(double strike, double mu, double t_horizon);
[[nodiscard]] PayoffSpec make_indicator(double strike, double mu,
                                        double t_horizon);
[[nodiscard]] PayoffSpec make_call(double strike, double mu, double t_horizon);
[[nodiscard]] PayoffSpec make_custom(std::function<double(double)> fn);

/// Solves the 8x8 linear system for the unique degree-7 bridge and verifies
/// the eight matching conditions to 1e-9 relative before returning. Throws
/// std::runtime_error with a condition estimate if the solve or the
/// verification fails.
[[nodiscard]] PayoffSpec make_smoothed_put(double strike, double mu,
                                           double t_horizon);

/// CLI names: "put", "smoothed-put", "indicator", "call".
[[nodiscard]] PayoffSpec payoff_from_name(const std::string& name,
                                          double strike, double mu,
                                          double t_horizon);
[[nodiscard]] const char* payoff_name(PayoffKind kind);

/// Payoff value at price s >= 0.
[[nodiscard]] double evaluate(const PayoffSpec& spec, double s);

/// False for call and custom. Unbounded payoffs are exposed to the Heston
/// moment explosion; estimates of them carry that caveat.
[[nodiscard]] bool is_bounded(const PayoffSpec& spec);

}  // namespace heston

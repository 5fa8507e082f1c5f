#include "hestonweak/payoffs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

namespace heston {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

double discount_factor(double mu, double t_horizon) {
    require(t_horizon > 0.0, "payoff requires t_horizon > 0");
    return std::exp(-mu * t_horizon);
}

// Solves A x = b in place by partial-pivot LU. cond_estimate receives
// max|U_ii| / min|U_ii|, a cheap singularity indicator.
template <int n>
std::array<double, n> solve_linear(std::array<std::array<double, n>, n> a,
                                   std::array<double, n> b,
                                   double* cond_estimate) {
    std::array<int, n> perm;
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (a[col][col] == 0.0) {
            if (cond_estimate != nullptr) {
                *cond_estimate = std::numeric_limits<double>::infinity();
            }
            throw std::runtime_error("singular matrix in linear solve");
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            a[r][col] = 0.0;
            for (int c = col + 1; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    if (cond_estimate != nullptr) {
        double umax = 0.0;
        double umin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double m = std::fabs(a[i][i]);
            umax = std::max(umax, m);
            umin = std::min(umin, m);
        }
        *cond_estimate = umax / umin;
    }
    std::array<double, n> x{};
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Value of d^m/dz^m sum_j c_j z^j at z.
double poly_derivative(const std::array<double, 8>& c, int m, double z) {
    double acc = 0.0;
    for (int j = 7; j >= m; --j) {
        double f = 1.0;
        for (int k = 0; k < m; ++k) f *= static_cast<double>(j - k);
        acc = acc * z + f * c[j];
    }
    return acc;
}

double bridge_poly(const std::array<double, 8>& c, double z) {
    double acc = 0.0;
    for (int j = 7; j >= 0; --j) acc = acc * z + c[j];
    return acc;
}

}  // namespace

PayoffSpec make_put(double strike, double mu, double t_horizon) {
    require(strike > 0.0, "payoff requires strike > 0");
    return {PayoffKind::put, strike, discount_factor(mu, t_horizon), {}, {}};
}

PayoffSpec make_indicator(double strike, double mu, double t_horizon) {
    require(strike > 0.0, "payoff requires strike > 0");
    return {PayoffKind::indicator, strike, discount_factor(mu, t_horizon),
            {},
            {}};
}

PayoffSpec make_call(double strike, double mu, double t_horizon) {
    require(strike > 0.0, "payoff requires strike > 0");
    return {PayoffKind::call, strike, discount_factor(mu, t_horizon), {}, {}};
}

PayoffSpec make_custom(std::function<double(double)> fn) {
    if (!fn) throw std::invalid_argument("custom payoff requires a function");
    return {PayoffKind::custom, 1.0, 1.0, {}, std::move(fn)};
}

PayoffSpec make_smoothed_put(double strike, double mu, double t_horizon) {
    require(strike > 0.0, "payoff requires strike > 0");
    const double disc = discount_factor(mu, t_horizon);

    // Matching conditions in z = (s - K)/(0.1 K): the put has value 0.1 K D
    // and z-derivative -0.1 K D at z = -1 (second and third derivatives 0),
    // and vanishes to third order at z = +1.
    const double scale = 0.1 * strike * disc;
    std::array<std::array<double, 8>, 8> a{};
    std::array<double, 8> rhs{};
    int row = 0;
    for (const double z : {-1.0, 1.0}) {
        for (int m = 0; m < 4; ++m, ++row) {
            for (int j = 0; j < 8; ++j) {
                double f = 1.0;
                for (int k = 0; k < m; ++k) f *= static_cast<double>(j - k);
                a[row][j] = (j >= m) ? f * std::pow(z, j - m) : 0.0;
            }
        }
    }
    rhs[0] = scale;
    rhs[1] = -scale;

    double cond = 0.0;
    std::array<double, 8> coeffs;
    try {
        coeffs = solve_linear<8>(a, rhs, &cond);
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "smoothed-put bridge solve failed: singular system");
    }

    // The eight conditions must be reproduced to 1e-9 relative to the
    // 0.1 K D payoff scale.
    const double tol = 1e-9 * scale;
    const double targets[2][4] = {{scale, -scale, 0.0, 0.0},
                                  {0.0, 0.0, 0.0, 0.0}};
    int idx = 0;
    for (const double z : {-1.0, 1.0}) {
        for (int m = 0; m < 4; ++m) {
            const double got = poly_derivative(coeffs, m, z);
            if (std::fabs(got - targets[idx][m]) > tol) {
                char msg[160];
                std::snprintf(msg, sizeof(msg),
                              "smoothed-put bridge verification failed "
                              "(condition estimate %.3g)",
                              cond);
                throw std::runtime_error(msg);
            }
        }
        ++idx;
    }

    return {PayoffKind::smoothed_put, strike, disc, coeffs, {}};
}

PayoffSpec payoff_from_name(const std::string& name, double strike, double mu,
                            double t_horizon) {
    if (name == "put") return make_put(strike, mu, t_horizon);
    if (name == "smoothed-put") return make_smoothed_put(strike, mu, t_horizon);
    if (name == "indicator") return make_indicator(strike, mu, t_horizon);
    if (name == "call") return make_call(strike, mu, t_horizon);
    throw std::invalid_argument("unknown payoff: " + name);
}

const char* payoff_name(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::put: return "put";
        case PayoffKind::smoothed_put: return "smoothed-put";
        case PayoffKind::indicator: return "indicator";
        case PayoffKind::call: return "call";
        case PayoffKind::custom: return "custom";
    }
    throw std::logic_error("unreachable payoff kind");
}

double evaluate(const PayoffSpec& spec, double s) {
    const double k = spec.strike;
    switch (spec.kind) {
        case PayoffKind::put:
            return spec.discount * std::max(k - s, 0.0);
        case PayoffKind::smoothed_put: {
            // Branch on the bridge coordinate itself so the endpoints land
            // in the exact outer formulas (0.9 k and 1.1 k round away from
            // the grid points the bridge was solved on).
            const double z = (s - k) / (0.1 * k);
            if (z <= -1.0) return spec.discount * (k - s);
            if (z >= 1.0) return 0.0;
            return bridge_poly(spec.smoothing_poly, z);
        }
        case PayoffKind::indicator:
            return s <= k ? spec.discount : 0.0;
        case PayoffKind::call:
            return spec.discount * std::max(s - k, 0.0);
        case PayoffKind::custom:
            return spec.custom_fn(s);
    }
    throw std::logic_error("unreachable payoff kind");
}

bool is_bounded(const PayoffSpec& spec) {
    return spec.kind != PayoffKind::call && spec.kind != PayoffKind::custom;
}

}  // namespace heston

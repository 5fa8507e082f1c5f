#include "hestonweak/schemes.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace heston {

Scheme scheme_from_name(const std::string& name) {
    if (name == "milstein-d") return Scheme::milstein_d;
    if (name == "milstein-d-trunc") return Scheme::milstein_d_trunc;
    if (name == "sqrt-euler") return Scheme::sqrt_euler;
    throw std::invalid_argument("unknown scheme: " + name);
}

const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::milstein_d: return "milstein-d";
        case Scheme::milstein_d_trunc: return "milstein-d-trunc";
        case Scheme::sqrt_euler: return "sqrt-euler";
    }
    throw std::logic_error("unreachable scheme value");
}

double milstein_v_step(double v, const NoiseIncrement& noise,
                       const HestonParams& params) {
    const double y = std::sqrt(v) + 0.5 * params.theta * noise.dw;
    const double num = y * y + cir_drift_excess(params) * noise.dt;
    return num / (1.0 + params.kappa * noise.dt);
}

double milstein_v_step_truncated(double v, const NoiseIncrement& noise,
                                 const HestonParams& params) {
    // Bit-identical to the untruncated update while v stays nonnegative.
    if (v >= 0.0) return milstein_v_step(v, noise, params);
    const double y = 0.5 * params.theta * noise.dw;
    const double num = v + y * y + cir_drift_excess(params) * noise.dt;
    return num / (1.0 + params.kappa * noise.dt);
}

PathState scheme_d_step(const PathState& state, const NoiseIncrement& noise,
                        const HestonParams& params, bool truncated) {
    const double v_plus = truncated ? std::max(state.v, 0.0) : state.v;
    const double vol = std::sqrt(v_plus);
    const double rho = params.rho;
    const double ortho = std::sqrt(1.0 - rho * rho);
    PathState next;
    // The log-price drift keeps the raw v even under truncation.
    next.x = state.x + (params.mu - 0.5 * state.v) * noise.dt +
             vol * (rho * noise.dw + ortho * noise.db);
    next.v = truncated ? milstein_v_step_truncated(state.v, noise, params)
                       : milstein_v_step(state.v, noise, params);
    return next;
}

CirState sqrt_euler_step(const CirState& state, const NoiseIncrement& noise,
                         const HestonParams& params) {
    const double excess = cir_drift_excess(params);
    if (excess < 0.0) {
        throw std::invalid_argument(
            "sqrt-euler requires kappa*lambda >= theta^2/4");
    }
    const double denom = 2.0 + params.kappa * noise.dt;
    const double y = std::sqrt(state.a) + 0.5 * params.theta * noise.dw;
    const double half = y / denom;
    const double root = std::sqrt(half * half + excess * noise.dt / denom);
    const double s = half + root;
    return {s * s};
}

namespace {

void check_noise(const TimeGrid& grid, std::span<const NoiseIncrement> noise) {
    if (noise.size() != grid.n_steps()) {
        throw std::invalid_argument("noise stream length does not match grid");
    }
    for (std::size_t k = 0; k < noise.size(); ++k) {
        if (noise[k].dt != grid.step(k)) {
            throw std::invalid_argument(
                "noise increment dt does not match grid step");
        }
    }
}

}  // namespace

PathState simulate_path(const TimeGrid& grid, const HestonParams& params,
                        std::span<const NoiseIncrement> noise, Scheme scheme,
                        std::vector<PathState>* record) {
    if (scheme == Scheme::sqrt_euler) {
        throw std::invalid_argument(
            "sqrt-euler approximates the variance only; use simulate_cir_path");
    }
    check_noise(grid, noise);
    const bool truncated = is_truncated(scheme);
    PathState state{std::log(params.s0), params.v0};
    if (record != nullptr) {
        record->clear();
        record->reserve(noise.size() + 1);
        record->push_back(state);
    }
    for (const NoiseIncrement& inc : noise) {
        state = scheme_d_step(state, inc, params, truncated);
        if (record != nullptr) record->push_back(state);
    }
    return state;
}

CirState simulate_cir_path(const TimeGrid& grid, const HestonParams& params,
                           std::span<const NoiseIncrement> noise,
                           std::vector<CirState>* record) {
    check_noise(grid, noise);
    CirState state{params.v0};
    if (record != nullptr) {
        record->clear();
        record->reserve(noise.size() + 1);
        record->push_back(state);
    }
    for (const NoiseIncrement& inc : noise) {
        state = sqrt_euler_step(state, inc, params);
        if (record != nullptr) record->push_back(state);
    }
    return state;
}

}  // namespace heston

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace heston {

/// Constants of the (log-)Heston model
///   dS = mu S dt + sqrt(V) S (rho dW + sqrt(1-rho^2) dB)
///   dV = kappa (lambda - V) dt + theta sqrt(V) dW
/// on [0, t_horizon]. Validated at construction; immutable afterwards.
struct HestonParams {
    double s0;         // initial asset price, > 0
    double v0;         // initial variance, > 0
    double mu;         // drift rate
    double kappa;      // mean-reversion speed, > 0
    double lambda;     // long-run variance level, > 0
    double theta;      // vol-of-vol, > 0
    double rho;        // correlation, in [-1, 1]
    double t_horizon;  // maturity, > 0

    HestonParams(double s0, double v0, double mu, double kappa, double lambda,
                 double theta, double rho, double t_horizon);
};

/// Classification of a parameter set by its Feller index nu = 2*kappa*lambda/theta^2.
struct FellerReport {
    double nu;
    bool satisfies_f;         // nu > 2
    bool satisfies_fmin;      // nu > 1/2
    bool scheme_well_defined; // 4*kappa*lambda/theta^2 >= 1
};

[[nodiscard]] FellerReport feller_report(const HestonParams& params);

/// kappa*lambda - theta^2/4. Nonnegative exactly when the implicit Milstein
/// variance update and the square-root Euler scheme are well defined. Shared
/// by the steppers and the per-step lower-bound check so both evaluate the
/// same floating-point expression.
[[nodiscard]] inline double cir_drift_excess(const HestonParams& p) {
    return p.kappa * p.lambda - 0.25 * p.theta * p.theta;
}

/// Discretization 0 = t_0 < t_1 < ... < t_N = T of [0, T].
class TimeGrid {
public:
    /// N+1 equally spaced points on [0, T]; rejects n_steps == 0. Every
    /// step() of a uniform grid is exactly the rounded T/N.
    static TimeGrid uniform(double t_horizon, std::size_t n_steps);

    /// General grid from explicit times; validates ordering and times[0] == 0.
    explicit TimeGrid(std::vector<double> times);

    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] const std::vector<double>& steps() const { return steps_; }
    [[nodiscard]] std::size_t n_steps() const { return steps_.size(); }
    [[nodiscard]] double step(std::size_t k) const { return steps_[k]; }
    [[nodiscard]] double max_step() const { return max_step_; }
    [[nodiscard]] double horizon() const { return times_.back(); }

private:
    std::vector<double> times_;
    std::vector<double> steps_;
    double max_step_ = 0.0;
};

/// Built-in parameter sets "model1", "model2", "model3".
[[nodiscard]] HestonParams preset(const std::string& name);
[[nodiscard]] bool is_preset_name(const std::string& name);

/// JSON parameter files with keys s0, v0, mu, kappa, lambda, theta, rho, T.
[[nodiscard]] HestonParams params_from_json(const std::string& text);
[[nodiscard]] HestonParams load_params_file(const std::string& path);
[[nodiscard]] std::string params_to_json(const HestonParams& params);

/// Resolves either a preset name or a path to a JSON parameter file.
[[nodiscard]] HestonParams resolve_model(const std::string& name_or_path);

}  // namespace heston

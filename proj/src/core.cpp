#include "hestonweak/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace heston {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

HestonParams::HestonParams(double s0_, double v0_, double mu_, double kappa_,
                           double lambda_, double theta_, double rho_,
                           double t_horizon_)
    : s0(s0_), v0(v0_), mu(mu_), kappa(kappa_), lambda(lambda_), theta(theta_),
      rho(rho_), t_horizon(t_horizon_) {
    require(std::isfinite(s0) && s0 > 0.0, "s0 must be positive");
    require(std::isfinite(v0) && v0 > 0.0, "v0 must be positive");
    require(std::isfinite(mu), "mu must be finite");
    require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
    require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive");
    require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
    require(std::isfinite(rho) && rho >= -1.0 && rho <= 1.0,
            "rho must lie in [-1, 1]");
    require(std::isfinite(t_horizon) && t_horizon > 0.0,
            "t_horizon must be positive");
}

FellerReport feller_report(const HestonParams& params) {
    const double nu =
        2.0 * params.kappa * params.lambda / (params.theta * params.theta);
    FellerReport report;
    report.nu = nu;
    report.satisfies_f = nu > 2.0;
    report.satisfies_fmin = nu > 0.5;
    report.scheme_well_defined = 2.0 * nu >= 1.0;
    return report;
}

TimeGrid TimeGrid::uniform(double t_horizon, std::size_t n_steps) {
    require(std::isfinite(t_horizon) && t_horizon > 0.0,
            "t_horizon must be positive");
    require(n_steps >= 1, "n_steps must be at least 1");
    std::vector<double> times(n_steps + 1);
    const double n = static_cast<double>(n_steps);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        times[k] = t_horizon * (static_cast<double>(k) / n);
    }
    times.back() = t_horizon;
    TimeGrid grid(std::move(times));
    // The steppers consume step(k), and a uniform grid means Delta = T/N in
    // every step, so the step array holds the rounded T/N itself rather
    // than differences of rounded grid points (which drift by n ulps).
    const double dt = t_horizon / n;
    std::fill(grid.steps_.begin(), grid.steps_.end(), dt);
    grid.max_step_ = dt;
    return grid;
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    require(times_.size() >= 2, "grid needs at least two time points");
    require(times_.front() == 0.0, "grid must start at 0");
    steps_.resize(times_.size() - 1);
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
        require(std::isfinite(times_[k + 1]) && times_[k + 1] > times_[k],
                "grid times must be strictly increasing");
        steps_[k] = times_[k + 1] - times_[k];
        max_step_ = std::max(max_step_, steps_[k]);
    }
}

HestonParams preset(const std::string& name) {
    if (name == "model1")
        return {100.0, 0.0457, 0.0, 5.07, 0.0457, 0.48, -0.767, 2.0};
    if (name == "model2")
        return {100.0, 0.010201, 0.0319, 6.21, 0.019, 0.61, -0.7, 1.0};
    if (name == "model3")
        return {100.0, 0.09, 0.05, 2.0, 0.09, 1.0, -0.3, 5.0};
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected model1, model2 or model3)");
}

bool is_preset_name(const std::string& name) {
    return name == "model1" || name == "model2" || name == "model3";
}

HestonParams params_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid parameter JSON: ") +
                                    e.what());
    }
    for (const char* key :
         {"s0", "v0", "mu", "kappa", "lambda", "theta", "rho", "T"}) {
        if (!j.contains(key) || !j[key].is_number()) {
            throw std::invalid_argument(
                std::string("parameter file missing numeric key '") + key + "'");
        }
    }
    return {j["s0"].get<double>(),    j["v0"].get<double>(),
            j["mu"].get<double>(),    j["kappa"].get<double>(),
            j["lambda"].get<double>(), j["theta"].get<double>(),
            j["rho"].get<double>(),   j["T"].get<double>()};
}

HestonParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open parameter file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_json(buf.str());
}

std::string params_to_json(const HestonParams& p) {
    nlohmann::json j{{"s0", p.s0},         {"v0", p.v0},     {"mu", p.mu},
                     {"kappa", p.kappa},   {"lambda", p.lambda},
                     {"theta", p.theta},   {"rho", p.rho},
                     {"T", p.t_horizon}};
    return j.dump(2);
}

HestonParams resolve_model(const std::string& name_or_path) {
    if (is_preset_name(name_or_path)) return preset(name_or_path);
    return load_params_file(name_or_path);
}

}  // namespace heston

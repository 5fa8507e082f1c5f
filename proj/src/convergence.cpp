#include "hestonweak/convergence.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace heston {

namespace {

enum class RefMode { analytic_ref, self_ref };

RefMode resolve_reference(ReferenceKind kind, PayoffKind payoff) {
    const bool has_analytic = payoff == PayoffKind::put ||
                              payoff == PayoffKind::indicator ||
                              payoff == PayoffKind::call;
    switch (kind) {
        case ReferenceKind::automatic:
            return has_analytic ? RefMode::analytic_ref : RefMode::self_ref;
        case ReferenceKind::analytic:
            if (!has_analytic) {
                throw std::invalid_argument(
                    "no analytic reference for this functional; use the "
                    "fine-grid reference");
            }
            return RefMode::analytic_ref;
        case ReferenceKind::self_fine_grid:
            return RefMode::self_ref;
    }
    throw std::logic_error("unreachable reference kind");
}

double analytic_reference(const HestonParams& model, const PayoffSpec& payoff,
                          const QuadratureConfig& quad) {
    switch (payoff.kind) {
        case PayoffKind::put:
            return put_price(model, payoff.strike, quad).value;
        case PayoffKind::indicator:
            return digital_price(model, payoff.strike, quad).value;
        case PayoffKind::call:
            return call_price(model, payoff.strike, quad).value;
        default:
            throw std::logic_error("analytic reference for unpriced payoff");
    }
}

void validate_config(const StudyConfig& cfg, std::size_t n_functionals) {
    if (n_functionals == 0) {
        throw std::invalid_argument("study requires at least one functional");
    }
    if (cfg.step_counts.empty()) {
        throw std::invalid_argument("study requires at least one step count");
    }
    int prev = 0;
    for (const int n : cfg.step_counts) {
        if (n <= prev) {
            throw std::invalid_argument(
                "step_counts must be strictly increasing and positive");
        }
        prev = n;
    }
    if (cfg.n_paths < 2) throw std::invalid_argument("n_paths must be >= 2");
    if (cfg.n_workers < 1) {
        throw std::invalid_argument("n_workers must be >= 1");
    }
}

struct PayoffPlan {
    RefMode mode;
    double reference = 0.0;
    bool reference_known = false;
};

}  // namespace

RateFit fit_rate(std::span<const StudyRow> rows,
                 std::span<const std::size_t> subset) {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<int> used;
    for (const std::size_t idx : subset) {
        if (idx >= rows.size()) {
            throw std::invalid_argument("fit subset index out of range");
        }
        const StudyRow& row = rows[idx];
        if (!(row.abs_error > 0.0)) continue;
        xs.push_back(std::log2(row.delta));
        ys.push_back(std::log2(row.abs_error));
        used.push_back(row.n_steps);
    }
    const std::size_t n = xs.size();
    if (n < 2) {
        throw std::invalid_argument("fewer than 2 usable rows for rate fit");
    }
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x_mean += xs[i];
        y_mean += ys[i];
    }
    x_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - x_mean;
        sxx += dx * dx;
        sxy += dx * (ys[i] - y_mean);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("rate fit needs at least two distinct "
                                    "step sizes");
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss);
    fit.used_steps = std::move(used);
    return fit;
}

RateFit fit_rate_default(std::span<const StudyRow> rows) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].noise_dominated) subset.push_back(i);
    }
    return fit_rate(rows, subset);
}

std::vector<StudyResult> run_study_batch(
    const StudyConfig& cfg, std::span<const PayoffSpec> functionals,
    std::span<const std::string> functional_names,
    const LevelCallback& on_level,
    std::span<const std::vector<StudyRow>> precomputed) {
    validate_config(cfg, functionals.size());
    if (functional_names.size() != functionals.size()) {
        throw std::invalid_argument("one name per functional is required");
    }
    if (!precomputed.empty() && precomputed.size() != functionals.size()) {
        throw std::invalid_argument(
            "precomputed rows must be given per functional");
    }
    const std::size_t n_payoffs = functionals.size();
    const std::size_t n_levels = cfg.step_counts.size();
    const RngStreamSpec rng{cfg.seed};

    std::vector<PayoffPlan> plans(n_payoffs);
    bool need_fine_run = false;
    for (std::size_t p = 0; p < n_payoffs; ++p) {
        plans[p].mode = resolve_reference(cfg.reference, functionals[p].kind);
        if (plans[p].mode == RefMode::analytic_ref) {
            plans[p].reference =
                analytic_reference(cfg.model, functionals[p], cfg.quad);
            plans[p].reference_known = true;
        } else if (!precomputed.empty() && !precomputed[p].empty()) {
            // All rows of a study share one reference; reuse the stored one
            // so a resumed run reproduces the original bytes.
            plans[p].reference = precomputed[p][0].reference;
            plans[p].reference_known = true;
        } else {
            need_fine_run = true;
        }
    }

    if (need_fine_run) {
        if (cfg.fine_grid_steps <= cfg.step_counts.back()) {
            throw std::invalid_argument(
                "fine-grid reference needs more steps than the largest "
                "study level");
        }
        const std::int64_t fine_paths =
            cfg.fine_grid_paths > 0 ? cfg.fine_grid_paths : cfg.n_paths;
        std::vector<PayoffSpec> fine_payoffs;
        std::vector<std::size_t> fine_slots;
        for (std::size_t p = 0; p < n_payoffs; ++p) {
            if (!plans[p].reference_known) {
                fine_payoffs.push_back(functionals[p]);
                fine_slots.push_back(p);
            }
        }
        const TimeGrid fine_grid = TimeGrid::uniform(
            cfg.model.t_horizon, static_cast<std::size_t>(cfg.fine_grid_steps));
        McOptions opts;
        opts.n_workers = cfg.n_workers;
        opts.path_offset =
            static_cast<std::int64_t>(n_levels) * cfg.n_paths;
        const auto fine = estimate_multi(cfg.model, fine_grid, fine_payoffs,
                                         cfg.scheme, fine_paths, rng, opts);
        for (std::size_t j = 0; j < fine_slots.size(); ++j) {
            plans[fine_slots[j]].reference = fine[j].mean;
            plans[fine_slots[j]].reference_known = true;
        }
    }

    std::vector<std::vector<StudyRow>> rows(
        n_payoffs, std::vector<StudyRow>(n_levels));
    for (std::size_t i = 0; i < n_levels; ++i) {
        const int n_steps = cfg.step_counts[i];

        bool have_all = !precomputed.empty();
        for (std::size_t p = 0; have_all && p < n_payoffs; ++p) {
            bool found = false;
            for (const StudyRow& r : precomputed[p]) {
                if (r.n_steps == n_steps) {
                    rows[p][i] = r;
                    found = true;
                    break;
                }
            }
            have_all = found;
        }
        if (have_all) continue;

        const TimeGrid grid = TimeGrid::uniform(
            cfg.model.t_horizon, static_cast<std::size_t>(n_steps));
        McOptions opts;
        opts.n_workers = cfg.n_workers;
        opts.path_offset = static_cast<std::int64_t>(i) * cfg.n_paths;
        const auto ests = estimate_multi(cfg.model, grid, functionals,
                                         cfg.scheme, cfg.n_paths, rng, opts);
        std::vector<StudyRow> level_rows(n_payoffs);
        for (std::size_t p = 0; p < n_payoffs; ++p) {
            StudyRow row;
            row.n_steps = n_steps;
            row.delta = cfg.model.t_horizon / static_cast<double>(n_steps);
            row.estimate = ests[p].mean;
            row.std_error = ests[p].std_error;
            row.reference = plans[p].reference;
            row.abs_error = std::fabs(row.estimate - row.reference);
            row.noise_dominated = row.std_error > row.abs_error;
            rows[p][i] = row;
            level_rows[p] = row;
        }
        if (on_level) on_level(i, level_rows);
    }

    const double nu = feller_report(cfg.model).nu;
    std::vector<StudyResult> results(n_payoffs);
    for (std::size_t p = 0; p < n_payoffs; ++p) {
        StudyResult& res = results[p];
        res.model_name = cfg.model_name;
        res.functional_name = functional_names[p];
        res.scheme = cfg.scheme;
        res.nu = nu;
        res.rows = std::move(rows[p]);
        try {
            res.fit = fit_rate_default(res.rows);
            res.degenerate_fit = false;
        } catch (const std::invalid_argument&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            res.fit = {nan, nan, nan, {}};
            res.degenerate_fit = true;
        }
    }
    return results;
}

StudyResult run_study(const StudyConfig& cfg, const LevelCallback& on_level) {
    const std::string name = cfg.functional_name.empty()
                                 ? payoff_name(cfg.functional.kind)
                                 : cfg.functional_name;
    auto results = run_study_batch(cfg, std::span(&cfg.functional, 1),
                                   std::span(&name, 1), on_level);
    return std::move(results[0]);
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_header() {
    return "model,functional,scheme,N,delta,estimate,std_error,reference,"
           "abs_error\n";
}

std::string csv_row_line(const std::string& model,
                         const std::string& functional, Scheme scheme,
                         const StudyRow& row) {
    std::string line;
    line += model;
    line += ',';
    line += functional;
    line += ',';
    line += scheme_name(scheme);
    line += ',';
    line += std::to_string(row.n_steps);
    line += ',';
    line += format_g17(row.delta);
    line += ',';
    line += format_g17(row.estimate);
    line += ',';
    line += format_g17(row.std_error);
    line += ',';
    line += format_g17(row.reference);
    line += ',';
    line += format_g17(row.abs_error);
    line += '\n';
    return line;
}

std::string summary_header() {
    return "model,functional,nu,fitted_rate,residual\n";
}

std::string summary_line(const StudyResult& result) {
    std::string line;
    line += result.model_name;
    line += ',';
    line += result.functional_name;
    line += ',';
    line += format_g17(result.nu);
    line += ',';
    line += format_g17(result.fit.slope);
    line += ',';
    line += format_g17(result.fit.residual);
    line += '\n';
    return line;
}

std::string plot_dat(const StudyResult& result) {
    std::string out;
    out += "# ";
    out += result.model_name;
    out += ' ';
    out += result.functional_name;
    out += ' ';
    out += scheme_name(result.scheme);
    out += "\n# log2(delta) log2(abs_error)\n";
    for (const StudyRow& row : result.rows) {
        if (!(row.abs_error > 0.0)) continue;
        out += format_g17(std::log2(row.delta));
        out += ' ';
        out += format_g17(std::log2(row.abs_error));
        out += '\n';
    }
    return out;
}

std::vector<CsvEntry> read_rows_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty CSV input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string expected = csv_header();
    expected.pop_back();
    if (line != expected) {
        throw std::invalid_argument("unrecognized CSV header: " + line);
    }
    std::vector<CsvEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9) {
            throw std::invalid_argument("malformed CSV line " +
                                        std::to_string(line_no));
        }
        CsvEntry entry;
        entry.model = fields[0];
        entry.functional = fields[1];
        entry.scheme = fields[2];
        try {
            entry.row.n_steps = std::stoi(fields[3]);
            entry.row.delta = std::stod(fields[4]);
            entry.row.estimate = std::stod(fields[5]);
            entry.row.std_error = std::stod(fields[6]);
            entry.row.reference = std::stod(fields[7]);
            entry.row.abs_error = std::stod(fields[8]);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed CSV line " +
                                        std::to_string(line_no));
        }
        entry.row.noise_dominated = entry.row.std_error > entry.row.abs_error;
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace heston

#include "hestonweak/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hestonweak/analytic.hpp"
#include "hestonweak/convergence.hpp"
#include "hestonweak/core.hpp"
#include "hestonweak/montecarlo.hpp"
#include "hestonweak/payoffs.hpp"
#include "hestonweak/rng.hpp"
#include "hestonweak/schemes.hpp"
#include "hestonweak/version.hpp"

namespace heston {

namespace {

constexpr int kOk = 0;
constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

struct ModelChoice {
    std::string preset_name;
    std::string params_file;

    [[nodiscard]] std::pair<HestonParams, std::string> resolve() const {
        if (!preset_name.empty() && !params_file.empty()) {
            throw std::invalid_argument(
                "--model and --params-file are mutually exclusive");
        }
        if (!preset_name.empty()) {
            return {preset(preset_name), preset_name};
        }
        if (!params_file.empty()) {
            return {load_params_file(params_file), "custom"};
        }
        throw std::invalid_argument("one of --model or --params-file is "
                                    "required");
    }
};

void add_model_options(CLI::App* cmd, ModelChoice* choice) {
    cmd->add_option("--model", choice->preset_name,
                    "Built-in parameter set: model1, model2, model3");
    cmd->add_option("--params-file", choice->params_file,
                    "JSON parameter file (keys s0, v0, mu, kappa, lambda, "
                    "theta, rho, T)");
}

int default_workers() {
    const char* env = std::getenv("HESTON_WEAK_WORKERS");
    if (env == nullptr) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed) {
    if (seed_given) return seed;
    std::random_device rd;
    const std::uint64_t drawn =
        (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed " << drawn << " (drawn; pass --seed to reproduce)\n";
    return drawn;
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() +
                                 " for writing");
    }
    out << text;
    if (!out.flush()) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

// ---- price ----

struct PriceArgs {
    ModelChoice model;
    std::string payoff = "put";
    double strike = 0.0;
    bool strike_given = false;
    QuadratureConfig quad;
    bool json = false;
};

int cmd_price(const PriceArgs& args) {
    const auto [params, model_name] = args.model.resolve();
    const double strike = args.strike_given ? args.strike : params.s0;
    ReferencePrice price;
    if (args.payoff == "put") {
        price = put_price(params, strike, args.quad);
    } else if (args.payoff == "call") {
        price = call_price(params, strike, args.quad);
    } else if (args.payoff == "indicator") {
        price = digital_price(params, strike, args.quad);
    } else if (args.payoff == "smoothed-put") {
        throw std::invalid_argument(
            "no analytic reference for smoothed-put; use converge with the "
            "fine-grid reference");
    } else {
        throw std::invalid_argument("unknown payoff: " + args.payoff);
    }
    if (args.json) {
        nlohmann::ordered_json out;
        out["model"] = model_name;
        out["payoff"] = args.payoff;
        out["strike"] = strike;
        out["value"] = price.value;
        out["est_error"] = price.est_error;
        if (price.p1) out["p1"] = *price.p1;
        if (price.p2) out["p2"] = *price.p2;
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << "model " << model_name << "\npayoff " << args.payoff
                  << "\nstrike " << format_g17(strike) << "\nvalue "
                  << format_g17(price.value) << "\nest_error "
                  << format_g17(price.est_error) << '\n';
        if (price.p1) std::cout << "p1 " << format_g17(*price.p1) << '\n';
        if (price.p2) std::cout << "p2 " << format_g17(*price.p2) << '\n';
    }
    return kOk;
}

// ---- simulate ----

struct SimulateArgs {
    ModelChoice model;
    std::string payoff = "put";
    std::string scheme = "milstein-d";
    double strike = 0.0;
    bool strike_given = false;
    int steps = 256;
    std::int64_t paths = 100000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    bool json = false;
};

int cmd_simulate(const SimulateArgs& args) {
    const auto [params, model_name] = args.model.resolve();
    const double strike = args.strike_given ? args.strike : params.s0;
    if (args.steps < 1) throw std::invalid_argument("--steps must be >= 1");
    const PayoffSpec payoff =
        payoff_from_name(args.payoff, strike, params.mu, params.t_horizon);
    const Scheme scheme = scheme_from_name(args.scheme);
    const std::uint64_t seed = resolve_seed(args.seed_given, args.seed);
    const TimeGrid grid = TimeGrid::uniform(
        params.t_horizon, static_cast<std::size_t>(args.steps));
    McOptions opts;
    opts.n_workers = args.workers;
    const McEstimate est = estimate(params, grid, payoff, scheme, args.paths,
                                    RngStreamSpec{seed}, opts);
    if (args.json) {
        nlohmann::ordered_json out;
        out["model"] = model_name;
        out["payoff"] = args.payoff;
        out["scheme"] = args.scheme;
        out["strike"] = strike;
        out["n_steps"] = est.n_steps;
        out["n_paths"] = est.n_paths;
        out["seed"] = seed;
        out["mean"] = est.mean;
        out["std_error"] = est.std_error;
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << "model " << model_name << "\npayoff " << args.payoff
                  << "\nscheme " << args.scheme << "\nstrike "
                  << format_g17(strike) << "\nn_steps " << est.n_steps
                  << "\nn_paths " << est.n_paths << "\nseed " << seed
                  << "\nmean " << format_g17(est.mean) << "\nstd_error "
                  << format_g17(est.std_error) << '\n';
    }
    return kOk;
}

// ---- converge ----

struct ConvergeArgs {
    ModelChoice model;
    std::vector<std::string> payoffs = {"put"};
    std::string scheme = "milstein-d";
    double strike = 0.0;
    bool strike_given = false;
    std::string levels = "1:256";
    std::int64_t paths = 1'000'000;
    int fine_steps = 1024;
    std::int64_t fine_paths = 0;
    std::string reference = "automatic";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    std::string out_dir = ".";
    std::string label;
    bool resume = false;
};

std::vector<int> parse_levels(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("--levels expects MIN:MAX");
    }
    int lo = 0;
    int hi = 0;
    try {
        lo = std::stoi(spec.substr(0, colon));
        hi = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("--levels expects MIN:MAX integers");
    }
    if (lo < 1 || hi < lo) {
        throw std::invalid_argument("--levels range is empty");
    }
    std::vector<int> out;
    int n = lo;
    for (;;) {
        out.push_back(n);
        if (n >= hi) break;
        if (n > std::numeric_limits<int>::max() / 2) {
            throw std::invalid_argument("--levels MAX is too large");
        }
        n *= 2;
    }
    if (out.back() != hi) {
        throw std::invalid_argument(
            "--levels MAX must be MIN times a power of 2");
    }
    return out;
}

ReferenceKind parse_reference(const std::string& name) {
    if (name == "automatic") return ReferenceKind::automatic;
    if (name == "analytic") return ReferenceKind::analytic;
    if (name == "self-fine-grid") return ReferenceKind::self_fine_grid;
    throw std::invalid_argument("unknown reference policy: " + name);
}

int cmd_converge(const ConvergeArgs& args) {
    const auto [params, model_name] = args.model.resolve();
    const double strike = args.strike_given ? args.strike : params.s0;
    if (args.payoffs.empty()) {
        throw std::invalid_argument("at least one --payoff is required");
    }

    StudyConfig cfg{.model = params};
    cfg.model_name = model_name;
    cfg.scheme = scheme_from_name(args.scheme);
    cfg.step_counts = parse_levels(args.levels);
    cfg.n_paths = args.paths;
    cfg.reference = parse_reference(args.reference);
    cfg.fine_grid_steps = args.fine_steps;
    cfg.fine_grid_paths = args.fine_paths;
    cfg.seed = resolve_seed(args.seed_given, args.seed);
    cfg.n_workers = args.workers;

    std::vector<PayoffSpec> functionals;
    std::vector<std::string> names;
    for (const std::string& name : args.payoffs) {
        functionals.push_back(
            payoff_from_name(name, strike, params.mu, params.t_horizon));
        names.push_back(name);
    }

    const std::filesystem::path out_dir(args.out_dir);
    std::filesystem::create_directories(out_dir);
    const std::string base =
        args.label.empty() ? model_name + "_" + args.scheme : args.label;
    const std::filesystem::path rows_path = out_dir / (base + "_rows.csv");
    const std::filesystem::path summary_path =
        out_dir / (base + "_summary.csv");
    const std::filesystem::path manifest_path =
        out_dir / (base + "_manifest.json");

    // Rows already on disk (from an interrupted run) are reused; their
    // levels keep the stream offsets they had in the full schedule, so a
    // resumed file ends up byte-identical to an uninterrupted one.
    std::vector<std::vector<StudyRow>> precomputed;
    if (args.resume && std::filesystem::exists(rows_path)) {
        std::ifstream in(rows_path);
        const std::vector<CsvEntry> entries = read_rows_csv(in);
        precomputed.assign(functionals.size(), {});
        for (const CsvEntry& entry : entries) {
            if (entry.model != model_name ||
                entry.scheme != args.scheme) {
                throw std::invalid_argument(
                    "existing rows CSV was produced by a different "
                    "configuration; remove it or change --label");
            }
            bool matched = false;
            for (std::size_t p = 0; p < names.size(); ++p) {
                if (entry.functional == names[p]) {
                    precomputed[p].push_back(entry.row);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                throw std::invalid_argument(
                    "existing rows CSV contains functional '" +
                    entry.functional + "' not in this run");
            }
        }
    }

    std::ofstream flush_out;
    if (args.resume && std::filesystem::exists(rows_path)) {
        flush_out.open(rows_path, std::ios::app);
    } else {
        flush_out.open(rows_path, std::ios::trunc);
        flush_out << csv_header();
    }
    if (!flush_out) {
        throw std::runtime_error("cannot open " + rows_path.string());
    }
    flush_out.flush();

    const LevelCallback on_level = [&](std::size_t level,
                                       std::span<const StudyRow> level_rows) {
        for (std::size_t p = 0; p < level_rows.size(); ++p) {
            flush_out << csv_row_line(model_name, names[p], cfg.scheme,
                                      level_rows[p]);
        }
        flush_out.flush();
        std::cout << "level " << (level + 1) << "/" << cfg.step_counts.size()
                  << " done (N=" << cfg.step_counts[level] << ")\n";
    };

    const std::vector<StudyResult> results = run_study_batch(
        cfg, functionals, names, on_level, precomputed);
    flush_out.close();

    // Canonical rewrite: levels ascending, functionals in request order.
    std::string rows_text = csv_header();
    for (std::size_t i = 0; i < cfg.step_counts.size(); ++i) {
        for (std::size_t p = 0; p < results.size(); ++p) {
            rows_text += csv_row_line(model_name, names[p], cfg.scheme,
                                      results[p].rows[i]);
        }
    }
    write_file(rows_path, rows_text);

    std::string summary_text = summary_header();
    for (const StudyResult& result : results) {
        summary_text += summary_line(result);
    }
    write_file(summary_path, summary_text);

    std::vector<std::string> plot_files;
    for (const StudyResult& result : results) {
        const std::filesystem::path plot_path =
            out_dir / (base + "_" + result.functional_name + ".dat");
        write_file(plot_path, plot_dat(result));
        plot_files.push_back(plot_path.string());
    }

    nlohmann::ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["command"] = "converge";
    manifest["timestamp"] = iso_timestamp();
    manifest["model"] = model_name;
    manifest["params"] = nlohmann::ordered_json::parse(params_to_json(params));
    manifest["payoffs"] = names;
    manifest["scheme"] = args.scheme;
    manifest["strike"] = strike;
    manifest["step_counts"] = cfg.step_counts;
    manifest["n_paths"] = cfg.n_paths;
    manifest["reference"] = args.reference;
    manifest["fine_grid_steps"] = cfg.fine_grid_steps;
    manifest["fine_grid_paths"] =
        cfg.fine_grid_paths > 0 ? cfg.fine_grid_paths : cfg.n_paths;
    manifest["seed"] = cfg.seed;
    manifest["workers"] = cfg.n_workers;
    manifest["outputs"]["rows"] = rows_path.string();
    manifest["outputs"]["summary"] = summary_path.string();
    manifest["outputs"]["plots"] = plot_files;
    write_file(manifest_path, manifest.dump(2) + "\n");

    for (const StudyResult& result : results) {
        std::cout << result.model_name << " " << result.functional_name << " "
                  << scheme_name(result.scheme);
        if (result.degenerate_fit) {
            std::cout << " degenerate fit (no usable rows)\n";
        } else {
            std::cout << " fitted_rate " << format_g17(result.fit.slope)
                      << " intercept " << format_g17(result.fit.intercept)
                      << " residual " << format_g17(result.fit.residual)
                      << '\n';
        }
    }
    std::cout << "wrote " << rows_path.string() << ", "
              << summary_path.string() << ", " << manifest_path.string()
              << '\n';
    return kOk;
}

// ---- fit ----

struct FitArgs {
    std::string csv_path;
    std::string levels;
};

int cmd_fit(const FitArgs& args) {
    std::ifstream in(args.csv_path);
    if (!in) {
        throw std::invalid_argument("cannot open " + args.csv_path);
    }
    const std::vector<CsvEntry> entries = read_rows_csv(in);
    int lo = 1;
    int hi = std::numeric_limits<int>::max();
    if (!args.levels.empty()) {
        const std::vector<int> range = parse_levels(args.levels);
        lo = range.front();
        hi = range.back();
    }

    // Group rows by (model, functional, scheme) in first-seen order.
    std::vector<std::tuple<std::string, std::string, std::string>> order;
    std::map<std::tuple<std::string, std::string, std::string>,
             std::vector<StudyRow>>
        groups;
    for (const CsvEntry& entry : entries) {
        if (entry.row.n_steps < lo || entry.row.n_steps > hi) continue;
        const auto key =
            std::make_tuple(entry.model, entry.functional, entry.scheme);
        if (groups.find(key) == groups.end()) order.push_back(key);
        groups[key].push_back(entry.row);
    }
    if (groups.empty()) {
        throw std::invalid_argument("no usable rows in " + args.csv_path);
    }
    for (const auto& key : order) {
        const RateFit fit = fit_rate_default(groups[key]);
        std::cout << std::get<0>(key) << " " << std::get<1>(key) << " "
                  << std::get<2>(key) << " fitted_rate "
                  << format_g17(fit.slope) << " intercept "
                  << format_g17(fit.intercept) << " residual "
                  << format_g17(fit.residual) << '\n';
    }
    return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Weak-error toolkit for the log-Heston discretization "
                 "schemes"};
    app.require_subcommand(1);

    PriceArgs price_args;
    CLI::App* price_cmd = app.add_subcommand(
        "price", "Semi-analytic reference price (call, put, indicator)");
    add_model_options(price_cmd, &price_args.model);
    price_cmd->add_option("--payoff", price_args.payoff,
                          "put, call, or indicator");
    price_cmd->add_option("--strike", price_args.strike,
                          "Strike K (default: S0)");
    price_cmd->add_option("--abs-tol", price_args.quad.abs_tol,
                          "Quadrature absolute tolerance");
    price_cmd->add_option("--max-nodes", price_args.quad.max_nodes,
                          "Quadrature node budget");
    price_cmd->add_flag("--json", price_args.json, "JSON output");

    SimulateArgs sim_args;
    sim_args.workers = default_workers();
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Single Monte Carlo estimate of E f(S_T)");
    add_model_options(sim_cmd, &sim_args.model);
    sim_cmd->add_option("--payoff", sim_args.payoff,
                        "put, smoothed-put, indicator, or call");
    sim_cmd->add_option("--scheme", sim_args.scheme,
                        "milstein-d, milstein-d-trunc, or sqrt-euler");
    sim_cmd->add_option("--strike", sim_args.strike, "Strike K (default: S0)");
    sim_cmd->add_option("--steps", sim_args.steps, "Number of grid steps");
    sim_cmd->add_option("--paths", sim_args.paths, "Number of paths");
    sim_cmd->add_option("--seed", sim_args.seed, "Master seed");
    sim_cmd->add_option("--workers", sim_args.workers, "Worker threads");
    sim_cmd->add_flag("--json", sim_args.json, "JSON output");

    ConvergeArgs conv_args;
    conv_args.workers = default_workers();
    CLI::App* conv_cmd = app.add_subcommand(
        "converge", "Weak-error sweep over step counts with rate fit");
    add_model_options(conv_cmd, &conv_args.model);
    conv_cmd->add_option("--payoff", conv_args.payoffs,
                         "Functionals to estimate (repeatable)");
    conv_cmd->add_option("--scheme", conv_args.scheme,
                         "milstein-d or milstein-d-trunc");
    conv_cmd->add_option("--strike", conv_args.strike,
                         "Strike K (default: S0)");
    conv_cmd->add_option("--levels", conv_args.levels,
                         "Step-count range MIN:MAX, doubling (default 1:256)");
    conv_cmd->add_option("--paths", conv_args.paths, "Paths per level");
    conv_cmd->add_option("--fine-steps", conv_args.fine_steps,
                         "Fine-grid steps for the self reference");
    conv_cmd->add_option("--fine-paths", conv_args.fine_paths,
                         "Fine-grid paths (default: --paths)");
    conv_cmd->add_option("--reference", conv_args.reference,
                         "automatic, analytic, or self-fine-grid");
    conv_cmd->add_option("--seed", conv_args.seed, "Master seed");
    conv_cmd->add_option("--workers", conv_args.workers, "Worker threads");
    conv_cmd->add_option("--out-dir", conv_args.out_dir, "Output directory");
    conv_cmd->add_option("--label", conv_args.label,
                         "Base name for output files");
    conv_cmd->add_flag("--resume", conv_args.resume,
                       "Reuse levels already present in the rows CSV");

    FitArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand(
        "fit", "Re-fit convergence rates from a rows CSV");
    fit_cmd->add_option("--csv", fit_args.csv_path, "Rows CSV file")
        ->required();
    fit_cmd->add_option("--levels", fit_args.levels,
                        "Restrict the fit to step counts MIN:MAX");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    price_args.strike_given = price_cmd->count("--strike") > 0;
    sim_args.strike_given = sim_cmd->count("--strike") > 0;
    sim_args.seed_given = sim_cmd->count("--seed") > 0;
    conv_args.strike_given = conv_cmd->count("--strike") > 0;
    conv_args.seed_given = conv_cmd->count("--seed") > 0;

    try {
        if (price_cmd->parsed()) return cmd_price(price_args);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args);
        if (conv_cmd->parsed()) return cmd_converge(conv_args);
        if (fit_cmd->parsed()) return cmd_fit(fit_args);
        throw std::invalid_argument("no subcommand given");
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (best estimate " << format_g17(e.best_estimate)
                  << ")\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kNumericalError;
    }
}

}  // namespace heston

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hestonweak/analytic.hpp"
#include "hestonweak/core.hpp"
#include "hestonweak/montecarlo.hpp"
#include "hestonweak/payoffs.hpp"
#include "hestonweak/schemes.hpp"

namespace heston {

enum class ReferenceKind { automatic, analytic, self_fine_grid };

/// Weak-error sweep: estimate E f(S_T) on every grid in step_counts, compare
/// against a reference, and fit the log2-log2 error slope.
struct StudyConfig {
    HestonParams model;
    std::string model_name = "custom";
    PayoffSpec functional{};
    std::string functional_name;
    Scheme scheme = Scheme::milstein_d;
    std::vector<int> step_counts = {1, 2, 4, 8, 16, 32, 64, 128, 256};
    std::int64_t n_paths = 1'000'000;
    // automatic: analytic for put/indicator/call, fine grid for the rest.
    ReferenceKind reference = ReferenceKind::automatic;
    int fine_grid_steps = 1024;
    std::int64_t fine_grid_paths = 0;  // 0: same as n_paths
    std::uint64_t seed = 0;
    int n_workers = 1;
    QuadratureConfig quad{};
};

struct StudyRow {
    int n_steps;
    double delta;
    double estimate;
    double std_error;
    double reference;
    double abs_error;
    // A row whose statistical noise exceeds its measured error says nothing
    // about the discretization bias; such rows are kept out of the default
    // fit subset.
    bool noise_dominated;
};

struct RateFit {
    double slope;
    double intercept;
    double residual;  // 2-norm of the regression residuals
    std::vector<int> used_steps;
};

struct StudyResult {
    std::string model_name;
    std::string functional_name;
    Scheme scheme;
    double nu;
    std::vector<StudyRow> rows;
    RateFit fit;
    bool degenerate_fit;
};

/// Ordinary least squares of log2(abs_error) on log2(delta) over the given
/// row indices. Rows with abs_error = 0 are excluded (their log is
/// undefined); throws std::invalid_argument if fewer than 2 rows remain.
[[nodiscard]] RateFit fit_rate(std::span<const StudyRow> rows,
                               std::span<const std::size_t> subset);

/// fit_rate over all rows that are neither noise-dominated nor zero-error.
[[nodiscard]] RateFit fit_rate_default(std::span<const StudyRow> rows);

/// Called after each completed level with that level's rows, one per
/// functional, so long runs can flush partial output.
using LevelCallback =
    std::function<void(std::size_t level_index, std::span<const StudyRow>)>;

/// Runs the sweep for several functionals over shared paths (one simulation
/// per level). Level i uses path offset i * n_paths and the fine-grid
/// reference run (if any) starts after all levels, so every batch draws from
/// disjoint stream ranges of the one seed. `precomputed` may carry
/// already-finished rows per functional (matched by n_steps); their levels
/// are spliced in without resimulation, and a stored self-grid reference is
/// reused from them.
[[nodiscard]] std::vector<StudyResult> run_study_batch(
    const StudyConfig& cfg, std::span<const PayoffSpec> functionals,
    std::span<const std::string> functional_names,
    const LevelCallback& on_level = {},
    std::span<const std::vector<StudyRow>> precomputed = {});

[[nodiscard]] StudyResult run_study(const StudyConfig& cfg,
                                    const LevelCallback& on_level = {});

/// 17 significant digits: enough for the text to round-trip to the same
/// double, so re-fitting a written CSV reproduces slopes bit-for-bit.
[[nodiscard]] std::string format_g17(double x);

/// Rows CSV schema.
[[nodiscard]] std::string csv_header();
[[nodiscard]] std::string csv_row_line(const std::string& model,
                                       const std::string& functional,
                                       Scheme scheme, const StudyRow& row);

/// Summary CSV schema (one line per fitted study).
[[nodiscard]] std::string summary_header();
[[nodiscard]] std::string summary_line(const StudyResult& result);

/// Gnuplot-ready data block: log2(delta), log2(abs_error) per usable row.
[[nodiscard]] std::string plot_dat(const StudyResult& result);

struct CsvEntry {
    std::string model;
    std::string functional;
    std::string scheme;
    StudyRow row;
};

/// Parses a rows CSV produced by csv_header/csv_row_line. The
/// noise-dominated flag is recomputed from the parsed values, so a re-fit of
/// a written file reproduces the original fit exactly.
[[nodiscard]] std::vector<CsvEntry> read_rows_csv(std::istream& in);

}  // namespace heston

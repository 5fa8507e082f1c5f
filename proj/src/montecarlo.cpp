#include "hestonweak/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace heston {

void MomentAccumulator::add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.n == 0) return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(other.n);
    const double delta = other.mean - mean;
    const double total = na + nb;
    mean += delta * (nb / total);
    m2 += other.m2 + delta * delta * (na * nb / total);
    n += other.n;
}

namespace {

McEstimate to_estimate(const MomentAccumulator& acc, std::size_t n_steps) {
    const double n = static_cast<double>(acc.n);
    const double variance = acc.n > 1 ? acc.m2 / (n - 1.0) : 0.0;
    return {acc.mean, std::sqrt(variance / n), acc.n, n_steps};
}

void check_run(const HestonParams& params, Scheme scheme,
               std::int64_t n_paths, const McOptions& opts) {
    if (n_paths < 2) throw std::invalid_argument("n_paths must be >= 2");
    if (opts.n_workers < 1) {
        throw std::invalid_argument("n_workers must be >= 1");
    }
    if (opts.path_offset < 0) {
        throw std::invalid_argument("path_offset must be >= 0");
    }
    if (scheme == Scheme::sqrt_euler) {
        throw std::invalid_argument(
            "sqrt-euler approximates the variance only and has no price "
            "component");
    }
    if (scheme == Scheme::milstein_d &&
        !feller_report(params).scheme_well_defined) {
        throw std::invalid_argument(
            "milstein-d is not well defined for these parameters "
            "(4*kappa*lambda/theta^2 < 1); use milstein-d-trunc");
    }
}

[[noreturn]] void throw_bad_sample(std::int64_t path_index,
                                   std::uint64_t seed) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "non-finite payoff sample at path index %lld (seed %llu)",
                  static_cast<long long>(path_index),
                  static_cast<unsigned long long>(seed));
    throw std::runtime_error(msg);
}

// Runs chunk bodies across opts.n_workers threads. process(chunk_index,
// first_path, n_in_chunk) must write only its own chunk's slot. Errors are
// rethrown for the lowest failing chunk so the reported failure does not
// depend on thread scheduling.
template <typename ProcessChunk>
void run_chunks(std::int64_t n_paths, const McOptions& opts,
                ProcessChunk&& process) {
    const std::int64_t n_chunks =
        (n_paths + kChunkPaths - 1) / kChunkPaths;
    std::atomic<std::int64_t> next_chunk{0};
    std::mutex error_mutex;
    std::int64_t error_chunk = -1;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const std::int64_t c =
                next_chunk.fetch_add(1, std::memory_order_relaxed);
            if (c >= n_chunks) return;
            const std::int64_t first = c * kChunkPaths;
            const std::int64_t count =
                std::min(kChunkPaths, n_paths - first);
            try {
                process(c, first, count);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (error_chunk < 0 || c < error_chunk) {
                    error_chunk = c;
                    error = std::current_exception();
                }
            }
        }
    };

    const int n_workers = static_cast<int>(
        std::min<std::int64_t>(opts.n_workers, n_chunks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<MomentAccumulator> accumulate_terminal(
    const HestonParams& params, const TimeGrid& grid,
    std::span<const PayoffSpec> payoffs, Scheme scheme, std::int64_t n_paths,
    const RngStreamSpec& rng, const McOptions& opts) {
    check_run(params, scheme, n_paths, opts);
    if (payoffs.empty()) {
        throw std::invalid_argument("at least one payoff is required");
    }
    const std::size_t n_steps = grid.n_steps();
    std::vector<double> sqrt_dt(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        sqrt_dt[k] = std::sqrt(grid.step(k));
    }
    const bool truncated = is_truncated(scheme);
    const double x0 = std::log(params.s0);
    const std::size_t n_payoffs = payoffs.size();
    const std::int64_t n_chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<std::vector<MomentAccumulator>> chunk_moments(
        static_cast<std::size_t>(n_chunks));

    run_chunks(n_paths, opts, [&](std::int64_t chunk, std::int64_t first,
                                  std::int64_t count) {
        std::vector<MomentAccumulator> acc(n_payoffs);
        for (std::int64_t i = 0; i < count; ++i) {
            const std::int64_t path = first + i;
            const std::uint64_t global =
                static_cast<std::uint64_t>(opts.path_offset + path);
            PathState state{x0, params.v0};
            for (std::size_t k = 0; k < n_steps; ++k) {
                double z_w;
                double z_b;
                rng.normal_pair(global, k, z_w, z_b);
                const NoiseIncrement inc{z_w * sqrt_dt[k], z_b * sqrt_dt[k],
                                         grid.step(k)};
                state = scheme_d_step(state, inc, params, truncated);
            }
            const double s = std::exp(state.x);
            for (std::size_t p = 0; p < n_payoffs; ++p) {
                const double value = evaluate(payoffs[p], s);
                if (!std::isfinite(value)) {
                    throw_bad_sample(opts.path_offset + path, rng.seed);
                }
                acc[p].add(value);
            }
        }
        chunk_moments[static_cast<std::size_t>(chunk)] = std::move(acc);
    });

    std::vector<MomentAccumulator> total(n_payoffs);
    for (const auto& chunk : chunk_moments) {
        for (std::size_t p = 0; p < n_payoffs; ++p) {
            total[p].merge(chunk[p]);
        }
    }
    return total;
}

McEstimate estimate(const HestonParams& params, const TimeGrid& grid,
                    const PayoffSpec& payoff, Scheme scheme,
                    std::int64_t n_paths, const RngStreamSpec& rng,
                    const McOptions& opts) {
    const auto acc =
        accumulate_terminal(params, grid, std::span(&payoff, 1), scheme,
                            n_paths, rng, opts);
    return to_estimate(acc[0], grid.n_steps());
}

std::vector<McEstimate> estimate_multi(const HestonParams& params,
                                       const TimeGrid& grid,
                                       std::span<const PayoffSpec> payoffs,
                                       Scheme scheme, std::int64_t n_paths,
                                       const RngStreamSpec& rng,
                                       const McOptions& opts) {
    const auto acc = accumulate_terminal(params, grid, payoffs, scheme,
                                         n_paths, rng, opts);
    std::vector<McEstimate> out;
    out.reserve(acc.size());
    for (const MomentAccumulator& a : acc) {
        out.push_back(to_estimate(a, grid.n_steps()));
    }
    return out;
}

std::vector<McEstimate> estimate_v_moments(const HestonParams& params,
                                           const TimeGrid& grid, Scheme scheme,
                                           std::int64_t n_paths,
                                           const RngStreamSpec& rng,
                                           const McOptions& opts) {
    check_run(params, scheme, n_paths, opts);
    const std::size_t n_steps = grid.n_steps();
    std::vector<double> sqrt_dt(n_steps);
    for (std::size_t k = 0; k < n_steps; ++k) {
        sqrt_dt[k] = std::sqrt(grid.step(k));
    }
    const bool truncated = is_truncated(scheme);
    const std::int64_t n_chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<std::vector<MomentAccumulator>> chunk_moments(
        static_cast<std::size_t>(n_chunks));

    run_chunks(n_paths, opts, [&](std::int64_t chunk, std::int64_t first,
                                  std::int64_t count) {
        std::vector<MomentAccumulator> acc(n_steps + 1);
        for (std::int64_t i = 0; i < count; ++i) {
            const std::uint64_t global =
                static_cast<std::uint64_t>(opts.path_offset + first + i);
            double v = params.v0;
            acc[0].add(v);
            for (std::size_t k = 0; k < n_steps; ++k) {
                double z_w;
                double z_b;
                rng.normal_pair(global, k, z_w, z_b);
                const NoiseIncrement inc{z_w * sqrt_dt[k], z_b * sqrt_dt[k],
                                         grid.step(k)};
                v = truncated ? milstein_v_step_truncated(v, inc, params)
                              : milstein_v_step(v, inc, params);
                acc[k + 1].add(v);
            }
        }
        chunk_moments[static_cast<std::size_t>(chunk)] = std::move(acc);
    });

    std::vector<MomentAccumulator> total(n_steps + 1);
    for (const auto& chunk : chunk_moments) {
        for (std::size_t k = 0; k <= n_steps; ++k) total[k].merge(chunk[k]);
    }
    std::vector<McEstimate> out;
    out.reserve(total.size());
    for (const MomentAccumulator& a : total) {
        out.push_back(to_estimate(a, n_steps));
    }
    return out;
}

}  // namespace heston

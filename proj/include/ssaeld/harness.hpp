#pragma once

// Repeated trials, one-parameter sweeps and convergence-trace export.

#include "ssaeld/datasets.hpp"
#include "ssaeld/ssa.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace ssaeld {

struct TrialRecord {
    std::uint64_t seed = 0;
    double best_cost = 0.0;
    double wall_time = 0.0;
};

struct TrialStats {
    double best = 0.0;
    double mean = 0.0;
    /// Sample standard deviation (divisor n - 1); 0 for a single trial.
    double sd = 0.0;
    Schedule best_schedule;
    std::vector<TrialRecord> per_trial;
    std::vector<std::vector<TracePoint>> traces;
    /// Trial whose final cost is the (lower) median.
    std::size_t median_trial = 0;
};

/// Sample standard deviation of xs (0 when fewer than two values).
inline double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2)
        return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Runs n_trials independent runs with seeds base_seed + k. `threads` = 0
/// uses the hardware concurrency; results do not depend on it.
inline TrialStats run_trials(const TestSystem& system, const SsaParams& params, std::size_t n_trials,
                             std::uint64_t base_seed, unsigned threads = 0) {
    if (n_trials == 0)
        throw ConfigError("need at least one trial");
    validate(params);
    validate(system);

    std::vector<RunResult> results(n_trials);
    std::vector<std::exception_ptr> errors(n_trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n_trials; k = next++) {
            SsaParams p = params;
            p.seed = base_seed + k;
            try {
                results[k] = run(system, p);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_trials));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    for (std::size_t k = 0; k < n_trials; ++k) {
        if (!errors[k])
            continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
            throw Error("trial with seed " + std::to_string(base_seed + k) + " failed: " + e.what());
        }
    }

    TrialStats stats;
    std::vector<double> finals;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < n_trials; ++k) {
        const auto& r = results[k];
        finals.push_back(r.best_cost);
        stats.per_trial.push_back({base_seed + k, r.best_cost, r.wall_time});
        stats.traces.push_back(r.trace);
        if (r.best_cost < results[best_k].best_cost)
            best_k = k;
    }
    stats.best = results[best_k].best_cost;
    stats.best_schedule = results[best_k].best_schedule;
    stats.mean = std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(n_trials);
    stats.sd = sample_sd(finals);

    std::vector<std::size_t> order(n_trials);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return finals[a] < finals[b]; });
    stats.median_trial = order[(n_trials - 1) / 2];
    return stats;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

enum class SweepParameter { PopSize, AttenuationRate, MaskChangeProbability, MaskOneProbability };

inline const char* to_string(SweepParameter p) {
    switch (p) {
    case SweepParameter::PopSize: return "pop_size";
    case SweepParameter::AttenuationRate: return "r_a";
    case SweepParameter::MaskChangeProbability: return "p_c";
    case SweepParameter::MaskOneProbability: return "p_m";
    }
    return "?";
}

inline SweepParameter parse_sweep_parameter(std::string_view name) {
    for (auto p : {SweepParameter::PopSize, SweepParameter::AttenuationRate, SweepParameter::MaskChangeProbability,
                   SweepParameter::MaskOneProbability})
        if (name == to_string(p))
            return p;
    throw ConfigError("unknown sweep parameter '" + std::string(name) + "' (expected pop_size, r_a, p_c or p_m)");
}

struct SweepSpec {
    SweepParameter parameter = SweepParameter::AttenuationRate;
    std::vector<double> values;
    SsaParams fixed;
    std::size_t trials = 25;
};

struct SweepRow {
    double value = 0.0;
    TrialStats stats;
};

inline SsaParams with_value(SsaParams p, SweepParameter which, double value) {
    switch (which) {
    case SweepParameter::PopSize:
        if (!(value >= 2.0) || value != std::floor(value))
            throw ConfigError("pop_size sweep values must be integers >= 2");
        p.pop_size = static_cast<std::size_t>(value);
        break;
    case SweepParameter::AttenuationRate: p.r_a = value; break;
    case SweepParameter::MaskChangeProbability: p.p_c = value; break;
    case SweepParameter::MaskOneProbability: p.p_m = value; break;
    }
    return p;
}

/// One TrialStats per swept value, each with seeds base_seed + k.
inline std::vector<SweepRow> parameter_sweep(const TestSystem& system, const SweepSpec& spec, std::uint64_t base_seed,
                                             unsigned threads = 0) {
    if (spec.values.empty())
        throw ConfigError("sweep value list is empty");
    if (spec.trials == 0)
        throw ConfigError("need at least one trial per sweep value");
    for (double v : spec.values)
        validate(with_value(spec.fixed, spec.parameter, v));

    std::vector<SweepRow> rows;
    for (double v : spec.values)
        rows.push_back({v, run_trials(system, with_value(spec.fixed, spec.parameter, v), spec.trials, base_seed, threads)});
    return rows;
}

/// Reads {"parameter", "values", "trials"?, "fixed"?: {pop_size, r_a, p_c, p_m,
/// omega_max, omega_min, max_evals}} on top of `defaults`.
inline SweepSpec parse_sweep_spec(const nlohmann::json& doc, const SsaParams& defaults) {
    detail::Reader root(doc, "");
    root.require_object({"parameter", "values", "trials", "fixed"});
    SweepSpec spec;
    spec.parameter = parse_sweep_parameter(root.string("parameter"));
    spec.values = root.child("values").numbers();
    spec.fixed = defaults;
    if (root.has("trials")) {
        const double t = root.number("trials");
        if (!(t >= 0.0) || t != std::floor(t))
            root.child("trials").fail("expected a non-negative integer");
        spec.trials = static_cast<std::size_t>(t);
    }
    if (root.has("fixed")) {
        const auto f = root.child("fixed");
        f.require_object({"pop_size", "r_a", "p_c", "p_m", "omega_max", "omega_min", "max_evals"});
        auto count = [&](const char* key, std::size_t fallback) {
            if (!f.has(key))
                return fallback;
            const double x = f.number(key);
            if (!(x >= 0.0) || x != std::floor(x))
                f.child(key).fail("expected a non-negative integer");
            return static_cast<std::size_t>(x);
        };
        spec.fixed.pop_size = count("pop_size", spec.fixed.pop_size);
        spec.fixed.max_evals = count("max_evals", spec.fixed.max_evals);
        spec.fixed.r_a = f.number_or("r_a", spec.fixed.r_a);
        spec.fixed.p_c = f.number_or("p_c", spec.fixed.p_c);
        spec.fixed.p_m = f.number_or("p_m", spec.fixed.p_m);
        spec.fixed.omega_max = f.number_or("omega_max", spec.fixed.omega_max);
        spec.fixed.omega_min = f.number_or("omega_min", spec.fixed.omega_min);
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// Writes "evals,cost" followed by one row per trace point.
inline void write_trace(std::ostream& out, std::span<const TracePoint> trace) {
    out << "evals,cost\n" << std::fixed << std::setprecision(6);
    for (const auto& p : trace)
        out << p.evals << ',' << p.cost << '\n';
}

inline void export_trace(std::span<const TracePoint> trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write trace file '" + path.string() + "'");
    write_trace(out, trace);
    if (!out)
        throw Error("write to '" + path.string() + "' failed");
}

inline void export_trace(const RunResult& result, const std::filesystem::path& path) {
    export_trace(result.trace, path);
}

inline constexpr const char* kStatsCsvHeader = "label,trials,best,mean,sd_sample,median_seed";

inline void write_stats_csv_row(std::ostream& out, const std::string& label, const TrialStats& s) {
    out << label << ',' << s.per_trial.size() << ',' << std::fixed << std::setprecision(6) << s.best << ',' << s.mean
        << ',' << std::setprecision(6) << s.sd << ',' << s.per_trial[s.median_trial].seed << '\n';
}

inline void write_sweep_csv(std::ostream& out, SweepParameter parameter, std::span<const SweepRow> rows) {
    out << "parameter,value,trials,best,mean,sd_sample,median_seed\n";
    for (const auto& r : rows) {
        out << to_string(parameter) << ',' << std::defaultfloat << std::setprecision(10) << r.value << ',';
        out << r.stats.per_trial.size() << ',' << std::fixed << std::setprecision(6) << r.stats.best << ','
            << r.stats.mean << ',' << r.stats.sd << ',' << r.stats.per_trial[r.stats.median_trial].seed << '\n';
    }
}

inline void write_sweep_table(std::ostream& out, SweepParameter parameter, std::span<const SweepRow> rows) {
    out << std::left << std::setw(10) << to_string(parameter) << std::right << std::setw(16) << "Best"
        << std::setw(16) << "Mean" << std::setw(12) << "S.D." << '\n';
    for (const auto& r : rows)
        out << std::left << std::setw(10) << std::defaultfloat << std::setprecision(6) << r.value << std::right
            << std::fixed << std::setprecision(3) << std::setw(16) << r.stats.best << std::setw(16) << r.stats.mean
            << std::setprecision(4) << std::setw(12) << r.stats.sd << '\n';
    out << "(S.D. is the sample standard deviation, divisor n-1)\n";
}

} // namespace ssaeld

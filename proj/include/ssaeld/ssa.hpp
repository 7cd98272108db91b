#pragma once

// Social spider optimizer specialised for economic load dispatch.
//
// Each spider sits on a feasible schedule and broadcasts a vibration whose
// intensity grows as its fuel cost falls. Vibrations fade exponentially with
// the 1-norm distance they travel, scaled by the population's spread. Every
// spider keeps the strongest vibration it has ever received as its target and
// walks towards a per-dimension mix of that target and one random received
// vibration, with a chaotic, linearly annealed memory of its last move. After
// each move the schedule is repaired back onto the feasible set.

#include "ssaeld/model.hpp"
#include "ssaeld/repair.hpp"

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <ranges>
#include <span>
#include <vector>

namespace ssaeld {

enum class GammaMode {
    /// gamma_0 ~ U(0.75, 1), then iterate the logistic map.
    LogisticMap,
    /// Draw gamma_t ~ U(0.75, 1) afresh every iteration.
    Resample,
};

struct SsaParams {
    std::size_t pop_size = 2;
    double r_a = 10.0;
    double p_c = 0.9;
    double p_m = 0.1;
    double omega_max = 0.9;
    double omega_min = 0.4;
    double mu = 4.0;
    std::size_t max_evals = 100000;
    /// Intensity baseline C; defaults to the total cost at p_min.
    std::optional<double> c_floor;
    double eps_balance = kDefaultBalanceEps;
    std::uint64_t seed = 1;
    GammaMode gamma_mode = GammaMode::LogisticMap;
    /// Positive factor applied to every intensity. A different logarithm base
    /// is exactly such a factor; the search must not depend on it.
    double intensity_scale = 1.0;

    /// pop_size = number of units, r_a = 10, p_c = 0.9, p_m = 0.1, 100000 evaluations.
    static SsaParams defaults_for(const TestSystem& system) {
        SsaParams p;
        p.pop_size = system.size();
        return p;
    }
};

inline void validate(const SsaParams& p) {
    auto fail = [](const std::string& what) { throw ConfigError("invalid SSA parameters: " + what); };
    if (p.pop_size < 2)
        fail("pop_size must be at least 2");
    if (!(p.r_a > 0.0) || !std::isfinite(p.r_a))
        fail("r_a must be positive");
    if (!(p.p_c >= 0.0 && p.p_c <= 1.0))
        fail("p_c must lie in [0, 1]");
    if (!(p.p_m >= 0.0 && p.p_m <= 1.0))
        fail("p_m must lie in [0, 1]");
    if (!(p.omega_min >= 0.0 && p.omega_max >= p.omega_min) || !std::isfinite(p.omega_max))
        fail("need omega_max >= omega_min >= 0");
    if (!std::isfinite(p.mu))
        fail("mu must be finite");
    if (p.max_evals < p.pop_size)
        fail("max_evals must be at least pop_size");
    if (p.c_floor && !std::isfinite(*p.c_floor))
        fail("c_floor must be finite");
    if (!(p.eps_balance > 0.0))
        fail("eps_balance must be positive");
    if (!(p.intensity_scale > 0.0) || !std::isfinite(p.intensity_scale))
        fail("intensity_scale must be positive");
}

struct Vibration {
    Schedule source;
    double intensity = 0.0;
};

struct Spider {
    Schedule position;
    double fitness = std::numeric_limits<double>::infinity();
    Vibration target;
    std::size_t inactive_degree = 0;
    std::vector<double> prev_move;
    std::vector<std::uint8_t> mask;
};

struct TracePoint {
    std::size_t evals = 0;
    double cost = 0.0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct RunResult {
    Schedule best_schedule;
    double best_cost = std::numeric_limits<double>::infinity();
    /// Best-so-far cost after each improvement, plus the final evaluation count.
    std::vector<TracePoint> trace;
    std::size_t evals_used = 0;
    double wall_time = 0.0;
    /// Moves whose repair failed; the spider stayed where it was.
    std::size_t repair_failures = 0;
};

// ---------------------------------------------------------------------------
// Vibrations
// ---------------------------------------------------------------------------

inline constexpr double kIntensityDenominatorGuard = 1e-12;
inline constexpr double kSigmaGuard = 1e-12;

/// log(1 / (cost - C) + 1). Lower cost gives a stronger vibration.
inline double vibration_intensity(double cost, double c_floor) {
    return std::log(1.0 / std::max(cost - c_floor, kIntensityDenominatorGuard) + 1.0);
}

/// Mean over dimensions of the population standard deviation (divisor N).
template <std::ranges::forward_range R, class Proj = std::identity>
double population_sigma(R&& positions, Proj proj = {}) {
    std::size_t count = 0;
    std::size_t dims = 0;
    for (const auto& x : positions) {
        dims = std::ranges::size(std::invoke(proj, x));
        ++count;
    }
    if (count == 0 || dims == 0)
        return 0.0;
    std::vector<double> mean(dims, 0.0);
    for (const auto& x : positions) {
        const auto& p = std::invoke(proj, x);
        for (std::size_t j = 0; j < dims; ++j)
            mean[j] += p[j];
    }
    for (double& m : mean)
        m /= static_cast<double>(count);
    std::vector<double> var(dims, 0.0);
    for (const auto& x : positions) {
        const auto& p = std::invoke(proj, x);
        for (std::size_t j = 0; j < dims; ++j) {
            const double dev = p[j] - mean[j];
            var[j] += dev * dev;
        }
    }
    double total = 0.0;
    for (double v : var)
        total += std::sqrt(v / static_cast<double>(count));
    return total / static_cast<double>(dims);
}

inline double attenuated_intensity(double intensity, double distance, double sigma_bar, double r_a) {
    return intensity * std::exp(-distance / (std::max(sigma_bar, kSigmaGuard) * r_a));
}

inline double manhattan_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        d += std::abs(a[j] - b[j]);
    return d;
}

/// Attenuates every vibration to the spider's position (skipping index
/// `self`, the spider's own), keeps the strongest as the new target if it
/// beats the stored one, and updates the inactive degree. Returns true when
/// the target was replaced.
inline bool receive_and_retarget(Spider& spider, std::span<const Vibration> vibrations, double sigma_bar,
                                 double r_a, std::size_t self = std::numeric_limits<std::size_t>::max()) {
    std::size_t strongest = vibrations.size();
    double strongest_intensity = -1.0;
    for (std::size_t k = 0; k < vibrations.size(); ++k) {
        if (k == self)
            continue;
        const auto& v = vibrations[k];
        const double received =
            attenuated_intensity(v.intensity, manhattan_distance(v.source, spider.position), sigma_bar, r_a);
        if (received > strongest_intensity) {
            strongest = k;
            strongest_intensity = received;
        }
    }
    if (strongest == vibrations.size())
        throw std::invalid_argument("receive_and_retarget: no vibrations received");

    if (strongest_intensity > spider.target.intensity) {
        spider.target.source = vibrations[strongest].source;
        spider.target.intensity = strongest_intensity;
        spider.inactive_degree = 0;
        return true;
    }
    ++spider.inactive_degree;
    return false;
}

// ---------------------------------------------------------------------------
// Movement
// ---------------------------------------------------------------------------

/// With probability 1 - p_c^d_in, redraws every mask bit as 1 with probability
/// p_m; an all-zero draw gets one random bit set. Returns true if redrawn.
template <std::uniform_random_bit_generator Rng>
bool maybe_update_mask(Spider& spider, double p_c, double p_m, Rng& rng) {
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    const double keep = std::pow(p_c, static_cast<double>(spider.inactive_degree));
    if (!(unit01(rng) < 1.0 - keep))
        return false;
    bool any = false;
    for (auto& bit : spider.mask) {
        bit = unit01(rng) < p_m ? 1 : 0;
        any = any || bit != 0;
    }
    if (!any && !spider.mask.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, spider.mask.size() - 1);
        spider.mask[pick(rng)] = 1;
    }
    return true;
}

/// Per dimension: the target's coordinate where the mask bit is 0, otherwise
/// the coordinate of one received vibration drawn uniformly (once per call).
template <std::uniform_random_bit_generator Rng>
Schedule target_position(const Spider& spider, std::span<const Vibration> vibrations, Rng& rng,
                         std::size_t self = std::numeric_limits<std::size_t>::max()) {
    const std::size_t received = vibrations.size() - (self < vibrations.size() ? 1 : 0);
    if (received == 0)
        throw std::invalid_argument("target_position: no vibrations received");
    std::uniform_int_distribution<std::size_t> pick(0, received - 1);
    std::size_t k = pick(rng);
    if (k >= self)
        ++k;
    const auto& random_source = vibrations[k].source;

    Schedule out(spider.position.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = spider.mask[j] ? random_source[j] : spider.target.source[j];
    return out;
}

inline constexpr double kGammaClamp = 1e-9;

/// One logistic-map step, kept inside [1e-9, 1 - 1e-9].
inline double chaotic_step(double gamma, double mu) {
    return std::clamp(mu * gamma * (1.0 - gamma), kGammaClamp, 1.0 - kGammaClamp);
}

inline double memory_factor(double gamma, std::size_t t, double omega_max, double omega_min, std::size_t iter_max) {
    const double progress = iter_max == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(iter_max);
    return gamma * (omega_max - (omega_max - omega_min) * progress);
}

/// p += delta * prev_move + (target - p) .* R, R ~ U[0,1) per dimension.
/// prev_move becomes the displacement just taken.
template <std::uniform_random_bit_generator Rng>
void random_walk(Spider& spider, std::span<const double> target, double delta, Rng& rng) {
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    for (std::size_t j = 0; j < spider.position.size(); ++j) {
        const double p = spider.position[j];
        const double next = p + spider.prev_move[j] * delta + (target[j] - p) * unit01(rng);
        spider.prev_move[j] = next - p;
        spider.position[j] = next;
    }
}

// ---------------------------------------------------------------------------
// Main loop
// ---------------------------------------------------------------------------

/// Callable that repairs a schedule in place using the run's generator.
using RepairFn = std::function<void(Schedule&, std::mt19937_64&)>;

namespace detail {

/// Uniform point inside the unit's allowed zones; the zone is chosen with
/// probability proportional to its width.
template <std::uniform_random_bit_generator Rng>
double sample_allowed(std::span<const Interval> zones, Rng& rng) {
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    double total = 0.0;
    for (const auto& z : zones)
        total += z.width();
    if (total <= 0.0) {
        std::uniform_int_distribution<std::size_t> pick(0, zones.size() - 1);
        return zones[pick(rng)].lo;
    }
    double r = unit01(rng) * total;
    for (const auto& z : zones) {
        if (r <= z.width())
            return z.lo + r;
        r -= z.width();
    }
    return zones.back().hi;
}

} // namespace detail

/// Runs the optimizer until max_evals fitness evaluations are used
/// (pop_size per iteration). `repair_fn` must leave schedules feasible.
inline RunResult run(const TestSystem& system, const SsaParams& params, const RepairFn& repair_fn) {
    validate(params);
    validate(system);
    const auto started = std::chrono::steady_clock::now();

    const std::size_t n = system.size();
    const std::size_t pop = params.pop_size;
    const std::size_t iter_max = params.max_evals / pop;
    const double c_floor = params.c_floor.value_or(minimum_fuel_cost(system));
    const ZoneTable zones = zone_table(system);

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> gamma_dist(std::nextafter(0.75, 1.0), 1.0);
    double gamma = gamma_dist(rng);

    std::vector<Spider> spiders(pop);
    for (auto& s : spiders) {
        s.position.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            s.position[j] = detail::sample_allowed(zones[j], rng);
        repair_fn(s.position, rng);
        s.prev_move.assign(n, 0.0);
        s.mask.assign(n, 0);
        s.target = {s.position, 0.0};
    }

    RunResult result;
    std::vector<Vibration> vibrations(pop);
    Schedule previous;

    for (std::size_t t = 0; t < iter_max; ++t) {
        for (std::size_t i = 0; i < pop; ++i) {
            auto& s = spiders[i];
            s.fitness = schedule_cost(system, s.position);
            ++result.evals_used;
            if (s.fitness < result.best_cost) {
                result.best_cost = s.fitness;
                result.best_schedule = s.position;
                result.trace.push_back({result.evals_used, result.best_cost});
            }
            vibrations[i].source = s.position;
            vibrations[i].intensity = params.intensity_scale * vibration_intensity(s.fitness, c_floor);
        }

        const double sigma_bar = population_sigma(vibrations, &Vibration::source);

        if (t > 0)
            gamma = params.gamma_mode == GammaMode::LogisticMap ? chaotic_step(gamma, params.mu) : gamma_dist(rng);
        const double delta = memory_factor(gamma, t, params.omega_max, params.omega_min, iter_max);

        for (std::size_t i = 0; i < pop; ++i) {
            auto& s = spiders[i];
            receive_and_retarget(s, vibrations, sigma_bar, params.r_a, i);
            maybe_update_mask(s, params.p_c, params.p_m, rng);
            const Schedule target = target_position(s, vibrations, rng, i);
            previous = s.position;
            random_walk(s, target, delta, rng);
            try {
                repair_fn(s.position, rng);
            } catch (const RepairError&) {
                s.position = previous;
                std::fill(s.prev_move.begin(), s.prev_move.end(), 0.0);
                ++result.repair_failures;
            }
        }
    }

    if (!result.trace.empty() && result.trace.back().evals != result.evals_used)
        result.trace.push_back({result.evals_used, result.best_cost});
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

/// Runs with the standard repair scheme.
inline RunResult run(const TestSystem& system, const SsaParams& params) {
    const ZoneTable zones = zone_table(system);
    const RepairConfig cfg = default_repair_config(system, params.eps_balance);
    return run(system, params,
               [&](Schedule& s, std::mt19937_64& rng) { repair(system, zones, s, rng, cfg); });
}

} // namespace ssaeld

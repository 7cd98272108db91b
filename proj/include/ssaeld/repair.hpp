#pragma once

// Schedule repair: snap every output into its unit's allowed zones, then
// shift load between units until generation matches demand plus loss.

#include "ssaeld/model.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace ssaeld {

/// Allowed zones of every unit, precomputed once per system.
using ZoneTable = std::vector<std::vector<Interval>>;

inline ZoneTable zone_table(const TestSystem& system) {
    ZoneTable table;
    table.reserve(system.size());
    for (const auto& u : system.units)
        table.push_back(allowed_zones(u));
    return table;
}

struct RepairConfig {
    double eps_balance = kDefaultBalanceEps;
    /// Upper bound on load-shifting moves (escape moves included) per call.
    std::size_t max_rounds = 1;
};

/// eps_balance as given, max_rounds = 50 moves per unit.
inline RepairConfig default_repair_config(const TestSystem& system, double eps_balance = kDefaultBalanceEps) {
    return {eps_balance, 50 * system.size()};
}

/// p itself if it is allowed, otherwise the closest zone edge. Equidistant
/// edges resolve to the lower one.
inline double absorb_bounds(std::span<const Interval> zones, double p) {
    if (zone_index(zones, p))
        return p;
    double best = zones.front().lo;
    double best_dist = std::abs(p - best);
    for (const auto& z : zones)
        for (double edge : {z.lo, z.hi}) {
            const double d = std::abs(p - edge);
            if (d < best_dist) {
                best = edge;
                best_dist = d;
            }
        }
    return best;
}

inline double absorb_bounds(const PowerUnit& unit, double p) {
    return absorb_bounds(allowed_zones(unit), p);
}

/// demand + loss - sum(p).
inline double deficit(const TestSystem& system, std::span<const double> s) {
    return -balance_residual(system, s);
}

/// Signed room left inside the zone that holds p: up to the zone top when
/// `upward`, down to the zone floor otherwise.
inline double unit_capacity(std::span<const Interval> zones, double p, bool upward) {
    const auto k = zone_index(zones, p);
    if (!k)
        throw std::invalid_argument("unit_capacity: output is outside every allowed zone");
    const auto& z = zones[*k];
    return upward ? std::max(0.0, z.hi - p) : std::min(0.0, z.lo - p);
}

inline double unit_capacity(const PowerUnit& unit, double p, bool upward) {
    return unit_capacity(allowed_zones(unit), p, upward);
}

namespace detail {

/// Edge of the neighbouring zone in the given direction, if there is one.
inline std::optional<double> escape_target(std::span<const Interval> zones, double p, bool upward) {
    if (upward) {
        for (const auto& z : zones)
            if (z.lo > p + kBoundSlack)
                return z.lo;
    } else {
        for (auto it = zones.rbegin(); it != zones.rend(); ++it)
            if (it->hi < p - kBoundSlack)
                return it->hi;
    }
    return std::nullopt;
}

} // namespace detail

/// Drives |deficit| below cfg.eps_balance by random partial moves within each
/// unit's current zone; when the zones cannot absorb the deficit, a random
/// unit jumps across a prohibited zone. Every entry of `s` must already lie
/// in an allowed zone.
template <std::uniform_random_bit_generator Rng>
void repair_balance(const TestSystem& system, const ZoneTable& zones, Schedule& s, Rng& rng,
                    const RepairConfig& cfg) {
    require_length(system, s);
    const std::size_t n = s.size();
    std::uniform_real_distribution<double> unit01(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> candidates;

    double d = deficit(system, s);
    for (std::size_t round = 0; round < cfg.max_rounds; ++round) {
        if (std::abs(d) <= cfg.eps_balance)
            return;
        const bool upward = d > 0.0;

        double available = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            available += unit_capacity(zones[i], s[i], upward);

        if (std::abs(available) < std::abs(d)) {
            candidates.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (detail::escape_target(zones[i], s[i], upward))
                    candidates.push_back(i);
            if (candidates.empty())
                throw RepairError("repair: deficit cannot be covered and no unit can cross a prohibited zone", -d);
            std::uniform_int_distribution<std::size_t> pick_candidate(0, candidates.size() - 1);
            const std::size_t g = candidates[pick_candidate(rng)];
            s[g] = *detail::escape_target(zones[g], s[g], upward);
        } else {
            const std::size_t g = pick(rng);
            const double cap = unit_capacity(zones[g], s[g], upward);
            const double r = unit01(rng);
            const double change = upward ? std::min(cap * r, d) : std::max(cap * r, d);
            const auto& z = zones[g][*zone_index(zones[g], s[g])];
            s[g] = std::clamp(s[g] + change, z.lo, z.hi);
        }
        d = deficit(system, s);
    }
    if (std::abs(d) <= cfg.eps_balance)
        return;
    throw RepairError("repair: balance not reached within " + std::to_string(cfg.max_rounds) + " moves", -d);
}

/// Snaps every output into its allowed zones, then repairs the balance.
template <std::uniform_random_bit_generator Rng>
void repair(const TestSystem& system, const ZoneTable& zones, Schedule& s, Rng& rng, const RepairConfig& cfg) {
    require_length(system, s);
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = absorb_bounds(zones[i], s[i]);
    repair_balance(system, zones, s, rng, cfg);
}

template <std::uniform_random_bit_generator Rng>
Schedule repair(const TestSystem& system, Schedule s, Rng& rng, const RepairConfig& cfg) {
    repair(system, zone_table(system), s, rng, cfg);
    return s;
}

} // namespace ssaeld

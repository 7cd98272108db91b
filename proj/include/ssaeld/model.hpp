#pragma once

// Economic load dispatch problem model: generator cost curves, operating
// limits, B-matrix transmission loss and the feasibility checks built on them.
//
// All quantities are in MW and $/h. Every function here is pure.

#include "ssaeld/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ssaeld {

/// Per-unit power outputs in MW, one entry per generator in system order.
using Schedule = std::vector<double>;

/// Absolute slack applied to every bound and zone membership test.
inline constexpr double kBoundSlack = 1e-9;

/// Default tolerance on the power balance residual.
inline constexpr double kDefaultBalanceEps = 1e-6;

/// One fuel cost curve: a + b p + c p^2 + |e sin(f (p_min - p))|.
struct FuelOption {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double e = 0.0;
    double f = 0.0;

    friend bool operator==(const FuelOption&, const FuelOption&) = default;
};

/// Closed interval [lo, hi] in MW.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double p, double slack = kBoundSlack) const noexcept {
        return p >= lo - slack && p <= hi + slack;
    }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Ramp-rate data. The unit may move at most `up` above and `down` below `prev`.
struct RampLimits {
    double up = 0.0;
    double down = 0.0;
    double prev = 0.0;

    friend bool operator==(const RampLimits&, const RampLimits&) = default;
};

struct PowerUnit {
    double p_min = 0.0;
    double p_max = 0.0;
    std::vector<FuelOption> fuels;
    std::optional<RampLimits> ramp;
    /// Prohibited operating zones. Open intervals; their endpoints are feasible.
    std::vector<Interval> poz;

    friend bool operator==(const PowerUnit&, const PowerUnit&) = default;
};

/// B-coefficient loss model in MW form: loss = p' B2 p + B1 p + B0.
struct LossMatrix {
    std::size_t n = 0;
    std::vector<double> b2; // row-major n x n, 1/MW
    std::vector<double> b1; // dimensionless
    double b0 = 0.0;        // MW

    double at(std::size_t i, std::size_t j) const { return b2[i * n + j]; }

    friend bool operator==(const LossMatrix&, const LossMatrix&) = default;
};

struct TestSystem {
    std::string name;
    std::vector<PowerUnit> units;
    double demand = 0.0;
    std::optional<LossMatrix> loss;

    std::size_t size() const noexcept { return units.size(); }

    friend bool operator==(const TestSystem&, const TestSystem&) = default;
};

// ---------------------------------------------------------------------------
// Cost
// ---------------------------------------------------------------------------

inline double fuel_branch_cost(const FuelOption& fuel, double p_min, double p) {
    return fuel.a + fuel.b * p + fuel.c * p * p + std::abs(fuel.e * std::sin(fuel.f * (p_min - p)));
}

/// Fuel cost of one unit at output p: the cheapest of its fuel curves.
inline double unit_fuel_cost(const PowerUnit& unit, double p) {
    double best = fuel_branch_cost(unit.fuels.front(), unit.p_min, p);
    for (std::size_t k = 1; k < unit.fuels.size(); ++k)
        best = std::min(best, fuel_branch_cost(unit.fuels[k], unit.p_min, p));
    return best;
}

inline void require_length(const TestSystem& system, std::span<const double> s) {
    if (s.size() != system.size())
        throw DimensionError("schedule has " + std::to_string(s.size()) + " entries, system '" +
                             system.name + "' has " + std::to_string(system.size()) + " units");
}

inline double schedule_cost(const TestSystem& system, std::span<const double> s) {
    require_length(system, s);
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        total += unit_fuel_cost(system.units[i], s[i]);
    return total;
}

/// Sum of unit costs at p_min; the natural floor for the total cost.
inline double minimum_fuel_cost(const TestSystem& system) {
    double total = 0.0;
    for (const auto& u : system.units)
        total += unit_fuel_cost(u, u.p_min);
    return total;
}

// ---------------------------------------------------------------------------
// Loss and balance
// ---------------------------------------------------------------------------

inline double line_loss(const LossMatrix& loss, std::span<const double> s) {
    if (s.size() != loss.n)
        throw DimensionError("loss matrix is " + std::to_string(loss.n) + "x" + std::to_string(loss.n) +
                             ", schedule has " + std::to_string(s.size()) + " entries");
    double quad = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < loss.n; ++i) {
        const double* row = loss.b2.data() + i * loss.n;
        double acc = 0.0;
        for (std::size_t j = 0; j < loss.n; ++j)
            acc += row[j] * s[j];
        quad += s[i] * acc;
        lin += loss.b1[i] * s[i];
    }
    return quad + lin + loss.b0;
}

inline double line_loss(const TestSystem& system, std::span<const double> s) {
    if (!system.loss)
        throw ConfigError("system '" + system.name + "' has no loss matrix");
    require_length(system, s);
    return line_loss(*system.loss, s);
}

/// Loss if the system has a matrix, else zero.
inline double loss_or_zero(const TestSystem& system, std::span<const double> s) {
    return system.loss ? line_loss(*system.loss, s) : 0.0;
}

/// sum(p) - demand - loss. Zero exactly when generation meets demand plus loss.
inline double balance_residual(const TestSystem& system, std::span<const double> s) {
    require_length(system, s);
    double total = 0.0;
    for (double p : s)
        total += p;
    return total - system.demand - loss_or_zero(system, s);
}

// ---------------------------------------------------------------------------
// Operating limits
// ---------------------------------------------------------------------------

/// Limits intersected with the ramp band around the previous output.
inline Interval effective_bounds(const PowerUnit& unit) {
    if (!unit.ramp)
        return {unit.p_min, unit.p_max};
    return {std::max(unit.p_min, unit.ramp->prev - unit.ramp->down),
            std::min(unit.p_max, unit.ramp->prev + unit.ramp->up)};
}

/// The effective band with every prohibited zone cut out, as sorted closed
/// intervals. May be empty for a malformed unit; `validate` rejects that.
inline std::vector<Interval> allowed_zones(const PowerUnit& unit) {
    const Interval band = effective_bounds(unit);
    std::vector<Interval> zones;
    if (band.lo > band.hi)
        return zones;
    double lo = band.lo;
    for (const auto& z : unit.poz) {
        if (z.hi <= lo)
            continue;
        if (z.lo >= band.hi)
            break;
        if (z.lo >= lo)
            zones.push_back({lo, z.lo});
        lo = z.hi;
    }
    if (lo <= band.hi)
        zones.push_back({lo, band.hi});
    return zones;
}

/// Index of the allowed zone containing p, or nullopt.
inline std::optional<std::size_t> zone_index(std::span<const Interval> zones, double p) {
    for (std::size_t k = 0; k < zones.size(); ++k)
        if (zones[k].contains(p))
            return k;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Feasibility
// ---------------------------------------------------------------------------

enum class Violation {
    BelowMinimum,    // p < p_min
    AboveMaximum,    // p > p_max
    RampDown,        // p < prev - down
    RampUp,          // p > prev + up
    ProhibitedZone,  // strictly inside a POZ
};

inline const char* to_string(Violation v) {
    switch (v) {
    case Violation::BelowMinimum: return "below p_min";
    case Violation::AboveMaximum: return "above p_max";
    case Violation::RampDown: return "ramp-down limit";
    case Violation::RampUp: return "ramp-up limit";
    case Violation::ProhibitedZone: return "prohibited zone";
    }
    return "?";
}

struct UnitViolation {
    std::size_t unit = 0;
    double p = 0.0;
    Violation kind = Violation::BelowMinimum;
};

struct FeasibilityReport {
    std::vector<UnitViolation> unit_violations;
    double residual = 0.0;
    double eps_balance = kDefaultBalanceEps;
    bool balance_violated = false;

    bool feasible() const noexcept { return unit_violations.empty() && !balance_violated; }
};

/// Violations of a single unit at output p, in the order limits, ramp, POZ.
inline std::vector<Violation> unit_violations(const PowerUnit& unit, double p) {
    std::vector<Violation> out;
    if (p < unit.p_min - kBoundSlack)
        out.push_back(Violation::BelowMinimum);
    if (p > unit.p_max + kBoundSlack)
        out.push_back(Violation::AboveMaximum);
    if (unit.ramp) {
        if (p < unit.ramp->prev - unit.ramp->down - kBoundSlack)
            out.push_back(Violation::RampDown);
        if (p > unit.ramp->prev + unit.ramp->up + kBoundSlack)
            out.push_back(Violation::RampUp);
    }
    for (const auto& z : unit.poz)
        if (p > z.lo + kBoundSlack && p < z.hi - kBoundSlack)
            out.push_back(Violation::ProhibitedZone);
    return out;
}

inline FeasibilityReport check_feasible(const TestSystem& system, std::span<const double> s,
                                        double eps_balance = kDefaultBalanceEps) {
    require_length(system, s);
    FeasibilityReport report;
    report.eps_balance = eps_balance;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (Violation v : unit_violations(system.units[i], s[i]))
            report.unit_violations.push_back({i, s[i], v});
    report.residual = balance_residual(system, s);
    report.balance_violated = !(std::abs(report.residual) <= eps_balance);
    return report;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline bool all_finite(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

inline std::string unit_label(std::size_t i) { return "unit " + std::to_string(i + 1); }

} // namespace detail

inline void validate_unit(const PowerUnit& unit, std::size_t index) {
    const auto label = detail::unit_label(index);
    if (!detail::all_finite({unit.p_min, unit.p_max}))
        throw ModelError("unit.limits", label + ": non-finite limit");
    if (unit.p_min > unit.p_max)
        throw ModelError("unit.limits", label + ": p_min > p_max");
    if (unit.fuels.empty())
        throw ModelError("unit.fuels", label + ": no fuel options");
    for (const auto& f : unit.fuels)
        if (!detail::all_finite({f.a, f.b, f.c, f.e, f.f}))
            throw ModelError("unit.fuels", label + ": non-finite fuel coefficient");
    if (unit.ramp) {
        const auto& r = *unit.ramp;
        if (!detail::all_finite({r.up, r.down, r.prev}) || r.up < 0.0 || r.down < 0.0)
            throw ModelError("unit.ramp", label + ": ramp limits must be finite and non-negative");
        const Interval band = effective_bounds(unit);
        if (band.lo > band.hi)
            throw ModelError("unit.ramp", label + ": ramp band does not intersect [p_min, p_max]");
    }
    for (std::size_t k = 0; k < unit.poz.size(); ++k) {
        const auto& z = unit.poz[k];
        if (!detail::all_finite({z.lo, z.hi}) || !(z.lo < z.hi))
            throw ModelError("unit.poz", label + ": zone " + std::to_string(k + 1) + " is empty");
        if (!(z.lo > unit.p_min && z.hi < unit.p_max))
            throw ModelError("unit.poz", label + ": zone " + std::to_string(k + 1) +
                                             " is not strictly inside [p_min, p_max]");
        if (k > 0 && !(unit.poz[k - 1].hi < z.lo))
            throw ModelError("unit.poz", label + ": zones " + std::to_string(k) + " and " +
                                             std::to_string(k + 1) + " overlap or are unsorted");
    }
    if (allowed_zones(unit).empty())
        throw ModelError("unit.zones", label + ": no allowed operating zone");
}

inline void validate_loss(const LossMatrix& loss, std::size_t n) {
    if (loss.n != n || loss.b2.size() != n * n || loss.b1.size() != n)
        throw ModelError("loss.dimension", "loss matrix dimensions do not match " + std::to_string(n) + " units");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = loss.at(i, j);
            const double y = loss.at(j, i);
            if (!std::isfinite(x))
                throw ModelError("loss.finite", "non-finite B2 entry");
            if (std::abs(x - y) > 1e-12 * std::max(std::abs(x), std::abs(y)))
                throw ModelError("loss.symmetry", "B2(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                      ") differs from its transpose");
        }
    for (double x : loss.b1)
        if (!std::isfinite(x))
            throw ModelError("loss.finite", "non-finite B1 entry");
    if (!std::isfinite(loss.b0))
        throw ModelError("loss.finite", "non-finite B0");
}

/// Throws ModelError naming the first violated invariant.
inline void validate(const TestSystem& system) {
    if (system.units.empty())
        throw ModelError("system.units", "system has no units");
    if (!(system.demand > 0.0) || !std::isfinite(system.demand))
        throw ModelError("system.demand", "demand must be positive and finite");
    for (std::size_t i = 0; i < system.size(); ++i)
        validate_unit(system.units[i], i);
    if (system.loss)
        validate_loss(*system.loss, system.size());

    Schedule lows;
    double hi_total = 0.0;
    for (const auto& u : system.units) {
        const auto zones = allowed_zones(u);
        lows.push_back(zones.front().lo);
        hi_total += zones.back().hi;
    }
    double lo_total = 0.0;
    for (double p : lows)
        lo_total += p;
    if (hi_total < system.demand)
        throw ModelError("system.capacity", "total maximum output is below demand");
    if (lo_total > system.demand + loss_or_zero(system, lows))
        throw ModelError("system.capacity", "total minimum output exceeds demand plus loss");
}

} // namespace ssaeld

// Acceptance run: one PASS/FAIL line per criterion, details indented above it.
// Exit status is 1 when any criterion fails.

#include "ssaeld/ssaeld.hpp"

#include "reference_schedules.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace ssaeld;
namespace ref = ssaeld::testing;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

template <class... A>
void detail(const char* fmt, A... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
}

bool near_check(const char* label, double got, double want, double tol) {
    const bool ok = std::abs(got - want) <= tol;
    detail("%-28s got %.6f want %.6f +- %g %s", label, got, want, tol, ok ? "ok" : "MISS");
    return ok;
}

bool same_run(const RunResult& a, const RunResult& b) {
    return a.best_schedule == b.best_schedule && a.best_cost == b.best_cost && a.trace == b.trace &&
           a.evals_used == b.evals_used && a.repair_failures == b.repair_failures;
}

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c13 = builtin_system("case13"), c40 = builtin_system("case40"), c10 = builtin_system("case10mf"),
               c6 = builtin_system("case6"), c15 = builtin_system("case15");
    bool ok = true;
    ok &= near_check("case13 DSD", schedule_cost(c13, ref::case13_dsd.schedule), 17963.829, 0.01);
    ok &= near_check("case13 HGA", schedule_cost(c13, ref::case13_hga.schedule), 17963.829, 0.01);
    ok &= near_check("case40 DSD", schedule_cost(c40, ref::case40_dsd.schedule), 121412.53, 0.05);
    ok &= near_check("case40 CCPSO", schedule_cost(c40, ref::case40_ccpso.schedule), 121412.54, 0.05);
    ok &= near_check("case10mf SSA", schedule_cost(c10, ref::case10mf_ssa.schedule), 623.6433, 0.01);
    ok &= near_check("case6 SSA", schedule_cost(c6, ref::case6_ssa.schedule), 15419.803, 0.01);
    ok &= near_check("case15 SSA", schedule_cost(c15, ref::case15_ssa.schedule), 32662.51, 0.05);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail("elapsed %.4f s", secs);
    verdict(1, ok && secs < 1.0, "published schedules reproduce published costs");
}

void criterion2() {
    const auto c6 = builtin_system("case6"), c15 = builtin_system("case15");
    bool ok = true;
    ok &= near_check("case6 B-matrix loss", line_loss(c6, ref::case6_ssa.schedule), 10.642, 0.05);
    ok &= near_check("case15 B-matrix loss", line_loss(c15, ref::case15_ssa.schedule), 26.3306, 0.05);

    auto surplus = [](const TestSystem& s, const ref::ReferenceSchedule& r) {
        double sum = 0.0;
        for (double p : r.schedule)
            sum += p;
        return sum - s.demand;
    };
    ok &= near_check("case6 sum(p) - demand", surplus(c6, ref::case6_ssa), *ref::case6_ssa.loss, 5e-3);
    ok &= near_check("case15 sum(p) - demand", surplus(c15, ref::case15_ssa), *ref::case15_ssa.loss, 5e-3);
    verdict(2, ok, "line loss at published schedules, matrix and matrix-free");
}

void criterion3() {
    struct Target {
        const char* name;
        double best_max;
        double mean_max;
    };
    const Target targets[] = {{"case13", 17963.95, 17964.10},
                              {"case40", 121425.0, std::numeric_limits<double>::infinity()},
                              {"case10mf", 623.85, std::numeric_limits<double>::infinity()},
                              {"case6", 15425.0, std::numeric_limits<double>::infinity()},
                              {"case15", 32680.0, std::numeric_limits<double>::infinity()}};
    bool ok = true;
    for (const auto& t : targets) {
        const auto sys = builtin_system(t.name);
        const auto params = SsaParams::defaults_for(sys);
        const auto t0 = std::chrono::steady_clock::now();
        const auto stats = run_trials(sys, params, 25, 1);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto report = check_feasible(sys, stats.best_schedule, 1e-6);
        const bool pass = stats.best <= t.best_max && stats.mean <= t.mean_max && report.feasible();
        detail("%-9s best %.4f (<= %.2f) mean %.4f sd %.4f feasible %s  %.1f s/run %s", t.name, stats.best, t.best_max,
               stats.mean, stats.sd, report.feasible() ? "yes" : "no", secs / 25.0, pass ? "ok" : "MISS");
        ok &= pass;
    }
    verdict(3, ok, "solver quality over 25 seeds at 100000 evaluations");
}

void criterion4() {
    bool ok = true;
    std::mt19937_64 rng(20240601);
    for (auto name : kBuiltinNames) {
        const auto sys = builtin_system(name);
        const auto zones = zone_table(sys);
        const auto cfg = default_repair_config(sys);
        std::size_t feasible = 0, idempotent = 0;
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            Schedule s;
            for (const auto& u : sys.units)
                s.push_back(std::uniform_real_distribution<double>(u.p_min, u.p_max)(rng));
            try {
                repair(sys, zones, s, rng, cfg);
            } catch (const RepairError&) {
                continue;
            }
            worst = std::max(worst, std::abs(deficit(sys, s)));
            if (check_feasible(sys, s, 1e-6).feasible())
                ++feasible;
            Schedule again = s;
            try {
                repair(sys, zones, again, rng, cfg);
            } catch (const RepairError&) {
            }
            if (again == s)
                ++idempotent;
        }
        const bool pass = feasible == 1000 && idempotent == 1000 && worst <= 1e-6;
        detail("%-9s feasible %zu/1000 idempotent %zu/1000 max |deficit| %.3g %s", std::string(name).c_str(), feasible,
               idempotent, worst, pass ? "ok" : "MISS");
        ok &= pass;
    }
    verdict(4, ok, "repair feasibility, idempotence and residual");
}

void criterion5() {
    bool ok = true;
    for (auto name : kBuiltinNames) {
        const auto sys = builtin_system(name);
        auto params = SsaParams::defaults_for(sys);
        params.max_evals = 20000;
        params.seed = 77;
        const bool same = same_run(run(sys, params), run(sys, params));

        const auto seq = run_trials(sys, params, 4, 500, 1);
        const auto par = run_trials(sys, params, 4, 500, 4);
        bool trials_equal = seq.best_schedule == par.best_schedule && seq.traces == par.traces &&
                            seq.mean == par.mean && seq.sd == par.sd && seq.median_trial == par.median_trial;
        for (std::size_t k = 0; k < seq.per_trial.size(); ++k)
            trials_equal &= seq.per_trial[k].best_cost == par.per_trial[k].best_cost;
        detail("%-9s repeat identical %s, 1 vs 4 threads identical %s", std::string(name).c_str(), same ? "yes" : "no",
               trials_equal ? "yes" : "no");
        ok &= same && trials_equal;
    }
    verdict(5, ok, "bit-identical reruns, parallel equals sequential");
}

void criterion6() {
    const auto sys = builtin_system("case13");
    SsaParams base = SsaParams::defaults_for(sys);
    base.pop_size = 13;
    base.r_a = 10;
    base.p_c = 0.9;
    base.p_m = 0.1;

    struct Block {
        SweepParameter parameter;
        std::vector<double> values;
        double expected;
    };
    const std::vector<double> probs{0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
    const Block blocks[] = {{SweepParameter::AttenuationRate, {0.1, 0.2, 0.5, 1, 2, 3, 5, 7, 10, 15, 20}, 10.0},
                            {SweepParameter::MaskChangeProbability, probs, 0.9},
                            {SweepParameter::MaskOneProbability, probs, 0.1}};
    bool ok = true;
    for (const auto& b : blocks) {
        SweepSpec spec;
        spec.parameter = b.parameter;
        spec.values = b.values;
        spec.fixed = base;
        if (b.parameter == SweepParameter::AttenuationRate)
            spec.fixed.p_c = 0.7;
        spec.trials = 25;
        const auto rows = parameter_sweep(sys, spec, 1);
        const auto best = std::min_element(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
            return x.stats.mean < y.stats.mean;
        });
        for (const auto& r : rows)
            detail("%-4s %-5g best %.4f mean %.4f sd %.4f", to_string(b.parameter), r.value, r.stats.best, r.stats.mean,
                   r.stats.sd);
        const bool pass = best->value == b.expected;
        detail("%s: best by mean is %g, expected %g %s", to_string(b.parameter), best->value, b.expected,
               pass ? "ok" : "MISS");
        ok &= pass;
    }
    verdict(6, ok, "case13 sweeps rank r_a = 10, p_c = 0.9, p_m = 0.1 best by mean");
}

TestSystem quadratic_system(std::size_t n, double demand) {
    TestSystem s;
    s.name = "quad" + std::to_string(n);
    s.demand = demand;
    for (std::size_t i = 0; i < n; ++i) {
        PowerUnit u;
        u.p_min = 10;
        u.p_max = 100 + 20.0 * static_cast<double>(i);
        u.fuels = {{100, 2 + 0.3 * static_cast<double>(i), 0.01 + 0.002 * static_cast<double>(i), 0, 0}};
        s.units.push_back(u);
    }
    validate(s);
    return s;
}

// Exhaustive search with every unit but the last on a 0.01 MW grid; the last
// unit closes the balance exactly.
double grid_oracle(const TestSystem& s) {
    const std::size_t n = s.size();
    double best = std::numeric_limits<double>::infinity();
    Schedule p(n);
    auto rec = [&](auto&& self, std::size_t i, double used) -> void {
        if (i + 1 == n) {
            const double last = s.demand - used;
            if (last < s.units[i].p_min - 1e-9 || last > s.units[i].p_max + 1e-9)
                return;
            p[i] = last;
            best = std::min(best, schedule_cost(s, p));
            return;
        }
        const auto& u = s.units[i];
        const long lo = std::lround(u.p_min * 100), hi = std::lround(u.p_max * 100);
        for (long k = lo; k <= hi; ++k) {
            p[i] = static_cast<double>(k) / 100.0;
            self(self, i + 1, used + p[i]);
        }
    };
    rec(rec, 0, 0.0);
    return best;
}

void criterion7() {
    bool ok = true;
    for (const auto& sys : {quadratic_system(2, 150), quadratic_system(3, 220)}) {
        const double oracle = grid_oracle(sys);
        const auto stats = run_trials(sys, SsaParams::defaults_for(sys), 25, 1);
        const bool pass = std::abs(stats.best - oracle) <= 0.05;
        detail("%-6s grid oracle %.6f solver best of 25 %.6f gap %.6f %s", sys.name.c_str(), oracle, stats.best,
               stats.best - oracle, pass ? "ok" : "MISS");
        ok &= pass;
    }
    verdict(7, ok, "small quadratic systems match the grid-search oracle within 0.05");
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

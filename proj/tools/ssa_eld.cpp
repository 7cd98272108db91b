// ssa_eld: solve, evaluate and benchmark economic load dispatch instances.
//
// Exit status: 0 success, 2 usage or configuration error, 3 solver failure.

#include "ssaeld/ssaeld.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace ssaeld;

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

/// Thrown for bad flags or inputs detected after CLI11 parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string system;
    std::uint64_t seed = 1;
    std::size_t trials = 25;
    std::optional<std::size_t> evals;
    std::optional<std::size_t> pop;
    std::optional<double> r_a, p_c, p_m, omega_max, omega_min;
    double eps_balance = kDefaultBalanceEps;
    std::string gamma_mode = "logistic";
    std::string trace;
    std::string format = "table";
    std::string sweep_format = "csv";
    std::string schedule;
    std::string spec;
    unsigned threads = 0;
};

SsaParams make_params(const TestSystem& system, const Options& o) {
    SsaParams p = SsaParams::defaults_for(system);
    if (o.pop)
        p.pop_size = *o.pop;
    if (o.evals)
        p.max_evals = *o.evals;
    if (o.r_a)
        p.r_a = *o.r_a;
    if (o.p_c)
        p.p_c = *o.p_c;
    if (o.p_m)
        p.p_m = *o.p_m;
    if (o.omega_max)
        p.omega_max = *o.omega_max;
    if (o.omega_min)
        p.omega_min = *o.omega_min;
    p.eps_balance = o.eps_balance;
    p.seed = o.seed;
    p.gamma_mode = o.gamma_mode == "resample" ? GammaMode::Resample : GammaMode::LogisticMap;
    validate(p);
    return p;
}

/// Comma- or whitespace-separated decimal numbers, parsed independently of locale.
Schedule read_schedule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open schedule file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    Schedule out;
    std::size_t i = 0;
    auto is_sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (i < text.size()) {
        if (is_sep(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && !is_sep(text[j]))
            ++j;
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, x);
        if (ec != std::errc{} || ptr != text.data() + j || !std::isfinite(x))
            throw UsageError("schedule file '" + path + "': bad number '" + text.substr(i, j - i) + "'");
        out.push_back(x);
        i = j;
    }
    return out;
}

void print_report(const TestSystem& system, const Schedule& s, const std::string& format,
                  const RunResult* run_info, double eps_balance) {
    const double cost = schedule_cost(system, s);
    const double residual = balance_residual(system, s);
    const auto report = check_feasible(system, s, eps_balance);

    if (format == "csv") {
        std::cout << "system,cost,loss,residual,feasible";
        if (run_info)
            std::cout << ",evals,wall_time";
        for (std::size_t i = 0; i < s.size(); ++i)
            std::cout << ",p" << i + 1;
        std::cout << '\n' << system.name << std::fixed << std::setprecision(6) << ',' << cost << ',';
        if (system.loss)
            std::cout << line_loss(system, s);
        std::cout << ',' << std::scientific << std::setprecision(3) << residual << ','
                  << (report.feasible() ? "yes" : "no");
        if (run_info)
            std::cout << ',' << run_info->evals_used << ',' << std::fixed << std::setprecision(3) << run_info->wall_time;
        std::cout << std::fixed << std::setprecision(5);
        for (double p : s)
            std::cout << ',' << p;
        std::cout << '\n';
        return;
    }

    std::cout << "system    " << system.name << " (" << system.size() << " units, demand " << system.demand
              << " MW)\n";
    std::cout << "unit     output (MW)\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        std::cout << std::setw(4) << i + 1 << std::setw(16) << std::fixed << std::setprecision(5) << s[i] << '\n';
    std::cout << std::fixed << std::setprecision(6);
    std::cout << "cost      " << cost << " $/h\n";
    if (system.loss)
        std::cout << "loss      " << line_loss(system, s) << " MW\n";
    std::cout << "residual  " << std::scientific << std::setprecision(3) << residual << " MW\n" << std::fixed;
    if (run_info) {
        std::cout << "evals     " << run_info->evals_used << '\n';
        std::cout << "time      " << std::setprecision(3) << run_info->wall_time << " s\n";
    }
    for (const auto& v : report.unit_violations)
        std::cout << "violation unit " << v.unit + 1 << ": " << to_string(v.kind) << " (" << std::setprecision(5)
                  << v.p << " MW)\n";
    if (report.balance_violated)
        std::cout << "violation balance: |residual| > " << std::scientific << eps_balance << std::fixed << " MW\n";
    std::cout << "feasible  " << (report.feasible() ? "yes" : "no") << '\n';
}

int cmd_solve(const Options& o) {
    const TestSystem system = resolve_system(o.system);
    const SsaParams params = make_params(system, o);
    const RunResult result = run(system, params);
    print_report(system, result.best_schedule, o.format, &result, params.eps_balance);
    if (!o.trace.empty())
        export_trace(result, o.trace);
    return 0;
}

int cmd_eval(const Options& o) {
    const TestSystem system = resolve_system(o.system);
    if (o.schedule.empty())
        throw UsageError("eval needs --schedule <path>");
    const Schedule s = read_schedule_file(o.schedule);
    if (s.size() != system.size())
        throw UsageError("schedule has " + std::to_string(s.size()) + " values, system '" + system.name + "' has " +
                         std::to_string(system.size()) + " units");
    print_report(system, s, o.format, nullptr, o.eps_balance);
    return 0;
}

int cmd_bench(const Options& o) {
    if (o.trials == 0)
        throw UsageError("--trials must be at least 1");
    const TestSystem system = resolve_system(o.system);
    const SsaParams params = make_params(system, o);
    const TrialStats stats = run_trials(system, params, o.trials, o.seed, o.threads);

    if (o.format == "csv") {
        std::cout << kStatsCsvHeader << '\n';
        write_stats_csv_row(std::cout, system.name, stats);
    } else {
        std::cout << "system    " << system.name << '\n'
                  << "params    " << params.pop_size << '/' << params.r_a << '/' << params.p_c << '/' << params.p_m
                  << ", " << params.max_evals << " evaluations\n"
                  << "trials    " << o.trials << " (seeds " << o.seed << ".." << o.seed + o.trials - 1 << ")\n"
                  << std::fixed << std::setprecision(6) << "best      " << stats.best << '\n'
                  << "mean      " << stats.mean << '\n'
                  << "sd        " << stats.sd << " (sample, n-1)\n"
                  << "median    seed " << stats.per_trial[stats.median_trial].seed << '\n'
                  << "schedule ";
        std::cout << std::setprecision(5);
        for (double p : stats.best_schedule)
            std::cout << ' ' << p;
        std::cout << '\n';
    }
    if (!o.trace.empty())
        export_trace(stats.traces[stats.median_trial], o.trace);
    return 0;
}

int cmd_sweep(const Options& o) {
    const TestSystem system = resolve_system(o.system);
    if (o.spec.empty())
        throw UsageError("sweep needs a spec file");
    SweepSpec spec = parse_sweep_spec(detail::parse_json_file(o.spec), make_params(system, o));
    if (spec.values.empty())
        throw UsageError("sweep value list is empty");
    if (spec.trials == 0)
        throw UsageError("sweep needs at least one trial");
    const auto rows = parameter_sweep(system, spec, o.seed, o.threads);
    if (o.sweep_format == "table")
        write_sweep_table(std::cout, spec.parameter, rows);
    else
        write_sweep_csv(std::cout, spec.parameter, rows);
    return 0;
}

int cmd_info(const Options& o) {
    if (o.system.empty()) {
        for (auto name : kBuiltinNames) {
            const TestSystem s = builtin_system(name);
            std::cout << std::left << std::setw(10) << s.name << std::right << std::setw(4) << s.size()
                      << " units  demand " << std::setw(6) << s.demand << " MW" << (s.loss ? "  loss" : "") << '\n';
        }
        return 0;
    }
    std::cout << to_json(resolve_system(o.system)).dump(2) << '\n';
    return 0;
}

void add_system(CLI::App* cmd, Options& o, bool required = true) {
    auto* opt = cmd->add_option("--system", o.system, "built-in name (case13, case40, case10mf, case6, case15) or system file");
    if (required)
        opt->required();
}

void add_solver_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "random seed (base seed for trials)");
    cmd->add_option("--evals", o.evals, "fitness evaluation budget");
    cmd->add_option("--pop", o.pop, "population size (default: number of units)");
    cmd->add_option("--ra", o.r_a, "attenuation rate");
    cmd->add_option("--pc", o.p_c, "mask change probability");
    cmd->add_option("--pm", o.p_m, "mask one-bit probability");
    cmd->add_option("--omega-max", o.omega_max, "maximum memory strength");
    cmd->add_option("--omega-min", o.omega_min, "minimum memory strength");
    cmd->add_option("--eps-balance", o.eps_balance, "power balance tolerance (MW)");
    cmd->add_option("--gamma-mode", o.gamma_mode, "chaotic factor: logistic (default) or resample")
        ->check(CLI::IsMember({"logistic", "resample"}));
    cmd->add_option("--threads", o.threads, "worker threads for trials (0 = all cores)");
}

void add_format(CLI::App* cmd, Options& o) {
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"table", "csv"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Social spider optimizer for economic load dispatch"};
    app.require_subcommand(1);
    Options o;

    auto* solve = app.add_subcommand("solve", "run the optimizer once and print the best schedule");
    add_system(solve, o);
    add_solver_flags(solve, o);
    add_format(solve, o);
    solve->add_option("--trace", o.trace, "write the convergence trace (evals,cost) to this CSV file");

    auto* eval = app.add_subcommand("eval", "evaluate a given schedule");
    add_system(eval, o);
    add_format(eval, o);
    eval->add_option("--schedule", o.schedule, "file with one MW value per unit, comma separated")->required();
    eval->add_option("--eps-balance", o.eps_balance, "power balance tolerance (MW)");

    auto* bench = app.add_subcommand("bench", "repeat the optimizer over several seeds");
    add_system(bench, o);
    add_solver_flags(bench, o);
    add_format(bench, o);
    bench->add_option("--trials", o.trials, "number of runs");
    bench->add_option("--trace", o.trace, "write the median run's trace to this CSV file");

    auto* sweep = app.add_subcommand("sweep", "sweep one parameter over a list of values");
    add_system(sweep, o);
    add_solver_flags(sweep, o);
    sweep->add_option("--format", o.sweep_format, "output format (default csv)")
        ->check(CLI::IsMember({"table", "csv"}));
    sweep->add_option("spec", o.spec, "sweep spec file (JSON)")->required();

    auto* info = app.add_subcommand("info", "list built-in systems or print one as JSON");
    add_system(info, o, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    std::cout.imbue(std::locale::classic());
    try {
        if (*solve)
            return cmd_solve(o);
        if (*eval)
            return cmd_eval(o);
        if (*bench)
            return cmd_bench(o);
        if (*sweep)
            return cmd_sweep(o);
        return cmd_info(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

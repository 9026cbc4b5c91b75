// Command-line front end: evaluates finite-blocklength erasure bounds,
// estimate-then-transmit and windowing strategies, runs seeded Monte Carlo
// checks, and emits CSV/JSON series for the figure-reproduction sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "erasure/cli_support.hpp"
#include "erasure/mc.hpp"

using nlohmann::ordered_json;
using namespace erasure;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitIo = 2;
constexpr int kExitSolver = 3;

class io_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Flat JSON config files: {"delta": 0.5, "T": 10000}. Keys are offered to
// every subcommand (values act as defaults; flags given on the command line
// override them). Nested objects scope keys to one subcommand.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConfigError("config must be a JSON object");
        std::vector<CLI::ConfigItem> out;
        emit_object(j, {}, out);
        return out;
    }

  private:
    static std::string scalar_to_string(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void emit_object(const nlohmann::json& obj, std::vector<std::string> parents,
                            std::vector<CLI::ConfigItem>& out) {
        static const std::vector<std::vector<std::string>> kCommandPaths = {
            {},
            {"bounds"},
            {"ett"},
            {"sweep"},
            {"window"},
            {"simulate", "ett"},
            {"simulate", "window"}};
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                emit_object(value, std::move(nested), out);
                continue;
            }
            const std::string input = scalar_to_string(value);
            if (parents.empty()) {
                // Unscoped keys apply wherever an option of that name exists.
                for (const auto& path : kCommandPaths) {
                    CLI::ConfigItem item;
                    item.parents = path;
                    item.name = key;
                    item.inputs = {input};
                    out.push_back(std::move(item));
                }
            } else {
                CLI::ConfigItem item;
                item.parents = parents;
                item.name = key;
                item.inputs = {input};
                out.push_back(std::move(item));
            }
        }
    }
};

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open output file: " + path);
    f << content;
    f.flush();
    if (!f) throw io_error("write failed: " + path);
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

void add_output_options(CLI::App* cmd, std::string& out_path, std::string& format) {
    cmd->add_option("--out", out_path, "Output file (stdout when omitted)");
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    // Lets --config (defined on the root app) be given after the subcommand.
    cmd->fallthrough();
}

double resolve_backoff(const Channel& ch, std::int64_t Te, bool has_b, double b,
                       bool has_eeff, double eeff) {
    if (has_b == has_eeff) {
        throw cli_usage_error("exactly one of --backoff and --eeff must be given");
    }
    return has_b ? b : backoff_for_eeff(ch, Te, eeff);
}

// ---- bounds ----------------------------------------------------------------

struct BoundsArgs {
    double delta = 0.3;
    std::int64_t n = 100;
    std::string grid = "0:1:0.01";
    std::string out, format = "csv";
};

void run_bounds(const BoundsArgs& a) {
    const Channel ch{a.delta};
    const auto rates = parse_grid(a.grid).values();
    CsvWriter csv;
    csv.header = "rate,eps_lower,eps_upper";
    ordered_json rows = ordered_json::array();
    for (const double r : rates) {
        const auto bp = eps_bounds(ch, {a.n, r});
        csv.rows.push_back(format_num(r) + "," + format_num(bp.lower) + "," +
                           format_num(bp.upper));
        rows.push_back({{"rate", r}, {"eps_lower", bp.lower}, {"eps_upper", bp.upper}});
    }
    if (a.format == "json") {
        emit(a.out, dump_json({{"delta", a.delta}, {"n", a.n}, {"rows", rows}}));
    } else {
        emit(a.out, csv.str());
    }
}

// ---- ett -------------------------------------------------------------------

struct EttArgs {
    double delta = 0.5;
    std::int64_t T = 0;
    std::int64_t Te = 0;
    double b = 0.0;
    double eeff = 0.0;
    bool has_b = false, has_eeff = false;
    std::string out, format = "csv";
};

void run_ett(const EttArgs& a) {
    const Channel ch{a.delta};
    if (a.Te < 1 || a.Te >= a.T) {
        throw cli_usage_error("need 1 <= Te < T");
    }
    const double b = resolve_backoff(ch, a.Te, a.has_b, a.b, a.has_eeff, a.eeff);
    const EttConfig cfg{a.T, a.Te, b};
    const auto rep = ett_report(ch, cfg);
    const double oracle = oracle_throughput(
        ch, a.T, std::max(rep.eeff_gauss, std::numeric_limits<double>::min()));

    if (a.format == "json") {
        ordered_json j{{"delta", a.delta},
                       {"T", a.T},
                       {"Te", a.Te},
                       {"b", b},
                       {"eeff_exact", rep.eeff_exact},
                       {"eeff_gauss", rep.eeff_gauss},
                       {"N_exact", rep.N_exact},
                       {"N_gauss", rep.N_gauss},
                       {"N_ppv_lower", rep.N_ppv_lower},
                       {"N_ppv_upper", rep.N_ppv_upper},
                       {"N_oracle", oracle},
                       {"regret_step", rep.regret_step}};
        emit(a.out, dump_json(j));
        return;
    }
    CsvWriter csv;
    csv.header =
        "delta,T,Te,b,eeff_exact,eeff_gauss,N_exact,N_gauss,N_ppv_lower,N_ppv_upper,"
        "N_oracle,regret_step";
    csv.rows.push_back(format_num(a.delta) + "," + format_int(a.T) + "," +
                       format_int(a.Te) + "," + format_num(b) + "," +
                       format_num(rep.eeff_exact) + "," + format_num(rep.eeff_gauss) +
                       "," + format_num(rep.N_exact) + "," + format_num(rep.N_gauss) +
                       "," + format_num(rep.N_ppv_lower) + "," +
                       format_num(rep.N_ppv_upper) + "," + format_num(oracle) + "," +
                       format_num(rep.regret_step));
    emit(a.out, csv.str());
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string kind;
    double delta = 0.5;
    double eeff = 0.5;
    std::int64_t T = 10000;
    std::int64_t Te = 256;
    std::string grid;
    std::string strategies = "ett_opt,geometric,arithmetic";
    std::string out, format = "csv";
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

void run_sweep_te(const SweepArgs& a) {
    const Channel ch{a.delta};
    const auto grid = parse_grid(a.grid.empty() ? "10:2000:10" : a.grid).values();
    const std::int64_t te_star = optimal_te(ch, a.T, a.eeff);
    // Mark the grid point nearest the solver's optimum.
    std::size_t mark = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::fabs(grid[i] - static_cast<double>(te_star)) <
            std::fabs(grid[mark] - static_cast<double>(te_star))) {
            mark = i;
        }
    }
    CsvWriter csv;
    csv.header = "Te,N_gauss,N_exact,is_theory_opt";
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto te = static_cast<std::int64_t>(std::llround(grid[i]));
        const EttConfig cfg{a.T, te, backoff_for_eeff(ch, te, a.eeff)};
        const double n_gauss = throughput_gauss(ch, cfg);
        const double n_exact = throughput_step_exact(ch, cfg);
        const int is_opt = i == mark ? 1 : 0;
        csv.rows.push_back(format_int(te) + "," + format_num(n_gauss) + "," +
                           format_num(n_exact) + "," + format_int(is_opt));
        rows.push_back({{"Te", te},
                        {"N_gauss", n_gauss},
                        {"N_exact", n_exact},
                        {"is_theory_opt", is_opt}});
    }
    if (a.format == "json") {
        emit(a.out, dump_json({{"kind", "te"}, {"Te_opt", te_star}, {"rows", rows}}));
    } else {
        csv.comments.push_back("# Te_opt," + format_int(te_star));
        emit(a.out, csv.str());
    }
}

void run_sweep_backoff(const SweepArgs& a) {
    const Channel ch{a.delta};
    const auto grid = parse_grid(a.grid.empty() ? "0:0.2:0.001" : a.grid).values();
    const auto opt = optimal_eeff(ch, a.Te);
    const double b_star = opt.interior ? backoff_for_eeff(ch, a.Te, opt.eeff) : 0.0;
    std::size_t mark = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::fabs(grid[i] - b_star) < std::fabs(grid[mark] - b_star)) mark = i;
    }
    CsvWriter csv;
    csv.header = "b,N_gauss,N_exact,is_theory_opt";
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const EttConfig cfg{a.T, a.Te, grid[i]};
        const double n_gauss = throughput_gauss(ch, cfg);
        const double n_exact = throughput_step_exact(ch, cfg);
        const int is_opt = i == mark ? 1 : 0;
        csv.rows.push_back(format_num(grid[i]) + "," + format_num(n_gauss) + "," +
                           format_num(n_exact) + "," + format_int(is_opt));
        rows.push_back({{"b", grid[i]},
                        {"N_gauss", n_gauss},
                        {"N_exact", n_exact},
                        {"is_theory_opt", is_opt}});
    }
    if (a.format == "json") {
        emit(a.out, dump_json({{"kind", "backoff"}, {"b_opt", b_star}, {"rows", rows}}));
    } else {
        csv.comments.push_back("# b_opt," + format_num(b_star));
        emit(a.out, csv.str());
    }
}

void run_sweep_te_opt(const SweepArgs& a) {
    const Channel ch{a.delta};
    const auto grid = parse_grid(a.grid.empty() ? "3:6:1" : a.grid).values();
    CsvWriter csv;
    csv.header = "T,Te_opt";
    ordered_json rows = ordered_json::array();
    std::vector<std::pair<double, double>> pts;
    for (const double g : grid) {
        const auto T = static_cast<std::int64_t>(std::llround(std::pow(10.0, g)));
        const std::int64_t te = optimal_te(ch, T, a.eeff);
        csv.rows.push_back(format_int(T) + "," + format_int(te));
        rows.push_back({{"T", T}, {"Te_opt", te}});
        pts.emplace_back(static_cast<double>(T), static_cast<double>(te));
    }
    const double slope = fit_loglog_slope(pts);
    if (a.format == "json") {
        emit(a.out, dump_json({{"kind", "te_opt_vs_T"},
                               {"rows", rows},
                               {"slopes", {{"Te_opt", slope}}}}));
    } else {
        csv.comments.push_back("# slope,Te_opt," + format_num(slope));
        emit(a.out, csv.str());
    }
}

void run_sweep_regret(const SweepArgs& a) {
    const Channel ch{a.delta};
    const auto grid = parse_grid(a.grid.empty() ? "10:20:1" : a.grid).values();
    const auto strategies = split_list(a.strategies);
    for (const auto& s : strategies) {
        if (s != "ett_opt" && s != "geometric" && s != "arithmetic") {
            throw cli_usage_error("unknown strategy name '" + s + "'");
        }
    }
    CsvWriter csv;
    csv.header = "strategy,T,N,N_oracle,regret";
    ordered_json rows = ordered_json::array();
    ordered_json slopes = ordered_json::object();
    for (const auto& strategy : strategies) {
        std::vector<std::pair<double, double>> pts;
        bool all_positive = true;
        for (const double g : grid) {
            const auto T = static_cast<std::int64_t>(std::llround(std::exp2(g)));
            const double oracle = oracle_throughput(ch, T, a.eeff);
            double n = 0.0;
            if (strategy == "ett_opt") {
                const std::int64_t te = optimal_te(ch, T, a.eeff);
                n = throughput_gauss(ch, {T, te, backoff_for_eeff(ch, te, a.eeff)});
            } else {
                const auto M = static_cast<std::int64_t>(
                    std::floor(std::log2(static_cast<double>(T) + 1.0)));
                const auto sched = strategy == "geometric" ? make_geometric(M)
                                                           : make_arithmetic(T, M);
                n = window_throughput_gauss(ch, sched, a.eeff).N_total;
            }
            const double r = regret(n, oracle);
            csv.rows.push_back(strategy + "," + format_int(T) + "," + format_num(n) +
                               "," + format_num(oracle) + "," + format_num(r));
            rows.push_back({{"strategy", strategy},
                            {"T", T},
                            {"N", n},
                            {"N_oracle", oracle},
                            {"regret", r}});
            if (r <= 0.0) all_positive = false;
            pts.emplace_back(static_cast<double>(T), r);
        }
        const double slope =
            all_positive && pts.size() >= 2 ? fit_loglog_slope(pts)
                                            : std::numeric_limits<double>::quiet_NaN();
        slopes[strategy] = slope;
        csv.comments.push_back("# slope," + strategy + "," + format_num(slope));
    }
    if (a.format == "json") {
        emit(a.out,
             dump_json({{"kind", "regret_curve"}, {"rows", rows}, {"slopes", slopes}}));
    } else {
        emit(a.out, csv.str());
    }
}

void run_sweep(const SweepArgs& a) {
    if (a.kind == "te") {
        run_sweep_te(a);
    } else if (a.kind == "backoff") {
        run_sweep_backoff(a);
    } else if (a.kind == "te_opt_vs_T") {
        run_sweep_te_opt(a);
    } else if (a.kind == "regret_curve") {
        run_sweep_regret(a);
    } else {
        throw cli_usage_error("unknown sweep kind '" + a.kind + "'");
    }
}

// ---- window ----------------------------------------------------------------

struct WindowArgs {
    double delta = 0.5;
    std::string schedule;
    std::int64_t M = 0;
    double eeff = 0.5;
    std::int64_t trials = 0;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string error_model = "step";
    std::string out, format = "csv";
};

// The exact per-block summation walks every cumulative-count value, so it is
// capped at the same 1e7 limit as the other exact evaluators.
constexpr std::int64_t kExactLimit = 10000000;

void run_window(const WindowArgs& a) {
    const Channel ch{a.delta};
    Schedule sched;
    if (!a.schedule.empty() && a.M > 0) {
        throw cli_usage_error("give either --schedule or --M, not both");
    }
    if (!a.schedule.empty()) {
        sched = parse_schedule_spec(a.schedule);
    } else if (a.M > 0) {
        sched = make_geometric(a.M);
    } else {
        throw cli_usage_error("one of --schedule or --M is required");
    }
    const std::string kind = a.schedule.empty()
                                 ? "geometric"
                                 : a.schedule.substr(0, a.schedule.find(':'));
    const auto gauss = window_throughput_gauss(ch, sched, a.eeff);
    const std::int64_t largest_window = sched.total() - sched.blocks.back();
    const bool have_exact = largest_window <= kExactLimit;
    WindowReport exact{};
    if (have_exact) exact = window_throughput_exact(ch, sched, a.eeff);
    const bool geometric = sched.kind == ScheduleKind::geometric;
    BoundPair bounds{};
    if (geometric) bounds = geometric_bounds(ch, sched.M(), a.eeff);

    SimReport sim{};
    const bool have_sim = a.trials > 0;
    if (have_sim) {
        const SimConfig sc{a.trials, a.seed, parse_error_model(a.error_model)};
        sim = simulate_window(ch, sched, a.eeff, sc, a.workers);
    }

    if (a.format == "json") {
        ordered_json j{{"kind", kind},
                       {"blocks", sched.blocks},
                       {"T", sched.total()},
                       {"M", sched.M()},
                       {"delta", a.delta},
                       {"eeff", a.eeff},
                       {"queries", gauss.queries},
                       {"N_gauss", gauss.N_total}};
        j["N_exact"] = have_exact ? ordered_json(exact.N_total) : ordered_json(nullptr);
        if (geometric) {
            j["bounds"] = {{"lower", bounds.lower}, {"upper", bounds.upper}};
        }
        ordered_json blocks = ordered_json::array();
        for (std::size_t i = 0; i < gauss.per_block.size(); ++i) {
            ordered_json blk{{"S_prev", gauss.per_block[i].S_prev},
                             {"backoff", gauss.per_block[i].backoff},
                             {"contribution_gauss", gauss.per_block[i].contribution}};
            if (have_exact) blk["contribution_exact"] = exact.per_block[i].contribution;
            blocks.push_back(std::move(blk));
        }
        j["per_block"] = std::move(blocks);
        if (have_sim) {
            j["sim"] = {{"trials", sim.trials},
                        {"seed", a.seed},
                        {"error_model", a.error_model},
                        {"mean_N", sim.mean_N},
                        {"stderr_N", sim.stderr_N},
                        {"empirical_eeff", sim.empirical_eeff},
                        {"stderr_eeff", sim.stderr_eeff}};
        }
        emit(a.out, dump_json(j));
        return;
    }

    CsvWriter csv;
    csv.header =
        "kind,M,T,eeff,queries,N_exact,N_gauss,bound_lower,bound_upper,mc_mean_N,"
        "mc_stderr_N,mc_eeff,mc_stderr_eeff,mc_trials";
    csv.rows.push_back(
        kind + "," + format_int(sched.M()) + "," + format_int(sched.total()) + "," +
        format_num(a.eeff) + "," + format_int(gauss.queries) + "," +
        (have_exact ? format_num(exact.N_total) : "") + "," + format_num(gauss.N_total) +
        "," + (geometric ? format_num(bounds.lower) : "") + "," +
        (geometric ? format_num(bounds.upper) : "") + "," +
        (have_sim ? format_num(sim.mean_N) : "") + "," +
        (have_sim ? format_num(sim.stderr_N) : "") + "," +
        (have_sim ? format_num(sim.empirical_eeff) : "") + "," +
        (have_sim ? format_num(sim.stderr_eeff) : "") + "," +
        (have_sim ? format_int(sim.trials) : ""));
    emit(a.out, csv.str());
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    double delta = 0.5;
    std::int64_t T = 0;
    std::int64_t Te = 0;
    double b = 0.0;
    double eeff = 0.0;
    bool has_b = false, has_eeff = false;
    std::string schedule;
    std::string error_model = "step";
    std::int64_t trials = 0;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out, format = "csv";
};

void emit_sim_row(const SimulateArgs& a, const std::string& strategy,
                  const std::string& te_str, const std::string& b_str, double eeff,
                  const SimReport& rep, double exact_n, double exact_eeff) {
    const double z_n =
        rep.stderr_N > 0.0
            ? (rep.mean_N - exact_n) / rep.stderr_N
            : (rep.mean_N == exact_n ? 0.0 : std::numeric_limits<double>::infinity());
    const bool have_exact_eeff = !std::isnan(exact_eeff);
    const double z_e =
        have_exact_eeff
            ? (rep.stderr_eeff > 0.0
                   ? (rep.empirical_eeff - exact_eeff) / rep.stderr_eeff
                   : (rep.empirical_eeff == exact_eeff
                          ? 0.0
                          : std::numeric_limits<double>::infinity()))
            : std::numeric_limits<double>::quiet_NaN();

    // The worker count is deliberately absent from the output: results are
    // identical for any parallelism, and the rows say so.
    if (a.format == "json") {
        ordered_json j{{"strategy", strategy},
                       {"error_model", a.error_model},
                       {"delta", a.delta},
                       {"eeff", eeff},
                       {"trials", rep.trials},
                       {"seed", a.seed},
                       {"mean_N", rep.mean_N},
                       {"stderr_N", rep.stderr_N},
                       {"exact_N", exact_n},
                       {"z_N", z_n},
                       {"empirical_eeff", rep.empirical_eeff},
                       {"stderr_eeff", rep.stderr_eeff}};
        if (!te_str.empty()) j["Te"] = std::stoll(te_str);
        if (!b_str.empty()) j["b"] = std::stod(b_str);
        if (!a.schedule.empty()) j["schedule"] = a.schedule;
        if (have_exact_eeff) {
            j["exact_eeff"] = exact_eeff;
            j["z_eeff"] = z_e;
        }
        emit(a.out, dump_json(j));
        return;
    }
    CsvWriter csv;
    csv.header =
        "strategy,error_model,delta,T,Te,b,eeff,schedule,trials,seed,mean_N,"
        "stderr_N,exact_N,z_N,empirical_eeff,stderr_eeff,exact_eeff,z_eeff";
    csv.rows.push_back(
        strategy + "," + a.error_model + "," + format_num(a.delta) + "," +
        (a.T > 0 ? format_int(a.T) : "") + "," + te_str + "," + b_str + "," +
        format_num(eeff) + "," + a.schedule + "," + format_int(rep.trials) + "," +
        std::to_string(a.seed) + "," +
        format_num(rep.mean_N) + "," + format_num(rep.stderr_N) + "," +
        format_num(exact_n) + "," + format_num(z_n) + "," +
        format_num(rep.empirical_eeff) + "," + format_num(rep.stderr_eeff) + "," +
        (have_exact_eeff ? format_num(exact_eeff) : "") + "," +
        (have_exact_eeff ? format_num(z_e) : ""));
    emit(a.out, csv.str());
}

void run_simulate_ett(const SimulateArgs& a) {
    const Channel ch{a.delta};
    if (a.trials < 1) throw cli_usage_error("--trials must be >= 1");
    if (a.Te < 1 || a.Te >= a.T) throw cli_usage_error("need 1 <= Te < T");
    const double b = resolve_backoff(ch, a.Te, a.has_b, a.b, a.has_eeff, a.eeff);
    const EttConfig cfg{a.T, a.Te, b};
    const ErrorModel model = parse_error_model(a.error_model);
    const SimConfig sc{a.trials, a.seed, model};
    const auto rep = simulate_ett(ch, cfg, sc, a.workers);
    const double exact_n = throughput_ppv(ch, cfg, model);
    double exact_eeff;
    switch (model) {
        case ErrorModel::step:
            exact_eeff = eeff_step_exact(ch, a.Te, b);
            break;
        case ErrorModel::ppv_upper:
            exact_eeff = eeff_ppv(ch, cfg, ErrorModel::ppv_upper);
            break;
        case ErrorModel::ppv_lower:
            exact_eeff = eeff_ppv(ch, cfg, ErrorModel::ppv_lower);
            break;
        default:
            exact_eeff = 0.5 * (eeff_ppv(ch, cfg, ErrorModel::ppv_upper) +
                                eeff_ppv(ch, cfg, ErrorModel::ppv_lower));
            break;
    }
    emit_sim_row(a, "ett", format_int(a.Te), format_num(b),
                 eeff_step_gauss(ch, a.Te, b), rep, exact_n, exact_eeff);
}

void run_simulate_window(const SimulateArgs& a) {
    const Channel ch{a.delta};
    if (a.trials < 1) throw cli_usage_error("--trials must be >= 1");
    if (!a.has_eeff) throw cli_usage_error("--eeff is required");
    const auto sched = parse_schedule_spec(a.schedule);
    const ErrorModel model = parse_error_model(a.error_model);
    const SimConfig sc{a.trials, a.seed, model};
    const auto rep = simulate_window(ch, sched, a.eeff, sc, a.workers);
    const double exact_n = window_throughput_ppv(ch, sched, a.eeff, model).N_total;
    const double exact_eeff = model == ErrorModel::step
                                  ? window_eeff_step_exact(ch, sched, a.eeff)
                                  : std::numeric_limits<double>::quiet_NaN();
    SimulateArgs rowargs = a;
    rowargs.T = sched.total();
    emit_sim_row(rowargs, "window", "", "", a.eeff, rep, exact_n, exact_eeff);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Throughput and regret analysis for rate adaptation over a binary "
                 "erasure channel with sparse erasure-rate feedback"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat JSON config file; flags override its values");
    app.config_formatter(std::make_shared<JsonConfig>());
    app.allow_config_extras(CLI::config_extras_mode::ignore);

    BoundsArgs bounds_args;
    auto* bounds_cmd = app.add_subcommand("bounds", "Block-error bounds over a rate grid");
    bounds_cmd->add_option("--delta", bounds_args.delta, "Erasure probability")->required();
    bounds_cmd->add_option("--n", bounds_args.n, "Blocklength")->required();
    bounds_cmd->add_option("--grid", bounds_args.grid, "Rate grid lo:hi:step")
        ->capture_default_str();
    add_output_options(bounds_cmd, bounds_args.out, bounds_args.format);
    bounds_cmd->callback([&] { run_bounds(bounds_args); });

    EttArgs ett_args;
    auto* ett_cmd =
        app.add_subcommand("ett", "Evaluate one estimate-then-transmit configuration");
    ett_cmd->add_option("--delta", ett_args.delta, "Erasure probability")->required();
    ett_cmd->add_option("--T", ett_args.T, "Horizon")->required();
    ett_cmd->add_option("--Te", ett_args.Te, "Estimation window")->required();
    auto* ett_b = ett_cmd->add_option("--backoff", ett_args.b, "Rate backoff");
    auto* ett_e = ett_cmd->add_option("--eeff", ett_args.eeff, "Target block error");
    add_output_options(ett_cmd, ett_args.out, ett_args.format);
    ett_cmd->callback([&] {
        ett_args.has_b = ett_b->count() > 0;
        ett_args.has_eeff = ett_e->count() > 0;
        run_ett(ett_args);
    });

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Parameter sweeps: te | backoff | te_opt_vs_T | regret_curve");
    sweep_cmd->add_option("kind", sweep_args.kind, "Sweep kind")->required();
    sweep_cmd->add_option("--delta", sweep_args.delta, "Erasure probability")
        ->capture_default_str();
    sweep_cmd->add_option("--eeff", sweep_args.eeff, "Target block error")
        ->capture_default_str();
    sweep_cmd->add_option("--T", sweep_args.T, "Horizon (te/backoff sweeps)")
        ->capture_default_str();
    sweep_cmd->add_option("--Te", sweep_args.Te, "Estimation window (backoff sweep)")
        ->capture_default_str();
    sweep_cmd->add_option("--grid", sweep_args.grid,
                          "Grid lo:hi:step; te/backoff: literal values, "
                          "te_opt_vs_T: log10 T, regret_curve: log2 T");
    sweep_cmd->add_option("--strategies", sweep_args.strategies,
                          "Comma list for regret_curve")
        ->capture_default_str();
    add_output_options(sweep_cmd, sweep_args.out, sweep_args.format);
    sweep_cmd->callback([&] { run_sweep(sweep_args); });

    WindowArgs window_args;
    auto* window_cmd = app.add_subcommand("window", "Evaluate a windowing schedule");
    window_cmd->add_option("--delta", window_args.delta, "Erasure probability")->required();
    window_cmd->add_option("--schedule", window_args.schedule,
                           "geometric:M | arithmetic:T,M | custom:a,b,...");
    window_cmd->add_option("--M", window_args.M, "Shortcut for geometric:M");
    window_cmd->add_option("--eeff", window_args.eeff, "Target block error")->required();
    window_cmd->add_option("--trials", window_args.trials, "Monte Carlo trials (0 = none)")
        ->capture_default_str();
    window_cmd->add_option("--seed", window_args.seed, "Monte Carlo master seed")
        ->envname("ERASURE_REGRET_SEED")
        ->capture_default_str();
    window_cmd->add_option("--workers", window_args.workers, "Monte Carlo worker threads")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    window_cmd
        ->add_option("--error-model", window_args.error_model,
                     "step | ppv_upper | ppv_lower | ppv_mid")
        ->capture_default_str();
    add_output_options(window_cmd, window_args.out, window_args.format);
    window_cmd->callback([&] { run_window(window_args); });

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo vs exact evaluators");
    sim_cmd->require_subcommand(1);
    sim_cmd->fallthrough();
    auto* sim_ett = sim_cmd->add_subcommand("ett", "Simulate estimate-then-transmit");
    sim_ett->add_option("--delta", sim_args.delta, "Erasure probability")->required();
    sim_ett->add_option("--T", sim_args.T, "Horizon")->required();
    sim_ett->add_option("--Te", sim_args.Te, "Estimation window")->required();
    auto* sim_b = sim_ett->add_option("--backoff", sim_args.b, "Rate backoff");
    auto* sim_e = sim_ett->add_option("--eeff", sim_args.eeff, "Target block error");
    sim_ett
        ->add_option("--error-model", sim_args.error_model,
                     "step | ppv_upper | ppv_lower | ppv_mid")
        ->capture_default_str();
    sim_ett->add_option("--trials", sim_args.trials, "Trials")->required();
    sim_ett->add_option("--seed", sim_args.seed, "Master seed")
        ->envname("ERASURE_REGRET_SEED")
        ->capture_default_str();
    sim_ett->add_option("--workers", sim_args.workers, "Worker threads")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    add_output_options(sim_ett, sim_args.out, sim_args.format);
    sim_ett->callback([&] {
        sim_args.has_b = sim_b->count() > 0;
        sim_args.has_eeff = sim_e->count() > 0;
        run_simulate_ett(sim_args);
    });

    auto* sim_win = sim_cmd->add_subcommand("window", "Simulate a windowing schedule");
    sim_win->add_option("--delta", sim_args.delta, "Erasure probability")->required();
    sim_win->add_option("--schedule", sim_args.schedule,
                        "geometric:M | arithmetic:T,M | custom:a,b,...")
        ->required();
    auto* sim_we = sim_win->add_option("--eeff", sim_args.eeff, "Target block error");
    sim_win
        ->add_option("--error-model", sim_args.error_model,
                     "step | ppv_upper | ppv_lower | ppv_mid")
        ->capture_default_str();
    sim_win->add_option("--trials", sim_args.trials, "Trials")->required();
    sim_win->add_option("--seed", sim_args.seed, "Master seed")
        ->envname("ERASURE_REGRET_SEED")
        ->capture_default_str();
    sim_win->add_option("--workers", sim_args.workers, "Worker threads")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    add_output_options(sim_win, sim_args.out, sim_args.format);
    sim_win->callback([&] {
        sim_args.has_eeff = sim_we->count() > 0;
        run_simulate_window(sim_args);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cli_usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const no_solution_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const convergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const bracketing_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

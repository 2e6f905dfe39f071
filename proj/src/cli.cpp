#include "ehpc/cli.hpp"

#include "ehpc/analysis.hpp"
#include "ehpc/bellman.hpp"
#include "ehpc/errors.hpp"
#include "ehpc/sim.hpp"
#include "ehpc/spec_string.hpp"
#include "ehpc/threshold.hpp"
#include "ehpc/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace ehpc {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_line(std::initializer_list<double> values) {
    std::string line;
    for (double v : values) {
        if (!line.empty()) line += ',';
        line += fmt12(v);
    }
    line += '\n';
    return line;
}

struct Common {
    std::string dist;
    std::string reward = "awgn";
    std::string out_path;
    bool json = false;
    std::uint64_t seed = 42;
    std::size_t threads = 0;
};

struct Options {
    Common common;
    std::size_t scan_points = 100000;
    std::string envelope = "auto";
    double capacity = 0.0;
    std::size_t grid = 512;
    double tol = 1e-8;
    std::size_t max_sweeps = 100000;
    std::string policy = "greedy";
    std::string compare;
    std::uint64_t steps = 1000000;
    std::uint64_t stream = 0;
    std::size_t replicates = 20;
    double c_min = 0.0;
    double c_max = 0.0;
    std::size_t points = 21;
    std::string family;
    std::string regime;
    std::vector<double> mu;
    std::size_t b_points = 50;
    std::size_t g_points = 200;
    std::vector<int> only;
};

BellmanOptions solver_options(const Options& o) {
    BellmanOptions s;
    s.grid_n = o.grid;
    s.tol = o.tol;
    s.max_sweeps = o.max_sweeps;
    return s;
}

BoundOptions bound_options(const Options& o) {
    BoundOptions b;
    b.scan_points = o.scan_points;
    if (o.envelope == "hull") {
        b.envelope = EnvelopeMethod::Hull;
    } else if (o.envelope != "auto") {
        throw DomainError("--envelope must be auto or hull");
    }
    return b;
}

Policy parse_policy(const std::string& text, const EnergyDistribution& d, const RewardFunction& r, double c,
                    const Options& o) {
    const SpecString s = parse_spec_string(text);
    if (s.name == "greedy" && s.params.empty()) return Policy::greedy();
    if (s.name == "modified") {
        for (const auto& [key, value] : s.params) {
            if (key != "eps") throw DomainError("modified policy takes only eps");
        }
        return Policy::modified_greedy(s.has("eps") ? s.number("eps") : best_modified_epsilon(d, r, c));
    }
    if (s.name == "optimal" && s.params.empty()) return Policy::from_solution(solve(d, r, c, solver_options(o)));
    throw DomainError("unknown policy '" + text + "' (expected greedy, modified[:eps=E] or optimal)");
}

Json bound_json(const BoundValue& b) {
    Json j;
    j["value"] = b.value;
    j["unbounded_within_cap"] = b.unbounded_within_cap;
    j["cap"] = b.cap;
    return j;
}

Json threshold_json(const EnergyDistribution& d, const RewardFunction& r, const ThresholdReport& rep) {
    Json j;
    j["dist"] = d.describe();
    j["reward"] = r.describe();
    j["mean"] = d.mean();
    j["c_star"] = rep.c_star;
    j["method"] = method_name(rep.method);
    j["residual"] = rep.residual;
    j["c_lower"] = rep.c_lower;
    j["c_upper"] = rep.c_upper.value;
    j["c_upper_unbounded_within_cap"] = rep.c_upper.unbounded_within_cap;
    if (rep.semi) {
        j["semi_lower"] = rep.semi->lower;
        j["semi_upper"] = rep.semi->upper;
    }
    return j;
}

Json sim_json(const Policy& p, const SimulationResult& s) {
    Json j;
    j["policy"] = p.describe();
    j["steps"] = s.steps;
    j["seed"] = s.seed;
    j["stream"] = s.stream;
    j["avg_reward"] = s.avg_reward;
    j["ci_halfwidth_95"] = s.ci_halfwidth_95;
    j["final_battery"] = s.final_battery;
    return j;
}

class Runner {
public:
    Runner(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

    int threshold() {
        const auto [d, r] = law();
        const ThresholdReport rep = threshold_report(d, r, bound_options(o_));
        return summary(threshold_json(d, r, rep));
    }

    int bounds() {
        const auto [d, r] = law();
        const BoundOptions opts = bound_options(o_);
        require_nondegenerate(d, r);
        Json j;
        j["dist"] = d.describe();
        j["reward"] = r.describe();
        j["mean"] = d.mean();
        j["c_lower"] = bound_lower(d, r, opts);
        j["c_upper"] = bound_json(bound_upper(d, r, opts));
        if (r.kind() == RewardKind::Awgn) {
            const SemiBounds s = semi_bounds_awgn(d.support_min(), d.support_max(), d.mean());
            j["semi_lower"] = s.lower;
            j["semi_upper"] = s.upper;
        }
        if (d.family() == Family::Bernoulli && r.kind() == RewardKind::Awgn && d.parameter() > 0.0 &&
            d.parameter() < 1.0) {
            const BernoulliReference ref = bernoulli_reference(d.support_min(), d.support_max(), d.parameter());
            j["closed_form"] = {{"c_star", ref.c_star},
                                {"c_lower", ref.c_lower},
                                {"c_upper", ref.c_upper},
                                {"semi_lower", ref.semi_lower},
                                {"semi_upper", ref.semi_upper}};
        }
        return summary(j);
    }

    int solve_cmd() {
        const auto [d, r] = law();
        const BellmanSolution s = solve(d, r, capacity(), solver_options(o_));
        Json meta;
        meta["dist"] = d.describe();
        meta["capacity"] = s.capacity;
        meta["gamma"] = s.gamma;
        meta["gamma_greedy"] = greedy_throughput(d, r, s.capacity);
        meta["residual"] = s.residual;
        meta["iterations"] = s.iterations;
        if (o_.common.json) {
            Json rows = Json::array();
            for (std::size_t i = 0; i < s.grid.size(); ++i) rows.push_back({s.grid[i], s.h[i], s.policy[i]});
            meta["columns"] = {"b", "h", "g_opt"};
            meta["rows"] = rows;
            return emit(meta.dump(2) + "\n", std::nullopt);
        }
        std::string csv = "b,h,g_opt\n";
        for (std::size_t i = 0; i < s.grid.size(); ++i) csv += csv_line({s.grid[i], s.h[i], s.policy[i]});
        return emit(csv, meta);
    }

    int simulate_cmd() {
        const auto [d, r] = law();
        const double c = capacity();
        const Policy p = parse_policy(o_.policy, d, r, c, o_);
        Json j;
        j["dist"] = d.describe();
        j["reward"] = r.describe();
        j["capacity"] = c;
        if (o_.compare.empty()) {
            const SimulationResult s = simulate(p, d, r, c, o_.steps, o_.common.seed, o_.stream);
            j.update(sim_json(p, s));
            return summary(j);
        }
        const Policy q = parse_policy(o_.compare, d, r, c, o_);
        const PairedComparison cmp =
            compare_policies(p, q, d, r, c, o_.steps, o_.common.seed, o_.replicates, o_.common.threads);
        j["policy"] = p.describe();
        j["baseline"] = q.describe();
        j["steps"] = o_.steps;
        j["seed"] = o_.common.seed;
        j["replicates"] = o_.replicates;
        j["mean_difference"] = cmp.mean_difference;
        j["ci_halfwidth_95"] = cmp.ci_halfwidth_95;
        j["significant"] = cmp.significant;
        double mean_a = 0.0, mean_b = 0.0;
        for (std::size_t k = 0; k < cmp.a.size(); ++k) {
            mean_a += cmp.a[k].avg_reward;
            mean_b += cmp.b[k].avg_reward;
        }
        j["avg_reward"] = mean_a / static_cast<double>(cmp.a.size());
        j["baseline_avg_reward"] = mean_b / static_cast<double>(cmp.b.size());
        return summary(j);
    }

    int curves_cmd() {
        const auto [d, r] = law();
        if (!(o_.c_max > 0.0)) throw DomainError("curves needs --cmax > 0");
        const double c_min = o_.c_min > 0.0 ? o_.c_min : o_.c_max / static_cast<double>(std::max<std::size_t>(o_.points, 1));
        const auto rows = curves(d, r, c_min, o_.c_max, o_.points, solver_options(o_), o_.common.threads);
        bool failed = false;
        for (const auto& row : rows) {
            if (!row.ok) {
                failed = true;
                err_ << "ehpc: solver failed at c=" << fmt12(row.c) << ": " << row.error << "\n";
            }
        }
        if (o_.common.json) {
            Json arr = Json::array();
            for (const auto& row : rows) {
                Json j;
                j["c"] = row.c;
                j["gamma_star"] = row.ok ? Json(row.gamma_star) : Json(nullptr);
                j["gamma_greedy"] = row.gamma_greedy;
                j["gamma_upper"] = row.gamma_upper;
                arr.push_back(j);
            }
            emit(arr.dump(2) + "\n", std::nullopt);
        } else {
            std::string csv = "c,gamma_star,gamma_greedy,gamma_upper\n";
            for (const auto& row : rows) csv += csv_line({row.c, row.gamma_star, row.gamma_greedy, row.gamma_upper});
            emit(csv, std::nullopt);
        }
        return failed ? kExitConvergence : kExitOk;
    }

    int sweep_cmd() {
        if (o_.family.empty() || o_.regime.empty() || o_.mu.empty()) {
            throw DomainError("sweep needs --family, --regime and --mu");
        }
        const auto rows = asymptotic_sweep(parse_family(o_.family), parse_regime(o_.regime), o_.mu, o_.common.threads);
        if (o_.common.json) {
            Json arr = Json::array();
            for (const auto& row : rows) {
                Json j;
                j["mu"] = row.mu;
                j["c_star"] = row.c_star;
                j["psi"] = row.psi;
                j["ratio"] = row.ratio;
                if (std::isfinite(row.closed_form)) j["closed_form"] = row.closed_form;
                arr.push_back(j);
            }
            return emit(arr.dump(2) + "\n", std::nullopt);
        }
        std::string csv = "mu,c_star,psi,ratio\n";
        for (const auto& row : rows) csv += csv_line({row.mu, row.c_star, row.psi, row.ratio});
        return emit(csv, std::nullopt);
    }

    int phicheck_cmd() {
        const auto [d, r] = law();
        const PhiCheck pc = phi_check(d, r, capacity(), o_.b_points, o_.g_points, o_.common.threads);
        Json j;
        j["dist"] = d.describe();
        j["capacity"] = pc.capacity;
        j["b_points"] = pc.b_points;
        j["g_points"] = pc.g_points;
        j["nondecreasing"] = pc.nondecreasing;
        j["worst_increment"] = pc.worst_increment;
        j["min_left_derivative"] = pc.min_left_derivative;
        j["argmin_b"] = pc.argmin_b;
        j["argmin_g"] = pc.argmin_g;
        return summary(j);
    }

    int verify_cmd() {
        VerifyOptions vo;
        vo.seed = o_.common.seed;
        vo.threads = o_.common.threads;
        vo.only = o_.only;
        const auto results = run_verify(vo);
        bool all = true;
        for (const auto& c : results) all = all && c.pass;
        if (o_.common.json) {
            Json arr = Json::array();
            for (const auto& c : results) {
                arr.push_back({{"criterion", c.id},
                               {"name", c.name},
                               {"pass", c.pass},
                               {"detail", c.detail},
                               {"seconds", c.seconds}});
            }
            emit(arr.dump(2) + "\n", std::nullopt);
        } else {
            std::string text;
            for (const auto& c : results) text += format_criterion(c) + "\n";
            emit(text, std::nullopt);
        }
        return all ? kExitOk : kExitVerifyFailed;
    }

private:
    std::pair<EnergyDistribution, RewardFunction> law() const {
        if (o_.common.dist.empty()) throw DomainError("--dist is required");
        return {parse_distribution(o_.common.dist), parse_reward(o_.common.reward)};
    }

    double capacity() const {
        if (!(o_.capacity > 0.0) || !std::isfinite(o_.capacity)) throw DomainError("--capacity must be finite and > 0");
        return o_.capacity;
    }

    int summary(const Json& j) { return emit(j.dump(2) + "\n", std::nullopt); }

    // Writes the main payload to --out (or `out`); with --out set, `meta` is echoed on `out`.
    int emit(const std::string& payload, const std::optional<Json>& meta) {
        if (o_.common.out_path.empty()) {
            out_ << payload;
            return kExitOk;
        }
        std::ofstream f(o_.common.out_path, std::ios::binary);
        if (!f) throw DomainError("cannot open " + o_.common.out_path + " for writing");
        f << payload;
        if (!f) throw DomainError("failed writing " + o_.common.out_path);
        if (meta) out_ << meta->dump(2) << "\n";
        return kExitOk;
    }

    const Options& o_;
    std::ostream& out_;
    std::ostream& err_;
};

void add_common(CLI::App* sub, Common& c, bool needs_dist) {
    if (needs_dist) {
        sub->add_option("--dist", c.dist, "Energy arrival law, e.g. poisson:lambda=2")->required();
        sub->add_option("--reward", c.reward, "Reward: awgn | linear:slope=S | table:points=x:r:dr;...")
            ->capture_default_str();
    }
    sub->add_option("--out", c.out_path, "Write the table to this file instead of stdout");
    sub->add_flag("--json", c.json, "JSON instead of CSV or plain text");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Throughput and greedy-optimality threshold of battery-limited energy-harvesting links", "ehpc"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    auto* threshold = app.add_subcommand("threshold", "c* with its bounds");
    add_common(threshold, o.common, true);
    auto* bounds = app.add_subcommand("bounds", "Lower/upper and semi-universal bounds on c*");
    add_common(bounds, o.common, true);
    for (auto* sub : {threshold, bounds}) {
        sub->add_option("--scan-points", o.scan_points, "Scan resolution for the bound predicates")
            ->capture_default_str();
        sub->add_option("--envelope", o.envelope, "auto | hull")->capture_default_str();
    }

    auto* solve_sub = app.add_subcommand("solve", "Bellman solution on a battery grid (CSV b,h,g_opt)");
    add_common(solve_sub, o.common, true);
    auto* simulate_sub = app.add_subcommand("simulate", "Monte Carlo average reward of a policy");
    add_common(simulate_sub, o.common, true);
    auto* curves_sub = app.add_subcommand("curves", "Optimal, greedy and upper throughput versus capacity");
    add_common(curves_sub, o.common, true);
    auto* phicheck_sub = app.add_subcommand("phicheck", "Monotonicity scan of phi(b, g)");
    add_common(phicheck_sub, o.common, true);
    for (auto* sub : {solve_sub, simulate_sub, phicheck_sub}) {
        sub->add_option("--capacity", o.capacity, "Battery capacity c")->required();
    }
    for (auto* sub : {solve_sub, simulate_sub, curves_sub}) {
        sub->add_option("--grid", o.grid, "Solver grid size")->capture_default_str();
        sub->add_option("--tol", o.tol, "Solver span tolerance")->capture_default_str();
        sub->add_option("--max-sweeps", o.max_sweeps, "Solver sweep limit")->capture_default_str();
    }

    simulate_sub->add_option("--policy", o.policy, "greedy | modified[:eps=E] | optimal")->capture_default_str();
    simulate_sub->add_option("--compare", o.compare, "Second policy for a paired comparison");
    simulate_sub->add_option("--steps", o.steps, "Slots per run")->capture_default_str();
    simulate_sub->add_option("--seed", o.common.seed, "Random seed")->capture_default_str();
    simulate_sub->add_option("--stream", o.stream, "Stream index of a single run")->capture_default_str();
    simulate_sub->add_option("--replicates", o.replicates, "Paired replicates with --compare")->capture_default_str();

    curves_sub->add_option("--cmin", o.c_min, "Smallest capacity (default cmax/points)");
    curves_sub->add_option("--cmax", o.c_max, "Largest capacity")->required();
    curves_sub->add_option("--points", o.points, "Number of capacities")->capture_default_str();
    curves_sub->add_option("--seed", o.common.seed, "Accepted for uniformity; curves are deterministic");

    auto* sweep_sub = app.add_subcommand("sweep", "c*/psi(mu) over a list of means");
    add_common(sweep_sub, o.common, false);
    sweep_sub->add_option("--family", o.family, "geometric | poisson | uniform | exponential | rayleigh")->required();
    sweep_sub->add_option("--regime", o.regime, "small | large")->required();
    sweep_sub->add_option("--mu", o.mu, "Comma-separated increasing means")->delimiter(',')->required();
    sweep_sub->add_option("--seed", o.common.seed, "Accepted for uniformity; sweeps are deterministic");

    phicheck_sub->add_option("--b-points", o.b_points, "Battery levels")->capture_default_str();
    phicheck_sub->add_option("--g-points", o.g_points, "Consumption levels per battery level")->capture_default_str();

    auto* verify_sub = app.add_subcommand("verify", "Run the built-in acceptance checks");
    add_common(verify_sub, o.common, false);
    verify_sub->add_option("--seed", o.common.seed, "Seed for randomized instances")->capture_default_str();
    verify_sub->add_option("--only", o.only, "Comma-separated criterion numbers")->delimiter(',');

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "ehpc: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    Runner run(o, out, err);
    try {
        if (threshold->parsed()) return run.threshold();
        if (bounds->parsed()) return run.bounds();
        if (solve_sub->parsed()) return run.solve_cmd();
        if (simulate_sub->parsed()) return run.simulate_cmd();
        if (curves_sub->parsed()) return run.curves_cmd();
        if (sweep_sub->parsed()) return run.sweep_cmd();
        if (phicheck_sub->parsed()) return run.phicheck_cmd();
        if (verify_sub->parsed()) return run.verify_cmd();
    } catch (const DomainError& e) {
        err << "ehpc: " << e.what() << "\n";
        return kExitDomain;
    } catch (const ConvergenceError& e) {
        err << "ehpc: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        err << "ehpc: internal error: " << e.what() << "\n";
        return 1;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace ehpc

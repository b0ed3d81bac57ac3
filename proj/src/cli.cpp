#include "pandora/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pandora/error.hpp"
#include "pandora/exact.hpp"
#include "pandora/index.hpp"
#include "pandora/json_io.hpp"
#include "pandora/lclrs3.hpp"
#include "pandora/parallel.hpp"
#include "pandora/policies.hpp"
#include "pandora/ptas.hpp"

namespace fs = std::filesystem;

namespace pandora {

namespace {

struct Printer {
    bool pretty = false;
    std::string operator()(const Scalar& x) const {
        return pretty ? to_string(x) + " (~" + to_decimal(x, 12) + ")" : to_string(x);
    }
};

PnoiInstance load_valid(const std::string& path) {
    auto inst = load_instance(path);
    require_valid(inst);
    return inst;
}

Scalar parse_scalar_flag(const std::string& text, const char* flag) {
    try {
        return parse_scalar(text);
    } catch (const std::exception&) {
        throw ParseError(std::string(flag) + ": not a rational number: '" + text + "'");
    }
}

std::vector<long long> parse_partition(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("--partition: not an integer: '" + item + "'");
        }
    }
    if (out.empty()) throw ParseError("--partition: empty list");
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

fs::path meta_path(const fs::path& out) {
    fs::path p = out;
    if (p.extension() == ".json") p.replace_extension();
    p += ".meta.json";
    return p;
}

std::string ptas_report(const PnoiInstance& inst, const PtasResult& r, std::size_t oracle_limit) {
    std::string opt_exact, ratio;
    if (inst.size() <= oracle_limit) {
        const Scalar opt = optimal_value(inst, oracle_limit).value;
        opt_exact = to_string(opt);
        if (opt > 0) ratio = to_string(Scalar(r.payoff / opt));
    }
    std::ostringstream os;
    os << "theta,m,opt_lower,opt_exact,opt_L,lifted_payoff,ratio\n"
       << to_string(r.theta.value) << ',' << r.lp.points.size() << ',' << to_string(r.theta.alg_payoff) << ','
       << opt_exact << ',' << to_string(r.opt_L) << ',' << to_string(r.payoff) << ',' << ratio << '\n';
    return os.str();
}

}  // namespace

std::string run_bench(const BenchOptions& opt, std::ostream& err) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(opt.dir)) {
        const std::string name = e.path().filename().string();
        if (!e.is_regular_file() || e.path().extension() != ".json") continue;
        if (name.size() >= 10 && name.compare(name.size() - 10, 10, ".meta.json") == 0) continue;
        files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    struct Row {
        std::string instance, method, value;
        double ms;
    };
    std::vector<std::vector<Row>> rows(files.size());
    std::vector<std::string> errors(files.size());

    using Method = std::function<Scalar(const PnoiInstance&)>;
    auto method_fn = [](const std::string& m) -> Method {
        if (m == "half-approx") return half_approx;
        if (m == "index") return max_kappa_expectation;
        if (m == "support01") return [](const PnoiInstance& i) { return support01_optimal(i).value; };
        if (m == "structured-search") return [](const PnoiInstance& i) { return best_structured_policy(i).value; };
        if (m == "dp") return [](const PnoiInstance& i) { return optimal_value(i).value; };
        if (m == "classic") return [](const PnoiInstance& i) { return classic_optimal_value(i); };
        if (m.rfind("ptas@", 0) == 0) {
            const Scalar eps = parse_scalar_flag(m.substr(5), "--methods");
            return [eps](const PnoiInstance& i) { return ptas_pipeline(i, eps).payoff; };
        }
        throw ParseError("--methods: unknown method '" + m + "'");
    };
    std::vector<std::pair<std::string, Method>> methods;
    for (const auto& m : opt.methods) methods.emplace_back(m, method_fn(m));

    parallel_for(files.size(), [&](std::size_t k) {
        const std::string id = files[k].filename().string();
        PnoiInstance inst;
        try {
            inst = load_valid(files[k].string());
        } catch (const std::exception& e) {
            errors[k] += id + ": " + e.what() + "\n";
            return;
        }
        for (const auto& [name, fn] : methods) {
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const Scalar v = fn(inst);
                const auto t1 = std::chrono::steady_clock::now();
                rows[k].push_back({id, name, to_string(v), std::chrono::duration<double, std::milli>(t1 - t0).count()});
            } catch (const std::exception& e) {
                errors[k] += id + " [" + name + "]: " + e.what() + "\n";
            }
        }
    });

    for (const auto& e : errors) err << e;
    std::vector<Row> all;
    for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    std::sort(all.begin(), all.end(), [](const Row& a, const Row& b) {
        return std::tie(a.instance, a.method) < std::tie(b.instance, b.method);
    });
    std::ostringstream os;
    os << "instance,method,value" << (opt.timing ? ",wall_ms" : "") << '\n';
    for (const auto& r : all) {
        os << r.instance << ',' << r.method << ',' << r.value;
        if (opt.timing) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", r.ms);
            os << ',' << buf;
        }
        os << '\n';
    }
    return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact solvers and checks for Pandora's box with non-obligatory inspection"};
    app.name("pandora");
    app.require_subcommand(1);
    app.fallthrough();
    Printer show;
    app.add_flag("--pretty", show.pretty, "Append decimal approximations to printed values");
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: PANDORA_THREADS or hardware)");

    std::string instance, mode = "pnoi", table, policy, out_path, partition, suite, traces, summary, report, dir,
                methods = "half-approx,index,dp", epsilon = "1/10";
    bool answer = false, timing = false;
    std::uint64_t seed = 1, cases = 100, trials = 0;
    std::size_t limit = kDefaultDpLimit, search_limit = kDefaultStructuredLimit, oracle_limit = kDefaultDpLimit;

    auto* solve = app.add_subcommand("solve", "Exact optimal value by dynamic programming");
    solve->add_option("--instance", instance, "Instance JSON")->required();
    solve->add_option("--mode", mode, "pnoi or classic")->check(CLI::IsMember({"pnoi", "classic"}));
    solve->add_option("--table", table, "Write the value table here");
    solve->add_option("--limit", limit, "Largest n accepted");

    auto* classic = app.add_subcommand("classic", "Optimal value when boxes must be opened before taking");
    classic->add_option("--instance", instance, "Instance JSON")->required();
    classic->add_option("--table", table, "Write the value table here");

    auto* index = app.add_subcommand("index", "Reservation values and index policy payoff");
    index->add_option("--instance", instance, "Instance JSON")->required();
    index->add_option("--trials", trials, "Simulated runs (0 = exact payoff only)");
    index->add_option("--seed", seed, "Simulation seed");
    index->add_option("--traces", traces, "Write one JSON trace per line here");
    index->add_option("--summary", summary, "Write the summary CSV here instead of stdout");

    auto* eval = app.add_subcommand("eval", "Exact payoff of a committing policy");
    eval->add_option("--instance", instance, "Instance JSON")->required();
    eval->add_option("--policy", policy, "Policy JSON")->required();

    auto* structured = app.add_subcommand("structured", "Best committing policy by exhaustive search");
    structured->add_option("--instance", instance, "Instance JSON")->required();
    structured->add_option("--out", out_path, "Write the policy JSON here");
    structured->add_option("--limit", search_limit, "Largest n accepted");

    auto* reduce = app.add_subcommand("reduce", "Build the instance encoding a Partition input");
    reduce->add_option("--partition", partition, "Comma separated integers")->required();
    reduce->add_option("--out", out_path, "Instance JSON to write")->required();
    reduce->add_flag("--answer", answer, "Also decide the Partition input (n <= 3)");

    auto* verify = app.add_subcommand("verify", "Randomized property suites");
    verify->add_option("--suite", suite, "Suite name")->required()->check(CLI::IsMember(verify_suites()));
    verify->add_option("--seed", seed, "Seed");
    verify->add_option("--cases", cases, "Number of cases");

    auto* ptas = app.add_subcommand("ptas", "Approximate policy by discretization");
    ptas->add_option("--instance", instance, "Instance JSON")->required();
    ptas->add_option("--epsilon", epsilon, "Accuracy in (0, 1/2]");
    ptas->add_option("--out", out_path, "Write the policy JSON here");
    ptas->add_option("--report", report, "Write the report CSV here");
    ptas->add_option("--limit", limit, "Largest n accepted");
    ptas->add_option("--oracle-limit", oracle_limit, "Largest n for which the report includes the optimum");

    auto* bench = app.add_subcommand("bench", "Run methods over a directory of instances");
    bench->add_option("--dir", dir, "Directory of instance JSON files")->required();
    bench->add_option("--methods", methods,
                      "Comma separated: half-approx, index, support01, structured-search, dp, classic, ptas@EPS");
    bench->add_option("--out", out_path, "Write the CSV here instead of stdout");
    bench->add_flag("--timing", timing, "Add a wall_ms column (not reproducible)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (threads > 0) set_thread_count(threads);

        if (solve->parsed() || classic->parsed()) {
            auto inst = load_valid(instance);
            const bool pnoi = solve->parsed() && mode == "pnoi";
            auto res = pnoi ? optimal_value(inst, limit) : classic_optimal_solution(inst, limit);
            out << show(res.value) << '\n';
            if (!table.empty()) write_text(table, value_table_to_json(res.table).dump(2) + "\n");
        } else if (index->parsed()) {
            auto inst = load_valid(instance);
            auto taus = compute_indices(inst);
            for (std::size_t i = 0; i < taus.size(); ++i) out << "tau " << i + 1 << ' ' << show(taus[i]) << '\n';
            out << "payoff " << show(max_kappa_expectation(inst)) << '\n';
            if (trials > 0) {
                SimulationConfig cfg{seed, trials};
                std::string csv = summary_csv_header() + "\n";
                if (!traces.empty()) {
                    auto runs = run_index_policy(inst, cfg);
                    std::string text;
                    for (const auto& t : runs) text += trace_to_json(t).dump() + "\n";
                    write_text(traces, text);
                    csv += summary_csv_row(summarize(runs, cfg, "index")) + "\n";
                } else {
                    csv += summary_csv_row(index_policy_summary(inst, cfg)) + "\n";
                }
                if (summary.empty()) {
                    out << csv;
                } else {
                    write_text(summary, csv);
                }
            }
        } else if (eval->parsed()) {
            auto inst = load_valid(instance);
            Json j;
            try {
                j = Json::parse(read_text(policy));
            } catch (const Json::parse_error& e) {
                throw ParseError(policy + ": " + e.what());
            }
            out << show(evaluate_structured_policy(inst, structured_policy_from_json(j))) << '\n';
        } else if (structured->parsed()) {
            auto inst = load_valid(instance);
            auto best = best_structured_policy(inst, search_limit);
            out << show(best.value) << '\n' << structured_policy_to_json(best.policy).dump() << '\n';
            if (!out_path.empty()) write_text(out_path, structured_policy_to_json(best.policy).dump(2) + "\n");
        } else if (reduce->parsed()) {
            auto S = parse_partition(partition);
            if (answer && S.size() > kDefaultPartitionLimit) {
                throw SizeError("--answer searches all orderings of n + 2 boxes and is limited to n <= " +
                                std::to_string(kDefaultPartitionLimit) + " (got n = " + std::to_string(S.size()) +
                                "); drop --answer to only build the instance");
            }
            auto red = reduce_partition(S);
            auto c = reduction_constants(red);
            write_text(out_path, instance_to_json(red.instance.base).dump(2) + "\n");
            Json meta;
            meta["gamma"] = to_string(red.gamma);
            meta["delta"] = to_string(red.delta);
            meta["y"] = to_string(red.y);
            meta["t"] = to_string(red.t);
            meta["t_error_bound"] = to_string(red.t_error_bound);
            meta["tau_H"] = to_string(red.tau_H);
            meta["tau_L"] = to_string(red.tau_L);
            meta["k1"] = to_string(c.k1);
            meta["k2"] = to_string(c.k2);
            meta["C"] = to_string(c.C);
            write_text(meta_path(out_path), meta.dump(2) + "\n");
            if (answer) out << (partition_answer(red).yes ? "yes" : "no") << '\n';
        } else if (verify->parsed()) {
            return run_verify_suite(suite, seed, cases, out);
        } else if (ptas->parsed()) {
            auto inst = load_valid(instance);
            auto r = ptas_pipeline(inst, parse_scalar_flag(epsilon, "--epsilon"), limit);
            out << show(r.payoff) << '\n';
            if (!out_path.empty()) write_text(out_path, ssdp_policy_to_json(r.policy).dump(2) + "\n");
            if (!report.empty()) write_text(report, ptas_report(inst, r, oracle_limit));
        } else if (bench->parsed()) {
            BenchOptions opt{dir, split_list(methods), timing};
            const std::string csv = run_bench(opt, err);
            if (out_path.empty()) {
                out << csv;
            } else {
                write_text(out_path, csv);
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace pandora

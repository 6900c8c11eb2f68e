// Command-line front end: runs Monte Carlo sweeps, generates DAG/trace
// instances, validates schedules and exposes the brute-force oracle.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcsched/bench.hpp"

namespace fs = std::filesystem;
using namespace vcsched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

void save_trace_csv(const mobility_trace& trace, const std::string& trace_path,
                    const std::string& meta_path) {
    std::ofstream meta(meta_path);
    if (!meta) throw config_error("cannot write " + meta_path);
    meta << "vehicle_id,cpu_hz,antenna_m\n";
    for (const auto& v : trace.vehicles())
        meta << v.id << ',' << v.cpu_hz << ',' << v.antenna_m << '\n';

    // Rows sorted by t then vehicle_id.
    struct row {
        double t;
        std::string id;
        vec2 p;
    };
    std::vector<row> rows;
    for (int i = 0; i < trace.n_vehicles(); ++i) {
        for (double t = trace.enter_time(i); t <= trace.depart_time(i) + 1e-9; t += 1.0) {
            double tc = std::min(t, trace.depart_time(i));
            rows.push_back({tc, trace.veh(i).id, trace.position(i, tc)});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const row& a, const row& b) {
        return a.t != b.t ? a.t < b.t : a.id < b.id;
    });
    std::ofstream out(trace_path);
    if (!out) throw config_error("cannot write " + trace_path);
    out << "t,vehicle_id,x,y\n";
    out.precision(9);
    for (const auto& r : rows)
        out << r.t << ',' << r.id << ',' << r.p.x << ',' << r.p.y << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override,
            const std::string& scheduler_list, int trials_override) {
    auto cfg = load_config(config_path);
    if (seed_override) cfg.base_seed = *seed_override;
    if (!scheduler_list.empty()) {
        cfg.schedulers.clear();
        std::stringstream ss(scheduler_list);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.schedulers.push_back(item);
    }
    if (trials_override > 0) cfg.trials = trials_override;

    fs::create_directories(out_dir);
    auto rows = run_sweep(cfg);
    write_results_csv(rows, (fs::path(out_dir) / "results.csv").string());
    write_summary_json(rows, (fs::path(out_dir) / "summary.json").string());
    std::cerr << "wrote " << rows.size() << " rows to " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DAG task scheduling over dynamic vehicular clouds"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", schedulers;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    auto* run = app.add_subcommand("run", "run a Monte Carlo sweep from a config file");
    run->add_option("--config", config_path, "experiment config")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override [experiment].base_seed")
        ->each([&](const std::string&) { seed_set = true; });
    run->add_option("--schedulers", schedulers, "comma-separated scheduler subset");
    run->add_option("--trials", trials, "override trial count");

    std::string out_path = "dag.json";
    dag_gen_params gp;
    std::uint64_t gen_seed = 1;
    auto* gen_dag = app.add_subcommand("gen-dag", "generate a random layered DAG");
    gen_dag->add_option("--subtasks", gp.n_subtasks, "number of subtasks");
    gen_dag->add_option("--layers", gp.n_layers, "number of layers");
    gen_dag->add_option("--ccr", gp.ccr, "communication-to-computation ratio");
    gen_dag->add_option("--workload-mean", gp.workload_mean_cycles, "mean cycles");
    gen_dag->add_option("--data-mean", gp.data_mean_bits, "mean edge bits");
    gen_dag->add_option("--seed", gen_seed, "rng seed");
    gen_dag->add_option("--out", out_path, "output file");

    synth_trace_params tp;
    std::string trace_out = "trace.csv", meta_out = "vehicles.csv";
    std::uint64_t trace_seed = 1;
    auto* gen_trace = app.add_subcommand("gen-trace", "generate a synthetic mobility trace");
    gen_trace->add_option("--vehicles", tp.n_vehicles, "number of vehicles");
    gen_trace->add_option("--horizon", tp.horizon_s, "trace length in seconds");
    gen_trace->add_option("--region", tp.region_x_m, "square region side in meters")
        ->each([&](const std::string&) { tp.region_y_m = tp.region_x_m; });
    gen_trace->add_option("--speed-min", tp.speed_min_mps, "m/s");
    gen_trace->add_option("--speed-max", tp.speed_max_mps, "m/s");
    gen_trace->add_option("--arrival-rate", tp.arrival_rate, "1/s");
    gen_trace->add_option("--departure-rate", tp.departure_rate, "1/s");
    gen_trace->add_option("--seed", trace_seed, "rng seed");
    gen_trace->add_option("--out", trace_out, "trace csv path");
    gen_trace->add_option("--meta-out", meta_out, "vehicle metadata csv path");

    std::string dag_path, trace_path, meta_path, sched_name = "rfid";
    auto* validate_cmd = app.add_subcommand(
        "validate", "run a scheduler on an instance and validate the result");
    validate_cmd->add_option("--dag", dag_path, "dag json")->required();
    validate_cmd->add_option("--trace", trace_path, "trace csv")->required();
    validate_cmd->add_option("--meta", meta_path, "vehicle metadata csv")->required();
    validate_cmd->add_option("--scheduler", sched_name, "rfid|heft|la|mga");

    auto* oracle = app.add_subcommand("oracle", "brute-force optimum for a tiny instance");
    oracle->add_option("--dag", dag_path, "dag json")->required();
    oracle->add_option("--trace", trace_path, "trace csv")->required();
    oracle->add_option("--meta", meta_path, "vehicle metadata csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, out_dir,
                           seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
                           schedulers, trials);
        if (gen_dag->parsed()) {
            std::mt19937_64 rng(gen_seed);
            save_dag(generate_random_dag(gp, rng), out_path);
            return kExitOk;
        }
        if (gen_trace->parsed()) {
            std::mt19937_64 rng(trace_seed);
            save_trace_csv(generate_synthetic_trace(tp, rng), trace_out, meta_out);
            return kExitOk;
        }
        if (validate_cmd->parsed() || oracle->parsed()) {
            auto dag = validate(normalize_endpoints(load_dag(dag_path)));
            auto trace = load_trace_csv(trace_path, meta_path);
            sim_params sp;
            experiment_config cfg;
            auto sched =
                make_scheduler(oracle->parsed() ? "brute_force" : sched_name, cfg);
            std::mt19937_64 rng(1);
            auto outcome = run_trial(dag, trace, *sched, sp, rng);
            nlohmann::json j;
            j["scheduler"] = sched->name();
            j["success"] = outcome.success;
            if (outcome.otc_s) j["otc_s"] = *outcome.otc_s;
            if (outcome.failure) {
                j["failure_cause"] = to_string(outcome.failure->cause);
                j["failed_subtask"] = dag.node(outcome.failure->subtask).id;
            }
            std::cout << j.dump(2) << "\n";
            return outcome.success ? kExitOk : kExitConfig;
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitIo;
    } catch (const trace_parse_error& e) {
        std::cerr << "trace error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

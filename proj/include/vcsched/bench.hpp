#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vcsched/baselines.hpp"
#include "vcsched/dag.hpp"
#include "vcsched/mobility.hpp"
#include "vcsched/rfid.hpp"
#include "vcsched/sched.hpp"

namespace vcsched {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class sweep_axis { n_subtasks, n_vehicles, n_layers, ccr };

std::string to_string(sweep_axis a);
sweep_axis axis_from_string(const std::string& s);

struct experiment_config {
    sweep_axis axis = sweep_axis::n_subtasks;
    std::vector<double> axis_values;
    int trials = 200;
    std::vector<std::string> schedulers{"rfid", "heft", "la", "mga"};
    std::uint64_t base_seed = 1;

    dag_gen_params dag;      // fixed values; the axis overrides one of them
    synth_trace_params vc;
    sim_params sim;
    rfid_config rfid;
    mga_config mga;
    std::optional<std::string> trace_csv;  // external trace instead of synthetic
    std::optional<std::string> trace_meta_csv;
    std::optional<std::string> dag_file;   // fixed external DAG instead of generated
};

// Sectioned key=value text: [experiment] [dag] [vc] [channel] [rfid] [mga].
// Unknown keys are an error; every key has a default.
experiment_config load_config(const std::string& path);
experiment_config parse_config_text(const std::string& text);

struct metrics_row {
    std::string scheduler;
    sweep_axis axis;
    double value = 0.0;
    std::uint64_t seed = 0;
    int n_subtasks = 0;
    int n_vehicles = 0;
    int n_layers = 0;
    double ccr = 0.0;
    std::optional<double> otc_s;
    int success = 0;
    double sched_runtime_ms = 0.0;
};

inline const char* metrics_csv_header() {
    return "scheduler,axis,value,seed,n_subtasks,n_vehicles,n_layers,ccr,otc_s,"
           "success,sched_runtime_ms";
}

std::string to_csv_row(const metrics_row& row);

// Deterministic instance seed for (base_seed, axis index, trial index);
// every scheduler sees the identical DAG and trace for a given pair.
std::uint64_t instance_seed(std::uint64_t base, int axis_idx, int trial);

std::unique_ptr<scheduler> make_scheduler(const std::string& name,
                                          const experiment_config& cfg);

// Runs the full sweep. Trials may run in parallel (VCSCHED-specific env var
// DAGVC_THREADS caps the worker count); rows come back in deterministic
// (axis, trial, scheduler) order regardless of parallelism.
std::vector<metrics_row> run_sweep(const experiment_config& cfg);

struct aggregate_cell {
    int n_trials = 0;
    int n_success = 0;
    double success_rate = 0.0;
    std::optional<double> mean_otc;
    double ci95_otc = 0.0;
    double mean_runtime_ms = 0.0;
};

// Keyed by (scheduler, axis value).
std::map<std::pair<std::string, double>, aggregate_cell> aggregate(
    const std::vector<metrics_row>& rows);

void write_results_csv(const std::vector<metrics_row>& rows, const std::string& path);
void write_summary_json(const std::vector<metrics_row>& rows, const std::string& path);

}  // namespace vcsched

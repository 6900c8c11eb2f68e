#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vcsched/bench.hpp"

namespace py = pybind11;
using namespace vcsched;

namespace {

py::dict outcome_to_dict(const validated_dag& dag, const trial_outcome& out) {
    py::dict d;
    d["success"] = out.success;
    d["otc_s"] = out.otc_s ? py::object(py::float_(*out.otc_s)) : py::none();
    d["sched_runtime_s"] = out.sched_runtime_s;
    if (out.failure) {
        d["failure_cause"] = to_string(out.failure->cause);
        d["failed_subtask"] = out.failure->subtask >= 0
                                  ? py::object(py::str(dag.node(out.failure->subtask).id))
                                  : py::none();
    } else {
        d["failure_cause"] = py::none();
        d["failed_subtask"] = py::none();
    }
    return d;
}

py::dict row_to_dict(const metrics_row& r) {
    py::dict d;
    d["scheduler"] = r.scheduler;
    d["axis"] = to_string(r.axis);
    d["value"] = r.value;
    d["seed"] = r.seed;
    d["n_subtasks"] = r.n_subtasks;
    d["n_vehicles"] = r.n_vehicles;
    d["n_layers"] = r.n_layers;
    d["ccr"] = r.ccr;
    d["otc_s"] = r.otc_s ? py::object(py::float_(*r.otc_s)) : py::none();
    d["success"] = r.success;
    d["sched_runtime_ms"] = r.sched_runtime_ms;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "DAG task scheduling over dynamic vehicular clouds";

    py::register_exception<dag_error>(m, "DagError");
    py::register_exception<config_error>(m, "ConfigError");
    py::register_exception<trace_parse_error>(m, "TraceParseError");

    m.def(
        "breakpoint_distance",
        [](double h_t, double h_r) { return breakpoint_distance(h_t, h_r, channel_params{}); },
        py::arg("h_t") = 1.5, py::arg("h_r") = 1.5);
    m.def(
        "path_loss",
        [](double d_m, double h_t, double h_r) {
            channel_params cp;
            return path_loss(d_m, breakpoint_distance(h_t, h_r, cp), cp);
        },
        py::arg("distance_m"), py::arg("h_t") = 1.5, py::arg("h_r") = 1.5);
    m.def(
        "transmission_time",
        [](double bits, double distance_m, double h_t, double h_r) {
            channel_params cp;
            double pl = path_loss(distance_m, breakpoint_distance(h_t, h_r, cp), cp);
            return (bits / 1e6) * (cp.gamma_a * pl * cp.gamma_scale + cp.gamma_b);
        },
        py::arg("bits"), py::arg("distance_m"), py::arg("h_t") = 1.5,
        py::arg("h_r") = 1.5);
    m.def("contact_survival", &contact_survival, py::arg("duration_s"), py::arg("mu"));

    m.def(
        "generate_dag",
        [](int n_subtasks, int n_layers, double ccr, std::uint64_t seed) {
            dag_gen_params p;
            p.n_subtasks = n_subtasks;
            p.n_layers = n_layers;
            p.ccr = ccr;
            std::mt19937_64 rng(seed);
            dag_task t = generate_random_dag(p, rng);
            py::dict d;
            py::list nodes, edges;
            for (const auto& s : t.subtasks) {
                py::dict n;
                n["id"] = s.id;
                n["workload_cycles"] = s.workload_cycles;
                nodes.append(n);
            }
            for (const auto& e : t.edges) {
                py::dict ed;
                ed["src"] = e.src;
                ed["dst"] = e.dst;
                ed["bits"] = e.bits;
                edges.append(ed);
            }
            d["nodes"] = nodes;
            d["edges"] = edges;
            return d;
        },
        py::arg("n_subtasks") = 35, py::arg("n_layers") = 10, py::arg("ccr") = 1.0,
        py::arg("seed") = 1);

    m.def(
        "run_single_trial",
        [](const std::string& dag_path, const std::string& trace_path,
           const std::string& meta_path, const std::string& scheduler_name,
           std::uint64_t seed) {
            auto dag = validate(normalize_endpoints(load_dag(dag_path)));
            auto trace = load_trace_csv(trace_path, meta_path);
            experiment_config cfg;
            auto sched = make_scheduler(scheduler_name, cfg);
            sim_params sp;
            std::mt19937_64 rng(seed);
            return outcome_to_dict(dag, run_trial(dag, trace, *sched, sp, rng));
        },
        py::arg("dag_path"), py::arg("trace_path"), py::arg("meta_path"),
        py::arg("scheduler") = "rfid", py::arg("seed") = 1);

    m.def(
        "run_sweep",
        [](const std::string& config_path, std::optional<std::uint64_t> seed) {
            auto cfg = load_config(config_path);
            if (seed) cfg.base_seed = *seed;
            py::list out;
            for (const auto& r : run_sweep(cfg)) out.append(row_to_dict(r));
            return out;
        },
        py::arg("config_path"), py::arg("seed") = py::none());

    m.def("metrics_csv_header", [] { return std::string(metrics_csv_header()); });
}

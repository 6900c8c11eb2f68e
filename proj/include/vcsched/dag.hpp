#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace vcsched {

struct subtask {
    std::string id;
    double workload_cycles = 0.0;
};

struct dag_edge {
    std::string src;
    std::string dst;
    double bits = 0.0;
};

// Raw application graph as read from a file or a generator. Run validate()
// to obtain the indexed form used by the schedulers.
struct dag_task {
    std::vector<subtask> subtasks;
    std::vector<dag_edge> edges;
};

struct dag_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct cycle_detected : dag_error {
    using dag_error::dag_error;
};
struct multiple_entries : dag_error {
    using dag_error::dag_error;
};
struct multiple_exits : dag_error {
    using dag_error::dag_error;
};
struct disconnected_subtask : dag_error {
    using dag_error::dag_error;
};
struct parse_error : dag_error {
    using dag_error::dag_error;
};
struct infeasible_layering : dag_error {
    using dag_error::dag_error;
};

struct indexed_edge {
    int node = -1;   // the neighbour on the other end
    double bits = 0.0;
};

// Validated handle over a dag_task: index-based adjacency, topological order,
// unique entry/exit. Immutable once built.
class validated_dag {
public:
    explicit validated_dag(dag_task task);

    int size() const { return static_cast<int>(nodes_.size()); }
    const subtask& node(int i) const { return nodes_[i]; }
    const std::vector<subtask>& nodes() const { return nodes_; }
    int index_of(const std::string& id) const;

    const std::vector<indexed_edge>& preds(int i) const { return preds_[i]; }
    const std::vector<indexed_edge>& succs(int i) const { return succs_[i]; }
    int entry() const { return entry_; }
    int exit() const { return exit_; }
    const std::vector<int>& topo_order() const { return topo_; }

    // Largest outgoing payload, 0 for the exit subtask.
    double max_out_bits(int i) const;

    const dag_task& raw() const { return raw_; }

private:
    dag_task raw_;
    std::vector<subtask> nodes_;
    std::vector<std::vector<indexed_edge>> preds_;
    std::vector<std::vector<indexed_edge>> succs_;
    std::unordered_map<std::string, int> by_id_;
    std::vector<int> topo_;
    int entry_ = -1;
    int exit_ = -1;
};

validated_dag validate(dag_task task);

// Inserts a zero-workload virtual entry (exit) when the graph has several
// sources (sinks). A single-source single-sink graph is returned unchanged.
dag_task normalize_endpoints(dag_task task);

struct dag_gen_params {
    int n_subtasks = 35;
    int n_layers = 10;
    double ccr = 1.0;
    double workload_mean_cycles = 3e6;
    double workload_rel_std = 0.2;
    double data_mean_bits = 1.2e6;
    double data_rel_std = 0.2;
    int max_predecessors = 3;
};

// Reference rate used to express edge payloads as time when reasoning about
// CCR: at ccr = 1 the mean transfer demand equals the mean computation time
// (3 Mcycles / 20 MHz = 0.15 s for a 1.2 Mbit payload).
inline double ccr_reference_rate_bits_per_s(const dag_gen_params& p) {
    return p.data_mean_bits / (p.workload_mean_cycles / 2e7);
}

// Layered random DAG: layer 1 = entry, last layer = exit, edges always cross
// to a strictly later layer. Deterministic for a given (params, rng state).
dag_task generate_random_dag(const dag_gen_params& params, std::mt19937_64& rng);

dag_task load_dag(const std::string& path);
void save_dag(const dag_task& task, const std::string& path);

}  // namespace vcsched

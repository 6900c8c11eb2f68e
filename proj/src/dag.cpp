#include "vcsched/dag.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>

#include <json.hpp>

namespace vcsched {

validated_dag::validated_dag(dag_task task) : raw_(std::move(task)) {
    nodes_ = raw_.subtasks;
    const int n = static_cast<int>(nodes_.size());
    if (n == 0) throw parse_error("dag has no subtasks");

    for (int i = 0; i < n; ++i) {
        if (!by_id_.emplace(nodes_[i].id, i).second)
            throw parse_error("duplicate subtask id: " + nodes_[i].id);
    }
    preds_.assign(n, {});
    succs_.assign(n, {});
    for (const auto& e : raw_.edges) {
        auto s = by_id_.find(e.src);
        auto d = by_id_.find(e.dst);
        if (s == by_id_.end()) throw parse_error("edge references unknown id: " + e.src);
        if (d == by_id_.end()) throw parse_error("edge references unknown id: " + e.dst);
        if (s->second == d->second) throw parse_error("self-loop on subtask: " + e.src);
        succs_[s->second].push_back({d->second, e.bits});
        preds_[d->second].push_back({s->second, e.bits});
    }

    // Kahn's algorithm; leftover nodes sit on a cycle.
    std::vector<int> indeg(n);
    for (int i = 0; i < n; ++i) indeg[i] = static_cast<int>(preds_[i].size());
    std::vector<int> queue;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(i);
    while (!queue.empty()) {
        int u = queue.back();
        queue.pop_back();
        topo_.push_back(u);
        for (const auto& e : succs_[u])
            if (--indeg[e.node] == 0) queue.push_back(e.node);
    }
    if (static_cast<int>(topo_.size()) != n) {
        std::string ids;
        for (int i = 0; i < n; ++i)
            if (indeg[i] > 0) ids += (ids.empty() ? "" : ", ") + nodes_[i].id;
        throw cycle_detected("cycle through: " + ids);
    }

    std::vector<int> sources, sinks;
    for (int i = 0; i < n; ++i) {
        if (preds_[i].empty()) sources.push_back(i);
        if (succs_[i].empty()) sinks.push_back(i);
    }
    auto names = [&](const std::vector<int>& v) {
        std::string s;
        for (int i : v) s += (s.empty() ? "" : ", ") + nodes_[i].id;
        return s;
    };
    if (sources.size() != 1) throw multiple_entries("entry candidates: " + names(sources));
    if (sinks.size() != 1) throw multiple_exits("exit candidates: " + names(sinks));
    entry_ = sources[0];
    exit_ = sinks[0];

    // Reachability from entry and co-reachability from exit.
    std::vector<char> fwd(n, 0), bwd(n, 0);
    std::vector<int> stack{entry_};
    fwd[entry_] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& e : succs_[u])
            if (!fwd[e.node]) fwd[e.node] = 1, stack.push_back(e.node);
    }
    stack = {exit_};
    bwd[exit_] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const auto& e : preds_[u])
            if (!bwd[e.node]) bwd[e.node] = 1, stack.push_back(e.node);
    }
    for (int i = 0; i < n; ++i)
        if (!fwd[i] || !bwd[i])
            throw disconnected_subtask("subtask not on an entry-exit path: " + nodes_[i].id);

    for (int i = 0; i < n; ++i) {
        bool virtual_ok = (i == entry_ || i == exit_) && succs_[i].size() + preds_[i].size() > 0;
        if (nodes_[i].workload_cycles < 0 ||
            (nodes_[i].workload_cycles == 0 && !virtual_ok && n > 1))
            throw parse_error("non-positive workload on subtask: " + nodes_[i].id);
    }
}

int validated_dag::index_of(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw parse_error("unknown subtask id: " + id);
    return it->second;
}

double validated_dag::max_out_bits(int i) const {
    double m = 0.0;
    for (const auto& e : succs_[i]) m = std::max(m, e.bits);
    return m;
}

validated_dag validate(dag_task task) { return validated_dag(std::move(task)); }

namespace {

std::string fresh_id(const dag_task& t, const std::string& base) {
    std::set<std::string> used;
    for (const auto& s : t.subtasks) used.insert(s.id);
    if (!used.count(base)) return base;
    int k = 1;
    while (used.count(base + "_" + std::to_string(k))) ++k;
    return base + "_" + std::to_string(k);
}

}  // namespace

dag_task normalize_endpoints(dag_task task) {
    std::unordered_map<std::string, int> indeg, outdeg;
    for (const auto& s : task.subtasks) indeg[s.id] = outdeg[s.id] = 0;
    for (const auto& e : task.edges) {
        if (!indeg.count(e.src) || !indeg.count(e.dst))
            throw parse_error("edge references unknown id");
        ++outdeg[e.src];
        ++indeg[e.dst];
    }
    std::vector<std::string> sources, sinks;
    for (const auto& s : task.subtasks) {
        if (indeg[s.id] == 0) sources.push_back(s.id);
        if (outdeg[s.id] == 0) sinks.push_back(s.id);
    }
    if (sources.size() > 1) {
        std::string v = fresh_id(task, "virtual_entry");
        task.subtasks.push_back({v, 0.0});
        for (const auto& s : sources) task.edges.push_back({v, s, 0.0});
    }
    if (sinks.size() > 1) {
        std::string v = fresh_id(task, "virtual_exit");
        task.subtasks.push_back({v, 0.0});
        for (const auto& s : sinks) task.edges.push_back({s, v, 0.0});
    }
    return task;
}

namespace {

double positive_normal(double mean, double std, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(mean, std);
    for (int i = 0; i < 1000; ++i) {
        double v = dist(rng);
        if (v > 0) return v;
    }
    return mean;  // degenerate parameters; keep the mean rather than loop forever
}

}  // namespace

dag_task generate_random_dag(const dag_gen_params& p, std::mt19937_64& rng) {
    if (p.n_layers < 2 || p.n_layers > p.n_subtasks)
        throw infeasible_layering("cannot place >= 1 subtask per layer: " +
                                  std::to_string(p.n_subtasks) + " subtasks in " +
                                  std::to_string(p.n_layers) + " layers");
    if (p.ccr <= 0) throw parse_error("ccr must be > 0");

    const int n = p.n_subtasks;
    const int layers = p.n_layers;

    // Layer sizes: first and last hold exactly the entry and exit subtask,
    // every middle layer holds at least one.
    std::vector<int> layer_size(layers, 1);
    int spare = n - layers;
    if (layers == 2 && n > 2)
        throw infeasible_layering("2 layers only admit entry and exit");
    for (int i = 0; i < spare; ++i) {
        std::uniform_int_distribution<int> pick(1, layers - 2);
        ++layer_size[pick(rng)];
    }

    dag_task task;
    std::vector<std::vector<int>> layer_nodes(layers);
    int next = 0;
    auto id_of = [](int k) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "n%03d", k + 1);
        return std::string(buf);
    };
    for (int l = 0; l < layers; ++l) {
        for (int k = 0; k < layer_size[l]; ++k) {
            layer_nodes[l].push_back(next);
            double w = positive_normal(p.workload_mean_cycles,
                                       p.workload_rel_std * p.workload_mean_cycles, rng);
            task.subtasks.push_back({id_of(next), w});
            ++next;
        }
    }

    const double data_mean = p.data_mean_bits * p.ccr;
    auto draw_bits = [&] {
        return positive_normal(data_mean, p.data_rel_std * data_mean, rng);
    };

    std::vector<std::vector<int>> succ_of(n);
    auto add_edge = [&](int a, int b) {
        task.edges.push_back({task.subtasks[a].id, task.subtasks[b].id, draw_bits()});
        succ_of[a].push_back(b);
    };

    // Predecessors: every node in layer l > 0 picks a nonempty subset of the
    // previous layer, capped at max_predecessors. One node per layer thus
    // degenerates to a chain.
    for (int l = 1; l < layers; ++l) {
        const auto& prev = layer_nodes[l - 1];
        for (int b : layer_nodes[l]) {
            std::uniform_int_distribution<int> count(
                1, std::min<int>(p.max_predecessors, static_cast<int>(prev.size())));
            int k = count(rng);
            std::vector<int> pool = prev;
            std::shuffle(pool.begin(), pool.end(), rng);
            for (int i = 0; i < k; ++i) add_edge(pool[i], b);
        }
    }

    // Every non-exit node must reach the exit; attach danglers to a random
    // node in a strictly later layer.
    std::vector<int> layer_of(n);
    for (int l = 0; l < layers; ++l)
        for (int b : layer_nodes[l]) layer_of[b] = l;
    for (int a = 0; a < n; ++a) {
        if (!succ_of[a].empty() || layer_of[a] == layers - 1) continue;
        std::vector<int> later;
        for (int b = 0; b < n; ++b)
            if (layer_of[b] > layer_of[a]) later.push_back(b);
        std::uniform_int_distribution<int> pick(0, static_cast<int>(later.size()) - 1);
        add_edge(a, later[pick(rng)]);
    }
    return task;
}

dag_task load_dag(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open dag file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("bad dag json in " + path + ": " + e.what());
    }
    dag_task task;
    try {
        std::set<std::string> seen;
        for (const auto& node : j.at("nodes")) {
            subtask s{node.at("id").get<std::string>(),
                      node.at("workload_cycles").get<double>()};
            if (!seen.insert(s.id).second)
                throw parse_error("duplicate node id: " + s.id);
            if (!(s.workload_cycles >= 0) || !std::isfinite(s.workload_cycles))
                throw parse_error("bad workload for node " + s.id);
            task.subtasks.push_back(std::move(s));
        }
        for (const auto& edge : j.at("edges")) {
            dag_edge e{edge.at("src").get<std::string>(),
                       edge.at("dst").get<std::string>(), edge.at("bits").get<double>()};
            if (!seen.count(e.src)) throw parse_error("edge references unknown id: " + e.src);
            if (!seen.count(e.dst)) throw parse_error("edge references unknown id: " + e.dst);
            if (!(e.bits >= 0) || !std::isfinite(e.bits))
                throw parse_error("bad bits on edge " + e.src + "->" + e.dst);
            task.edges.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("bad dag schema in " + path + ": " + e.what());
    }
    return task;
}

void save_dag(const dag_task& task, const std::string& path) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& s : task.subtasks)
        j["nodes"].push_back({{"id", s.id}, {"workload_cycles", s.workload_cycles}});
    j["edges"] = nlohmann::json::array();
    for (const auto& e : task.edges)
        j["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"bits", e.bits}});
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write dag file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace vcsched

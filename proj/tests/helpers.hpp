#pragma once

#include <vector>

#include "vcsched/bench.hpp"

namespace vcsched::test {

// Static trace: every vehicle sits at a fixed position for [0, horizon].
inline mobility_trace static_trace(const std::vector<vec2>& positions,
                                   const std::vector<double>& cpu_hz,
                                   double horizon = 1000.0) {
    std::vector<vehicle> vehicles;
    std::vector<std::vector<std::pair<double, vec2>>> samples;
    for (size_t i = 0; i < positions.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "v%03zu", i + 1);
        vehicles.push_back({buf, cpu_hz[i], 1.5});
        samples.push_back({{0.0, positions[i]}, {horizon, positions[i]}});
    }
    return mobility_trace(std::move(vehicles), std::move(samples));
}

// Chain entry -> ... -> exit with uniform workload and edge size.
inline dag_task chain_dag(int n, double workload = 3e6, double bits = 1.2e6) {
    dag_task t;
    for (int i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "n%03d", i + 1);
        t.subtasks.push_back({buf, workload});
    }
    for (int i = 0; i + 1 < n; ++i)
        t.edges.push_back({t.subtasks[i].id, t.subtasks[i + 1].id, bits});
    return t;
}

// Loose sim parameters under which every in-radius link is feasible.
inline sim_params easy_params() {
    sim_params sp;
    sp.channel.theta = 0.01;
    sp.contact.constant_mode = true;
    sp.contact.mu_constant = 1e-4;
    return sp;
}

}  // namespace vcsched::test

#pragma once

#include <unordered_map>

#include "vcsched/sched.hpp"

namespace vcsched {

// Conventional static downward ranks computed from the t=0 snapshot: mean
// computation time over all present vehicles, mean transfer time via the
// mean effective rate over linked pairs.
std::vector<double> heft_rank(const validated_dag& dag, const mobility_trace& trace,
                              const sim_params& params);

// Static-rank list scheduler, argmin EFT over present vehicles, no candidate
// gating; C3 is judged post-hoc at each commit, which is how it loses trials.
class heft_scheduler final : public scheduler {
public:
    std::string name() const override { return "heft"; }
    std::optional<failure_record> run(schedule_state& state,
                                      std::mt19937_64& rng) override;
};

// One-step lookahead on top of the HEFT ordering: the vehicle choice
// minimizes the worst best-case EFT over immediate successors.
class la_scheduler final : public scheduler {
public:
    std::string name() const override { return "la"; }
    std::optional<failure_record> run(schedule_state& state,
                                      std::mt19937_64& rng) override;
};

struct mga_config {
    int population = 30;
    int generations = 40;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;
    int elite = 2;
    int tournament = 2;
};

// Integer-encoded genetic algorithm: one gene per topological position naming
// the executing vehicle; infeasible decodes score +inf.
class mga_scheduler final : public scheduler {
public:
    explicit mga_scheduler(mga_config cfg = {}) : cfg_(cfg) {}
    std::string name() const override { return "mga"; }
    std::optional<failure_record> run(schedule_state& state,
                                      std::mt19937_64& rng) override;

private:
    mga_config cfg_;
};

// Exhaustive assignment enumeration along a fixed topological order. Guarded
// to tiny instances; used as the optimality oracle in tests.
class brute_force_scheduler final : public scheduler {
public:
    static constexpr int max_subtasks = 7;
    static constexpr int max_vehicles = 5;
    std::string name() const override { return "brute_force"; }
    std::optional<failure_record> run(schedule_state& state,
                                      std::mt19937_64& rng) override;
};

}  // namespace vcsched

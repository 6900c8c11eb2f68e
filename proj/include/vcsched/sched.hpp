#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vcsched/channel.hpp"
#include "vcsched/dag.hpp"
#include "vcsched/mobility.hpp"

namespace vcsched {

struct sched_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct predecessor_unassigned : sched_error {
    using sched_error::sched_error;
};
struct already_assigned : sched_error {
    using sched_error::sched_error;
};
struct infeasible_vehicle : sched_error {
    using sched_error::sched_error;
};
struct instance_too_large : sched_error {
    using sched_error::sched_error;
};

enum class failure_cause {
    empty_candidate_set,
    owner_absent,
    executor_departed,
    qos_violated,  // post-hoc C3 breach (HEFT/LA style baselines)
};

std::string to_string(failure_cause c);

struct failure_record {
    failure_cause cause = failure_cause::empty_candidate_set;
    int subtask = -1;
    double time = 0.0;
};

struct task_timing {
    int vehicle = -1;  // -1 while unassigned
    double est = 0.0;
    double eft = 0.0;
    double aft = 0.0;
    bool assigned() const { return vehicle >= 0; }
};

// Mutable per-trial scheduling state: the assignment map, per-vehicle
// availability and the ready-set frontier. One instance per trial.
class schedule_state {
public:
    schedule_state(const validated_dag& dag, const mobility_trace& trace,
                   const sim_params& params);

    const validated_dag& dag() const { return *dag_; }
    const mobility_trace& trace() const { return *trace_; }
    const sim_params& params() const { return *params_; }

    const task_timing& timing(int ni) const { return timing_[ni]; }
    double avail(int pm) const { return avail_[pm]; }
    const std::vector<int>& ready() const { return ready_; }
    int n_assigned() const { return n_assigned_; }
    bool complete() const { return n_assigned_ == dag_->size(); }

    double otc() const { return timing_[dag_->exit()].aft; }

    // Max AFT over predecessors; 0 for the entry subtask.
    double scheduling_time(int ni) const;

    // Latest data-arrival instant at pm over assigned predecessors.
    double ready_time(int ni, int pm) const;

    std::pair<double, double> est_eft(int ni, int pm) const;

    // Commits ni to pm: fixes AFT, advances the vehicle's availability and
    // refreshes the ready frontier. The caller is responsible for C3 gating.
    void commit(int ni, int pm);

private:
    void refresh_ready();

    const validated_dag* dag_;
    const mobility_trace* trace_;
    const sim_params* params_;
    std::vector<task_timing> timing_;
    std::vector<double> avail_;
    std::vector<int> ready_;
    int n_assigned_ = 0;
};

struct constraint_violation {
    std::string constraint;  // "C1".."C4", "overlap", "recompute"
    std::string detail;
};

struct validation_report {
    std::vector<constraint_violation> violations;
    bool ok() const { return violations.empty(); }
};

// Recomputes every EST/EFT/AFT from the bare assignment and checks C1-C4
// plus per-vehicle non-overlap against the stored timings.
validation_report validate_schedule(const schedule_state& state);

struct trial_outcome {
    std::optional<double> otc_s;
    bool success = false;
    std::optional<failure_record> failure;
    double sched_runtime_s = 0.0;
};

// Interface every scheduling policy implements. run() drives the state to
// completion or returns the first failure; it must be deterministic given
// the rng state.
class scheduler {
public:
    virtual ~scheduler() = default;
    virtual std::string name() const = 0;
    virtual std::optional<failure_record> run(schedule_state& state,
                                              std::mt19937_64& rng) = 0;
};

// Checks that pm stays in the VC until it finishes ni, per the committed
// timing. Vanishing executors fail the trial.
std::optional<failure_record> check_executor_presence(const schedule_state& state,
                                                      int ni);

trial_outcome run_trial(const validated_dag& dag, const mobility_trace& trace,
                        scheduler& sched, const sim_params& params,
                        std::mt19937_64& rng);

}  // namespace vcsched

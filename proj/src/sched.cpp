#include "vcsched/sched.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace vcsched {

std::string to_string(failure_cause c) {
    switch (c) {
        case failure_cause::empty_candidate_set: return "EmptyCandidateSet";
        case failure_cause::owner_absent: return "OwnerAbsent";
        case failure_cause::executor_departed: return "ExecutorDeparted";
        case failure_cause::qos_violated: return "QosViolated";
    }
    return "Unknown";
}

schedule_state::schedule_state(const validated_dag& dag, const mobility_trace& trace,
                               const sim_params& params)
    : dag_(&dag), trace_(&trace), params_(&params) {
    timing_.assign(dag.size(), {});
    avail_.resize(trace.n_vehicles());
    for (int pm = 0; pm < trace.n_vehicles(); ++pm)
        avail_[pm] = std::max(0.0, trace.enter_time(pm));
    refresh_ready();
}

double schedule_state::scheduling_time(int ni) const {
    double st = 0.0;
    for (const auto& e : dag_->preds(ni)) {
        const auto& tj = timing_[e.node];
        if (!tj.assigned())
            throw predecessor_unassigned("st(" + dag_->node(ni).id +
                                         "): predecessor " + dag_->node(e.node).id +
                                         " unassigned");
        st = std::max(st, tj.aft);
    }
    return st;
}

namespace {

// Out-of-range pairs get an infinite transmission time so that EFT-based
// argmins never pick them while the caller can still enumerate all vehicles.
double tt_or_inf(double bits, int src, int dst, double t,
                 const mobility_trace& trace, const sim_params& sp) {
    if (src != dst) {
        if (!trace.present(src, t) || !trace.present(dst, t))
            return std::numeric_limits<double>::infinity();
        if (distance(trace, src, dst, t) > sp.channel.radius_m)
            return std::numeric_limits<double>::infinity();
    }
    return transmission_time(bits, src, dst, t, trace, sp);
}

}  // namespace

double schedule_state::ready_time(int ni, int pm) const {
    double st = scheduling_time(ni);
    double t = trace_->clamp(st);
    if (!trace_->present(pm, t))
        throw vehicle_absent(trace_->veh(pm).id + " absent at st");
    double rt = 0.0;
    for (const auto& e : dag_->preds(ni)) {
        const auto& tj = timing_[e.node];
        double tt = tt_or_inf(e.bits, tj.vehicle, pm, t, *trace_, *params_);
        rt = std::max(rt, tj.aft + tt);
    }
    return rt;
}

std::pair<double, double> schedule_state::est_eft(int ni, int pm) const {
    double est = std::max(avail_[pm], ready_time(ni, pm));
    double ct = dag_->node(ni).workload_cycles / trace_->veh(pm).cpu_hz;
    return {est, est + ct};
}

void schedule_state::commit(int ni, int pm) {
    if (timing_[ni].assigned())
        throw already_assigned(dag_->node(ni).id + " already assigned");
    auto [est, eft] = est_eft(ni, pm);
    if (!std::isfinite(eft))
        throw infeasible_vehicle(trace_->veh(pm).id + " cannot receive inputs of " +
                                 dag_->node(ni).id);
    timing_[ni] = {pm, est, eft, eft};
    avail_[pm] = eft;
    ++n_assigned_;
    refresh_ready();
}

void schedule_state::refresh_ready() {
    ready_.clear();
    for (int ni = 0; ni < dag_->size(); ++ni) {
        if (timing_[ni].assigned()) continue;
        bool ok = true;
        for (const auto& e : dag_->preds(ni))
            if (!timing_[e.node].assigned()) {
                ok = false;
                break;
            }
        if (ok) ready_.push_back(ni);
    }
}

std::optional<failure_record> check_executor_presence(const schedule_state& state,
                                                      int ni) {
    const auto& tm = state.timing(ni);
    const auto& trace = state.trace();
    double depart = trace.depart_time(tm.vehicle);
    if (depart < tm.eft && depart < trace.t_end())
        return failure_record{failure_cause::executor_departed, ni, depart};
    return std::nullopt;
}

validation_report validate_schedule(const schedule_state& state) {
    validation_report report;
    const auto& dag = state.dag();
    const auto& trace = state.trace();
    const auto& sp = state.params();
    const double tol = 1e-9;

    // C1/C4: every subtask maps to exactly one vehicle.
    for (int ni = 0; ni < dag.size(); ++ni) {
        const auto& tm = state.timing(ni);
        if (!tm.assigned() || tm.vehicle >= trace.n_vehicles())
            report.violations.push_back({"C1", dag.node(ni).id + " has no vehicle"});
    }
    if (!report.ok()) return report;

    // Recompute the whole timing from the bare assignment, in topo order.
    std::vector<task_timing> re(dag.size());
    std::vector<double> avail(trace.n_vehicles());
    for (int pm = 0; pm < trace.n_vehicles(); ++pm)
        avail[pm] = std::max(0.0, trace.enter_time(pm));
    // The stored schedule also encodes the commit order through Avail; replay
    // commits ordered by (est, subtask) to reproduce the same serialization.
    std::vector<int> topo_rank(dag.size());
    for (int k = 0; k < dag.size(); ++k) topo_rank[dag.topo_order()[k]] = k;
    std::vector<int> order(dag.size());
    for (int i = 0; i < dag.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (state.timing(a).est != state.timing(b).est)
            return state.timing(a).est < state.timing(b).est;
        return topo_rank[a] < topo_rank[b];
    });
    for (int ni : order) {
        int pm = state.timing(ni).vehicle;
        double st = 0.0;
        for (const auto& e : dag.preds(ni)) st = std::max(st, re[e.node].aft);
        double t = trace.clamp(st);
        double rt = 0.0;
        for (const auto& e : dag.preds(ni)) {
            double tt = tt_or_inf(e.bits, re[e.node].vehicle, pm, t, trace, sp);
            rt = std::max(rt, re[e.node].aft + tt);
        }
        double est = std::max(avail[pm], rt);
        double eft = est + dag.node(ni).workload_cycles / trace.veh(pm).cpu_hz;
        re[ni] = {pm, est, eft, eft};
        avail[pm] = eft;
    }
    for (int ni = 0; ni < dag.size(); ++ni) {
        const auto& a = state.timing(ni);
        const auto& b = re[ni];
        if (std::abs(a.est - b.est) > tol || std::abs(a.eft - b.eft) > tol ||
            std::abs(a.aft - b.aft) > tol)
            report.violations.push_back(
                {"recompute", dag.node(ni).id + ": stored timing differs from recomputation"});
    }

    // C2: a subtask starts no earlier than its predecessors finish.
    for (int ni = 0; ni < dag.size(); ++ni)
        for (const auto& e : dag.preds(ni))
            if (state.timing(ni).est + tol < state.timing(e.node).aft)
                report.violations.push_back(
                    {"C2", dag.node(ni).id + " starts before " + dag.node(e.node).id +
                               " finishes"});

    // C3: every cross-vehicle transfer survives with probability >= theta,
    // evaluated at the receiver's scheduling time.
    for (int ni = 0; ni < dag.size(); ++ni) {
        double st = 0.0;
        for (const auto& e : dag.preds(ni)) st = std::max(st, state.timing(e.node).aft);
        double t = trace.clamp(st);
        for (const auto& e : dag.preds(ni)) {
            int pn = state.timing(e.node).vehicle;
            int pm = state.timing(ni).vehicle;
            if (!link_feasible(e.bits, pn, pm, t, trace, sp))
                report.violations.push_back(
                    {"C3", "edge " + dag.node(e.node).id + "->" + dag.node(ni).id +
                               " violates the QoS threshold"});
        }
    }

    // One subtask at a time per vehicle.
    std::vector<std::vector<std::pair<double, double>>> busy(trace.n_vehicles());
    for (int ni = 0; ni < dag.size(); ++ni)
        busy[state.timing(ni).vehicle].push_back(
            {state.timing(ni).est, state.timing(ni).eft});
    for (int pm = 0; pm < trace.n_vehicles(); ++pm) {
        auto& iv = busy[pm];
        std::sort(iv.begin(), iv.end());
        for (size_t k = 1; k < iv.size(); ++k)
            if (iv[k].first + tol < iv[k - 1].second)
                report.violations.push_back(
                    {"overlap", trace.veh(pm).id + " executes two subtasks at once"});
    }
    return report;
}

trial_outcome run_trial(const validated_dag& dag, const mobility_trace& trace,
                        scheduler& sched, const sim_params& params,
                        std::mt19937_64& rng) {
    trial_outcome out;
    if (!trace.present(trace.owner(), 0.0)) {
        out.failure = failure_record{failure_cause::owner_absent, dag.entry(), 0.0};
        return out;
    }
    schedule_state state(dag, trace, params);
    auto t0 = std::chrono::steady_clock::now();
    auto failure = sched.run(state, rng);
    auto t1 = std::chrono::steady_clock::now();
    out.sched_runtime_s = std::chrono::duration<double>(t1 - t0).count();
    if (failure) {
        out.failure = failure;
        return out;
    }
    out.success = true;
    out.otc_s = state.otc();
    return out;
}

}  // namespace vcsched

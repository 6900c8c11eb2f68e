#include "vcsched/rfid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vcsched {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double dyn_avg_ct(int ni, const std::vector<int>& cand, const schedule_state& state) {
    if (cand.empty()) throw sched_error("dyn_avg_ct: empty candidate set");
    double w = state.dag().node(ni).workload_cycles;
    double sum = 0.0;
    for (int pm : cand) sum += w / state.trace().veh(pm).cpu_hz;
    return sum / static_cast<double>(cand.size());
}

double dyn_avg_tt(int nj, int ni, const std::vector<int>& cand,
                  const schedule_state& state, double st) {
    if (cand.empty()) throw sched_error("dyn_avg_tt: empty candidate set");
    const auto& dag = state.dag();
    double bits = 0.0;
    for (const auto& e : dag.preds(ni))
        if (e.node == nj) bits = e.bits;
    int pn = state.timing(nj).vehicle;
    double t = state.trace().clamp(st);
    double sum = 0.0;
    for (int pm : cand)
        sum += transmission_time(bits, pn, pm, t, state.trace(), state.params());
    return sum / static_cast<double>(cand.size());
}

double cti(int ni, const std::vector<int>& cand, const schedule_state& state) {
    if (cand.empty()) throw sched_error("cti: empty candidate set");
    if (cand.size() == 1) return -kInf;
    double best = kInf, second = kInf;
    for (int pm : cand) {
        double eft = state.est_eft(ni, pm).second;
        if (eft < best) {
            second = best;
            best = eft;
        } else if (eft < second) {
            second = eft;
        }
    }
    return best - second;
}

double weighted_eft(double eft, int degree, const rfid_config& cfg) {
    return cfg.alpha_t * eft - cfg.alpha_r * cfg.phi_scale * static_cast<double>(degree);
}

std::optional<failure_record> rfid_scheduler::run(schedule_state& state,
                                                 std::mt19937_64& rng) {
    (void)rng;  // deterministic policy
    const auto& dag = state.dag();
    state.commit(dag.entry(), state.trace().owner());
    if (auto fail = check_executor_presence(state, dag.entry())) return fail;

    // Finalized downward ranks, memoized as subtasks are committed.
    std::vector<double> rank(dag.size(), 0.0);
    rank[dag.entry()] = 0.0;

    while (!state.complete()) {
        struct entry_t {
            int ni;
            double rs_rank;
            double rank_d;
            std::vector<int> cand;
        };
        std::vector<entry_t> table;
        for (int ni : state.ready()) {
            double st = state.scheduling_time(ni);
            auto cand = candidate_set(ni, state, st);
            if (cand.empty())
                return failure_record{failure_cause::empty_candidate_set, ni, st};

            double ct_bar = dyn_avg_ct(ni, cand, state);
            double rank_d = 0.0;
            for (const auto& e : dag.preds(ni)) {
                double tt_bar = dyn_avg_tt(e.node, ni, cand, state, st);
                rank_d = std::max(rank_d, rank[e.node] + ct_bar + tt_bar);
            }

            double c = cfg_.disable_cti ? 0.0 : cti(ni, cand, state);
            double rs;
            switch (cfg_.cti_mode) {
                case cti_sign_mode::as_printed: rs = rank_d - c; break;
                case cti_sign_mode::absolute: rs = rank_d - std::abs(c); break;
                default: rs = rank_d; break;
            }
            table.push_back({ni, rs, rank_d, std::move(cand)});
        }

        // Lowest RSRank first; ties broken by subtask id.
        const entry_t* pick = &table.front();
        for (const auto& e : table) {
            if (e.rs_rank < pick->rs_rank ||
                (e.rs_rank == pick->rs_rank &&
                 dag.node(e.ni).id < dag.node(pick->ni).id))
                pick = &e;
        }

        double st = state.scheduling_time(pick->ni);
        int best_pm = -1;
        double best_score = kInf;
        for (int pm : pick->cand) {
            double eft = state.est_eft(pick->ni, pm).second;
            int deg = static_cast<int>(degree_set(pick->ni, pm, state, st).size());
            double score = weighted_eft(eft, deg, cfg_);
            if (score < best_score ||
                (score == best_score && best_pm >= 0 &&
                 state.trace().veh(pm).id < state.trace().veh(best_pm).id)) {
                best_score = score;
                best_pm = pm;
            }
        }
        rank[pick->ni] = pick->rank_d;
        state.commit(pick->ni, best_pm);
        if (auto fail = check_executor_presence(state, pick->ni)) return fail;
    }
    return std::nullopt;
}

}  // namespace vcsched

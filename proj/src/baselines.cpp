#include "vcsched/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace vcsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_rate_bits_per_s(const mobility_trace& trace, const sim_params& sp,
                            double t) {
    auto snap = snapshot(trace, t, sp.channel.radius_m);
    double sum = 0.0;
    int count = 0;
    for (const auto& [a, b] : snap.links) {
        double d = std::max(1.0, std::hypot(snap.positions[a].x - snap.positions[b].x,
                                            snap.positions[a].y - snap.positions[b].y));
        double d_brk = breakpoint_distance(trace.veh(a).antenna_m,
                                           trace.veh(b).antenna_m, sp.channel);
        double pl = path_loss(d, d_brk, sp.channel);
        double per_mbit = sp.channel.gamma_a * pl * sp.channel.gamma_scale + sp.channel.gamma_b;
        sum += 1e6 / per_mbit;
        ++count;
    }
    if (count == 0) {
        // Isolated snapshot: fall back to the rate at the edge of the radius.
        double d_brk = breakpoint_distance(trace.veh(0).antenna_m,
                                           trace.veh(0).antenna_m, sp.channel);
        double pl = path_loss(sp.channel.radius_m, d_brk, sp.channel);
        return 1e6 / (sp.channel.gamma_a * pl * sp.channel.gamma_scale + sp.channel.gamma_b);
    }
    return sum / count;
}

// Shared list-scheduling order for HEFT and LA: lowest static rank among the
// precedence-free subtasks, ties by id.
int next_by_rank(const schedule_state& state, const std::vector<double>& rank) {
    const auto& dag = state.dag();
    int best = -1;
    for (int ni : state.ready()) {
        if (best < 0 || rank[ni] < rank[best] ||
            (rank[ni] == rank[best] && dag.node(ni).id < dag.node(best).id))
            best = ni;
    }
    return best;
}

// Post-hoc C3 audit of a freshly committed subtask, per the baseline reading
// that ranking and vehicle choice ignore transmission constraints.
std::optional<failure_record> audit_c3(const schedule_state& state, int ni) {
    const auto& dag = state.dag();
    double st = state.scheduling_time(ni);
    double t = state.trace().clamp(st);
    for (const auto& e : dag.preds(ni)) {
        int pn = state.timing(e.node).vehicle;
        int pm = state.timing(ni).vehicle;
        if (!link_feasible(e.bits, pn, pm, t, state.trace(), state.params()))
            return failure_record{failure_cause::qos_violated, ni, st};
    }
    return std::nullopt;
}

}  // namespace

std::vector<double> heft_rank(const validated_dag& dag, const mobility_trace& trace,
                              const sim_params& params) {
    double t0 = trace.t_begin();
    auto present = trace.present_at(t0);
    double inv_f = 0.0;
    for (int pm : present) inv_f += 1.0 / trace.veh(pm).cpu_hz;
    inv_f /= static_cast<double>(present.size());
    double rate = mean_rate_bits_per_s(trace, params, t0);

    std::vector<double> rank(dag.size(), 0.0);
    for (int ni : dag.topo_order()) {
        if (ni == dag.entry()) continue;
        double ct_bar = dag.node(ni).workload_cycles * inv_f;
        double r = 0.0;
        for (const auto& e : dag.preds(ni))
            r = std::max(r, rank[e.node] + ct_bar + e.bits / rate);
        rank[ni] = r;
    }
    return rank;
}

std::optional<failure_record> heft_scheduler::run(schedule_state& state,
                                                 std::mt19937_64& rng) {
    (void)rng;
    const auto& dag = state.dag();
    const auto& trace = state.trace();
    auto rank = heft_rank(dag, trace, state.params());

    state.commit(dag.entry(), trace.owner());
    if (auto fail = check_executor_presence(state, dag.entry())) return fail;

    while (!state.complete()) {
        int ni = next_by_rank(state, rank);
        double st = state.scheduling_time(ni);
        double t = trace.clamp(st);
        int best = -1;
        double best_eft = kInf;
        for (int pm = 0; pm < trace.n_vehicles(); ++pm) {
            if (!trace.present(pm, t)) continue;
            double eft = state.est_eft(ni, pm).second;
            if (eft < best_eft ||
                (eft == best_eft && best >= 0 && trace.veh(pm).id < trace.veh(best).id)) {
                best_eft = eft;
                best = pm;
            }
        }
        if (best < 0 || !std::isfinite(best_eft))
            return failure_record{failure_cause::qos_violated, ni, st};
        state.commit(ni, best);
        if (auto fail = audit_c3(state, ni)) return fail;
        if (auto fail = check_executor_presence(state, ni)) return fail;
    }
    return std::nullopt;
}

std::optional<failure_record> la_scheduler::run(schedule_state& state,
                                                std::mt19937_64& rng) {
    (void)rng;
    const auto& dag = state.dag();
    const auto& trace = state.trace();
    const auto& sp = state.params();
    auto rank = heft_rank(dag, trace, sp);

    state.commit(dag.entry(), trace.owner());
    if (auto fail = check_executor_presence(state, dag.entry())) return fail;

    while (!state.complete()) {
        int ni = next_by_rank(state, rank);
        double st = state.scheduling_time(ni);
        double t = trace.clamp(st);

        int best = -1;
        double best_score = kInf, best_eft = kInf;
        for (int pm = 0; pm < trace.n_vehicles(); ++pm) {
            if (!trace.present(pm, t)) continue;
            double eft = state.est_eft(ni, pm).second;
            if (!std::isfinite(eft)) continue;

            // Worst immediate successor, each given its optimistic best-case
            // vehicle; other unscheduled predecessors are ignored.
            double score = eft;
            double t_out = trace.clamp(eft);
            for (const auto& e : dag.succs(ni)) {
                double succ_best = kInf;
                for (int pn = 0; pn < trace.n_vehicles(); ++pn) {
                    if (!trace.present(pn, t_out)) continue;
                    double tt;
                    if (pn == pm) {
                        tt = 0.0;
                    } else {
                        try {
                            tt = transmission_time(e.bits, pm, pn, t_out, trace, sp);
                        } catch (const link_out_of_range&) {
                            continue;
                        }
                    }
                    double est_j = std::max(state.avail(pn), eft + tt);
                    double eft_j =
                        est_j + dag.node(e.node).workload_cycles / trace.veh(pn).cpu_hz;
                    succ_best = std::min(succ_best, eft_j);
                }
                score = std::max(score, succ_best);
            }
            if (score < best_score ||
                (score == best_score && eft < best_eft) ||
                (score == best_score && eft == best_eft && best >= 0 &&
                 trace.veh(pm).id < trace.veh(best).id)) {
                best_score = score;
                best_eft = eft;
                best = pm;
            }
        }
        if (best < 0) return failure_record{failure_cause::qos_violated, ni, st};
        state.commit(ni, best);
        if (auto fail = audit_c3(state, ni)) return fail;
        if (auto fail = check_executor_presence(state, ni)) return fail;
    }
    return std::nullopt;
}

namespace {

struct decode_result {
    double fitness = kInf;
    std::optional<failure_record> failure;
};

// Replays a chromosome through the regular commit machinery; any C3 breach,
// absent vehicle or mid-execution departure makes the decode infeasible.
decode_result decode_chromosome(const std::vector<int>& genes,
                                const validated_dag& dag, const mobility_trace& trace,
                                const sim_params& sp, schedule_state* out_state) {
    schedule_state state(dag, trace, sp);
    const auto& topo = dag.topo_order();
    for (size_t k = 0; k < topo.size(); ++k) {
        int ni = topo[k];
        int pm = genes[k];
        double st = state.scheduling_time(ni);
        double t = trace.clamp(st);
        if (!trace.present(pm, t))
            return {kInf, failure_record{failure_cause::empty_candidate_set, ni, st}};
        for (const auto& e : dag.preds(ni)) {
            if (!link_feasible(e.bits, state.timing(e.node).vehicle, pm, t, trace, sp))
                return {kInf, failure_record{failure_cause::qos_violated, ni, st}};
        }
        state.commit(ni, pm);
        if (auto fail = check_executor_presence(state, ni)) return {kInf, fail};
    }
    if (out_state) *out_state = state;
    return {state.otc(), std::nullopt};
}

}  // namespace

std::optional<failure_record> mga_scheduler::run(schedule_state& state,
                                                 std::mt19937_64& rng) {
    const auto& dag = state.dag();
    const auto& trace = state.trace();
    const auto& sp = state.params();
    const int n = dag.size();
    const auto& topo = dag.topo_order();

    auto domain = trace.present_at(trace.t_begin());
    std::uniform_int_distribution<size_t> pick_vehicle(0, domain.size() - 1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    auto random_gene = [&] { return domain[pick_vehicle(rng)]; };
    auto make_random = [&] {
        std::vector<int> g(n);
        g[0] = trace.owner();  // entry runs on the task owner
        for (int k = 1; k < n; ++k) g[k] = random_gene();
        return g;
    };

    struct individual {
        std::vector<int> genes;
        double fitness = kInf;
        std::optional<failure_record> failure;
    };
    auto evaluate = [&](individual& ind) {
        auto res = decode_chromosome(ind.genes, dag, trace, sp, nullptr);
        ind.fitness = res.fitness;
        ind.failure = res.failure;
    };

    std::vector<individual> pop(cfg_.population);
    for (auto& ind : pop) {
        ind.genes = make_random();
        evaluate(ind);
    }
    auto by_fitness = [](const individual& a, const individual& b) {
        return a.fitness < b.fitness;
    };
    std::stable_sort(pop.begin(), pop.end(), by_fitness);

    auto tournament = [&]() -> const individual& {
        std::uniform_int_distribution<size_t> pick(0, pop.size() - 1);
        const individual* best = &pop[pick(rng)];
        for (int k = 1; k < cfg_.tournament; ++k) {
            const individual* other = &pop[pick(rng)];
            if (other->fitness < best->fitness) best = other;
        }
        return *best;
    };

    // Positions of each subtask's predecessors in the topological encoding.
    std::vector<int> pos(n);
    for (int k = 0; k < n; ++k) pos[topo[k]] = k;

    for (int gen = 0; gen < cfg_.generations; ++gen) {
        std::vector<individual> next(
            pop.begin(), pop.begin() + std::min<size_t>(cfg_.elite, pop.size()));
        while (static_cast<int>(next.size()) < cfg_.population) {
            individual child;
            const individual& a = tournament();
            const individual& b = tournament();
            child.genes = a.genes;
            if (n > 2 && u01(rng) < cfg_.crossover_rate) {
                std::uniform_int_distribution<int> pick_cut(1, n - 1);
                int cut = pick_cut(rng);
                for (int k = cut; k < n; ++k) child.genes[k] = b.genes[k];
                // Relatives repair: a gene whose predecessor's gene crossed
                // over differently is re-randomized.
                for (int k = cut; k < n; ++k) {
                    for (const auto& e : dag.preds(topo[k])) {
                        int pk = pos[e.node];
                        if (pk < cut && a.genes[pk] != b.genes[pk]) {
                            child.genes[k] = random_gene();
                            break;
                        }
                    }
                }
            }
            for (int k = 1; k < n; ++k)
                if (u01(rng) < cfg_.mutation_rate) child.genes[k] = random_gene();
            child.genes[0] = trace.owner();
            evaluate(child);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        std::stable_sort(pop.begin(), pop.end(), by_fitness);
    }

    const individual& best = pop.front();
    if (!std::isfinite(best.fitness)) {
        if (best.failure) return best.failure;
        return failure_record{failure_cause::empty_candidate_set, dag.exit(), 0.0};
    }
    auto res = decode_chromosome(best.genes, dag, trace, sp, &state);
    return res.failure;
}

std::optional<failure_record> brute_force_scheduler::run(schedule_state& state,
                                                         std::mt19937_64& rng) {
    (void)rng;
    const auto& dag = state.dag();
    const auto& trace = state.trace();
    const auto& sp = state.params();
    if (dag.size() > max_subtasks || trace.n_vehicles() > max_vehicles)
        throw instance_too_large("brute force limited to " +
                                 std::to_string(max_subtasks) + " subtasks x " +
                                 std::to_string(max_vehicles) + " vehicles");

    const auto& topo = dag.topo_order();
    std::vector<int> genes(dag.size(), -1);
    std::vector<int> best_genes;
    double best_otc = kInf;

    std::function<void(schedule_state&, size_t)> search =
        [&](schedule_state& cur, size_t k) {
            if (k == topo.size()) {
                if (cur.otc() < best_otc) {
                    best_otc = cur.otc();
                    best_genes.assign(genes.begin(), genes.end());
                }
                return;
            }
            int ni = topo[k];
            double st = cur.scheduling_time(ni);
            double t = trace.clamp(st);
            std::vector<int> options;
            if (ni == dag.entry()) {
                options.push_back(trace.owner());
            } else {
                for (int pm = 0; pm < trace.n_vehicles(); ++pm) {
                    if (!trace.present(pm, t)) continue;
                    bool ok = true;
                    for (const auto& e : dag.preds(ni))
                        if (!link_feasible(e.bits, cur.timing(e.node).vehicle, pm, t,
                                           trace, sp)) {
                            ok = false;
                            break;
                        }
                    if (ok) options.push_back(pm);
                }
            }
            for (int pm : options) {
                schedule_state branch = cur;
                branch.commit(ni, pm);
                if (check_executor_presence(branch, ni)) continue;
                genes[k] = pm;
                search(branch, k + 1);
            }
        };

    schedule_state root(dag, trace, sp);
    search(root, 0);
    if (best_genes.empty())
        return failure_record{failure_cause::empty_candidate_set, dag.exit(), 0.0};
    return decode_chromosome(best_genes, dag, trace, sp, &state).failure;
}

}  // namespace vcsched

#include "vcsched/channel.hpp"

#include <cmath>

#include "vcsched/sched.hpp"

namespace vcsched {

double breakpoint_distance(double h_t, double h_r, const channel_params& cp) {
    if (h_t <= 0 || h_r <= 0 || cp.delta <= 0 || cp.wavelength_m <= 0)
        throw channel_error("breakpoint parameters must be positive");
    double d = 4.0 * h_t * h_r / cp.delta - cp.wavelength_m / 4.0;
    if (d <= 1.0)
        throw non_positive_breakpoint("breakpoint distance " + std::to_string(d) +
                                      " m is inside the reference range");
    return d;
}

double path_loss(double d_m, double d_brk_m, const channel_params& cp) {
    if (d_m < 1.0)
        throw distance_below_model_range("d=" + std::to_string(d_m) + " m < 1 m");
    if (d_m <= d_brk_m)
        return cp.l_b_db + 10.0 * cp.eta1 * std::log10(d_m) + cp.pl_d0_db;
    return cp.l_b_db + 10.0 * (cp.eta1 - cp.eta2) * std::log10(d_brk_m) +
           10.0 * cp.eta2 * std::log10(d_m) + cp.pl_d0_db;
}

double transmission_time(double bits, int src, int dst, double t,
                         const mobility_trace& trace, const sim_params& sp) {
    if (src == dst) return 0.0;
    double d = distance(trace, src, dst, t);
    if (d > sp.channel.radius_m)
        throw link_out_of_range("pair " + trace.veh(src).id + "/" + trace.veh(dst).id +
                                " at " + std::to_string(d) + " m exceeds radius");
    double d_brk = breakpoint_distance(trace.veh(src).antenna_m,
                                       trace.veh(dst).antenna_m, sp.channel);
    double pl = path_loss(std::max(d, 1.0), d_brk, sp.channel);
    double per_mbit = sp.channel.gamma_a * pl * sp.channel.gamma_scale + sp.channel.gamma_b;
    return (bits / 1e6) * per_mbit;
}

bool link_feasible(double bits, int src, int dst, double t,
                   const mobility_trace& trace, const sim_params& sp) {
    if (src == dst) return trace.present(src, t);
    if (!trace.present(src, t) || !trace.present(dst, t)) return false;
    if (distance(trace, src, dst, t) > sp.channel.radius_m) return false;
    double tt = transmission_time(bits, src, dst, t, trace, sp);
    double mu = contact_rate(trace, src, dst, t, sp.contact);
    return contact_survival(tt, mu) >= sp.channel.theta;
}

std::vector<int> candidate_set(int ni, const schedule_state& state, double st) {
    const auto& trace = state.trace();
    const auto& dag = state.dag();
    double t = trace.clamp(st);
    std::vector<int> out;
    for (int pm = 0; pm < trace.n_vehicles(); ++pm) {
        if (!trace.present(pm, t)) continue;
        bool ok = true;
        for (const auto& e : dag.preds(ni)) {
            const auto& tj = state.timing(e.node);
            if (!tj.assigned())
                throw predecessor_unassigned("candidate_set(" + dag.node(ni).id +
                                             "): predecessor unassigned");
            if (!link_feasible(e.bits, tj.vehicle, pm, t, trace, state.params())) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(pm);
    }
    return out;
}

std::vector<int> degree_set(int ni, int pm, const schedule_state& state, double st) {
    const auto& trace = state.trace();
    const auto& dag = state.dag();
    if (dag.succs(ni).empty()) return {};
    double c_max = dag.max_out_bits(ni);
    double t = trace.clamp(st);
    std::vector<int> out;
    for (int pn = 0; pn < trace.n_vehicles(); ++pn) {
        if (!trace.present(pn, t)) continue;
        if (link_feasible(c_max, pm, pn, t, trace, state.params())) out.push_back(pn);
    }
    return out;
}

}  // namespace vcsched

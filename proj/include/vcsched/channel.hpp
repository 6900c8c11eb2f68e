#pragma once

#include <stdexcept>
#include <vector>

#include "vcsched/dag.hpp"
#include "vcsched/mobility.hpp"

namespace vcsched {

struct channel_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct non_positive_breakpoint : channel_error {
    using channel_error::channel_error;
};
struct distance_below_model_range : channel_error {
    using channel_error::channel_error;
};
struct link_out_of_range : channel_error {
    using channel_error::channel_error;
};

struct channel_params {
    double l_b_db = 20.0;       // basic transmission loss
    double pl_d0_db = 46.4;     // reference loss at d0 = 1 m
    double eta1 = 2.0;          // slope before the breakpoint
    double eta2 = 4.0;          // slope after the breakpoint
    double delta = 0.05;        // surrounding-object fluctuation factor
    double wavelength_m = 0.0508;  // 5.9 GHz carrier
    double gamma_a = 0.15;      // affine rate map: seconds per Mbit per dB...
    double gamma_b = 0.001;     // ...scaled by gamma_scale, plus this offset
    double gamma_scale = 1.0 / 60.0;
    double radius_m = 500.0;
    double theta = 0.9;         // QoS link-survival threshold
};

// Everything the link layer needs besides the two endpoints.
struct sim_params {
    channel_params channel;
    contact_params contact;

    sim_params() { contact.radius_m = channel.radius_m; }
};

double breakpoint_distance(double h_t, double h_r, const channel_params& cp);

// Dual-slope path loss in dB; requires d >= 1 m.
double path_loss(double d_m, double d_brk_m, const channel_params& cp);

// Seconds to push `bits` from src to dst at time t; 0 when src == dst.
// Throws link_out_of_range when the pair is farther apart than the radius.
double transmission_time(double bits, int src, int dst, double t,
                         const mobility_trace& trace, const sim_params& sp);

inline double contact_survival(double duration_s, double mu) {
    return std::exp(-duration_s * mu);
}

// True iff the transfer meets the QoS constraint: co-located, or within
// radius with survival probability >= theta. Absent vehicles yield false.
bool link_feasible(double bits, int src, int dst, double t,
                   const mobility_trace& trace, const sim_params& sp);

class schedule_state;  // sched.hpp

// Vehicles present at st that can theta-reliably receive the output of every
// assigned predecessor of subtask ni. Sorted by vehicle index.
std::vector<int> candidate_set(int ni, const schedule_state& state, double st);

// Vehicles that can theta-reliably receive ni's largest outgoing payload from
// pm, evaluated at st as the lookahead proxy. Empty for the exit subtask.
std::vector<int> degree_set(int ni, int pm, const schedule_state& state, double st);

}  // namespace vcsched

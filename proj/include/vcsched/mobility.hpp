#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vcsched {

struct vehicle {
    std::string id;
    double cpu_hz = 2e7;    // cycles per second
    double antenna_m = 1.5; // transmitter/receiver height
};

struct mobility_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct trace_parse_error : mobility_error {
    using mobility_error::mobility_error;
};
struct vehicle_absent : mobility_error {
    using mobility_error::mobility_error;
};
struct time_out_of_horizon : mobility_error {
    using mobility_error::mobility_error;
};

struct vec2 {
    double x = 0.0, y = 0.0;
};

// Time-ordered position samples for a set of vehicles. Positions between
// samples are piecewise-linear; a vehicle is present only inside its own
// sampled interval. Vehicle 0 is the task owner. Immutable after load.
class mobility_trace {
public:
    mobility_trace(std::vector<vehicle> vehicles,
                   std::vector<std::vector<std::pair<double, vec2>>> samples);

    int n_vehicles() const { return static_cast<int>(vehicles_.size()); }
    const vehicle& veh(int i) const { return vehicles_[i]; }
    const std::vector<vehicle>& vehicles() const { return vehicles_; }
    int owner() const { return 0; }
    int index_of(const std::string& id) const;

    double t_begin() const { return t0_; }
    double t_end() const { return t1_; }
    // Clock values past the horizon clamp to the final sample.
    double clamp(double t) const { return t < t0_ ? t0_ : (t > t1_ ? t1_ : t); }

    bool present(int i, double t) const;
    double enter_time(int i) const { return samples_[i].front().first; }
    double depart_time(int i) const { return samples_[i].back().first; }

    vec2 position(int i, double t) const;  // throws vehicle_absent
    vec2 velocity(int i, double t) const;  // slope of the active segment

    std::vector<int> present_at(double t) const;

private:
    std::vector<vehicle> vehicles_;
    std::vector<std::vector<std::pair<double, vec2>>> samples_;
    std::vector<int> by_id_lookup_;
    double t0_ = 0.0, t1_ = 0.0;
};

struct synth_trace_params {
    int n_vehicles = 30;
    double region_x_m = 1000.0;
    double region_y_m = 1000.0;
    double speed_min_mps = 5.0;
    double speed_max_mps = 15.0;
    double horizon_s = 300.0;
    double sample_dt_s = 1.0;
    double cpu_mean_hz = 2e7;
    double cpu_rel_std = 0.2;
    double antenna_m = 1.5;
    double arrival_rate = 0.0;   // Poisson arrivals of extra vehicles (1/s)
    double departure_rate = 0.0; // per-vehicle departure rate (1/s)
};

// Random-waypoint motion in a rectangle. Vehicle v001 is the task owner and
// never departs; the others may enter late or leave early when the arrival /
// departure rates are nonzero.
mobility_trace generate_synthetic_trace(const synth_trace_params& params,
                                        std::mt19937_64& rng);

// Trace CSV: header "t,vehicle_id,x,y". Vehicle metadata CSV: header
// "vehicle_id,cpu_hz,antenna_m". The owner is the first vehicle of the
// metadata file.
mobility_trace load_trace_csv(const std::string& trace_path,
                              const std::string& meta_path);

struct vc_snapshot {
    double time = 0.0;
    std::vector<int> present;
    std::vector<std::pair<int, int>> links;  // unordered pairs, first < second
    std::vector<vec2> positions;             // indexed like the trace
};

vc_snapshot snapshot(const mobility_trace& trace, double t, double radius_m);

double distance(const mobility_trace& trace, int a, int b, double t);

struct contact_params {
    bool constant_mode = false;
    double mu_constant = 0.1;  // used when constant_mode
    double mu_floor = 1e-3;
    double margin_eps_m = 1.0;
    double radius_m = 500.0;
};

// Exponential contact-duration rate for a linked pair: relative speed over
// the remaining link margin, floored; or a configured constant.
double contact_rate(const mobility_trace& trace, int a, int b, double t,
                    const contact_params& cp);

}  // namespace vcsched

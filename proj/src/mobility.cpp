#include "vcsched/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace vcsched {

mobility_trace::mobility_trace(
    std::vector<vehicle> vehicles,
    std::vector<std::vector<std::pair<double, vec2>>> samples)
    : vehicles_(std::move(vehicles)), samples_(std::move(samples)) {
    if (vehicles_.size() != samples_.size())
        throw trace_parse_error("vehicle/sample count mismatch");
    if (vehicles_.empty()) throw trace_parse_error("empty trace");
    t0_ = std::numeric_limits<double>::infinity();
    t1_ = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vehicles_.size(); ++i) {
        const auto& s = samples_[i];
        if (s.empty())
            throw trace_parse_error("no samples for vehicle " + vehicles_[i].id);
        for (size_t k = 1; k < s.size(); ++k)
            if (!(s[k].first > s[k - 1].first))
                throw trace_parse_error("non-increasing sample times for vehicle " +
                                        vehicles_[i].id);
        for (const auto& [t, p] : s)
            if (!std::isfinite(t) || !std::isfinite(p.x) || !std::isfinite(p.y))
                throw trace_parse_error("non-finite sample for vehicle " + vehicles_[i].id);
        if (vehicles_[i].cpu_hz <= 0 || vehicles_[i].antenna_m <= 0)
            throw trace_parse_error("bad metadata for vehicle " + vehicles_[i].id);
        t0_ = std::min(t0_, s.front().first);
        t1_ = std::max(t1_, s.back().first);
    }
}

int mobility_trace::index_of(const std::string& id) const {
    for (int i = 0; i < n_vehicles(); ++i)
        if (vehicles_[i].id == id) return i;
    throw vehicle_absent("unknown vehicle id: " + id);
}

bool mobility_trace::present(int i, double t) const {
    const auto& s = samples_[i];
    return t >= s.front().first && t <= s.back().first;
}

vec2 mobility_trace::position(int i, double t) const {
    if (!present(i, t))
        throw vehicle_absent(vehicles_[i].id + " absent at t=" + std::to_string(t));
    const auto& s = samples_[i];
    auto it = std::lower_bound(s.begin(), s.end(), t,
                               [](const auto& a, double v) { return a.first < v; });
    if (it == s.begin()) return it->second;
    if (it == s.end()) return s.back().second;
    const auto& [t1, p1] = *it;
    const auto& [t0, p0] = *(it - 1);
    double f = (t - t0) / (t1 - t0);
    return {p0.x + f * (p1.x - p0.x), p0.y + f * (p1.y - p0.y)};
}

vec2 mobility_trace::velocity(int i, double t) const {
    if (!present(i, t))
        throw vehicle_absent(vehicles_[i].id + " absent at t=" + std::to_string(t));
    const auto& s = samples_[i];
    if (s.size() < 2) return {0.0, 0.0};
    auto it = std::lower_bound(s.begin(), s.end(), t,
                               [](const auto& a, double v) { return a.first < v; });
    if (it == s.begin()) ++it;
    if (it == s.end()) --it;
    const auto& [tb, pb] = *it;
    const auto& [ta, pa] = *(it - 1);
    double dt = tb - ta;
    return {(pb.x - pa.x) / dt, (pb.y - pa.y) / dt};
}

std::vector<int> mobility_trace::present_at(double t) const {
    std::vector<int> out;
    for (int i = 0; i < n_vehicles(); ++i)
        if (present(i, t)) out.push_back(i);
    return out;
}

mobility_trace generate_synthetic_trace(const synth_trace_params& p,
                                        std::mt19937_64& rng) {
    if (p.n_vehicles < 2) throw trace_parse_error("need owner plus at least one provider");
    if (p.region_x_m <= 0 || p.region_y_m <= 0 || p.horizon_s <= 0 || p.sample_dt_s <= 0)
        throw trace_parse_error("bad synthetic trace parameters");

    std::uniform_real_distribution<double> ux(0.0, p.region_x_m);
    std::uniform_real_distribution<double> uy(0.0, p.region_y_m);
    std::uniform_real_distribution<double> uspeed(p.speed_min_mps, p.speed_max_mps);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    auto draw_cpu = [&] {
        std::normal_distribution<double> d(p.cpu_mean_hz, p.cpu_rel_std * p.cpu_mean_hz);
        for (int i = 0; i < 1000; ++i) {
            double v = d(rng);
            if (v > 0) return v;
        }
        return p.cpu_mean_hz;
    };
    auto draw_exp = [&](double rate) {
        if (rate <= 0) return std::numeric_limits<double>::infinity();
        return -std::log(1.0 - u01(rng)) / rate;
    };

    struct walker {
        vec2 pos, target;
        double speed = 0.0;
    };
    auto step = [&](walker& w, double dt) {
        double remaining = w.speed * dt;
        while (remaining > 0) {
            double dx = w.target.x - w.pos.x, dy = w.target.y - w.pos.y;
            double d = std::hypot(dx, dy);
            if (d <= remaining) {
                w.pos = w.target;
                remaining -= d;
                w.target = {ux(rng), uy(rng)};
                w.speed = uspeed(rng);
                if (w.speed <= 0) break;
            } else {
                w.pos.x += dx / d * remaining;
                w.pos.y += dy / d * remaining;
                remaining = 0;
            }
        }
    };

    std::vector<vehicle> vehicles;
    std::vector<std::vector<std::pair<double, vec2>>> samples;
    int next_id = 1;
    auto make_id = [&] {
        char buf[16];
        std::snprintf(buf, sizeof buf, "v%03d", next_id++);
        return std::string(buf);
    };

    auto simulate = [&](double enter, double depart) {
        walker w{{ux(rng), uy(rng)}, {ux(rng), uy(rng)}, uspeed(rng)};
        std::vector<std::pair<double, vec2>> track;
        track.emplace_back(enter, w.pos);
        for (double t = enter + p.sample_dt_s; t < depart; t += p.sample_dt_s) {
            step(w, p.sample_dt_s);
            track.emplace_back(t, w.pos);
        }
        if (track.back().first < depart) {
            step(w, depart - track.back().first);
            track.emplace_back(depart, w.pos);
        }
        return track;
    };

    // Owner: present over the full horizon.
    vehicles.push_back({make_id(), draw_cpu(), p.antenna_m});
    samples.push_back(simulate(0.0, p.horizon_s));

    for (int i = 1; i < p.n_vehicles; ++i) {
        double depart = std::min(p.horizon_s, draw_exp(p.departure_rate));
        if (depart < p.sample_dt_s) depart = p.sample_dt_s;
        vehicles.push_back({make_id(), draw_cpu(), p.antenna_m});
        samples.push_back(simulate(0.0, depart));
    }

    // Late arrivals.
    for (double t = draw_exp(p.arrival_rate); t < p.horizon_s - p.sample_dt_s;
         t += draw_exp(p.arrival_rate)) {
        double depart = std::min(p.horizon_s, t + draw_exp(p.departure_rate));
        vehicles.push_back({make_id(), draw_cpu(), p.antenna_m});
        samples.push_back(simulate(t, depart));
    }

    return mobility_trace(std::move(vehicles), std::move(samples));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

mobility_trace load_trace_csv(const std::string& trace_path,
                              const std::string& meta_path) {
    std::ifstream meta(meta_path);
    if (!meta) throw trace_parse_error("cannot open metadata csv: " + meta_path);
    std::string line;
    if (!std::getline(meta, line) || split_csv(line) !=
            std::vector<std::string>{"vehicle_id", "cpu_hz", "antenna_m"})
        throw trace_parse_error("bad metadata header in " + meta_path);
    std::vector<vehicle> vehicles;
    std::vector<int> idx_of;
    std::unordered_map<std::string, int> by_id;
    int lineno = 1;
    while (std::getline(meta, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 3)
            throw trace_parse_error(meta_path + ":" + std::to_string(lineno) +
                                    ": expected 3 fields");
        try {
            if (!by_id.emplace(f[0], static_cast<int>(vehicles.size())).second)
                throw trace_parse_error("duplicate vehicle id " + f[0]);
            vehicles.push_back({f[0], std::stod(f[1]), std::stod(f[2])});
        } catch (const std::invalid_argument&) {
            throw trace_parse_error(meta_path + ":" + std::to_string(lineno) +
                                    ": bad number");
        }
    }
    if (vehicles.empty()) throw trace_parse_error("no vehicles in " + meta_path);

    std::ifstream in(trace_path);
    if (!in) throw trace_parse_error("cannot open trace csv: " + trace_path);
    if (!std::getline(in, line) ||
        split_csv(line) != std::vector<std::string>{"t", "vehicle_id", "x", "y"})
        throw trace_parse_error("bad trace header in " + trace_path);
    std::vector<std::vector<std::pair<double, vec2>>> samples(vehicles.size());
    lineno = 1;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 4)
            throw trace_parse_error(trace_path + ":" + std::to_string(lineno) +
                                    ": expected 4 fields");
        auto it = by_id.find(f[1]);
        if (it == by_id.end())
            throw trace_parse_error(trace_path + ":" + std::to_string(lineno) +
                                    ": unknown vehicle id " + f[1]);
        double t, x, y;
        try {
            t = std::stod(f[0]);
            x = std::stod(f[2]);
            y = std::stod(f[3]);
        } catch (const std::invalid_argument&) {
            throw trace_parse_error(trace_path + ":" + std::to_string(lineno) +
                                    ": bad number");
        }
        auto& s = samples[it->second];
        if (!s.empty() && t <= s.back().first)
            throw trace_parse_error(trace_path + ":" + std::to_string(lineno) +
                                    ": out-of-order timestamp for " + f[1]);
        s.emplace_back(t, vec2{x, y});
        any = true;
    }
    if (!any) throw trace_parse_error("empty trace file: " + trace_path);
    return mobility_trace(std::move(vehicles), std::move(samples));
}

vc_snapshot snapshot(const mobility_trace& trace, double t, double radius_m) {
    if (t < trace.t_begin() || t > trace.t_end())
        throw time_out_of_horizon("t=" + std::to_string(t) + " outside [" +
                                  std::to_string(trace.t_begin()) + ", " +
                                  std::to_string(trace.t_end()) + "]");
    vc_snapshot snap;
    snap.time = t;
    snap.present = trace.present_at(t);
    snap.positions.resize(trace.n_vehicles());
    for (int i : snap.present) snap.positions[i] = trace.position(i, t);
    for (size_t a = 0; a < snap.present.size(); ++a) {
        for (size_t b = a + 1; b < snap.present.size(); ++b) {
            int i = snap.present[a], j = snap.present[b];
            double d = std::hypot(snap.positions[i].x - snap.positions[j].x,
                                  snap.positions[i].y - snap.positions[j].y);
            if (d <= radius_m) snap.links.emplace_back(i, j);
        }
    }
    return snap;
}

double distance(const mobility_trace& trace, int a, int b, double t) {
    vec2 pa = trace.position(a, t);
    vec2 pb = trace.position(b, t);
    return std::hypot(pa.x - pb.x, pa.y - pb.y);
}

double contact_rate(const mobility_trace& trace, int a, int b, double t,
                    const contact_params& cp) {
    if (cp.constant_mode) return cp.mu_constant;
    if (a == b) return cp.mu_floor;
    double d = distance(trace, a, b, t);
    vec2 va = trace.velocity(a, t);
    vec2 vb = trace.velocity(b, t);
    double v_rel = std::hypot(va.x - vb.x, va.y - vb.y);
    double margin = std::max(cp.margin_eps_m, cp.radius_m - d);
    return std::max(cp.mu_floor, v_rel / margin);
}

}  // namespace vcsched

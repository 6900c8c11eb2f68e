#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace vcsched;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / name; }

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("zero-speed synthetic vehicles stay put") {
    synth_trace_params p;
    p.n_vehicles = 2;
    p.speed_min_mps = 0.0;
    p.speed_max_mps = 0.0;
    p.horizon_s = 100.0;
    std::mt19937_64 rng(5);
    auto tr = generate_synthetic_trace(p, rng);
    for (int i = 0; i < tr.n_vehicles(); ++i) {
        auto p0 = tr.position(i, 0.0);
        for (double t : {13.0, 50.5, 100.0}) {
            auto pt = tr.position(i, t);
            CHECK(pt.x == doctest::Approx(p0.x));
            CHECK(pt.y == doctest::Approx(p0.y));
        }
    }
}

TEST_CASE("synthetic trace is deterministic per seed and closed without churn") {
    synth_trace_params p;
    p.n_vehicles = 30;
    std::mt19937_64 a(11), b(11);
    auto t1 = generate_synthetic_trace(p, a);
    auto t2 = generate_synthetic_trace(p, b);
    REQUIRE(t1.n_vehicles() == t2.n_vehicles());
    for (int i = 0; i < t1.n_vehicles(); ++i) {
        CHECK(t1.veh(i).id == t2.veh(i).id);
        CHECK(t1.veh(i).cpu_hz == t2.veh(i).cpu_hz);
        for (double t : {0.0, 17.0, 123.4, 300.0}) {
            auto pa = t1.position(i, t), pb = t2.position(i, t);
            CHECK(pa.x == pb.x);
            CHECK(pa.y == pb.y);
        }
    }
    // arrival/departure rates default to 0: the present set never changes
    for (double t : {0.0, 100.0, 300.0})
        CHECK(t1.present_at(t).size() == 30);
    CHECK(t1.owner() == 0);
    CHECK(t1.veh(0).id == "v001");
}

TEST_CASE("positions interpolate linearly between samples") {
    std::vector<vehicle> vs{{"v001", 2e7, 1.5}};
    std::vector<std::vector<std::pair<double, vec2>>> ss{
        {{0.0, {0.0, 0.0}}, {10.0, {100.0, 0.0}}}};
    mobility_trace tr(vs, ss);
    auto p = tr.position(0, 5.0);
    CHECK(p.x == doctest::Approx(50.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK_THROWS_AS(tr.position(0, 11.0), vehicle_absent);
    CHECK(tr.clamp(11.0) == 10.0);
    CHECK(tr.clamp(-1.0) == 0.0);
}

TEST_CASE("trace csv loader accepts round trips and rejects malformed input") {
    auto meta = tmp("vcsched_meta.csv");
    auto trace = tmp("vcsched_trace.csv");
    write_file(meta, "vehicle_id,cpu_hz,antenna_m\nv001,2e7,1.5\nv002,3e7,1.5\n");
    write_file(trace,
               "t,vehicle_id,x,y\n"
               "0,v001,0,0\n0,v002,10,0\n"
               "10,v001,100,0\n10,v002,10,0\n");
    auto tr = load_trace_csv(trace.string(), meta.string());
    CHECK(tr.n_vehicles() == 2);
    CHECK(tr.veh(1).cpu_hz == doctest::Approx(3e7));
    CHECK(tr.position(0, 5.0).x == doctest::Approx(50.0));

    write_file(trace, "");
    CHECK_THROWS_AS(load_trace_csv(trace.string(), meta.string()), trace_parse_error);
    write_file(trace, "t,vehicle_id,x,y\n10,v001,0,0\n0,v001,1,1\n");
    CHECK_THROWS_AS(load_trace_csv(trace.string(), meta.string()), trace_parse_error);
    write_file(trace, "t,vehicle_id,x,y\n0,ghost,0,0\n");
    CHECK_THROWS_AS(load_trace_csv(trace.string(), meta.string()), trace_parse_error);
    write_file(trace, "t,vehicle_id,x,y\n0,v001,abc,0\n");
    CHECK_THROWS_AS(load_trace_csv(trace.string(), meta.string()), trace_parse_error);
    fs::remove(meta);
    fs::remove(trace);
}

TEST_CASE("snapshot applies the one-hop radius rule") {
    auto tr = test::static_trace({{0, 0}, {499, 0}}, {2e7, 2e7});
    CHECK(snapshot(tr, 0.0, 500.0).links.size() == 1);
    auto far = test::static_trace({{0, 0}, {501, 0}}, {2e7, 2e7});
    CHECK(snapshot(far, 0.0, 500.0).links.empty());

    auto line = test::static_trace({{0, 0}, {300, 0}, {600, 0}}, {2e7, 2e7, 2e7});
    auto snap = snapshot(line, 10.0, 500.0);
    REQUIRE(snap.links.size() == 2);
    CHECK(snap.links[0] == std::pair<int, int>{0, 1});
    CHECK(snap.links[1] == std::pair<int, int>{1, 2});
    CHECK_THROWS_AS(snapshot(line, 2000.0, 500.0), time_out_of_horizon);
}

TEST_CASE("snapshot links are radius-monotone and use sampled positions") {
    synth_trace_params p;
    p.n_vehicles = 12;
    std::mt19937_64 rng(21);
    auto tr = generate_synthetic_trace(p, rng);
    for (int k = 0; k < 100; ++k) {
        double t = 3.0 * k;
        auto small = snapshot(tr, t, 200.0);
        auto large = snapshot(tr, t, 500.0);
        for (auto l : small.links)
            CHECK(std::find(large.links.begin(), large.links.end(), l) !=
                  large.links.end());
        for (auto [a, b] : large.links) CHECK(a < b);
    }
    // at an exact sample instant the snapshot carries the sampled position
    auto snap = snapshot(tr, 17.0, 500.0);
    for (int i : snap.present) {
        auto pos = tr.position(i, 17.0);
        CHECK(snap.positions[i].x == pos.x);
        CHECK(snap.positions[i].y == pos.y);
    }
}

TEST_CASE("distance is plain euclidean geometry") {
    auto tr = test::static_trace({{0, 0}, {3, 4}, {3, 4}}, {2e7, 2e7, 2e7});
    CHECK(distance(tr, 0, 1, 1.0) == doctest::Approx(5.0));
    CHECK(distance(tr, 1, 2, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("interpolated distance matches dense resampling") {
    // two vehicles on crossing diagonals, sampled coarsely
    std::vector<vehicle> vs{{"v001", 2e7, 1.5}, {"v002", 2e7, 1.5}};
    std::vector<std::vector<std::pair<double, vec2>>> ss{
        {{0.0, {0.0, 0.0}}, {10.0, {100.0, 50.0}}, {20.0, {0.0, 100.0}}},
        {{0.0, {100.0, 0.0}}, {10.0, {0.0, 50.0}}, {20.0, {100.0, 100.0}}}};
    mobility_trace tr(vs, ss);
    for (double t = 0.0; t <= 20.0; t += 0.37) {
        // oracle: interpolate each coordinate by hand on the active segment
        auto lerp = [&](const std::vector<std::pair<double, vec2>>& s, double tt) {
            size_t k = tt < 10.0 ? 0 : 1;
            double f = (tt - s[k].first) / (s[k + 1].first - s[k].first);
            return vec2{s[k].second.x + f * (s[k + 1].second.x - s[k].second.x),
                        s[k].second.y + f * (s[k + 1].second.y - s[k].second.y)};
        };
        auto a = lerp(ss[0], t), b = lerp(ss[1], t);
        double want = std::hypot(a.x - b.x, a.y - b.y);
        CHECK(distance(tr, 0, 1, t) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("contact rate follows the kinematic estimator") {
    contact_params cp;
    cp.radius_m = 500.0;

    SUBCASE("constant mode returns the configured rate") {
        cp.constant_mode = true;
        cp.mu_constant = 0.1;
        auto tr = test::static_trace({{0, 0}, {100, 0}}, {2e7, 2e7});
        CHECK(contact_rate(tr, 0, 1, 0.0, cp) == 0.1);
    }

    SUBCASE("parallel same-speed vehicles sit at the floor") {
        std::vector<vehicle> vs{{"v001", 2e7, 1.5}, {"v002", 2e7, 1.5}};
        std::vector<std::vector<std::pair<double, vec2>>> ss{
            {{0.0, {0.0, 0.0}}, {10.0, {100.0, 0.0}}},
            {{0.0, {0.0, 50.0}}, {10.0, {100.0, 50.0}}}};
        mobility_trace tr(vs, ss);
        CHECK(contact_rate(tr, 0, 1, 5.0, cp) == cp.mu_floor);
        double mu = contact_rate(tr, 0, 1, 5.0, cp);
        CHECK(contact_survival(10.0, mu) > 0.98);
    }

    SUBCASE("hand-evaluated separation case") {
        // d = 400 m and the pair separates at 10 m/s: mu = 10 / (500-400)
        std::vector<vehicle> vs{{"v001", 2e7, 1.5}, {"v002", 2e7, 1.5}};
        std::vector<std::vector<std::pair<double, vec2>>> ss{
            {{0.0, {0.0, 0.0}}, {10.0, {0.0, 0.0}}},
            {{0.0, {400.0, 0.0}}, {10.0, {500.0, 0.0}}}};
        mobility_trace tr(vs, ss);
        CHECK(contact_rate(tr, 0, 1, 0.0, cp) == doctest::Approx(0.1));
        CHECK(contact_rate(tr, 0, 1, 0.0, cp) ==
              contact_rate(tr, 1, 0, 0.0, cp));
    }
}

TEST_CASE("trace construction validates its inputs") {
    std::vector<vehicle> vs{{"v001", 2e7, 1.5}};
    CHECK_THROWS_AS(mobility_trace({}, {}), trace_parse_error);
    CHECK_THROWS_AS(mobility_trace(vs, {{}}), trace_parse_error);
    std::vector<std::vector<std::pair<double, vec2>>> dup{
        {{0.0, {0.0, 0.0}}, {0.0, {1.0, 0.0}}}};
    CHECK_THROWS_AS(mobility_trace(vs, dup), trace_parse_error);
    std::vector<vehicle> bad{{"v001", -1.0, 1.5}};
    std::vector<std::vector<std::pair<double, vec2>>> ok{{{0.0, {0.0, 0.0}}}};
    CHECK_THROWS_AS(mobility_trace(bad, ok), trace_parse_error);
}

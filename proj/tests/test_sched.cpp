#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace vcsched;

namespace {

sim_params relaxed(double theta = 0.01) {
    sim_params sp;
    sp.channel.theta = theta;
    sp.contact.constant_mode = true;
    sp.contact.mu_constant = 0.01;
    return sp;
}

}  // namespace

TEST_CASE("scheduling time is the max predecessor finish") {
    // n1 -> {n2, n3} -> n4 with controllable finish times via workloads
    dag_task t;
    t.subtasks = {{"n001", 0.0}, {"n002", 4e7}, {"n003", 7e7}, {"n004", 2e7}};
    t.edges = {{"n001", "n002", 0.0},
               {"n001", "n003", 0.0},
               {"n002", "n004", 0.0},
               {"n003", "n004", 0.0}};
    auto dag = validate(t);
    auto tr = test::static_trace({{0, 0}, {100, 0}}, {2e7, 2e7});
    auto sp = relaxed();
    schedule_state st(dag, tr, sp);

    CHECK(st.scheduling_time(dag.entry()) == 0.0);
    st.commit(dag.entry(), 0);
    CHECK(st.timing(dag.entry()).aft == 0.0);  // zero workload entry

    int n2 = dag.index_of("n002"), n3 = dag.index_of("n003"), n4 = dag.index_of("n004");
    st.commit(n2, 0);  // 4e7 / 2e7 = 2.0 s
    st.commit(n3, 1);  // 7e7 / 2e7 = 3.5 s
    CHECK(st.timing(n2).aft == doctest::Approx(2.0));
    CHECK(st.timing(n3).aft == doctest::Approx(3.5));
    CHECK(st.scheduling_time(n4) == doctest::Approx(3.5));
    CHECK_THROWS_AS(schedule_state(dag, tr, sp).scheduling_time(n4),
                    predecessor_unassigned);
}

TEST_CASE("ready time maxes finish-plus-transfer over predecessors") {
    dag_task t;
    t.subtasks = {{"n001", 0.0}, {"n002", 4e7}, {"n003", 6e7}, {"n004", 2e7}};
    t.edges = {{"n001", "n002", 0.0},
               {"n001", "n003", 0.0},
               {"n002", "n004", 2e6},
               {"n003", "n004", 5e5}};
    auto dag = validate(t);
    auto tr = test::static_trace({{0, 0}, {250, 0}, {400, 0}}, {2e7, 2e7, 2e7});
    auto sp = relaxed();
    schedule_state st(dag, tr, sp);
    st.commit(dag.entry(), 0);
    int n2 = dag.index_of("n002"), n3 = dag.index_of("n003"), n4 = dag.index_of("n004");
    st.commit(n2, 0);  // aft 2.0
    st.commit(n3, 1);  // aft 3.0

    double t_at = st.scheduling_time(n4);
    for (int pm = 0; pm < 3; ++pm) {
        double want = std::max(
            st.timing(n2).aft + transmission_time(2e6, 0, pm, t_at, tr, sp),
            st.timing(n3).aft + transmission_time(5e5, 1, pm, t_at, tr, sp));
        CHECK(st.ready_time(n4, pm) == doctest::Approx(want).epsilon(1e-12));
    }
    // the co-located host pays no transfer for its own predecessor
    CHECK(st.ready_time(n2 /*unused*/, 0) >= 0.0);
}

TEST_CASE("est/eft combine availability, ready time and compute time") {
    // single 3 Mcycle subtask at 20 MHz: the canonical 0.15 s compute time
    auto chain = test::chain_dag(2, 3e6, 0.0);
    auto dag = validate(chain);
    auto tr = test::static_trace({{0, 0}, {100, 0}}, {2e7, 1e7});
    auto sp = relaxed();
    schedule_state st(dag, tr, sp);
    auto [est0, eft0] = st.est_eft(dag.entry(), 0);
    CHECK(est0 == 0.0);
    CHECK(eft0 == doctest::Approx(0.15));

    st.commit(dag.entry(), 0);
    // fresh vehicle 1: RT = AFT(pred) (zero-bit edge), CT = 0.3 at 10 MHz
    auto [est1, eft1] = st.est_eft(dag.index_of("n002"), 1);
    CHECK(est1 == doctest::Approx(0.15));
    CHECK(eft1 == doctest::Approx(0.45));

    // busy vehicle dominates: same vehicle already occupied until 0.15
    auto [est2, eft2] = st.est_eft(dag.index_of("n002"), 0);
    CHECK(est2 == doctest::Approx(0.15));
    CHECK(eft2 == doctest::Approx(0.30));
}

TEST_CASE("avail bootstraps to the vehicle's enter time") {
    std::vector<vehicle> vs{{"v001", 2e7, 1.5}, {"v002", 2e7, 1.5}};
    std::vector<std::vector<std::pair<double, vec2>>> ss{
        {{0.0, {0.0, 0.0}}, {100.0, {0.0, 0.0}}},
        {{40.0, {10.0, 0.0}}, {100.0, {10.0, 0.0}}}};
    mobility_trace tr(vs, ss);
    auto dag = validate(test::chain_dag(1));
    auto sp = relaxed();
    schedule_state st(dag, tr, sp);
    CHECK(st.avail(0) == 0.0);
    CHECK(st.avail(1) == 40.0);
}

TEST_CASE("commits serialize per vehicle and drive the frontier") {
    auto dag = validate(test::chain_dag(3, 3e6, 0.0));
    auto tr = test::static_trace({{0, 0}}, {2e7});
    auto sp = relaxed();
    schedule_state st(dag, tr, sp);
    CHECK(st.ready() == std::vector<int>{dag.entry()});
    st.commit(dag.entry(), 0);
    CHECK_THROWS_AS(st.commit(dag.entry(), 0), already_assigned);
    int n2 = dag.index_of("n002");
    CHECK(st.ready() == std::vector<int>{n2});
    st.commit(n2, 0);
    CHECK(st.timing(n2).est >= st.timing(dag.entry()).aft);
    int n3 = dag.index_of("n003");
    st.commit(n3, 0);
    CHECK(st.ready().empty());
    CHECK(st.complete());
    CHECK(st.otc() == doctest::Approx(0.45));
}

TEST_CASE("commit refuses vehicles that cannot receive the inputs") {
    auto dag = validate(test::chain_dag(2, 3e6, 1e6));
    auto tr = test::static_trace({{0, 0}, {900, 0}}, {2e7, 2e7});
    auto sp = relaxed();
    schedule_state st(dag, tr, sp);
    st.commit(dag.entry(), 0);
    CHECK_THROWS_AS(st.commit(dag.index_of("n002"), 1), infeasible_vehicle);
}

TEST_CASE("ready set equals the brute-force frontier on random dags") {
    std::mt19937_64 rng(31);
    dag_gen_params p;
    p.n_subtasks = 18;
    p.n_layers = 5;
    auto sp = relaxed();
    for (int it = 0; it < 100; ++it) {
        auto dag = validate(generate_random_dag(p, rng));
        auto tr = test::static_trace({{0, 0}, {50, 0}, {100, 50}}, {2e7, 3e7, 1.5e7});
        schedule_state st(dag, tr, sp);
        std::uniform_int_distribution<int> pick_v(0, 2);
        while (!st.complete()) {
            std::vector<int> oracle;
            for (int ni = 0; ni < dag.size(); ++ni) {
                if (st.timing(ni).assigned()) continue;
                bool ok = true;
                for (const auto& e : dag.preds(ni))
                    ok = ok && st.timing(e.node).assigned();
                if (ok) oracle.push_back(ni);
            }
            CHECK(st.ready() == oracle);
            // Definition of the frontier also forbids edges inside it
            for (int a : st.ready())
                for (const auto& e : dag.succs(a))
                    CHECK(std::find(st.ready().begin(), st.ready().end(), e.node) ==
                          st.ready().end());
            std::uniform_int_distribution<int> pick_n(
                0, static_cast<int>(st.ready().size()) - 1);
            st.commit(st.ready()[pick_n(rng)], pick_v(rng));
        }
    }
}

TEST_CASE("schedules produced by commit pass validation; planted C3 faults fail") {
    std::mt19937_64 rng(77);
    dag_gen_params p;
    p.n_subtasks = 12;
    p.n_layers = 4;
    auto dag = validate(generate_random_dag(p, rng));
    auto tr = test::static_trace({{0, 0}, {100, 0}, {450, 200}}, {2e7, 3e7, 2.5e7});

    auto sp = relaxed();
    schedule_state st(dag, tr, sp);
    std::uniform_int_distribution<int> pick_v(0, 2);
    while (!st.complete()) st.commit(st.ready().front(), pick_v(rng));
    CHECK(validate_schedule(st).ok());

    // same assignment judged under a strict QoS: C3 violations surface
    sim_params strict = sp;
    strict.channel.theta = 0.999999;
    schedule_state bad(dag, tr, strict);
    while (!bad.complete()) {
        int ni = bad.ready().front();
        bad.commit(ni, ni % 2 == 0 ? 0 : 2);  // force cross-vehicle transfers
    }
    auto report = validate_schedule(bad);
    CHECK_FALSE(report.ok());
    bool saw_c3 = false;
    for (const auto& v : report.violations) saw_c3 = saw_c3 || v.constraint == "C3";
    CHECK(saw_c3);
}

TEST_CASE("run_trial handles the degenerate and failing cases") {
    auto sp = relaxed();
    std::mt19937_64 rng(1);

    SUBCASE("single subtask lands on the owner") {
        auto dag = validate(test::chain_dag(1, 3e6));
        auto tr = test::static_trace({{0, 0}, {10, 0}}, {2e7, 4e7});
        rfid_scheduler sched;
        auto out = run_trial(dag, tr, sched, sp, rng);
        REQUIRE(out.success);
        CHECK(*out.otc_s == doctest::Approx(0.15));
    }

    SUBCASE("absent owner fails immediately") {
        auto dag = validate(test::chain_dag(2));
        std::vector<vehicle> vs{{"v001", 2e7, 1.5}, {"v002", 2e7, 1.5}};
        std::vector<std::vector<std::pair<double, vec2>>> ss{
            {{5.0, {0.0, 0.0}}, {100.0, {0.0, 0.0}}},
            {{0.0, {10.0, 0.0}}, {100.0, {10.0, 0.0}}}};
        mobility_trace tr(vs, ss);
        rfid_scheduler sched;
        auto out = run_trial(dag, tr, sched, sp, rng);
        CHECK_FALSE(out.success);
        REQUIRE(out.failure);
        CHECK(out.failure->cause == failure_cause::owner_absent);
    }

    SUBCASE("owner departing mid-execution fails the trial") {
        auto dag = validate(test::chain_dag(2, 3e6, 0.0));
        std::vector<vehicle> vs{{"v001", 2e7, 1.5}, {"v002", 2e7, 1.5}};
        std::vector<std::vector<std::pair<double, vec2>>> ss{
            {{0.0, {0.0, 0.0}}, {0.1, {0.0, 0.0}}},
            {{0.0, {600.0, 0.0}}, {100.0, {600.0, 0.0}}}};
        mobility_trace tr(vs, ss);
        rfid_scheduler sched;
        auto out = run_trial(dag, tr, sched, sp, rng);
        CHECK_FALSE(out.success);
        REQUIRE(out.failure);
        CHECK(out.failure->cause == failure_cause::executor_departed);
    }

    SUBCASE("split predecessors under strict QoS starve the join") {
        // n1 -> {n2, n3} -> n4; small input edges are feasible across 300 m,
        // but the big join payloads are not, so once n2 and n3 land on
        // different vehicles no one can receive both inputs.
        dag_task t;
        t.subtasks = {{"n001", 3e6}, {"n002", 3e6}, {"n003", 3e6}, {"n004", 3e6}};
        t.edges = {{"n001", "n002", 1e5},
                   {"n001", "n003", 1e5},
                   {"n002", "n004", 6e6},
                   {"n003", "n004", 6e6}};
        auto dag = validate(t);
        // two fast helpers flanking the owner, out of each other's range
        auto tr = test::static_trace({{0, 0}, {300, 0}, {-300, 0}},
                                     {2e7, 4e8, 4e8});
        sim_params qos;
        qos.channel.theta = 0.9;
        qos.contact.constant_mode = true;
        qos.contact.mu_constant = 0.1;
        rfid_scheduler sched;
        auto out = run_trial(dag, tr, sched, qos, rng);
        CHECK_FALSE(out.success);
        REQUIRE(out.failure);
        CHECK(out.failure->cause == failure_cause::empty_candidate_set);
    }

    SUBCASE("outcomes are deterministic") {
        dag_gen_params p;
        p.n_subtasks = 20;
        p.n_layers = 6;
        synth_trace_params vp;
        vp.n_vehicles = 10;
        std::mt19937_64 gen(12);
        auto dag = validate(generate_random_dag(p, gen));
        auto tr = generate_synthetic_trace(vp, gen);
        rfid_scheduler sched;
        std::mt19937_64 r1(5), r2(5);
        auto a = run_trial(dag, tr, sched, sp, r1);
        auto b = run_trial(dag, tr, sched, sp, r2);
        CHECK(a.success == b.success);
        if (a.success) CHECK(*a.otc_s == *b.otc_s);
    }
}

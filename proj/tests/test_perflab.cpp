#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gravitree/barrier.hpp"
#include "gravitree/engine.hpp"
#include "gravitree/errors.hpp"
#include "gravitree/models.hpp"
#include "gravitree/op_counters.hpp"
#include "gravitree/rng.hpp"

#include <thread>
#include <vector>

using namespace gravitree;

TEST_CASE("count_walk_ops: zero events give zero counters") {
    const OpCounters c = count_walk_ops(TraversalEvents{});
    CHECK(c == OpCounters{});
}

TEST_CASE("count_walk_ops: one of each event matches the per-event constants") {
    const OpCounters c = count_walk_ops(TraversalEvents{1, 1, 1});
    CHECK(c.fp_fma == 9);
    CHECK(c.fp_add == 3 + 2);
    CHECK(c.fp_mul == 2 + 3);
    CHECK(c.fp_rsqrt == 1);
    CHECK(c.integer == 12 + 4);
}

TEST_CASE("counter merge is associative and commutative") {
    RandomStream rng(3, 0);
    for (int t = 0; t < 100; ++t) {
        auto rand_counters = [&] {
            OpCounters c;
            c.integer = rng.next() % 1000;
            c.fp_fma = rng.next() % 1000;
            c.fp_add = rng.next() % 1000;
            c.fp_mul = rng.next() % 1000;
            c.fp_rsqrt = rng.next() % 1000;
            return c;
        };
        const OpCounters a = rand_counters(), b = rand_counters(), c = rand_counters();
        CHECK((a + b) + c == a + (b + c));
        CHECK(a + b == b + a);
    }
}

TEST_CASE("predict_speedup fixed points") {
    HardwareRatios hw;  // peak 1.5
    OpCounters c;
    c.fp_add = 10;
    CHECK(predict_speedup(c, hw) == doctest::Approx(1.5).epsilon(1e-15));  // I = 0
    c.integer = 10;
    CHECK(predict_speedup(c, hw) == doctest::Approx(3.0).epsilon(1e-15));  // I = F
}

TEST_CASE("predict_speedup reproduces the observed 2.2-fold ceiling") {
    OpCounters c;
    c.integer = 4'670'000'000ULL;
    c.fp_fma = 10'000'000'000ULL;
    CHECK(predict_speedup(c, HardwareRatios{}) == doctest::Approx(2.2005).epsilon(1e-4));
}

TEST_CASE("predict_speedup rejects empty counters and stays within model bounds") {
    CHECK_THROWS_AS(predict_speedup(OpCounters{}, HardwareRatios{}), data_error);
    RandomStream rng(5, 0);
    for (int t = 0; t < 200; ++t) {
        OpCounters c;
        c.integer = rng.next() % 10000;
        c.fp_fma = 1 + rng.next() % 10000;
        c.fp_add = rng.next() % 10000;
        c.fp_mul = rng.next() % 10000;
        const HardwareRatios hw;
        const double s = predict_speedup(c, hw);
        CHECK(s >= hw.peak_ratio - 1e-12);
        CHECK(s <= 2.0 * hw.peak_ratio + 1e-12);
        // invariant under uniform counter scaling
        OpCounters scaled;
        scaled.integer = c.integer * 7;
        scaled.fp_fma = c.fp_fma * 7;
        scaled.fp_add = c.fp_add * 7;
        scaled.fp_mul = c.fp_mul * 7;
        CHECK(predict_speedup(scaled, hw) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("flops_estimate weights") {
    OpCounters c;
    c.fp_fma = 1;
    CHECK(flops_estimate(c, 1.0) == 2.0);  // FMA counts twice
    OpCounters r;
    r.fp_rsqrt = 1;
    CHECK(flops_estimate(r, 1.0) == 4.0);  // reciprocal square root counts as four
    CHECK_THROWS_AS(flops_estimate(c, 0.0), data_error);
    CHECK_THROWS_AS(flops_estimate(c, -1.0), data_error);
}

TEST_CASE("flops_regime flags low fractions of peak") {
    OpCounters c;
    c.fp_add = 100;
    const FlopsRegime r = flops_regime(c, 1.0, 1e4, 0.1);
    CHECK(r.flops == 100.0);
    CHECK(r.fraction_of_peak == doctest::Approx(0.01));
    CHECK(r.below_threshold);
    const FlopsRegime ok = flops_regime(c, 1.0, 200.0, 0.1);
    CHECK_FALSE(ok.below_threshold);
}

TEST_CASE("walk counters: tighter accuracy raises interactions per particle") {
    auto interactions_at = [](double dacc) {
        ParticleSystem sys = sample_plummer(1024, 1.0, 1.0, 19);
        GravParams p;
        p.eps = 0.02;
        p.dacc = dacc;
        GravityEngine engine(p, {});
        engine.build(sys);
        for (auto& a : sys.acc_old_mag) a = 1.0;
        return engine.evaluate(sys).interactions;
    };
    CHECK(interactions_at(0x1.0p-9) > interactions_at(0x1.0p-3));
}

TEST_CASE("parallel and serial walks tally identical counters") {
    ParticleSystem sys = sample_plummer(2048, 1.0, 1.0, 23);
    GravParams p;
    p.eps = 0.02;
    p.dacc = 0x1.0p-6;
    TraversalEvents serial, parallel;
    {
        ParticleSystem s = sys;
        EngineConfig cfg;
        cfg.threads = 1;
        GravityEngine engine(p, cfg);
        engine.build(s);
        for (auto& a : s.acc_old_mag) a = 1.0;
        serial = engine.evaluate(s);
    }
    {
        ParticleSystem s = sys;
        EngineConfig cfg;
        cfg.threads = 4;
        GravityEngine engine(p, cfg);
        engine.build(s);
        for (auto& a : s.acc_old_mag) a = 1.0;
        parallel = engine.evaluate(s);
    }
    CHECK(serial == parallel);
}

TEST_CASE("single worker can reuse the barrier across many phases") {
    SpinBarrier barrier(1);
    auto handle = barrier.register_worker();
    for (int k = 0; k < 1000; ++k) barrier.wait(handle);
    CHECK(barrier.phases() == 1000);
}

TEST_CASE("registration beyond the party count fails fast") {
    SpinBarrier barrier(2);
    auto a = barrier.register_worker();
    auto b = barrier.register_worker();
    (void)a;
    (void)b;
    CHECK_THROWS_AS(barrier.register_worker(), resource_error);
}

TEST_CASE("phase-slot harness: eight workers stay exactly in phase") {
    const BarrierHarnessResult r = barrier_phase_harness(8, 2000, 99, 60.0);
    CHECK(r.ok);
    CHECK(r.violations == 0);
    CHECK(r.phases_completed == 2000);
}

TEST_CASE("bench_barrier reports finite positive costs for both barriers") {
    const BarrierBenchResult r = bench_barrier(2, 20000);
    CHECK(r.lockfree_ns_per_sync > 0.0);
    CHECK(r.native_ns_per_sync > 0.0);
    CHECK(std::isfinite(r.lockfree_ns_per_sync));
    CHECK(std::isfinite(r.native_ns_per_sync));
    CHECK(r.ratio > 0.0);
    CHECK(r.violations == 0);
}

TEST_CASE("bench_barrier validates its preconditions") {
    CHECK_THROWS_AS(bench_barrier(1, 100), data_error);
    CHECK_THROWS_AS(bench_barrier(4, 0), data_error);
}

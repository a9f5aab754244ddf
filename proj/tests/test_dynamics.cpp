#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gravitree/diagnostics.hpp"
#include "gravitree/gravity.hpp"
#include "gravitree/integrator.hpp"
#include "gravitree/models.hpp"
#include "gravitree/rebuild_tuner.hpp"
#include "support/test_support.hpp"

using namespace gravitree;
using gravitree::testing::circular_binary;

namespace {

constexpr double kPeriod = 6.283185307179586;  // circular binary, r0 = 1, M = 1

// Max |dE/E| of an eccentric two-body orbit over one period at fixed dt.
double kepler_energy_error(double dt, std::size_t steps) {
    ParticleSystem sys = gravitree::testing::eccentric_binary();
    GravParams params;  // G = 1, eps = 0
    params.dacc = 0x1.0p-20;
    StepScheme scheme;
    scheme.adaptive = false;
    scheme.fixed_level = 0;
    scheme.dt_max = dt;
    Simulation sim(std::move(sys), params, scheme);
    sim.init();
    const double e0 = compute_diagnostics(sim.system(), params).total;
    double worst = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        sim.step();
        const double e = compute_diagnostics(sim.system(), params).total;
        worst = std::max(worst, std::abs((e - e0) / e0));
    }
    return worst;
}

}  // namespace

TEST_CASE("block level: equal accelerations share one level") {
    StepScheme scheme;
    scheme.eta = 0.3;
    scheme.dt_max = 1.0;
    const double eps = 1.0;
    const int l = block_level(1.0, scheme, eps);
    for (double amag : {1.0, 1.0, 1.0}) CHECK(block_level(amag, scheme, eps) == l);
}

TEST_CASE("block level: four times the acceleration is one level deeper") {
    StepScheme scheme;
    scheme.eta = 0.3;
    scheme.dt_max = 1.0;
    const double eps = 1.0;
    // dt(|a|) = eta sqrt(eps/|a|): 4x acceleration halves dt
    CHECK(block_level(4.0, scheme, eps) == block_level(1.0, scheme, eps) + 1);
}

TEST_CASE("block level: zero acceleration gets the full step") {
    StepScheme scheme;
    CHECK(block_level(0.0, scheme, 0.01) == 0);
}

TEST_CASE("block level quantizes downward") {
    StepScheme scheme;
    scheme.eta = 1.0;
    scheme.dt_max = 1.0;
    for (double amag : {0.9, 1.7, 3.1, 11.0, 130.0}) {
        const int l = block_level(amag, scheme, 1.0);
        const double dt_level = scheme.dt_max / static_cast<double>(1u << l);
        const double dt_want = scheme.eta * std::sqrt(1.0 / amag);
        CHECK(dt_level <= dt_want);
        if (l > 0) CHECK(2.0 * dt_level > dt_want);
    }
}

TEST_CASE("predict: force-free motion is exactly linear") {
    ParticleSystem sys(2);
    sys.mass[0] = sys.mass[1] = 1.0;
    sys.pos[0] = {1.0, 2.0, 3.0};
    sys.vel[0] = {0.5, -0.25, 0.125};
    predict(sys, 0.5);
    CHECK(sys.pos[0] == Vec3{1.25, 1.875, 3.0625});
    CHECK(sys.vel[0] == Vec3{0.5, -0.25, 0.125});
}

TEST_CASE("predict: constant acceleration drift") {
    ParticleSystem sys(1);
    sys.mass[0] = 1.0;
    sys.vel[0] = {1.0, 0.0, 0.0};
    sys.acc[0] = {0.0, 2.0, 0.0};
    predict(sys, 0.5);
    // v dt + a dt^2 / 2
    CHECK(sys.pos[0] == Vec3{0.5, 0.25, 0.0});
    CHECK(sys.vel[0] == Vec3{1.0, 1.0, 0.0});
}

TEST_CASE("correct: zero accelerations leave velocities unchanged") {
    ParticleSystem sys(3);
    for (std::size_t i = 0; i < 3; ++i) {
        sys.mass[i] = 1.0;
        sys.vel[i] = {1.0 * i, 2.0, -1.0};
    }
    std::vector<Vec3> zero(3);
    correct(sys, zero, 0.25);
    CHECK(sys.vel[1] == Vec3{1.0, 2.0, -1.0});
}

TEST_CASE("correct: constant field integrates exactly") {
    ParticleSystem sys(1);
    sys.mass[0] = 1.0;
    const Vec3 field{0.0, 0.0, -9.8};
    sys.acc[0] = field;
    const Vec3 v0 = sys.vel[0];
    const double dt = 0.125;
    predict(sys, dt);  // velocity becomes v0 + a dt
    std::vector<Vec3> acc_new{field};
    correct(sys, acc_new, dt);
    CHECK(sys.vel[0] == v0 + dt * field);
    CHECK(sys.acc_old_mag[0] == doctest::Approx(9.8));
}

TEST_CASE("circular orbit holds its radius over one period") {
    ParticleSystem sys = circular_binary();
    GravParams params;
    params.dacc = 0x1.0p-20;
    StepScheme scheme;
    scheme.adaptive = false;
    scheme.dt_max = kPeriod / 1000.0;
    Simulation sim(std::move(sys), params, scheme);
    sim.init();
    for (int s = 0; s < 1000; ++s) {
        sim.step();
        const double r = (sim.system().pos[1] - sim.system().pos[0]).norm();
        CHECK(std::abs(r - 1.0) < 0.01);
    }
}

TEST_CASE("two-body energy error converges at second order") {
    const std::vector<double> dts = {kPeriod / 250.0, kPeriod / 500.0, kPeriod / 1000.0};
    std::vector<double> errs;
    for (double dt : dts) errs.push_back(kepler_energy_error(dt, static_cast<std::size_t>(kPeriod / dt)));
    // halving dt should quarter the error
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.5));
    // least-squares slope of log err vs log dt
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double x = std::log(dts[i]), y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("bound pair: tight accuracy keeps the energy drift tiny") {
    ParticleSystem sys = circular_binary();
    GravParams params;
    params.dacc = 0x1.0p-20;
    StepScheme scheme;
    scheme.adaptive = false;
    scheme.dt_max = kPeriod / 500.0;
    Simulation sim(std::move(sys), params, scheme);
    sim.init();
    const double e0 = compute_diagnostics(sim.system(), params).total;
    for (int s = 0; s < 100; ++s) sim.step();
    const double e1 = compute_diagnostics(sim.system(), params).total;
    CHECK(std::abs((e1 - e0) / e0) < 1e-4);
}

TEST_CASE("symmetric static configuration conserves momentum in one step") {
    ParticleSystem sys(8);
    std::size_t i = 0;
    for (int ix : {-1, 1})
        for (int iy : {-1, 1})
            for (int iz : {-1, 1}) {
                sys.mass[i] = 1.0;
                sys.pos[i] = {0.5 * ix, 0.5 * iy, 0.5 * iz};
                ++i;
            }
    GravParams params;
    params.eps = 0.1;
    params.dacc = 0x1.0p-9;
    StepScheme scheme;
    scheme.dt_max = 0.01;
    Simulation sim(std::move(sys), params, scheme);
    sim.init();
    sim.step();
    Vec3 p{};
    for (std::size_t k = 0; k < 8; ++k) p += sim.system().mass[k] * sim.system().vel[k];
    CHECK(p.norm() < 1e-12);
}

TEST_CASE("phase timings are non-negative and bounded by the step wall time") {
    ParticleSystem sys = sample_plummer(512, 1.0, 1.0, 4);
    GravParams params;
    params.eps = 0.02;
    StepScheme scheme;
    scheme.dt_max = 1.0 / 64.0;
    Simulation sim(std::move(sys), params, scheme);
    sim.init();
    for (int s = 0; s < 5; ++s) {
        const StepResult r = sim.step();
        CHECK(r.timings.walk_tree >= 0.0);
        CHECK(r.timings.calc_node >= 0.0);
        CHECK(r.timings.make_tree >= 0.0);
        CHECK(r.timings.predict >= 0.0);
        CHECK(r.timings.correct >= 0.0);
        CHECK(r.timings.total() <= r.wall_seconds * (1.0 + 1e-9) + 1e-9);
    }
}

TEST_CASE("levels stay within bounds and move by at most one per step") {
    ParticleSystem sys = sample_plummer(1024, 1.0, 1.0, 6);
    GravParams params;
    params.eps = 0.02;
    params.dacc = 0x1.0p-6;
    StepScheme scheme;
    scheme.dt_max = 1.0 / 16.0;
    Simulation sim(std::move(sys), params, scheme);
    sim.init();
    std::vector<std::uint8_t> prev = sim.system().level;
    for (int s = 0; s < 50; ++s) {
        sim.step();
        const auto& lv = sim.system().level;
        for (std::size_t i = 0; i < lv.size(); ++i) {
            CHECK(lv[i] <= kMaxBlockLevel);
            CHECK(std::abs(static_cast<int>(lv[i]) - static_cast<int>(prev[i])) <= 1);
        }
        prev = lv;
    }
}

TEST_CASE("block steps track the forced-minimum-step run") {
    GravParams params;
    params.eps = 0.05;
    params.dacc = 0x1.0p-12;

    auto drift = [&](bool adaptive, int fixed_level) {
        ParticleSystem sys = sample_plummer(256, 1.0, 1.0, 15);
        StepScheme scheme;
        scheme.dt_max = 1.0 / 32.0;
        scheme.adaptive = adaptive;
        scheme.fixed_level = fixed_level;
        Simulation sim(std::move(sys), params, scheme);
        sim.init();
        int max_level = 0;
        const double e0 = compute_diagnostics(sim.system(), params).total;
        const double t_end = 1.0;
        while (sim.time() < t_end) {
            sim.step();
            for (std::uint8_t l : sim.system().level) max_level = std::max(max_level, static_cast<int>(l));
        }
        const double e1 = compute_diagnostics(sim.system(), params).total;
        return std::make_pair(std::abs((e1 - e0) / e0), max_level);
    };

    const auto [block_drift, max_level] = drift(true, 0);
    const auto [fine_drift, unused] = drift(false, max_level);
    (void)unused;
    const double hi = std::max(block_drift, fine_drift) + 1e-12;
    const double lo = std::min(block_drift, fine_drift) + 1e-12;
    CHECK(hi / lo < 3.0);
}

TEST_CASE("autotuner: free rebuilds with flat history amortize to the cap") {
    RebuildTuner tuner;
    tuner.record_build(0.0);
    for (int k = 0; k < 8; ++k) tuner.record_walk(2.0);
    CHECK(autotune_rebuild(tuner) == 128);
}

TEST_CASE("autotuner: flat walk history with a real build cost picks the cap") {
    RebuildTuner tuner;
    tuner.record_build(5.0);
    for (int k = 0; k < 8; ++k) tuner.record_walk(1.0);
    CHECK(autotune_rebuild(tuner) == 128);
}

TEST_CASE("autotuner: linear growth reproduces the closed-form optimum") {
    RebuildTuner tuner;
    tuner.record_build(10.0);
    for (int k = 0; k < 16; ++k) tuner.record_walk(1.0 + 1.0 * k);  // t0 = 1, s = 1

    // brute-force oracle over the discrete objective
    std::size_t best_m = 1;
    double best = 1e300;
    for (std::size_t m = 1; m <= 128; ++m) {
        double sum = 10.0;
        for (std::size_t k = 0; k < m; ++k) sum += 1.0 + 1.0 * static_cast<double>(k);
        const double cost = sum / static_cast<double>(m);
        if (cost <= best) {
            best = cost;
            best_m = m;
        }
    }
    const std::size_t tuned = autotune_rebuild(tuner);
    CHECK(tuned == best_m);
    CHECK(tuned >= 4);
    CHECK(tuned <= 5);
}

TEST_CASE("autotuner: a single sample keeps the current interval") {
    RebuildTuner tuner;
    tuner.set_interval(13);
    tuner.record_build(1.0);
    tuner.record_walk(5.0);
    CHECK(autotune_rebuild(tuner) == 13);
}

TEST_CASE("autotuner: the optimum clamps to the configured bounds") {
    RebuildTuner tuner;
    tuner.record_build(1e6);
    for (int k = 0; k < 8; ++k) tuner.record_walk(1.0 + 1.0 * k);
    CHECK(autotune_rebuild(tuner) == 128);
}

TEST_CASE("diagnostics closed forms") {
    SUBCASE("two unit masses at rest, separation 1") {
        ParticleSystem sys(2);
        sys.mass[0] = sys.mass[1] = 1.0;
        sys.pos[1] = {1.0, 0.0, 0.0};
        const Diagnostics d = compute_diagnostics(sys, GravParams{});
        CHECK(d.potential == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(d.kinetic == 0.0);
    }
    SUBCASE("single moving particle") {
        ParticleSystem sys(1);
        sys.mass[0] = 2.0;
        sys.vel[0] = {3.0, 0.0, 0.0};
        const Diagnostics d = compute_diagnostics(sys, GravParams{});
        CHECK(d.potential == 0.0);
        CHECK(d.kinetic == doctest::Approx(9.0).epsilon(1e-15));
    }
    SUBCASE("Plummer sample sits near virial equilibrium") {
        const ParticleSystem sys = sample_plummer(4096, 1.0, 1.0, 77);
        const Diagnostics d = compute_diagnostics(sys, GravParams{});
        CHECK(d.virial_ratio == doctest::Approx(1.0).epsilon(0.2));
    }
}

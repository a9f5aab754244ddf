#include "gravitree/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "gravitree/errors.hpp"

namespace gravitree {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int block_level(double acc_mag, const StepScheme& scheme, double eps) {
    if (!scheme.adaptive) return std::clamp(scheme.fixed_level, 0, kMaxBlockLevel);
    if (acc_mag <= 0.0) return 0;
    const double dt = scheme.eta * std::sqrt(eps / acc_mag);
    if (dt <= 0.0) return kMaxBlockLevel;
    if (dt >= scheme.dt_max) return 0;
    int level = static_cast<int>(std::ceil(std::log2(scheme.dt_max / dt)));
    level = std::clamp(level, 0, kMaxBlockLevel);
    // guard against log2 rounding: the quantized step must not exceed dt
    while (level < kMaxBlockLevel && scheme.dt_max / static_cast<double>(1ull << level) > dt) ++level;
    while (level > 0 && scheme.dt_max / static_cast<double>(1ull << (level - 1)) <= dt) --level;
    return level;
}

void assign_block_steps(ParticleSystem& system, const StepScheme& scheme, double eps) {
    for (std::size_t i = 0; i < system.n(); ++i)
        system.level[i] = static_cast<std::uint8_t>(block_level(system.acc[i].norm(), scheme, eps));
}

void predict(ParticleSystem& system, double dt) {
    for (std::size_t i = 0; i < system.n(); ++i) {
        system.pos[i] += dt * system.vel[i] + (0.5 * dt * dt) * system.acc[i];
        system.vel[i] += dt * system.acc[i];
    }
}

void correct(ParticleSystem& system, std::span<const Vec3> new_accel, double dt) {
    if (new_accel.size() != system.n()) throw data_error("correct: acceleration span size mismatch");
    for (std::size_t i = 0; i < system.n(); ++i) {
        system.vel[i] += (0.5 * dt) * (new_accel[i] - system.acc[i]);
        system.acc[i] = new_accel[i];
        system.acc_old_mag[i] = new_accel[i].norm();
    }
}

Simulation::Simulation(ParticleSystem system, GravParams params, StepScheme scheme,
                       EngineConfig engine_config, TunerConfig tuner_config)
    : system_(std::move(system)),
      params_(params),
      scheme_(scheme),
      engine_(params, engine_config),
      tuner_(tuner_config) {
    if (!(scheme_.dt_max > 0.0)) throw data_error("Simulation: dt_max must be positive");
    if (!(scheme_.eta > 0.0)) throw data_error("Simulation: eta must be positive");
    tick_seconds_ = scheme_.dt_max / static_cast<double>(std::uint64_t{1} << kMaxBlockLevel);
    last_update_.assign(system_.n(), 0);
}

void Simulation::init() {
    system_.validate();
    engine_.bootstrap(system_);
    if (scheme_.adaptive) {
        assign_block_steps(system_, scheme_, params_.eps);
    } else {
        std::fill(system_.level.begin(), system_.level.end(),
                  static_cast<std::uint8_t>(std::clamp(scheme_.fixed_level, 0, kMaxBlockLevel)));
    }
    initialized_ = true;
}

void Simulation::set_fixed_rebuild_interval(std::size_t interval) {
    autotune_ = false;
    tuner_.set_interval(interval);
}

void Simulation::apply_level(std::size_t i, int target) {
    const int current = system_.level[i];
    int next = std::clamp(target, current - 1, current + 1);  // at most one level per step
    next = std::clamp(next, 0, kMaxBlockLevel);
    if (next < current) {
        // coarsening must keep the particle aligned to the wider block
        if (now_ % level_ticks(next) != 0) next = current;
    }
    system_.level[i] = static_cast<std::uint8_t>(next);
}

StepResult Simulation::step() {
    if (!initialized_) throw data_error("Simulation::step: init() not called");
    const auto step_start = Clock::now();
    StepResult result;

    // Next synchronization point: the earliest block boundary.
    std::uint64_t t_next = ~std::uint64_t{0};
    for (std::size_t i = 0; i < system_.n(); ++i)
        t_next = std::min(t_next, last_update_[i] + level_ticks(system_.level[i]));

    std::vector<std::uint32_t> active;
    for (std::size_t i = 0; i < system_.n(); ++i)
        if (last_update_[i] + level_ticks(system_.level[i]) == t_next)
            active.push_back(static_cast<std::uint32_t>(i));
    result.active = active.size();

    const double dt_fine = static_cast<double>(t_next - now_) * tick_seconds_;
    auto t0 = Clock::now();
    predict(system_, dt_fine);
    result.timings.predict = seconds_since(t0);

    const bool rebuild = !engine_.has_tree() || tuner_.should_rebuild();
    if (rebuild) {
        if (autotune_)
            tuner_.on_rebuild();
        else
            tuner_.reset_cycle();
        t0 = Clock::now();
        engine_.build_structure(system_);
        result.timings.make_tree = seconds_since(t0);
        t0 = Clock::now();
        engine_.refresh(system_);
        result.timings.calc_node = seconds_since(t0);
        tuner_.record_build(result.timings.make_tree + result.timings.calc_node);
        result.rebuilt = true;
    } else {
        t0 = Clock::now();
        engine_.refresh(system_);
        result.timings.calc_node = seconds_since(t0);
    }

    // Walk only the particles that reached their block boundary. Save their
    // held accelerations first: the corrector needs a_old.
    std::vector<Vec3> acc_old(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) acc_old[k] = system_.acc[active[k]];

    t0 = Clock::now();
    result.events = engine_.evaluate(system_, active);
    result.timings.walk_tree = seconds_since(t0);
    tuner_.record_walk(result.timings.walk_tree);

    t0 = Clock::now();
    for (std::size_t k = 0; k < active.size(); ++k) {
        const std::uint32_t i = active[k];
        const double dt_block = static_cast<double>(t_next - last_update_[i]) * tick_seconds_;
        system_.vel[i] += (0.5 * dt_block) * (system_.acc[i] - acc_old[k]);
        system_.acc_old_mag[i] = system_.acc[i].norm();
        last_update_[i] = t_next;
        if (scheme_.adaptive) apply_level(i, block_level(system_.acc_old_mag[i], scheme_, params_.eps));
    }
    result.timings.correct = seconds_since(t0);

    now_ = t_next;
    system_.time = static_cast<double>(now_) * tick_seconds_;
    result.rebuild_interval = tuner_.interval();
    result.wall_seconds = seconds_since(step_start);
    return result;
}

}  // namespace gravitree

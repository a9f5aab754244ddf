#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gravitree/engine.hpp"
#include "gravitree/particle_system.hpp"
#include "gravitree/phase_timings.hpp"
#include "gravitree/rebuild_tuner.hpp"

namespace gravitree {

inline constexpr int kMaxBlockLevel = 24;

// Block time-step scheme: particle i advances with dt_max / 2^level[i],
// levels quantized so every particle stays aligned to its block boundary.
struct StepScheme {
    double eta = 0.5;
    double dt_max = 0.0625;
    bool adaptive = true;  // false: every particle stays at fixed_level
    int fixed_level = 0;
};

// Level from the timestep criterion dt = eta * sqrt(eps / |a|), quantized
// down to the nearest power-of-two fraction of dt_max. Zero acceleration
// maps to level 0 (dt_max).
int block_level(double acc_mag, const StepScheme& scheme, double eps);

// Free (unconstrained) assignment of levels for the whole system, used at
// initialization when every particle sits on the t = 0 boundary.
void assign_block_steps(ParticleSystem& system, const StepScheme& scheme, double eps);

// Drift every particle by dt and advance the held velocity: the in-place
// velocity becomes the predicted velocity the corrector later adjusts.
void predict(ParticleSystem& system, double dt);

// Heun corrector for the whole system at a shared dt: applied to the
// predicted velocity as vel += 0.5 * (a_new - a_old) * dt, which equals the
// textbook vel(t) + 0.5 * (a_old + a_new) * dt. Updates acc and acc_old_mag.
void correct(ParticleSystem& system, std::span<const Vec3> new_accel, double dt);

struct StepResult {
    PhaseTimings timings;
    TraversalEvents events;
    std::size_t active = 0;
    std::size_t rebuild_interval = 0;
    bool rebuilt = false;
    double wall_seconds = 0.0;
};

// One simulation = one driver. Owns the particle state, the gravity engine,
// the block-step bookkeeping, and the rebuild tuner.
class Simulation {
public:
    Simulation(ParticleSystem system, GravParams params, StepScheme scheme, EngineConfig engine_config = {},
               TunerConfig tuner_config = {});

    // First force evaluation plus initial level assignment.
    void init();

    // One block step: predict -> (rebuild | refresh) -> walk active -> correct.
    StepResult step();

    const ParticleSystem& system() const { return system_; }
    ParticleSystem& system() { return system_; }
    GravityEngine& engine() { return engine_; }
    const RebuildTuner& tuner() const { return tuner_; }
    RebuildTuner& tuner() { return tuner_; }
    const StepScheme& scheme() const { return scheme_; }
    double time() const { return system_.time; }
    bool initialized() const { return initialized_; }

    // Force a fixed rebuild interval (disables auto-tuning).
    void set_fixed_rebuild_interval(std::size_t interval);

private:
    std::uint64_t level_ticks(int level) const { return std::uint64_t{1} << (kMaxBlockLevel - level); }
    void apply_level(std::size_t i, int target);

    ParticleSystem system_;
    GravParams params_;
    StepScheme scheme_;
    GravityEngine engine_;
    RebuildTuner tuner_;
    std::vector<std::uint64_t> last_update_;  // ticks of dt_max / 2^24
    std::uint64_t now_ = 0;
    double tick_seconds_ = 0.0;
    bool initialized_ = false;
    bool autotune_ = true;
};

}  // namespace gravitree

#pragma once

#include "gravitree/engine.hpp"
#include "gravitree/particle_system.hpp"
#include "gravitree/vec3.hpp"

namespace gravitree {

struct Diagnostics {
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
    Vec3 momentum;
    double virial_ratio = 0.0;  // -2K / W, 0 when W == 0
};

// Energy, momentum, and virial ratio. The potential uses direct summation up
// to 2^17 particles and a high-accuracy tree walk (dacc = 2^-20) beyond that.
Diagnostics compute_diagnostics(const ParticleSystem& system, const GravParams& params,
                                unsigned threads = 0);

inline constexpr std::size_t kDirectPotentialLimit = std::size_t{1} << 17;

}  // namespace gravitree

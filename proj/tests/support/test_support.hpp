#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gravitree/particle_system.hpp"
#include "gravitree/rng.hpp"
#include "gravitree/vec3.hpp"

namespace gravitree::testing {

// Uniform random cloud in [-half, half]^3 with masses in [0.5, 1.5].
inline ParticleSystem random_cloud(std::size_t n, std::uint64_t seed, double half = 1.0) {
    ParticleSystem sys(n);
    RandomStream rng(seed, 42);
    for (std::size_t i = 0; i < n; ++i) {
        sys.mass[i] = rng.uniform(0.5, 1.5);
        sys.pos[i] = {rng.uniform(-half, half), rng.uniform(-half, half), rng.uniform(-half, half)};
        sys.vel[i] = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
    }
    return sys;
}

// Independent reference for direct_sum: different loop nesting, different
// arithmetic (std::pow instead of the shared kernel), long double accumulation.
inline std::vector<Vec3> reference_direct_sum(const ParticleSystem& sys, double g, double eps) {
    const std::size_t n = sys.n();
    std::vector<long double> ax(n, 0.0L), ay(n, 0.0L), az(n, 0.0L);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const long double dx = sys.pos[j].x - sys.pos[i].x;
            const long double dy = sys.pos[j].y - sys.pos[i].y;
            const long double dz = sys.pos[j].z - sys.pos[i].z;
            const long double r2 = dx * dx + dy * dy + dz * dz + static_cast<long double>(eps) * eps;
            const long double w = static_cast<long double>(g) * sys.mass[j] /
                                  std::pow(static_cast<long double>(r2), 1.5L);
            ax[i] += w * dx;
            ay[i] += w * dy;
            az[i] += w * dz;
        }
    }
    std::vector<Vec3> acc(n);
    for (std::size_t i = 0; i < n; ++i)
        acc[i] = {static_cast<double>(ax[i]), static_cast<double>(ay[i]), static_cast<double>(az[i])};
    return acc;
}

// Equal-mass circular two-body system: total mass 1, separation r0, G = 1.
inline ParticleSystem circular_binary(double r0 = 1.0) {
    ParticleSystem sys(2);
    sys.mass[0] = sys.mass[1] = 0.5;
    const double v = 0.5 * std::sqrt(1.0 / r0);  // v_rel = sqrt(GM/r0), split evenly
    sys.pos[0] = {-0.5 * r0, 0.0, 0.0};
    sys.pos[1] = {0.5 * r0, 0.0, 0.0};
    sys.vel[0] = {0.0, -v, 0.0};
    sys.vel[1] = {0.0, v, 0.0};
    return sys;
}

// Equal-mass eccentric binary started at apoapsis: total mass 1, semi-major
// axis a, G = 1, period 2 pi a^{3/2}.
inline ParticleSystem eccentric_binary(double a = 1.0, double e = 0.5) {
    ParticleSystem sys(2);
    sys.mass[0] = sys.mass[1] = 0.5;
    const double r_apo = a * (1.0 + e);
    const double v_rel = std::sqrt((1.0 - e) / (a * (1.0 + e)));
    sys.pos[0] = {-0.5 * r_apo, 0.0, 0.0};
    sys.pos[1] = {0.5 * r_apo, 0.0, 0.0};
    sys.vel[0] = {0.0, -0.5 * v_rel, 0.0};
    sys.vel[1] = {0.0, 0.5 * v_rel, 0.0};
    return sys;
}

inline double relative_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

}  // namespace gravitree::testing

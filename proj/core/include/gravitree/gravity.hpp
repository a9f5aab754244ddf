#pragma once

#include <cstddef>
#include <vector>

#include "gravitree/op_counters.hpp"
#include "gravitree/particle_system.hpp"
#include "gravitree/vec3.hpp"

namespace gravitree {

// Softened kernel shared by the direct and tree paths: acceleration on a
// particle at offset `diff = source - sink` from a source of mass mj.
// Zero separation contributes nothing (the numerator vanishes).
inline Vec3 softened_accel(const Vec3& diff, double mj, double g, double eps2) {
    const double r2 = diff.norm2() + eps2;
    if (r2 == 0.0) return Vec3{};
    const double inv = 1.0 / std::sqrt(r2);
    return (g * mj * inv * inv * inv) * diff;
}

inline double softened_potential(const Vec3& diff, double mj, double g, double eps2) {
    const double r2 = diff.norm2() + eps2;
    if (r2 == 0.0) return 0.0;
    return -g * mj / std::sqrt(r2);
}

// Acceleration exerted on ri by a source (rj, mj). Throws singularity_error
// when eps == 0 and ri == rj.
Vec3 pairwise_accel(const Vec3& ri, const Vec3& rj, double mj, const GravParams& params);

struct DirectSumResult {
    std::vector<Vec3> acc;
    OpCounters ops;
};

// O(N^2) softened summation, the oracle for every tree-force test. Also
// tallies the interaction costing (the direct path executes no integer
// bookkeeping under the costing model).
DirectSumResult direct_sum(const ParticleSystem& system, const GravParams& params, unsigned threads = 0);

// Total softened potential energy, 0.5 * sum_i m_i phi_i, by direct pairs.
double direct_potential_energy(const ParticleSystem& system, const GravParams& params, unsigned threads = 0);

// Order statistics of the per-particle relative error |a - a_ref| / |a_ref|.
// Entries with |a_ref| == 0 are excluded and counted.
struct ForceErrorStats {
    double median = 0.0;
    double p99 = 0.0;
    double max = 0.0;
    std::size_t excluded = 0;
};
ForceErrorStats force_error(const std::vector<Vec3>& tree_acc, const std::vector<Vec3>& oracle_acc);

}  // namespace gravitree

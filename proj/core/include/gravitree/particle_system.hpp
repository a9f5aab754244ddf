#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gravitree/vec3.hpp"

namespace gravitree {

// Structure-of-arrays particle state. acc holds the last accepted force
// evaluation; acc_old_mag mirrors |acc| of that evaluation and feeds the
// acceleration MAC. level is the block-time-step subdivision exponent.
struct ParticleSystem {
    std::vector<double> mass;
    std::vector<Vec3> pos;
    std::vector<Vec3> vel;
    std::vector<Vec3> acc;
    std::vector<double> acc_old_mag;
    std::vector<std::uint8_t> level;
    double time = 0.0;

    ParticleSystem() = default;
    explicit ParticleSystem(std::size_t n) { resize(n); }

    std::size_t n() const { return mass.size(); }

    void resize(std::size_t n) {
        mass.assign(n, 0.0);
        pos.assign(n, Vec3{});
        vel.assign(n, Vec3{});
        acc.assign(n, Vec3{});
        acc_old_mag.assign(n, 0.0);
        level.assign(n, 0);
    }

    // Appends all particles of `other`; orbit state arrays are kept aligned.
    void append(const ParticleSystem& other) {
        mass.insert(mass.end(), other.mass.begin(), other.mass.end());
        pos.insert(pos.end(), other.pos.begin(), other.pos.end());
        vel.insert(vel.end(), other.vel.begin(), other.vel.end());
        acc.insert(acc.end(), other.acc.begin(), other.acc.end());
        acc_old_mag.insert(acc_old_mag.end(), other.acc_old_mag.begin(), other.acc_old_mag.end());
        level.insert(level.end(), other.level.begin(), other.level.end());
    }

    // Throws data_error if masses are non-positive or any state is non-finite.
    void validate() const;
};

// Gravity parameters in code units. dacc is the accuracy controlling
// parameter of the acceleration MAC.
struct GravParams {
    double G = 1.0;
    double eps = 0.0;
    double dacc = 0.001953125;  // 2^-9
};

}  // namespace gravitree

#pragma once

#include <cstdint>
#include <string>

#include "gravitree/particle_system.hpp"

namespace gravitree {

// Binary snapshot, little-endian regardless of host:
//   magic "OCTF", u32 version = 1, u64 n, f64 time, f64 G, f64 eps,
//   f64 mass[n], f64 pos[3n] (xyz interleaved), f64 vel[3n].
inline constexpr char kSnapshotMagic[4] = {'O', 'C', 'T', 'F'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
    ParticleSystem system;
    double G = 1.0;
    double eps = 0.0;
};

// Writes atomically (temp file + rename). Throws data_error on I/O failure.
void write_snapshot(const std::string& path, const ParticleSystem& system, const GravParams& params);

// Throws data_error naming the byte offset on bad magic, bad version,
// n == 0, or truncation.
Snapshot read_snapshot(const std::string& path);

}  // namespace gravitree

#pragma once

#include <cstdint>

#include "gravitree/errors.hpp"
#include "gravitree/vec3.hpp"

namespace gravitree {

inline constexpr int kMortonBitsPerAxis = 21;
inline constexpr std::uint32_t kMortonCoordMax = (1u << kMortonBitsPerAxis) - 1;

// Spreads the low 21 bits of v so that bit i lands at bit 3*i.
constexpr std::uint64_t morton_expand_bits(std::uint64_t v) {
    v &= 0x1fffff;
    v = (v | v << 32) & 0x001f00000000ffffULL;
    v = (v | v << 16) & 0x001f0000ff0000ffULL;
    v = (v | v << 8) & 0x100f00f00f00f00fULL;
    v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
    v = (v | v << 2) & 0x1249249249249249ULL;
    return v;
}

constexpr std::uint64_t morton_interleave(std::uint32_t qx, std::uint32_t qy, std::uint32_t qz) {
    return (morton_expand_bits(qx) << 2) | (morton_expand_bits(qy) << 1) | morton_expand_bits(qz);
}

// Quantizes one coordinate to [0, 2^21). The upper domain edge is inclusive.
inline std::uint32_t morton_quantize(double v, double lo, double width) {
    const double t = (v - lo) / width * static_cast<double>(1u << kMortonBitsPerAxis);
    if (t <= 0.0) return 0;
    const auto q = static_cast<std::uint64_t>(t);
    return q > kMortonCoordMax ? kMortonCoordMax : static_cast<std::uint32_t>(q);
}

// 63-bit Z-order key of pos inside the root cube; x occupies the top bit of
// each 3-bit digit. Throws data_error if pos lies outside bbox.
inline std::uint64_t morton_key(const Vec3& pos, const Cube& bbox) {
    if (!bbox.contains(pos)) throw data_error("morton_key: position outside root cube");
    const Vec3 lo = bbox.min();
    const double width = 2.0 * bbox.half;
    return morton_interleave(morton_quantize(pos.x, lo.x, width), morton_quantize(pos.y, lo.y, width),
                             morton_quantize(pos.z, lo.z, width));
}

// 3-bit child digit of `key` at tree depth `depth` (depth 0 = root split).
constexpr unsigned morton_digit(std::uint64_t key, int depth) {
    return static_cast<unsigned>(key >> (3 * (kMortonBitsPerAxis - 1 - depth))) & 7u;
}

}  // namespace gravitree

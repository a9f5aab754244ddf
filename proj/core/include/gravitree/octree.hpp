#pragma once

#include <cstdint>
#include <vector>

#include "gravitree/particle_system.hpp"
#include "gravitree/vec3.hpp"

namespace gravitree {

// One cell of the linear octree. Cells are stored in breadth-first order, so
// children always follow their parent; leaves have child_count == 0 and own
// the particle range [first, first + count) of the Morton-sorted order.
struct Cell {
    std::uint32_t first_child = 0;
    std::uint32_t child_count = 0;
    std::uint32_t first = 0;
    std::uint32_t count = 0;
    std::uint8_t depth = 0;

    bool is_leaf() const { return child_count == 0; }
};

// Monopole attributes of a cell: total mass, center of mass, and a size
// bound b >= distance from com to every member particle.
struct NodeAttr {
    double mass = 0.0;
    Vec3 com;
    double extent = 0.0;
};

struct Octree {
    Cube bbox;
    std::vector<std::uint64_t> keys;  // sorted; keys[k] belongs to particle perm[k]
    std::vector<std::uint32_t> perm;  // sorted rank -> original particle index
    std::vector<std::uint32_t> rank;  // original particle index -> sorted rank
    std::vector<Cell> cells;
    std::vector<NodeAttr> nodes;  // parallel to cells, filled by calc_node
    std::size_t leaf_cap = 8;

    const Cell& root() const { return cells.front(); }
};

inline constexpr std::size_t kDefaultLeafCap = 8;
inline constexpr int kMaxTreeDepth = 21;

// Root cube enclosing all positions (cubified AABB). Throws on empty input
// or non-finite positions.
Cube bounding_cube(const std::vector<Vec3>& pos);

// Morton-sorts the particles and splits cells until count <= leaf_cap or the
// key depth limit; coincident particles end up in oversized depth-21 leaves.
// Node attributes are computed as part of the build unless with_nodes is
// false (callers that time the two phases separately call calc_node next).
Octree build_tree(const ParticleSystem& system, std::size_t leaf_cap = kDefaultLeafCap,
                  bool with_nodes = true);

// Recomputes mass, center of mass, and extent for every cell bottom-up from
// current particle positions, keeping the existing topology. Leaf extents are
// exact; internal extents use the child com offset + child extent bound.
// Parallelizes across cells of equal depth; the output does not depend on
// the thread count.
void calc_node(Octree& tree, const ParticleSystem& system, unsigned threads = 1);

}  // namespace gravitree

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gravitree/gravity.hpp"
#include "gravitree/octree.hpp"
#include "gravitree/op_counters.hpp"
#include "gravitree/particle_system.hpp"

namespace gravitree {

inline constexpr std::size_t kDefaultGroupSize = 32;
inline constexpr std::size_t kDefaultListCapacity = 1024;

// Pseudo-particle buffer shared by one traversal group. Accepted nodes and
// opened-leaf members are appended until the capacity is reached, then the
// buffer is flushed into the force accumulation and cleared.
class InteractionList {
public:
    explicit InteractionList(std::size_t capacity = kDefaultListCapacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return size_; }
    bool full() const { return size_ == capacity_; }
    bool empty() const { return size_ == 0; }
    void clear() { size_ = 0; }

    void push(const Vec3& pos, double mass) {
        pos_[size_] = pos;
        mass_[size_] = mass;
        ++size_;
    }

    std::span<const Vec3> positions() const { return {pos_.data(), size_}; }
    std::span<const double> masses() const { return {mass_.data(), size_}; }

private:
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::vector<Vec3> pos_;
    std::vector<double> mass_;
};

// A batch of sink particles walked together: they share MAC decisions and one
// interaction list. a_min is the smallest previous-step acceleration
// magnitude over the members, which makes the shared test conservative.
struct TraversalGroup {
    std::span<const std::uint32_t> members;  // original particle indices
    Vec3 center;
    double radius = 0.0;
    double a_min = 0.0;
};

// Builds the bounding sphere (AABB center, max distance) and a_min.
TraversalGroup make_group(const ParticleSystem& system, std::span<const std::uint32_t> members);

// Acceleration MAC: accept a node of mass m, extent b at distance d from the
// group (d = max(0, |center - com| - radius)) iff
//   (G m / d^2) (b / d)^2 <= dacc * a_min.
// d == 0 forces descent. Requires a_min > 0 (bootstrap is the caller's job).
bool mac_accept(const NodeAttr& node, const TraversalGroup& group, const GravParams& params);

// Geometric opening criterion used to bootstrap the first evaluation when no
// previous acceleration exists: accept iff b <= theta * d.
bool mac_accept_geometric(const NodeAttr& node, const TraversalGroup& group, double theta);

enum class MacMode { acceleration, geometric };

struct WalkConfig {
    MacMode mode = MacMode::acceleration;
    double geom_theta = 0.5;
    std::size_t frontier_cap = 0;  // 0: use 8 * n
    bool count_ops = true;
};

// Reusable frontier buffers; one per worker avoids reallocation across groups.
struct WalkScratch {
    std::vector<std::uint32_t> frontier;
    std::vector<std::uint32_t> next;
};

// Breadth-first traversal for one group: accepted cells push their monopole
// onto the list, rejected internal cells enqueue their children, rejected
// leaves push their member particles. Accumulates accelerations (and
// optionally potentials) for every member into acc_out/pot_out, indexed like
// group.members. Throws resource_error if the frontier exceeds its cap.
void walk_tree_group(const Octree& tree, const ParticleSystem& system, const TraversalGroup& group,
                     InteractionList& list, const GravParams& params, const WalkConfig& config,
                     std::span<Vec3> acc_out, TraversalEvents& events, std::span<double> pot_out = {},
                     WalkScratch* scratch = nullptr);

}  // namespace gravitree

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gravitree/octree.hpp"
#include "gravitree/op_counters.hpp"
#include "gravitree/particle_system.hpp"
#include "gravitree/traversal.hpp"

namespace gravitree {

struct EngineConfig {
    std::size_t leaf_cap = kDefaultLeafCap;
    std::size_t group_size = kDefaultGroupSize;
    std::size_t list_capacity = kDefaultListCapacity;
    std::size_t frontier_cap = 0;  // 0: 8 * n
    bool count_ops = true;
    double bootstrap_theta = 0.5;
    std::size_t bootstrap_direct_limit = 65536;
    unsigned threads = 0;  // 0: hardware concurrency
};

// Tree-gravity driver: owns the octree and evaluates accelerations for
// groups of sink particles walked in Morton order. The tree is read-only
// during evaluation; groups write disjoint acceleration ranges, so walks run
// concurrently with per-worker counters merged afterwards.
class GravityEngine {
public:
    GravityEngine(GravParams params, EngineConfig config = {});

    // makeTree: keys, sort, cells, node attributes.
    void build(const ParticleSystem& system);
    // makeTree without node attributes; pair with refresh() to time the
    // structure and attribute phases separately.
    void build_structure(const ParticleSystem& system);
    // calcNode only: refresh node attributes on the stale topology.
    void refresh(const ParticleSystem& system);

    bool has_tree() const { return !tree_.cells.empty(); }
    const Octree& tree() const { return tree_; }
    const GravParams& params() const { return params_; }
    GravParams& params() { return params_; }
    const EngineConfig& config() const { return config_; }

    // Evaluates accelerations (and optionally potentials) for the given sink
    // particles at their current positions, writing system.acc[i]. Sinks are
    // regrouped in Morton rank order. Falls back to the geometric MAC for
    // groups whose a_min is zero. Returns the traversal event tallies.
    TraversalEvents evaluate(ParticleSystem& system, std::span<const std::uint32_t> targets,
                             std::span<double> pot_out = {});

    // All-particle evaluation.
    TraversalEvents evaluate(ParticleSystem& system, std::span<double> pot_out = {});

    // First force evaluation when no previous accelerations exist: direct
    // summation for small systems, otherwise one geometric-MAC pass. Fills
    // system.acc and acc_old_mag.
    TraversalEvents bootstrap(ParticleSystem& system);

private:
    GravParams params_;
    EngineConfig config_;
    Octree tree_;
};

}  // namespace gravitree

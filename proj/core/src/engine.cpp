#include "gravitree/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gravitree/errors.hpp"
#include "gravitree/gravity.hpp"
#include "gravitree/parallel.hpp"

namespace gravitree {

GravityEngine::GravityEngine(GravParams params, EngineConfig config)
    : params_(params), config_(config) {
    if (config_.group_size < 1) throw data_error("GravityEngine: group_size must be >= 1");
    if (!(params_.dacc > 0.0)) throw data_error("GravityEngine: dacc must be positive");
    if (params_.eps < 0.0) throw data_error("GravityEngine: eps must be non-negative");
}

void GravityEngine::build(const ParticleSystem& system) { tree_ = build_tree(system, config_.leaf_cap); }

void GravityEngine::build_structure(const ParticleSystem& system) {
    tree_ = build_tree(system, config_.leaf_cap, false);
}

void GravityEngine::refresh(const ParticleSystem& system) {
    if (!has_tree()) throw data_error("GravityEngine::refresh: no tree built");
    calc_node(tree_, system, config_.threads);
}

TraversalEvents GravityEngine::evaluate(ParticleSystem& system, std::span<const std::uint32_t> targets,
                                        std::span<double> pot_out) {
    if (!has_tree()) throw data_error("GravityEngine::evaluate: no tree built");
    if (!pot_out.empty() && pot_out.size() != system.n())
        throw data_error("GravityEngine::evaluate: potential span must cover the system");
    if (targets.empty()) return {};

    // Walk sinks in Morton rank order so groups stay spatially tight.
    std::vector<std::uint32_t> ordered(targets.begin(), targets.end());
    std::sort(ordered.begin(), ordered.end(),
              [&](std::uint32_t a, std::uint32_t b) { return tree_.rank[a] < tree_.rank[b]; });

    const std::size_t group_size = config_.group_size;
    const std::size_t n_groups = (ordered.size() + group_size - 1) / group_size;
    const bool with_potential = !pot_out.empty();

    WalkConfig walk_cfg;
    walk_cfg.mode = MacMode::acceleration;
    walk_cfg.geom_theta = config_.bootstrap_theta;
    walk_cfg.frontier_cap = config_.frontier_cap;
    walk_cfg.count_ops = config_.count_ops;

    const unsigned threads = resolve_threads(config_.threads);
    std::vector<TraversalEvents> worker_events(threads);
    parallel_for(n_groups, threads, [&](std::size_t begin, std::size_t end, unsigned w) {
        InteractionList list(config_.list_capacity);
        WalkScratch scratch;
        std::vector<Vec3> acc(group_size);
        std::vector<double> pot(with_potential ? group_size : 0);
        for (std::size_t gi = begin; gi < end; ++gi) {
            const std::size_t lo = gi * group_size;
            const std::size_t count = std::min(group_size, ordered.size() - lo);
            const std::span<const std::uint32_t> members{ordered.data() + lo, count};
            TraversalGroup group = make_group(system, members);
            WalkConfig cfg = walk_cfg;
            if (group.a_min <= 0.0) cfg.mode = MacMode::geometric;  // no previous force to test against
            walk_tree_group(tree_, system, group, list, params_, cfg, {acc.data(), count},
                            worker_events[w],
                            with_potential ? std::span<double>{pot.data(), count} : std::span<double>{},
                            &scratch);
            for (std::size_t m = 0; m < count; ++m) {
                system.acc[members[m]] = acc[m];
                if (with_potential) pot_out[members[m]] = pot[m];
            }
        }
    });

    TraversalEvents total;
    for (const auto& ev : worker_events) total += ev;
    return total;
}

TraversalEvents GravityEngine::evaluate(ParticleSystem& system, std::span<double> pot_out) {
    std::vector<std::uint32_t> all(system.n());
    std::iota(all.begin(), all.end(), 0u);
    return evaluate(system, all, pot_out);
}

TraversalEvents GravityEngine::bootstrap(ParticleSystem& system) {
    TraversalEvents events;
    if (system.n() <= config_.bootstrap_direct_limit) {
        DirectSumResult direct = direct_sum(system, params_, config_.threads);
        system.acc = std::move(direct.acc);
        events.interactions = static_cast<std::uint64_t>(system.n()) * (system.n() - 1);
    } else {
        if (!has_tree()) build(system);
        // One geometric pass: evaluate() switches to the geometric MAC on its
        // own because acc_old_mag is still all zero.
        events = evaluate(system);
    }
    for (std::size_t i = 0; i < system.n(); ++i) system.acc_old_mag[i] = system.acc[i].norm();
    return events;
}

}  // namespace gravitree

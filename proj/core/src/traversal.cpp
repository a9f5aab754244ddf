#include "gravitree/traversal.hpp"

#include <algorithm>
#include <cmath>

#include "gravitree/errors.hpp"

namespace gravitree {

InteractionList::InteractionList(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw data_error("InteractionList: capacity must be >= 1");
    pos_.resize(capacity_);
    mass_.resize(capacity_);
}

TraversalGroup make_group(const ParticleSystem& system, std::span<const std::uint32_t> members) {
    TraversalGroup g;
    g.members = members;
    if (members.empty()) return g;
    Vec3 lo = system.pos[members[0]], hi = lo;
    double a_min = system.acc_old_mag[members[0]];
    for (std::uint32_t i : members) {
        const Vec3& p = system.pos[i];
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
        a_min = std::min(a_min, system.acc_old_mag[i]);
    }
    g.center = 0.5 * (lo + hi);
    double r2 = 0.0;
    for (std::uint32_t i : members) r2 = std::max(r2, (system.pos[i] - g.center).norm2());
    g.radius = std::sqrt(r2);
    g.a_min = a_min;
    return g;
}

static inline double group_distance(const NodeAttr& node, const TraversalGroup& group) {
    return std::max(0.0, (group.center - node.com).norm() - group.radius);
}

bool mac_accept(const NodeAttr& node, const TraversalGroup& group, const GravParams& params) {
    const double d = group_distance(node, group);
    if (d <= 0.0) return false;
    const double d2 = d * d;
    const double lhs = params.G * node.mass * node.extent * node.extent / (d2 * d2);
    return lhs <= params.dacc * group.a_min;
}

bool mac_accept_geometric(const NodeAttr& node, const TraversalGroup& group, double theta) {
    const double d = group_distance(node, group);
    if (d <= 0.0) return false;
    return node.extent <= theta * d;
}

namespace {

// Flush: every listed pseudo-particle acts on every group member.
template <bool WithPotential>
void flush_list(const InteractionList& list, const ParticleSystem& system, const TraversalGroup& group,
                double g, double eps2, std::span<Vec3> acc_out, std::span<double> pot_out) {
    const auto pos = list.positions();
    const auto mass = list.masses();
    for (std::size_t m = 0; m < group.members.size(); ++m) {
        const Vec3 ri = system.pos[group.members[m]];
        Vec3 a = acc_out[m];
        double phi = WithPotential ? pot_out[m] : 0.0;
        for (std::size_t e = 0; e < pos.size(); ++e) {
            const Vec3 diff = pos[e] - ri;
            const double r2 = diff.norm2() + eps2;
            if (r2 == 0.0) continue;  // self term: numerator is zero anyway
            const double inv = 1.0 / std::sqrt(r2);
            const double inv3 = inv * inv * inv;
            a += (g * mass[e] * inv3) * diff;
            if constexpr (WithPotential) {
                if (diff.norm2() > 0.0) phi -= g * mass[e] * inv;
            }
        }
        acc_out[m] = a;
        if constexpr (WithPotential) pot_out[m] = phi;
    }
}

}  // namespace

void walk_tree_group(const Octree& tree, const ParticleSystem& system, const TraversalGroup& group,
                     InteractionList& list, const GravParams& params, const WalkConfig& config,
                     std::span<Vec3> acc_out, TraversalEvents& events, std::span<double> pot_out,
                     WalkScratch* scratch) {
    if (!list.empty()) throw data_error("walk_tree_group: interaction list not empty");
    if (acc_out.size() != group.members.size()) throw data_error("walk_tree_group: acc span size mismatch");
    const bool with_potential = !pot_out.empty();
    if (with_potential && pot_out.size() != group.members.size())
        throw data_error("walk_tree_group: pot span size mismatch");

    const std::size_t cap = config.frontier_cap > 0 ? config.frontier_cap : 8 * system.n();
    const double eps2 = params.eps * params.eps;
    const bool geometric = config.mode == MacMode::geometric;

    std::fill(acc_out.begin(), acc_out.end(), Vec3{});
    if (with_potential) std::fill(pot_out.begin(), pot_out.end(), 0.0);

    TraversalEvents ev;
    auto flush = [&] {
        if (list.empty()) return;
        ev.interactions += static_cast<std::uint64_t>(list.size()) * group.members.size();
        if (with_potential)
            flush_list<true>(list, system, group, params.G, eps2, acc_out, pot_out);
        else
            flush_list<false>(list, system, group, params.G, eps2, acc_out, pot_out);
        list.clear();
    };
    auto push_entry = [&](const Vec3& pos, double mass) {
        if (list.full()) flush();
        list.push(pos, mass);
        ++ev.list_pushes;
    };

    // Breadth-first frontier over cell indices; two level buffers play the
    // role of the queue.
    WalkScratch local;
    WalkScratch& ws = scratch ? *scratch : local;
    std::vector<std::uint32_t>& frontier = ws.frontier;
    std::vector<std::uint32_t>& next = ws.next;
    frontier.assign(1, 0);
    next.clear();
    while (!frontier.empty()) {
        next.clear();
        for (std::uint32_t c : frontier) {
            const Cell& cell = tree.cells[c];
            const NodeAttr& node = tree.nodes[c];
            ++ev.mac_evals;
            const bool accept = geometric ? mac_accept_geometric(node, group, config.geom_theta)
                                          : mac_accept(node, group, params);
            if (accept) {
                push_entry(node.com, node.mass);
            } else if (cell.is_leaf()) {
                for (std::uint32_t k = cell.first; k < cell.first + cell.count; ++k) {
                    const std::uint32_t j = tree.perm[k];
                    push_entry(system.pos[j], system.mass[j]);
                }
            } else {
                if (next.size() + cell.child_count > cap)
                    throw resource_error("walk_tree_group: frontier queue exhausted");
                for (std::uint32_t ch = cell.first_child; ch < cell.first_child + cell.child_count; ++ch)
                    next.push_back(ch);
            }
        }
        frontier.swap(next);
    }
    flush();

    if (config.count_ops) events += ev;
}

}  // namespace gravitree

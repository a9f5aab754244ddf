#include "gravitree/octree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "gravitree/errors.hpp"
#include "gravitree/morton.hpp"
#include "gravitree/parallel.hpp"

namespace gravitree {

void ParticleSystem::validate() const {
    const std::size_t count = n();
    for (std::size_t i = 0; i < count; ++i) {
        if (!(mass[i] > 0.0) || !std::isfinite(mass[i]))
            throw data_error("particle system: non-positive or non-finite mass");
        if (!pos[i].finite() || !vel[i].finite()) throw data_error("particle system: non-finite state");
        if (!(acc_old_mag[i] >= 0.0)) throw data_error("particle system: negative acc_old_mag");
    }
}

Cube bounding_cube(const std::vector<Vec3>& pos) {
    if (pos.empty()) throw data_error("bounding_cube: no particles");
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi = -lo;
    for (const Vec3& p : pos) {
        if (!p.finite()) throw data_error("bounding_cube: non-finite position");
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
    }
    Cube box;
    box.center = 0.5 * (lo + hi);
    // half-width measured from the rounded center, padded so containment
    // survives the center +- half roundoff
    double h = 0.0;
    for (double d : {lo.x - box.center.x, hi.x - box.center.x, lo.y - box.center.y, hi.y - box.center.y,
                     lo.z - box.center.z, hi.z - box.center.z})
        h = std::max(h, std::abs(d));
    box.half = h * (1.0 + 1e-12);
    if (box.half == 0.0) box.half = 1.0;  // all particles coincident
    return box;
}

Octree build_tree(const ParticleSystem& system, std::size_t leaf_cap, bool with_nodes) {
    const std::size_t n = system.n();
    if (n < 1) throw data_error("build_tree: empty system");
    if (leaf_cap < 1) throw data_error("build_tree: leaf_cap must be >= 1");

    Octree tree;
    tree.leaf_cap = leaf_cap;
    tree.bbox = bounding_cube(system.pos);

    std::vector<std::pair<std::uint64_t, std::uint32_t>> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = {morton_key(system.pos[i], tree.bbox), static_cast<std::uint32_t>(i)};
    std::sort(order.begin(), order.end());  // index tiebreak keeps the build deterministic

    tree.keys.resize(n);
    tree.perm.resize(n);
    tree.rank.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        tree.keys[k] = order[k].first;
        tree.perm[k] = order[k].second;
        tree.rank[order[k].second] = static_cast<std::uint32_t>(k);
    }

    // Breadth-first split; children are appended after their parent, so a
    // reverse sweep visits children first.
    tree.cells.reserve(2 * n / leaf_cap + 16);
    tree.cells.push_back(Cell{0, 0, 0, static_cast<std::uint32_t>(n), 0});
    for (std::size_t c = 0; c < tree.cells.size(); ++c) {
        Cell cell = tree.cells[c];  // copy: push_back below may reallocate
        if (cell.count <= leaf_cap || cell.depth >= kMaxTreeDepth) continue;

        const auto begin = tree.keys.begin() + cell.first;
        const auto end = begin + cell.count;
        const int depth = cell.depth;
        auto lo = begin;
        std::uint32_t first_child = static_cast<std::uint32_t>(tree.cells.size());
        std::uint32_t child_count = 0;
        for (unsigned digit = 0; digit < 8 && lo != end; ++digit) {
            auto hi = std::upper_bound(lo, end, digit, [depth](unsigned d, std::uint64_t key) {
                return d < morton_digit(key, depth);
            });
            if (hi != lo) {
                tree.cells.push_back(Cell{0, 0, static_cast<std::uint32_t>(cell.first + (lo - begin)),
                                          static_cast<std::uint32_t>(hi - lo),
                                          static_cast<std::uint8_t>(depth + 1)});
                ++child_count;
            }
            lo = hi;
        }
        tree.cells[c].first_child = first_child;
        tree.cells[c].child_count = child_count;
    }

    if (with_nodes) calc_node(tree, system);
    return tree;
}

namespace {

void calc_one_node(Octree& tree, const ParticleSystem& system, std::size_t c) {
    const Cell& cell = tree.cells[c];
    NodeAttr& node = tree.nodes[c];
    if (cell.is_leaf()) {
        double m = 0.0;
        Vec3 weighted{};
        for (std::uint32_t k = cell.first; k < cell.first + cell.count; ++k) {
            const std::uint32_t i = tree.perm[k];
            m += system.mass[i];
            weighted += system.mass[i] * system.pos[i];
        }
        node.mass = m;
        node.com = (1.0 / m) * weighted;
        double ext2 = 0.0;
        for (std::uint32_t k = cell.first; k < cell.first + cell.count; ++k)
            ext2 = std::max(ext2, (system.pos[tree.perm[k]] - node.com).norm2());
        node.extent = std::sqrt(ext2);
    } else {
        double m = 0.0;
        Vec3 weighted{};
        for (std::uint32_t ch = cell.first_child; ch < cell.first_child + cell.child_count; ++ch) {
            m += tree.nodes[ch].mass;
            weighted += tree.nodes[ch].mass * tree.nodes[ch].com;
        }
        node.mass = m;
        node.com = (1.0 / m) * weighted;
        double ext = 0.0;
        for (std::uint32_t ch = cell.first_child; ch < cell.first_child + cell.child_count; ++ch)
            ext = std::max(ext, (tree.nodes[ch].com - node.com).norm() + tree.nodes[ch].extent);
        node.extent = ext;
    }
}

}  // namespace

void calc_node(Octree& tree, const ParticleSystem& system, unsigned threads) {
    tree.nodes.assign(tree.cells.size(), NodeAttr{});
    // Cells sit in breadth-first order, so each depth is one contiguous run
    // whose children all live in deeper runs; runs are processed deepest
    // first and are independent inside.
    std::size_t run_end = tree.cells.size();
    while (run_end > 0) {
        const std::uint8_t depth = tree.cells[run_end - 1].depth;
        std::size_t run_begin = run_end;
        while (run_begin > 0 && tree.cells[run_begin - 1].depth == depth) --run_begin;
        const std::size_t count = run_end - run_begin;
        const unsigned run_threads = count >= 4096 ? threads : 1;
        parallel_for(count, run_threads, [&](std::size_t lo, std::size_t hi, unsigned) {
            for (std::size_t k = lo; k < hi; ++k) calc_one_node(tree, system, run_begin + k);
        });
        run_end = run_begin;
    }
}

}  // namespace gravitree

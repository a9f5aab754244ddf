#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "gravitree/engine.hpp"
#include "gravitree/errors.hpp"
#include "gravitree/gravity.hpp"
#include "gravitree/models.hpp"
#include "gravitree/traversal.hpp"
#include "support/test_support.hpp"

using namespace gravitree;
using gravitree::testing::random_cloud;
using gravitree::testing::reference_direct_sum;

namespace {

std::vector<Vec3> tree_accels(ParticleSystem& sys, const GravParams& params, EngineConfig cfg = {}) {
    GravityEngine engine(params, cfg);
    engine.build(sys);
    for (std::size_t i = 0; i < sys.n(); ++i) sys.acc_old_mag[i] = 1.0;  // generic MAC reference
    engine.evaluate(sys);
    return sys.acc;
}

}  // namespace

TEST_CASE("pairwise acceleration at unit separation") {
    const GravParams p{1.0, 0.0, 1.0};
    const Vec3 a = pairwise_accel({0, 0, 0}, {1, 0, 0}, 1.0, p);
    CHECK(a.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.y == 0.0);
    CHECK(a.z == 0.0);
}

TEST_CASE("pairwise acceleration with unit softening") {
    GravParams p;
    p.eps = 1.0;
    const Vec3 a = pairwise_accel({0, 0, 0}, {1, 0, 0}, 1.0, p);
    CHECK(a.x == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));  // (1 + 1)^{-3/2}
}

TEST_CASE("softened self interaction vanishes, unsoftened throws") {
    GravParams p;
    p.eps = 0.5;
    CHECK(pairwise_accel({1, 2, 3}, {1, 2, 3}, 1.0, p).norm() == 0.0);
    p.eps = 0.0;
    CHECK_THROWS_AS(pairwise_accel({1, 2, 3}, {1, 2, 3}, 1.0, p), singularity_error);
}

TEST_CASE("direct sum: single particle and Newton's third law") {
    ParticleSystem one(1);
    one.mass[0] = 1.0;
    CHECK(direct_sum(one, GravParams{}).acc[0].norm() == 0.0);

    ParticleSystem pair(2);
    pair.mass[0] = pair.mass[1] = 3.0;
    pair.pos[0] = {-0.3, 0.2, 0.1};
    pair.pos[1] = {0.4, -0.5, 0.6};
    const auto res = direct_sum(pair, GravParams{});
    const Vec3 net = pair.mass[0] * res.acc[0] + pair.mass[1] * res.acc[1];
    CHECK(net.norm() < 1e-15);
}

TEST_CASE("direct sum matches an independent double-loop reference") {
    const ParticleSystem sys = sample_plummer(256, 1.0, 1.0, 99);
    GravParams p;
    p.eps = 0.01;
    const auto res = direct_sum(sys, p);
    const auto ref = reference_direct_sum(sys, p.G, p.eps);
    for (std::size_t i = 0; i < sys.n(); ++i)
        CHECK((res.acc[i] - ref[i]).norm() / ref[i].norm() < 1e-13);
}

TEST_CASE("direct sum counting is pure floating point") {
    const ParticleSystem sys = random_cloud(16, 2);
    GravParams p;
    p.eps = 0.1;
    const auto res = direct_sum(sys, p);
    CHECK(res.ops.integer == 0);
    CHECK(res.ops.fp_fma == 9u * 16 * 15);
    CHECK(res.ops.fp_rsqrt == 1u * 16 * 15);
}

TEST_CASE("mac_accept: direct substitution of the acceptance inequality") {
    NodeAttr node;
    node.mass = 1.0;
    node.extent = 1.0;
    node.com = {0, 0, 0};
    TraversalGroup group;
    group.center = {10.0, 0.0, 0.0};
    group.radius = 0.0;
    group.a_min = 1.0;
    GravParams p;
    // LHS = (G m / d^2)(b/d)^2 = 1e-4
    p.dacc = 1e-4;
    CHECK(mac_accept(node, group, p));
    p.dacc = 2e-4;
    CHECK(mac_accept(node, group, p));
    p.dacc = 5e-5;
    CHECK_FALSE(mac_accept(node, group, p));
}

TEST_CASE("mac_accept: overlapping group forces descent") {
    NodeAttr node;
    node.mass = 5.0;
    node.extent = 0.1;
    node.com = {0, 0, 0};
    TraversalGroup group;
    group.center = {0.5, 0, 0};
    group.radius = 1.0;  // sphere covers the node
    group.a_min = 100.0;
    GravParams p;
    p.dacc = 1.0;
    CHECK_FALSE(mac_accept(node, group, p));
}

TEST_CASE("mac decisions are invariant under a global mass rescale") {
    RandomStream rng(21, 0);
    for (int trial = 0; trial < 200; ++trial) {
        NodeAttr node;
        node.mass = rng.uniform(0.1, 10.0);
        node.extent = rng.uniform(0.0, 2.0);
        node.com = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        TraversalGroup group;
        group.center = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        group.radius = rng.uniform(0.0, 1.0);
        group.a_min = rng.uniform(0.01, 10.0);
        GravParams p;
        p.dacc = rng.uniform(1e-6, 1.0);

        const bool base = mac_accept(node, group, p);
        const double k = rng.uniform(0.5, 8.0);
        NodeAttr scaled = node;
        scaled.mass *= k;
        TraversalGroup scaled_group = group;
        scaled_group.a_min *= k;
        CHECK(mac_accept(scaled, scaled_group, p) == base);
    }
}

TEST_CASE("mac acceptance is monotone in the accuracy parameter") {
    RandomStream rng(22, 0);
    for (int trial = 0; trial < 200; ++trial) {
        NodeAttr node;
        node.mass = rng.uniform(0.1, 10.0);
        node.extent = rng.uniform(0.0, 2.0);
        node.com = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        TraversalGroup group;
        group.center = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        group.radius = rng.uniform(0.0, 1.0);
        group.a_min = rng.uniform(0.01, 10.0);
        GravParams lo, hi;
        lo.dacc = rng.uniform(1e-6, 0.5);
        hi.dacc = lo.dacc * rng.uniform(1.0, 100.0);
        if (mac_accept(node, group, lo)) CHECK(mac_accept(node, group, hi));
    }
}

TEST_CASE("group MAC is at least as strict as the per-member test") {
    ParticleSystem sys = random_cloud(256, 31);
    const Octree tree = build_tree(sys);
    RandomStream rng(32, 0);
    GravParams p;
    for (int trial = 0; trial < 500; ++trial) {
        // random contiguous group over the Morton order
        const std::size_t lo = static_cast<std::size_t>(rng.uniform(0.0, 224.0));
        std::vector<std::uint32_t> members(tree.perm.begin() + lo, tree.perm.begin() + lo + 32);
        for (std::uint32_t m : members) sys.acc_old_mag[m] = rng.uniform(0.5, 2.0);
        const TraversalGroup group = make_group(sys, members);
        const std::size_t c = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(tree.cells.size())));
        p.dacc = rng.uniform(1e-5, 1.0);
        if (!mac_accept(tree.nodes[c], group, p)) continue;
        // every member must individually satisfy the criterion
        for (std::uint32_t m : members) {
            const double d = (sys.pos[m] - tree.nodes[c].com).norm();
            REQUIRE(d > 0.0);
            const double lhs = p.G * tree.nodes[c].mass * tree.nodes[c].extent * tree.nodes[c].extent /
                               (d * d * d * d);
            CHECK(lhs <= p.dacc * sys.acc_old_mag[m] * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("two-body walk equals direct sum exactly via the leaf path") {
    ParticleSystem sys(2);
    sys.mass[0] = 1.5;
    sys.mass[1] = 0.5;
    sys.pos[0] = {-0.4, 0.1, 0.0};
    sys.pos[1] = {0.6, -0.2, 0.3};
    GravParams p;
    p.eps = 0.05;
    p.dacc = 0.5;  // any accuracy: a two-body system walks the leaf path
    const auto oracle = direct_sum(sys, p);
    const auto acc = tree_accels(sys, p);
    CHECK(acc[0] == oracle.acc[0]);
    CHECK(acc[1] == oracle.acc[1]);
}

TEST_CASE("tight accuracy drives the per-particle error below 1e-3 at the 99th percentile") {
    ParticleSystem sys = sample_plummer(1024, 1.0, 1.0, 5);
    GravParams p;
    p.eps = 0.02;
    p.dacc = 0x1.0p-20;
    const auto oracle = direct_sum(sys, p);
    const auto acc = tree_accels(sys, p);
    const auto stats = force_error(acc, oracle.acc);
    CHECK(stats.p99 < 1e-3);
}

TEST_CASE("list capacity does not change the result beyond roundoff") {
    GravParams p;
    p.eps = 0.02;
    p.dacc = 0x1.0p-6;
    std::vector<std::vector<Vec3>> results;
    for (std::size_t cap : {32u, 64u, 256u, 1024u}) {
        ParticleSystem sys = sample_plummer(1024, 1.0, 1.0, 8);
        EngineConfig cfg;
        cfg.list_capacity = cap;
        results.push_back(tree_accels(sys, p, cfg));
    }
    for (std::size_t v = 1; v < results.size(); ++v)
        for (std::size_t i = 0; i < results[0].size(); ++i) {
            const double rel = (results[v][i] - results[0][i]).norm() / results[0][i].norm();
            CHECK(rel < 1e-12);
        }
}

TEST_CASE("rebuilding from unchanged positions reproduces accelerations") {
    ParticleSystem sys = sample_plummer(512, 1.0, 1.0, 17);
    GravParams p;
    p.eps = 0.02;
    p.dacc = 0x1.0p-6;
    const auto first = tree_accels(sys, p);
    const auto second = tree_accels(sys, p);
    for (std::size_t i = 0; i < sys.n(); ++i)
        CHECK((first[i] - second[i]).norm() <= 1e-12 * first[i].norm());
}

TEST_CASE("median error decreases with tighter accuracy, seed-averaged") {
    const std::vector<double> daccs = {0x1.0p-1, 0x1.0p-3, 0x1.0p-6, 0x1.0p-9, 0x1.0p-12};
    std::vector<double> med(daccs.size(), 0.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ParticleSystem base = sample_plummer(1024, 1.0, 1.0, seed);
        GravParams p;
        p.eps = 0.02;
        const auto oracle = direct_sum(base, p);
        for (std::size_t k = 0; k < daccs.size(); ++k) {
            p.dacc = daccs[k];
            ParticleSystem sys = base;
            const auto acc = tree_accels(sys, p);
            med[k] += force_error(acc, oracle.acc).median / 5.0;
        }
    }
    for (std::size_t k = 1; k < med.size(); ++k) CHECK(med[k] <= 2.0 * med[k - 1]);  // noise band
    CHECK(med.back() < med.front());
}

TEST_CASE("frontier cap raises a resource error") {
    ParticleSystem sys = sample_plummer(512, 1.0, 1.0, 3);
    GravParams p;
    p.dacc = 0x1.0p-12;
    p.eps = 0.02;
    EngineConfig cfg;
    cfg.frontier_cap = 2;
    GravityEngine engine(p, cfg);
    engine.build(sys);
    for (auto& a : sys.acc_old_mag) a = 1.0;
    CHECK_THROWS_AS(engine.evaluate(sys), resource_error);
}

TEST_CASE("force_error statistics") {
    std::vector<Vec3> ref{{1, 0, 0}, {0, 2, 0}, {0, 0, 4}};
    SUBCASE("identical inputs give zero") {
        const auto s = force_error(ref, ref);
        CHECK(s.median == 0.0);
        CHECK(s.p99 == 0.0);
        CHECK(s.max == 0.0);
        CHECK(s.excluded == 0);
    }
    SUBCASE("uniform 1% inflation gives 0.01 everywhere") {
        std::vector<Vec3> infl;
        for (const auto& v : ref) infl.push_back(1.01 * v);
        const auto s = force_error(infl, ref);
        CHECK(s.median == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(s.p99 == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(s.max == doctest::Approx(0.01).epsilon(1e-12));
    }
    SUBCASE("zero-magnitude oracle entries are excluded and counted") {
        std::vector<Vec3> oracle{{1, 0, 0}, {0, 0, 0}};
        std::vector<Vec3> acc{{1, 0, 0}, {5, 5, 5}};
        const auto s = force_error(acc, oracle);
        CHECK(s.excluded == 1);
        CHECK(s.max == 0.0);
    }
}

TEST_CASE("walk events: interactions rise as accuracy tightens") {
    GravParams loose, tight;
    loose.eps = tight.eps = 0.02;
    loose.dacc = 0x1.0p-3;
    tight.dacc = 0x1.0p-9;
    std::uint64_t inter_loose = 0, inter_tight = 0;
    {
        ParticleSystem sys = sample_plummer(1024, 1.0, 1.0, 12);
        GravityEngine engine(loose, {});
        engine.build(sys);
        for (auto& a : sys.acc_old_mag) a = 1.0;
        inter_loose = engine.evaluate(sys).interactions;
    }
    {
        ParticleSystem sys = sample_plummer(1024, 1.0, 1.0, 12);
        GravityEngine engine(tight, {});
        engine.build(sys);
        for (auto& a : sys.acc_old_mag) a = 1.0;
        inter_tight = engine.evaluate(sys).interactions;
    }
    CHECK(inter_tight > inter_loose);
}

#include "gravitree/gravity.hpp"

#include <algorithm>
#include <cmath>

#include "gravitree/errors.hpp"
#include "gravitree/parallel.hpp"

namespace gravitree {

Vec3 pairwise_accel(const Vec3& ri, const Vec3& rj, double mj, const GravParams& params) {
    const Vec3 diff = rj - ri;
    if (params.eps == 0.0 && diff.norm2() == 0.0)
        throw singularity_error("pairwise_accel: zero separation with zero softening");
    return softened_accel(diff, mj, params.G, params.eps * params.eps);
}

DirectSumResult direct_sum(const ParticleSystem& system, const GravParams& params, unsigned threads) {
    const std::size_t n = system.n();
    if (n < 1) throw data_error("direct_sum: empty system");
    const double eps2 = params.eps * params.eps;

    DirectSumResult out;
    out.acc.assign(n, Vec3{});
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t i = begin; i < end; ++i) {
            const Vec3 ri = system.pos[i];
            Vec3 a{};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const Vec3 diff = system.pos[j] - ri;
                if (eps2 == 0.0 && diff.norm2() == 0.0)
                    throw singularity_error("direct_sum: coincident particles with zero softening");
                a += softened_accel(diff, system.mass[j], params.G, eps2);
            }
            out.acc[i] = a;
        }
    });
    TraversalEvents ev;
    ev.interactions = static_cast<std::uint64_t>(n) * (n - 1);
    out.ops = count_walk_ops(ev);
    return out;
}

double direct_potential_energy(const ParticleSystem& system, const GravParams& params, unsigned threads) {
    const std::size_t n = system.n();
    const double eps2 = params.eps * params.eps;
    const unsigned t = resolve_threads(threads);
    std::vector<double> partial(t, 0.0);
    parallel_for(n, t, [&](std::size_t begin, std::size_t end, unsigned w) {
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const Vec3 ri = system.pos[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                if (eps2 == 0.0 && (system.pos[j] - ri).norm2() == 0.0)
                    throw singularity_error("direct_potential_energy: coincident particles");
                sum += system.mass[i] * softened_potential(system.pos[j] - ri, system.mass[j], params.G, eps2);
            }
        }
        partial[w] = sum;
    });
    double total = 0.0;
    for (double p : partial) total += p;  // fixed merge order keeps reruns bit-identical
    return total;
}

ForceErrorStats force_error(const std::vector<Vec3>& tree_acc, const std::vector<Vec3>& oracle_acc) {
    if (tree_acc.size() != oracle_acc.size()) throw data_error("force_error: length mismatch");
    ForceErrorStats stats;
    std::vector<double> err;
    err.reserve(tree_acc.size());
    for (std::size_t i = 0; i < tree_acc.size(); ++i) {
        const double ref = oracle_acc[i].norm();
        if (ref == 0.0) {
            ++stats.excluded;
            continue;
        }
        err.push_back((tree_acc[i] - oracle_acc[i]).norm() / ref);
    }
    if (err.empty()) return stats;
    std::sort(err.begin(), err.end());
    auto nearest_rank = [&](double pct) {
        const std::size_t k = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(err.size())));
        return err[k == 0 ? 0 : k - 1];
    };
    stats.median = nearest_rank(50.0);
    stats.p99 = nearest_rank(99.0);
    stats.max = err.back();
    return stats;
}

}  // namespace gravitree

#include "gravitree/diagnostics.hpp"

#include <utility>
#include <vector>

#include "gravitree/gravity.hpp"

namespace gravitree {

Diagnostics compute_diagnostics(const ParticleSystem& system, const GravParams& params, unsigned threads) {
    Diagnostics d;
    for (std::size_t i = 0; i < system.n(); ++i) {
        d.kinetic += 0.5 * system.mass[i] * system.vel[i].norm2();
        d.momentum += system.mass[i] * system.vel[i];
    }

    if (system.n() <= kDirectPotentialLimit) {
        d.potential = direct_potential_energy(system, params, threads);
    } else {
        GravParams tree_params = params;
        tree_params.dacc = 0x1.0p-20;
        EngineConfig cfg;
        cfg.threads = threads;
        cfg.count_ops = false;
        GravityEngine engine(tree_params, cfg);
        ParticleSystem scratch = system;  // evaluate() overwrites accelerations
        engine.build(scratch);
        std::vector<double> pot(scratch.n(), 0.0);
        engine.evaluate(scratch, pot);
        double w = 0.0;
        for (std::size_t i = 0; i < scratch.n(); ++i) w += 0.5 * scratch.mass[i] * pot[i];
        d.potential = w;
    }

    d.total = d.kinetic + d.potential;
    d.virial_ratio = d.potential != 0.0 ? -2.0 * d.kinetic / d.potential : 0.0;
    return d;
}

}  // namespace gravitree

// gravitree: octree gravity engine driver.
//
// Subcommands: ic (initial conditions), run (block-step integration),
// bench accuracy / scaling / barrier (sweeps), predict-speedup (overlap
// model over counter CSVs).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "gravitree/barrier.hpp"
#include "gravitree/csv.hpp"
#include "gravitree/diagnostics.hpp"
#include "gravitree/engine.hpp"
#include "gravitree/errors.hpp"
#include "gravitree/gravity.hpp"
#include "gravitree/integrator.hpp"
#include "gravitree/models.hpp"
#include "gravitree/op_counters.hpp"
#include "gravitree/run_config.hpp"
#include "gravitree/snapshot.hpp"

namespace {

using namespace gravitree;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitResource = 4;

std::vector<double> default_dacc_grid() {
    std::vector<double> grid;
    for (int p = 1; p <= 20; ++p) grid.push_back(std::ldexp(1.0, -p));
    return grid;
}

EngineConfig engine_config_from(const RunConfig& cfg, unsigned threads) {
    EngineConfig ec;
    ec.leaf_cap = cfg.leaf_cap;
    ec.group_size = cfg.group_size;
    ec.list_capacity = cfg.list_capacity;
    ec.count_ops = cfg.counters;
    ec.threads = threads;
    return ec;
}

TunerConfig tuner_config_from(const RunConfig& cfg) {
    TunerConfig tc;
    tc.min_interval = cfg.rebuild_min;
    tc.max_interval = cfg.rebuild_max;
    tc.initial_interval = std::min<std::size_t>(std::max<std::size_t>(8, cfg.rebuild_min), cfg.rebuild_max);
    return tc;
}

struct IcArgs {
    std::string model = "plummer";
    std::size_t n = 4096;
    std::uint64_t seed = 1;
    std::string out;
    double mass = 1.0;
    double scale = 1.0;
    double scale_height = 0.1;
    double r_cut = 0.0;
    double q_floor = 1.5;
    double eps = 0.03125;
};

int cmd_ic(const IcArgs& args) {
    ParticleSystem sys;
    if (args.model == "plummer")
        sys = sample_plummer(args.n, args.mass, args.scale, args.seed, args.r_cut);
    else if (args.model == "hernquist")
        sys = sample_hernquist(args.n, args.mass, args.scale, args.seed, args.r_cut);
    else if (args.model == "nfw")
        sys = sample_nfw(args.n, args.mass, args.scale, args.r_cut > 0.0 ? args.r_cut : 20.0 * args.scale,
                         args.seed);
    else if (args.model == "disk") {
        ModelCatalog cat;
        ComponentSpec d;
        d.kind = ComponentKind::exponential_disk;
        d.mass = args.mass;
        d.scale_length = args.scale;
        d.scale_height = args.scale_height;
        d.q_floor = args.q_floor;
        d.r_cut = args.r_cut;
        cat.components.push_back(d);
        sys = sample_exponential_disk(args.n, args.mass, args.scale, args.scale_height, args.seed,
                                      CatalogProvider(cat), args.q_floor, args.r_cut);
    } else if (args.model == "m31") {
        sys = build_m31(args.n, args.seed);
    } else {
        throw data_error("unknown model: " + args.model);
    }
    GravParams params;
    params.eps = args.eps;
    write_snapshot(args.out, sys, params);
    std::printf("wrote %s: %zu particles, model %s, seed %llu\n", args.out.c_str(), sys.n(),
                args.model.c_str(), static_cast<unsigned long long>(args.seed));
    return kExitOk;
}

struct RunArgs {
    std::string input;
    std::string out_dir = ".";
    RunConfig cfg;
    bool eps_set = false;
    std::uint64_t diag_every = 1;
    unsigned threads = 0;
};

int cmd_run(const RunArgs& args) {
    const Snapshot snap = read_snapshot(args.input);
    RunConfig cfg = args.cfg;
    if (!args.eps_set) cfg.eps = snap.eps;
    cfg.validate();

    GravParams params;
    params.G = snap.G;
    params.eps = cfg.eps;
    params.dacc = cfg.dacc;
    StepScheme scheme;
    scheme.eta = cfg.eta;
    scheme.dt_max = cfg.dt_max;

    std::filesystem::create_directories(args.out_dir);
    const std::string final_path = (std::filesystem::path(args.out_dir) / "final.octf").string();
    const std::string timings_path = (std::filesystem::path(args.out_dir) / "timings.csv").string();
    const std::string diag_path = (std::filesystem::path(args.out_dir) / "diagnostics.csv").string();

    CsvBuilder timings({"step", "walkTree", "calcNode", "makeTree", "predict", "correct",
                        "rebuild_interval"});
    CsvBuilder diagnostics({"step", "E", "K", "W", "Px", "Py", "Pz"});

    if (cfg.steps == 0) {
        write_snapshot(final_path, snap.system, params);
        timings.save(timings_path);
        diagnostics.save(diag_path);
        std::printf("0 steps: snapshot copied, csv headers written to %s\n", args.out_dir.c_str());
        return kExitOk;
    }

    Simulation sim(snap.system, params, scheme, engine_config_from(cfg, args.threads),
                   tuner_config_from(cfg));
    if (cfg.rebuild >= 0) sim.set_fixed_rebuild_interval(static_cast<std::size_t>(cfg.rebuild));
    sim.init();

    auto emit_diag = [&](std::uint64_t step) {
        const Diagnostics d = compute_diagnostics(sim.system(), params, args.threads);
        diagnostics.cell(step).cell(d.total).cell(d.kinetic).cell(d.potential);
        diagnostics.cell(d.momentum.x).cell(d.momentum.y).cell(d.momentum.z);
        diagnostics.end_row();
    };
    emit_diag(0);

    for (std::uint64_t s = 1; s <= cfg.steps; ++s) {
        const StepResult r = sim.step();
        timings.cell(s).cell(r.timings.walk_tree).cell(r.timings.calc_node).cell(r.timings.make_tree);
        timings.cell(r.timings.predict).cell(r.timings.correct);
        timings.cell(static_cast<std::uint64_t>(r.rebuild_interval));
        timings.end_row();
        if ((args.diag_every > 0 && s % args.diag_every == 0) || s == cfg.steps) emit_diag(s);
    }

    write_snapshot(final_path, sim.system(), params);
    timings.save(timings_path);
    diagnostics.save(diag_path);
    std::printf("ran %llu steps to t = %.6g; outputs in %s\n",
                static_cast<unsigned long long>(cfg.steps), sim.time(), args.out_dir.c_str());
    return kExitOk;
}

struct BenchAccuracyArgs {
    std::size_t n = 4096;
    std::string model = "plummer";
    std::uint64_t seed = 1;
    std::vector<double> dacc_list;
    std::uint64_t steps = 8;
    std::string out = "accuracy.csv";
    double eps = 0.03125;
    unsigned threads = 0;
};

int cmd_bench_accuracy(const BenchAccuracyArgs& args) {
    const std::vector<double> grid = args.dacc_list.empty() ? default_dacc_grid() : args.dacc_list;
    CsvBuilder csv({"dacc", "t_step", "t_walk", "t_node", "t_build", "err_median", "err_p99",
                    "interactions_per_particle", "int_ops", "fp_ops", "predicted_speedup"});
    const ParticleSystem base = sample_model(args.model, args.n, args.seed);
    GravParams params;
    params.eps = args.eps;
    RunConfig rc;
    rc.eps = args.eps;

    for (double dacc : grid) {
        params.dacc = dacc;
        StepScheme scheme;
        Simulation sim(base, params, scheme, engine_config_from(rc, args.threads), TunerConfig{});
        sim.init();
        PhaseTimings sums;
        double wall = 0.0;
        for (std::uint64_t s = 0; s < args.steps; ++s) {
            const StepResult r = sim.step();
            sums += r.timings;
            wall += r.wall_seconds;
        }
        const double inv_steps = args.steps > 0 ? 1.0 / static_cast<double>(args.steps) : 0.0;

        // one full-force oracle comparison at the final positions
        ParticleSystem probe = sim.system();
        GravityEngine engine(params, engine_config_from(rc, args.threads));
        engine.build(probe);
        const TraversalEvents events = engine.evaluate(probe);
        const DirectSumResult oracle = direct_sum(probe, params, args.threads);
        const ForceErrorStats err = force_error(probe.acc, oracle.acc);
        const OpCounters ops = count_walk_ops(events);

        csv.cell(dacc).cell(wall * inv_steps).cell(sums.walk_tree * inv_steps);
        csv.cell(sums.calc_node * inv_steps).cell(sums.make_tree * inv_steps);
        csv.cell(err.median).cell(err.p99);
        csv.cell(static_cast<double>(events.interactions) / static_cast<double>(probe.n()));
        csv.cell(ops.integer).cell(ops.fp_core());
        csv.cell(predict_speedup(ops, HardwareRatios{}));
        csv.end_row();
        std::printf("dacc %.3e: err_median %.3e err_p99 %.3e\n", dacc, err.median, err.p99);
    }
    csv.save(args.out);
    return kExitOk;
}

struct BenchScalingArgs {
    std::vector<std::size_t> n_list;
    std::string model = "m31";
    std::uint64_t seed = 1;
    std::uint64_t steps = 4;
    std::string out = "scaling.csv";
    double eps = 0.03125;
    double dacc = 0x1.0p-9;
    unsigned threads = 0;
};

int cmd_bench_scaling(const BenchScalingArgs& args) {
    CsvBuilder csv({"n", "t_step", "t_walk", "t_node", "t_build", "t_predict", "t_correct"});
    RunConfig rc;
    rc.eps = args.eps;
    for (std::size_t n : args.n_list) {
        const ParticleSystem base = sample_model(args.model, n, args.seed);
        GravParams params;
        params.eps = args.eps;
        params.dacc = args.dacc;
        StepScheme scheme;
        Simulation sim(base, params, scheme, engine_config_from(rc, args.threads), TunerConfig{});
        sim.init();
        PhaseTimings sums;
        double wall = 0.0;
        for (std::uint64_t s = 0; s < args.steps; ++s) {
            const StepResult r = sim.step();
            sums += r.timings;
            wall += r.wall_seconds;
        }
        const double inv = args.steps > 0 ? 1.0 / static_cast<double>(args.steps) : 0.0;
        csv.cell(static_cast<std::uint64_t>(n)).cell(wall * inv).cell(sums.walk_tree * inv);
        csv.cell(sums.calc_node * inv).cell(sums.make_tree * inv).cell(sums.predict * inv);
        csv.cell(sums.correct * inv);
        csv.end_row();
        std::printf("n %zu: %.3e s/step (walk %.3e)\n", n, wall * inv, sums.walk_tree * inv);
    }
    csv.save(args.out);
    return kExitOk;
}

int cmd_predict_speedup(const std::string& counters_csv, double peak_ratio, const std::string& out) {
    const CsvTable table = read_csv(counters_csv);
    const std::size_t ci = table.column("integer");
    const std::size_t cf = table.column("fp_fma");
    const std::size_t ca = table.column("fp_add");
    const std::size_t cm = table.column("fp_mul");
    const std::size_t cr = table.column("fp_rsqrt");

    std::vector<std::string> columns = table.columns;
    columns.push_back("predicted_speedup");
    CsvBuilder csv(columns);
    HardwareRatios hw;
    hw.peak_ratio = peak_ratio;
    for (const auto& row : table.rows) {
        OpCounters c;
        c.integer = static_cast<std::uint64_t>(row[ci]);
        c.fp_fma = static_cast<std::uint64_t>(row[cf]);
        c.fp_add = static_cast<std::uint64_t>(row[ca]);
        c.fp_mul = static_cast<std::uint64_t>(row[cm]);
        c.fp_rsqrt = static_cast<std::uint64_t>(row[cr]);
        const double speedup = predict_speedup(c, hw);
        for (double v : row) csv.cell(v);
        csv.cell(speedup);
        csv.end_row();
        std::printf("I %.6g F %.6g -> %.6g\n", static_cast<double>(c.integer),
                    static_cast<double>(c.fp_core()), speedup);
    }
    if (!out.empty()) csv.save(out);
    return kExitOk;
}

int cmd_bench_barrier(std::size_t workers, std::uint64_t phases, const std::string& out) {
    const BarrierBenchResult r = bench_barrier(workers, phases);
    CsvBuilder csv({"workers", "phases", "lockfree_ns_per_sync", "native_ns_per_sync", "ratio"});
    csv.cell(static_cast<std::uint64_t>(r.workers)).cell(r.phases).cell(r.lockfree_ns_per_sync);
    csv.cell(r.native_ns_per_sync).cell(r.ratio);
    csv.end_row();
    if (!out.empty()) csv.save(out);
    std::printf("workers %zu phases %llu: lockfree %.1f ns/sync, native %.1f ns/sync, ratio %.3f\n",
                r.workers, static_cast<unsigned long long>(r.phases), r.lockfree_ns_per_sync,
                r.native_ns_per_sync, r.ratio);
    if (r.violations != 0) throw data_error("bench_barrier: phase-slot violations observed");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"octree gravity engine and performance laboratory"};
    app.require_subcommand(1);

    IcArgs ic;
    CLI::App* ic_cmd = app.add_subcommand("ic", "generate initial conditions");
    ic_cmd->add_option("--model", ic.model, "plummer|hernquist|nfw|disk|m31")
        ->check(CLI::IsMember({"plummer", "hernquist", "nfw", "disk", "m31"}));
    ic_cmd->add_option("--n", ic.n, "particle count")->required();
    ic_cmd->add_option("--seed", ic.seed, "random seed");
    ic_cmd->add_option("--out", ic.out, "output snapshot path")->required();
    ic_cmd->add_option("--mass", ic.mass, "total mass (ignored for m31)");
    ic_cmd->add_option("--scale", ic.scale, "scale length (ignored for m31)");
    ic_cmd->add_option("--scale-height", ic.scale_height, "disk scale height");
    ic_cmd->add_option("--r-cut", ic.r_cut, "truncation radius (0 = default)");
    ic_cmd->add_option("--q-floor", ic.q_floor, "disk Toomre Q floor");
    ic_cmd->add_option("--eps", ic.eps, "softening recorded in the snapshot header");

    RunArgs run;
    std::string run_config_path;
    RunConfig run_flags;  // staging area for command-line overrides
    CLI::App* run_cmd = app.add_subcommand("run", "advance a snapshot with block time steps");
    run_cmd->add_option("--in", run.input, "input snapshot")->required();
    run_cmd->add_option("--out-dir", run.out_dir, "output directory");
    CLI::Option* cfg_opt = run_cmd->add_option("--config", run_config_path, "key=value config file");
    CLI::Option* steps_opt = run_cmd->add_option("--steps", run_flags.steps, "number of block steps");
    CLI::Option* dacc_opt = run_cmd->add_option("--dacc", run_flags.dacc, "accuracy parameter");
    CLI::Option* eps_opt = run_cmd->add_option("--eps", run_flags.eps, "softening length");
    CLI::Option* eta_opt = run_cmd->add_option("--eta", run_flags.eta, "timestep coefficient");
    CLI::Option* dtmax_opt = run_cmd->add_option("--dt-max", run_flags.dt_max, "largest block step");
    CLI::Option* seed_opt = run_cmd->add_option("--seed", run_flags.seed, "seed recorded in config");
    CLI::Option* rebuild_opt =
        run_cmd->add_option("--rebuild", run_flags.rebuild, "fixed rebuild interval (-1 = auto)");
    run_cmd->add_option("--diag-every", run.diag_every, "diagnostics cadence (0 = endpoints only)");
    run_cmd->add_option("--threads", run.threads, "worker threads (0 = hardware)");

    BenchAccuracyArgs acc;
    BenchScalingArgs scaling;
    std::size_t barrier_workers = 4;
    std::uint64_t barrier_phases = 100000;
    std::string barrier_out;

    CLI::App* bench = app.add_subcommand("bench", "performance sweeps");
    bench->require_subcommand(1);
    CLI::App* bacc = bench->add_subcommand("accuracy", "sweep the accuracy parameter");
    bacc->add_option("--n", acc.n, "particle count")->required();
    bacc->add_option("--model", acc.model, "source model")
        ->check(CLI::IsMember({"plummer", "hernquist", "nfw", "disk", "m31"}));
    bacc->add_option("--seed", acc.seed, "random seed");
    bacc->add_option("--dacc-list", acc.dacc_list, "explicit accuracy grid (default 2^-1..2^-20)");
    bacc->add_option("--steps", acc.steps, "steps timed per setting");
    bacc->add_option("--out", acc.out, "output csv");
    bacc->add_option("--eps", acc.eps, "softening length");
    bacc->add_option("--threads", acc.threads, "worker threads");

    CLI::App* bscale = bench->add_subcommand("scaling", "sweep the particle count");
    bscale->add_option("--n-list", scaling.n_list, "particle counts")->required();
    bscale->add_option("--model", scaling.model, "source model")
        ->check(CLI::IsMember({"plummer", "hernquist", "nfw", "disk", "m31"}));
    bscale->add_option("--seed", scaling.seed, "random seed");
    bscale->add_option("--steps", scaling.steps, "steps timed per size");
    bscale->add_option("--out", scaling.out, "output csv");
    bscale->add_option("--eps", scaling.eps, "softening length");
    bscale->add_option("--dacc", scaling.dacc, "accuracy controlling parameter");
    bscale->add_option("--threads", scaling.threads, "worker threads");

    CLI::App* bbar = bench->add_subcommand("barrier", "time the lock-free barrier against std::barrier");
    bbar->add_option("--workers", barrier_workers, "worker count (>= 2)");
    bbar->add_option("--phases", barrier_phases, "synchronization rounds");
    bbar->add_option("--out", barrier_out, "output csv");

    std::string counters_csv;
    double peak_ratio = 1.5;
    std::string speedup_out;
    CLI::App* spd = app.add_subcommand("predict-speedup", "overlap model over a counters csv");
    spd->add_option("--counters", counters_csv, "csv with integer,fp_fma,fp_add,fp_mul,fp_rsqrt")
        ->required();
    spd->add_option("--peak-ratio", peak_ratio, "theoretical peak performance ratio");
    spd->add_option("--out", speedup_out, "output csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ic_cmd) return cmd_ic(ic);
        if (*run_cmd) {
            run.cfg = *cfg_opt ? RunConfig::load(run_config_path) : RunConfig{};
            if (*steps_opt) run.cfg.steps = run_flags.steps;
            if (*dacc_opt) run.cfg.dacc = run_flags.dacc;
            if (*eps_opt) {
                run.cfg.eps = run_flags.eps;
                run.eps_set = true;
            } else if (*cfg_opt) {
                run.eps_set = true;  // config file eps wins over the snapshot header
            }
            if (*eta_opt) run.cfg.eta = run_flags.eta;
            if (*dtmax_opt) run.cfg.dt_max = run_flags.dt_max;
            if (*seed_opt) run.cfg.seed = run_flags.seed;
            if (*rebuild_opt) run.cfg.rebuild = run_flags.rebuild;
            return cmd_run(run);
        }
        if (*bacc) return cmd_bench_accuracy(acc);
        if (*bscale) return cmd_bench_scaling(scaling);
        if (*bbar) return cmd_bench_barrier(barrier_workers, barrier_phases, barrier_out);
        if (*spd) return cmd_predict_speedup(counters_csv, peak_ratio, speedup_out);
    } catch (const resource_error& e) {
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return kExitResource;
    } catch (const data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
    return kExitUsage;
}

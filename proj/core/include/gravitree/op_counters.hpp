#pragma once

#include <cstdint>

#include "gravitree/errors.hpp"

namespace gravitree {

// Abstract instruction tallies for the gravity walk, split by executing unit.
struct OpCounters {
    std::uint64_t integer = 0;
    std::uint64_t fp_fma = 0;
    std::uint64_t fp_add = 0;
    std::uint64_t fp_mul = 0;
    std::uint64_t fp_rsqrt = 0;

    OpCounters& operator+=(const OpCounters& o) {
        integer += o.integer;
        fp_fma += o.fp_fma;
        fp_add += o.fp_add;
        fp_mul += o.fp_mul;
        fp_rsqrt += o.fp_rsqrt;
        return *this;
    }
    friend OpCounters operator+(OpCounters a, const OpCounters& b) { return a += b; }
    friend bool operator==(const OpCounters&, const OpCounters&) = default;

    std::uint64_t fp_core() const { return fp_fma + fp_add + fp_mul; }
    std::uint64_t total() const { return integer + fp_core() + fp_rsqrt; }
};

// Raw event tallies recorded during a traversal.
struct TraversalEvents {
    std::uint64_t interactions = 0;  // evaluated (member, list entry) pairs
    std::uint64_t mac_evals = 0;     // cells tested against a group
    std::uint64_t list_pushes = 0;   // entries appended to interaction lists

    TraversalEvents& operator+=(const TraversalEvents& o) {
        interactions += o.interactions;
        mac_evals += o.mac_evals;
        list_pushes += o.list_pushes;
        return *this;
    }
    friend TraversalEvents operator+(TraversalEvents a, const TraversalEvents& b) { return a += b; }
    friend bool operator==(const TraversalEvents&, const TraversalEvents&) = default;
};

// Fixed per-event instruction costs. The tallies are deterministic functions
// of the traversal trace, not hardware measurements.
inline constexpr OpCounters kInteractionCost{0, 9, 3, 2, 1};
inline constexpr OpCounters kMacEvalCost{12, 0, 2, 3, 0};
inline constexpr OpCounters kListPushCost{4, 0, 0, 0, 0};

constexpr OpCounters count_walk_ops(const TraversalEvents& ev) {
    OpCounters c;
    c.integer = kInteractionCost.integer * ev.interactions + kMacEvalCost.integer * ev.mac_evals +
                kListPushCost.integer * ev.list_pushes;
    c.fp_fma = kInteractionCost.fp_fma * ev.interactions + kMacEvalCost.fp_fma * ev.mac_evals;
    c.fp_add = kInteractionCost.fp_add * ev.interactions + kMacEvalCost.fp_add * ev.mac_evals;
    c.fp_mul = kInteractionCost.fp_mul * ev.interactions + kMacEvalCost.fp_mul * ev.mac_evals;
    c.fp_rsqrt = kInteractionCost.fp_rsqrt * ev.interactions;
    return c;
}

// Theoretical peak and bandwidth ratios of a newer device over an older one.
struct HardwareRatios {
    double peak_ratio = 1.5;
    double bandwidth_ratio = 1.23;
};

// Overlap model: with shared execution units the walk cost scales with
// I + F; with independent integer and floating-point units it scales with
// max(I, F). The predicted speed-up is the hardware peak ratio times the
// ratio of the two scenarios. Reciprocal square roots are assumed hidden.
double predict_speedup(const OpCounters& c, const HardwareRatios& hw);

// Flop/s with the 2-per-FMA and 4-per-rsqrt weighting.
double flops_estimate(const OpCounters& c, double elapsed_seconds);

// Compute-regime probe: flags when the achieved Flop/s falls below
// threshold_fraction of peak_flops (a latency/bandwidth-bound hint).
struct FlopsRegime {
    double flops = 0.0;
    double fraction_of_peak = 0.0;
    bool below_threshold = false;
};
FlopsRegime flops_regime(const OpCounters& c, double elapsed_seconds, double peak_flops,
                         double threshold_fraction = 0.1);

}  // namespace gravitree

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace gravitree {

struct TunerConfig {
    std::size_t min_interval = 1;
    std::size_t max_interval = 128;
    std::size_t initial_interval = 8;
};

// Tracks the tree-build cost and the walk-time history since the last
// rebuild, and amortizes the rebuild over the interval that minimizes the
// modeled per-step cost.
class RebuildTuner {
public:
    explicit RebuildTuner(TunerConfig config = {});

    std::size_t interval() const { return interval_; }
    std::size_t steps_since_rebuild() const { return steps_since_rebuild_; }
    // Never schedules one-step cycles: a single-sample history cannot be
    // refit, so interval 1 would be absorbing.
    bool should_rebuild() const { return steps_since_rebuild_ >= std::max<std::size_t>(interval_, 2); }

    double build_time() const { return build_time_; }
    const std::vector<double>& walk_history() const { return walk_history_; }
    const TunerConfig& config() const { return config_; }

    void record_build(double seconds) { build_time_ = seconds; }
    void record_walk(double seconds) {
        walk_history_.push_back(seconds);
        ++steps_since_rebuild_;
    }

    // Retunes from the completed cycle, then clears the history.
    void on_rebuild();

    // Clears the history without retuning (fixed-interval mode).
    void reset_cycle() {
        walk_history_.clear();
        steps_since_rebuild_ = 0;
    }

    void set_interval(std::size_t interval);

private:
    TunerConfig config_;
    std::size_t interval_;
    std::size_t steps_since_rebuild_ = 0;
    double build_time_ = 0.0;
    std::vector<double> walk_history_;
};

// Fits the walk history as t(k) = t0 + s*k and picks the interval m that
// minimizes (t_build + sum_{k<m} t(k)) / m within the configured bounds.
// Ties prefer the larger interval; fewer than two samples keep the current
// interval; a negative fitted slope is treated as flat.
std::size_t autotune_rebuild(const RebuildTuner& tuner);

}  // namespace gravitree

#include "gravitree/rebuild_tuner.hpp"

#include <algorithm>
#include <vector>

#include "gravitree/errors.hpp"

namespace gravitree {

RebuildTuner::RebuildTuner(TunerConfig config) : config_(config), interval_(config.initial_interval) {
    if (config_.min_interval < 1 || config_.max_interval < config_.min_interval)
        throw data_error("RebuildTuner: bad interval bounds");
    interval_ = std::clamp(interval_, config_.min_interval, config_.max_interval);
}

void RebuildTuner::set_interval(std::size_t interval) {
    interval_ = std::clamp(interval, config_.min_interval, config_.max_interval);
}

void RebuildTuner::on_rebuild() {
    // damped update: one noisy cycle moves the interval at most halfway
    const std::size_t fit = autotune_rebuild(*this);
    interval_ = std::clamp((interval_ + fit + 1) / 2, config_.min_interval, config_.max_interval);
    walk_history_.clear();
    steps_since_rebuild_ = 0;
}

std::size_t autotune_rebuild(const RebuildTuner& tuner) {
    const auto& hist = tuner.walk_history();
    const auto& cfg = tuner.config();
    if (hist.size() < 2) return tuner.interval();

    // Theil-Sen line through (k, t_walk[k]); the median slope shrugs off
    // the occasional scheduling spike that wrecks a least-squares fit.
    std::vector<double> slopes;
    slopes.reserve(hist.size() * (hist.size() - 1) / 2);
    for (std::size_t j = 1; j < hist.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            slopes.push_back((hist[j] - hist[i]) / static_cast<double>(j - i));
    std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
    double slope = slopes[slopes.size() / 2];
    if (slope < 0.0) slope = 0.0;  // walks do not get cheaper on a staling tree
    std::vector<double> residuals(hist.size());
    for (std::size_t k = 0; k < hist.size(); ++k)
        residuals[k] = hist[k] - slope * static_cast<double>(k);
    std::nth_element(residuals.begin(), residuals.begin() + residuals.size() / 2, residuals.end());
    const double intercept = residuals[residuals.size() / 2];

    // Per-step cost of rebuilding every m steps; ties go to the larger m.
    std::size_t best_m = cfg.min_interval;
    double best_cost = 0.0;
    for (std::size_t m = cfg.min_interval; m <= cfg.max_interval; ++m) {
        const double md = static_cast<double>(m);
        const double cost = tuner.build_time() / md + intercept + slope * (md - 1.0) / 2.0;
        if (m == cfg.min_interval || cost <= best_cost) {
            best_cost = cost;
            best_m = m;
        }
    }
    return best_m;
}

}  // namespace gravitree

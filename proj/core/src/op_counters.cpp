#include "gravitree/op_counters.hpp"

#include <algorithm>

namespace gravitree {

double predict_speedup(const OpCounters& c, const HardwareRatios& hw) {
    const double f = static_cast<double>(c.fp_core());
    const double i = static_cast<double>(c.integer);
    if (f == 0.0 && i == 0.0) throw data_error("predict_speedup: no counted instructions");
    return hw.peak_ratio * (i + f) / std::max(i, f);
}

double flops_estimate(const OpCounters& c, double elapsed_seconds) {
    if (!(elapsed_seconds > 0.0)) throw data_error("flops_estimate: elapsed time must be positive");
    const double flops = 2.0 * static_cast<double>(c.fp_fma) + static_cast<double>(c.fp_add) +
                         static_cast<double>(c.fp_mul) + 4.0 * static_cast<double>(c.fp_rsqrt);
    return flops / elapsed_seconds;
}

FlopsRegime flops_regime(const OpCounters& c, double elapsed_seconds, double peak_flops,
                         double threshold_fraction) {
    FlopsRegime r;
    r.flops = flops_estimate(c, elapsed_seconds);
    r.fraction_of_peak = peak_flops > 0.0 ? r.flops / peak_flops : 0.0;
    r.below_threshold = peak_flops > 0.0 && r.fraction_of_peak < threshold_fraction;
    return r;
}

}  // namespace gravitree

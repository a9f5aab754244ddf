#pragma once

#include <cstdint>
#include <string>

namespace gravitree {

// Run parameters, serializable to a plain-text key=value file. rebuild < 0
// means the interval is auto-tuned; a fixed interval makes rerun output
// bit-reproducible (the auto-tuner reacts to wall time).
struct RunConfig {
    double dacc = 0x1.0p-9;
    double eps = 0.03125;
    double eta = 0.5;
    double dt_max = 0.0625;
    std::uint64_t steps = 100;
    std::uint64_t group_size = 32;
    std::uint64_t list_capacity = 1024;
    std::uint64_t leaf_cap = 8;
    std::uint64_t rebuild_min = 1;
    std::uint64_t rebuild_max = 128;
    std::int64_t rebuild = -1;  // -1 == auto
    std::uint64_t seed = 1;
    bool counters = true;

    void validate() const;
    std::string serialize() const;

    static RunConfig parse(const std::string& text, const std::string& origin = "config");
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
};

}  // namespace gravitree

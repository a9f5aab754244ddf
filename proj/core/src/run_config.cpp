#include "gravitree/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gravitree/csv.hpp"
#include "gravitree/errors.hpp"

namespace gravitree {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& origin, const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw data_error(origin + ": bad value for " + key + ": '" + value + "'");
    return v;
}

bool parse_bool(const std::string& origin, const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw data_error(origin + ": bad value for " + key + ": '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
    if (!(dacc > 0.0) || dacc > 1.0) throw data_error("config: dacc must be in (0, 1]");
    if (eps < 0.0) throw data_error("config: eps must be >= 0");
    if (!(eta > 0.0)) throw data_error("config: eta must be positive");
    if (!(dt_max > 0.0)) throw data_error("config: dt_max must be positive");
    if (group_size < 1) throw data_error("config: group_size must be >= 1");
    if (list_capacity < 1) throw data_error("config: list_capacity must be >= 1");
    if (leaf_cap < 1) throw data_error("config: leaf_cap must be >= 1");
    if (rebuild_min < 1 || rebuild_max < rebuild_min) throw data_error("config: bad rebuild bounds");
    if (rebuild >= 0 && (static_cast<std::uint64_t>(rebuild) < rebuild_min ||
                         static_cast<std::uint64_t>(rebuild) > rebuild_max))
        throw data_error("config: fixed rebuild interval outside bounds");
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    out << "dacc = " << format_double(dacc) << "\n";
    out << "eps = " << format_double(eps) << "\n";
    out << "eta = " << format_double(eta) << "\n";
    out << "dt_max = " << format_double(dt_max) << "\n";
    out << "steps = " << steps << "\n";
    out << "group_size = " << group_size << "\n";
    out << "list_capacity = " << list_capacity << "\n";
    out << "leaf_cap = " << leaf_cap << "\n";
    out << "rebuild_min = " << rebuild_min << "\n";
    out << "rebuild_max = " << rebuild_max << "\n";
    out << "rebuild = " << (rebuild < 0 ? std::string("auto") : std::to_string(rebuild)) << "\n";
    out << "seed = " << seed << "\n";
    out << "counters = " << (counters ? "on" : "off") << "\n";
    return out.str();
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw data_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string where = origin + ":" + std::to_string(lineno);

        if (key == "dacc")
            cfg.dacc = parse_number(where, key, value);
        else if (key == "eps")
            cfg.eps = parse_number(where, key, value);
        else if (key == "eta")
            cfg.eta = parse_number(where, key, value);
        else if (key == "dt_max")
            cfg.dt_max = parse_number(where, key, value);
        else if (key == "steps")
            cfg.steps = static_cast<std::uint64_t>(parse_number(where, key, value));
        else if (key == "group_size")
            cfg.group_size = static_cast<std::uint64_t>(parse_number(where, key, value));
        else if (key == "list_capacity")
            cfg.list_capacity = static_cast<std::uint64_t>(parse_number(where, key, value));
        else if (key == "leaf_cap")
            cfg.leaf_cap = static_cast<std::uint64_t>(parse_number(where, key, value));
        else if (key == "rebuild_min")
            cfg.rebuild_min = static_cast<std::uint64_t>(parse_number(where, key, value));
        else if (key == "rebuild_max")
            cfg.rebuild_max = static_cast<std::uint64_t>(parse_number(where, key, value));
        else if (key == "rebuild")
            cfg.rebuild = value == "auto" ? -1 : static_cast<std::int64_t>(parse_number(where, key, value));
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(parse_number(where, key, value));
        else if (key == "counters")
            cfg.counters = parse_bool(where, key, value);
        else
            throw data_error(where + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void RunConfig::save(const std::string& path) const { write_text_atomic(path, serialize()); }

}  // namespace gravitree

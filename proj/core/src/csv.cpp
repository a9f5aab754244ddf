#include "gravitree/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gravitree/errors.hpp"

namespace gravitree {

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error(path + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw data_error(path + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw data_error(path + ": rename failed: " + ec.message());
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& columns) : columns_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_.push_back(',');
        out_ += columns[i];
    }
    out_.push_back('\n');
}

CsvBuilder& CsvBuilder::cell(double v) { return cell(format_double(v)); }

CsvBuilder& CsvBuilder::cell(std::uint64_t v) { return cell(std::to_string(v)); }

CsvBuilder& CsvBuilder::cell(const std::string& v) {
    if (in_row_) out_.push_back(',');
    out_ += v;
    ++in_row_;
    return *this;
}

void CsvBuilder::end_row() {
    if (in_row_ != columns_) throw data_error("csv row width mismatch");
    out_.push_back('\n');
    in_row_ = 0;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw data_error("csv: missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error(path + ": cannot open");
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        if (lineno == 1) {
            table.columns = fields;
            continue;
        }
        if (fields.size() != table.columns.size())
            throw data_error(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(table.columns.size()) + " fields, got " +
                             std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0')
                throw data_error(path + ":" + std::to_string(lineno) + ": bad number '" + f + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (lineno == 0) throw data_error(path + ": empty csv (no header)");
    return table;
}

}  // namespace gravitree

#pragma once

#include <string>
#include <vector>

namespace gravitree {

// Writes content to a temp file in the target directory and renames it over
// path, so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

// Minimal CSV emitter; numbers are formatted with 17 significant digits so
// re-running a deterministic sweep reproduces the bytes.
class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& columns);

    CsvBuilder& cell(double v);
    CsvBuilder& cell(std::uint64_t v);
    CsvBuilder& cell(const std::string& v);
    void end_row();

    const std::string& str() const { return out_; }
    void save(const std::string& path) const { write_text_atomic(path, out_); }

private:
    std::string out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

// Parsed numeric CSV with a header row. Parse failures name the 1-based
// line number.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    // index of a named column; throws data_error when missing
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

std::string format_double(double v);

}  // namespace gravitree

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace gravphase {

// Numeric table with "# key: value" metadata lines above the column header.
// Values are written with %.17g so they round-trip exactly.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns,
              const std::vector<std::pair<std::string, std::string>>& metadata = {});

    void row(const std::vector<double>& values);
    const std::vector<std::string>& columns() const { return columns_; }

private:
    std::ofstream out_;
    std::vector<std::string> columns_;
};

std::string format_double(double v);

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

} // namespace gravphase

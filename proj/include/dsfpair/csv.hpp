#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace dsfpair {

// Shortest-significant formatting used for all CSV payloads: '.' decimal,
// 17 significant digits (round-trip exact for double).
std::string format_g17(double v);

// CSV with mandatory header row, ',' separator and LF line endings.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    void row_values(const std::vector<double>& values);
    void close();

  private:
    std::ofstream out_;
    std::size_t n_cols_;
    std::string path_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
    bool has_column(const std::string& name) const;
    std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace dsfpair

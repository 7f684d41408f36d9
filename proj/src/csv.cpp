#include "dsfpair/csv.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "dsfpair/errors.hpp"

namespace dsfpair {

std::string format_g17(double v) {
    // locale-independent %.17g equivalent
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), n_cols_(header.size()), path_(path) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_)
        throw DomainError("CSV row width mismatch in " + path_);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row_values(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_g17(v));
    row(cells);
}

void CsvWriter::close() { out_.close(); }

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ConfigError("CSV is missing required column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& cell = rows[r][c];
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &pos);
        } catch (const std::exception&) {
            throw ConfigError("CSV column '" + name + "' row " + std::to_string(r + 1) +
                              ": not a number: '" + cell + "'");
        }
        if (pos != cell.size())
            throw ConfigError("CSV column '" + name + "' row " + std::to_string(r + 1) +
                              ": trailing characters in '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open CSV file: " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV file: " + path);
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw ConfigError("CSV row width mismatch in " + path);
        t.rows.push_back(std::move(cells));
    }
    return t;
}

}  // namespace dsfpair

#pragma once
// Minimal CSV plumbing for the experiment artifacts. Our files never contain
// quoted fields or embedded commas, so reading is a plain split.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "releap/errors.hpp"

namespace releap {

inline std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string g9(const std::optional<double>& v) { return v ? g9(*v) : std::string(); }

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : path_(path), out_(path) {
        if (!out_) throw IoError("cannot open for writing: " + path);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void close() {
        out_.flush();
        if (!out_) throw IoError("write failed: " + path_);
        out_.close();
    }

  private:
    std::string path_;
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return static_cast<int>(j);
        throw IoError("csv column not found: " + name);
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            table.header = split_csv_line(line);
            first = false;
        } else {
            std::vector<std::string> cells = split_csv_line(line);
            cells.resize(table.header.size());
            table.rows.push_back(std::move(cells));
        }
    }
    if (first) throw IoError("csv file has no header: " + path);
    return table;
}

inline double csv_num(const std::string& cell) {
    if (cell.empty()) throw IoError("csv: numeric cell is empty");
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size()) throw IoError("csv: bad number: " + cell);
    return v;
}

inline std::optional<double> csv_opt(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    return csv_num(cell);
}

}  // namespace releap

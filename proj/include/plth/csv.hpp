#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace plth {

// Formats a double with 9 significant digits; integral-valued doubles and
// NaN render as "%.9g" too ("nan" never appears: callers emit empty cells
// for missing values via add_raw).
inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Line-at-a-time CSV writer with a fixed header.  Every row must supply
// exactly one cell per column; output is byte-stable for identical inputs.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path), n_cols_(columns.size()) {
        if (!out_) throw std::runtime_error(path + ": cannot open for writing");
        path_ = path;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ",";
            out_ << columns[i];
        }
        out_ << "\n";
    }

    CsvWriter& add(double v) { return add_raw(std::isnan(v) ? "" : csv_double(v)); }
    CsvWriter& add(int v) { return add_raw(std::to_string(v)); }
    CsvWriter& add(long v) { return add_raw(std::to_string(v)); }
    CsvWriter& add(std::size_t v) { return add_raw(std::to_string(v)); }
    CsvWriter& add(unsigned long long v) { return add_raw(std::to_string(v)); }
    CsvWriter& add(const std::string& v) { return add_raw(v); }

    CsvWriter& add_raw(const std::string& cell) {
        if (cells_.size() >= n_cols_)
            throw std::runtime_error(path_ + ": too many cells in a row");
        cells_.push_back(cell);
        return *this;
    }

    void end_row() {
        if (cells_.size() != n_cols_)
            throw std::runtime_error(path_ + ": row has " + std::to_string(cells_.size()) +
                                     " cells, expected " + std::to_string(n_cols_));
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells_[i];
        }
        out_ << "\n";
        cells_.clear();
    }

private:
    std::ofstream out_;
    std::string path_;
    std::size_t n_cols_;
    std::vector<std::string> cells_;
};

}  // namespace plth

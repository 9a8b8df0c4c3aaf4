#include "cavsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cavsim/config.hpp"
#include "cavsim/errors.hpp"

namespace cavsim {

CsvTable::CsvTable(std::string schema, std::uint64_t config_hash, std::uint64_t seed)
    : schema_(std::move(schema)), config_hash_(config_hash), seed_(seed) {}

void CsvTable::add_column(std::string name) {
    if (!rows_.empty()) throw DomainError("add columns before rows");
    columns_.push_back(std::move(name));
}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw DomainError("row width mismatch");
    rows_.push_back(values);
}

std::string CsvTable::to_string() const {
    std::ostringstream out;
    char buf[64];
    out << "# schema=" << schema_ << " v1\n";
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(config_hash_));
    out << "# config_hash=" << buf << "\n";
    out << "# seed=" << seed_ << "\n";
    out << "# version=" << kToolkitVersion << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i)
        out << (i ? "," : "") << columns_[i];
    out << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (std::isnan(row[i])) {
                std::snprintf(buf, sizeof(buf), "nan");
            } else {
                std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
            }
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    return out.str();
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file: " + path);
    f << to_string();
}

std::vector<std::string> read_csv(const std::string& path,
                                  std::vector<std::vector<double>>& columns) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open CSV: " + path);
    std::string line;
    std::vector<std::string> names;
    columns.clear();
    bool header_seen = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!header_seen) {
            while (std::getline(ss, cell, ',')) names.push_back(cell);
            columns.resize(names.size());
            header_seen = true;
            continue;
        }
        std::size_t i = 0;
        while (std::getline(ss, cell, ',')) {
            if (i >= columns.size()) throw DomainError("ragged CSV row in " + path);
            columns[i++].push_back(cell == "nan" ? std::nan("")
                                                 : std::stod(cell));
        }
    }
    if (!header_seen) throw DomainError("CSV has no column header: " + path);
    return names;
}

}  // namespace cavsim

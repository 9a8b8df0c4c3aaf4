#ifndef CAVSIM_CSV_HPP
#define CAVSIM_CSV_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace cavsim {

// Column-oriented CSV with the toolkit header block:
//   # schema=<name> v1
//   # config_hash=<hex>
//   # seed=<n>
//   # version=<semver>
class CsvTable {
public:
    CsvTable(std::string schema, std::uint64_t config_hash, std::uint64_t seed);

    void add_column(std::string name);
    void add_row(const std::vector<double>& values);

    std::string to_string() const;
    void write(const std::string& path) const;

    std::size_t rows() const { return rows_.size(); }

private:
    std::string schema_;
    std::uint64_t config_hash_;
    std::uint64_t seed_;
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

// Parse a toolkit CSV back into columns (header block ignored except for
// validation that it exists). Returns column names.
std::vector<std::string> read_csv(const std::string& path,
                                  std::vector<std::vector<double>>& columns);

}  // namespace cavsim

#endif

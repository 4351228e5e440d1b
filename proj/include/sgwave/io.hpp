#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sgw {

inline constexpr const char* kVersion = "0.1.0";

using OrderedJson = nlohmann::ordered_json;

// Flat key -> value config echo embedded into every artifact.
using MetaMap = std::map<std::string, std::string>;

// CSV with '#'-prefixed metadata lines, then a header row, then data rows
// with '.' decimal and full round-trip precision.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const MetaMap& meta, const std::vector<std::string>& columns);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

    static std::string format(double v);

private:
    std::ofstream out_;
    size_t n_cols_;
};

// Writes `body` wrapped as {"version":..., "config": {...}, ...body}.
void write_json(const std::string& path, const MetaMap& meta, const OrderedJson& body);

// key=value file, one per line; '#' comments allowed.
MetaMap read_config_file(const std::string& path);

}  // namespace sgw

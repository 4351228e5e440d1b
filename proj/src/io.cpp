#include "sgwave/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace sgw {

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const MetaMap& meta,
                     const std::vector<std::string>& columns)
    : out_(path), n_cols_(columns.size()) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << "# sgwave_version=" << kVersion << "\n";
    for (const auto& [k, v] : meta) out_ << "# " << k << "=" << v << "\n";
    for (size_t i = 0; i < columns.size(); ++i) out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != n_cols_) throw std::invalid_argument("CsvWriter: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << format(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != n_cols_) throw std::invalid_argument("CsvWriter: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
}

void write_json(const std::string& path, const MetaMap& meta, const OrderedJson& body) {
    OrderedJson root;
    root["version"] = kVersion;
    OrderedJson cfg;
    for (const auto& [k, v] : meta) cfg[k] = v;
    root["config"] = cfg;
    for (const auto& [k, v] : body.items()) root[k] = v;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_json: cannot open " + path);
    out << root.dump(2) << "\n";
}

MetaMap read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config file not found: " + path);
    MetaMap map;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) map[key] = val;
    }
    return map;
}

}  // namespace sgw

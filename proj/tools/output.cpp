#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#ifndef KERRTRAJ_VERSION
#define KERRTRAJ_VERSION "unknown"
#endif

namespace kerrtraj::cli {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw ConfigError("output: row width does not match the column header");
    }
    rows.push_back(std::move(row));
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string timestamp() {
    char buf[32];
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json cell_to_json(const Cell& c) {
    if (const double* d = std::get_if<double>(&c)) {
        if (std::isinf(*d) || std::isnan(*d)) return nullptr; // JSON has no inf
        return *d;
    }
    return std::get<std::string>(c);
}

void write_csv(std::ostream& os, const Table& t, const ExperimentConfig& cfg) {
    os << "# kerrtraj " << KERRTRAJ_VERSION << " " << timestamp() << "\n";
    json meta = json{{"config", cfg}, {"version", KERRTRAJ_VERSION}};
    os << "# " << meta.dump() << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << t.columns[i];
    }
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            if (const double* d = std::get_if<double>(&row[i])) {
                os << format_number(*d);
            } else {
                os << std::get<std::string>(row[i]);
            }
        }
        os << "\n";
    }
}

void write_json(std::ostream& os, const Table& t, const ExperimentConfig& cfg) {
    json data = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& c : row) r.push_back(cell_to_json(c));
        data.push_back(std::move(r));
    }
    json doc = json{{"config", cfg},
                    {"version", KERRTRAJ_VERSION},
                    {"generated", timestamp()},
                    {"columns", t.columns},
                    {"data", std::move(data)}};
    os << doc.dump(2) << "\n";
}

} // namespace

void write_table(const Table& table, const ExperimentConfig& cfg, const std::string& path) {
    const std::string& target = path.empty() ? cfg.out : path;
    std::ofstream os(target);
    if (!os) throw ConfigError("out: cannot write '" + target + "'");
    if (cfg.format == "json") {
        write_json(os, table, cfg);
    } else {
        write_csv(os, table, cfg);
    }
}

} // namespace kerrtraj::cli

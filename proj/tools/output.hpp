#pragma once

#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace kerrtraj::cli {

/// One output cell: a number (serialized with 17 significant digits, inf
/// allowed) or a label.
using Cell = std::variant<double, std::string>;

/// Tabular result with the embedded config, written as CSV with a
/// JSON-metadata comment header or as pure JSON.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

std::string format_number(double v);

/// Writes the table to cfg-selected format. `path` overrides cfg.out when
/// non-empty (used for multi-file experiments).
void write_table(const Table& table, const ExperimentConfig& cfg,
                 const std::string& path = "");

} // namespace kerrtraj::cli

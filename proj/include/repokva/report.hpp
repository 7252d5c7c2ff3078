#pragma once

#include "repokva/config.hpp"

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace repokva {

// Locale-independent shortest form with 6 significant digits ('.' separator).
std::string format_number(double x);

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

std::string render(const Table& table, OutputFormat format);
std::string render_csv(const Table& table);
std::string render_json(const Table& table);
// Aligned plain-text view for terminals.
std::string render_pretty(const Table& table);

// Reads back a CSV produced by render_csv (numbers and bare strings only).
Table parse_csv(const std::string& text);

} // namespace repokva

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace tsvf {

// Round-trippable fixed 17-significant-digit decimal.
std::string format_double(double v);

// JSON text with every floating-point number written by format_double.
// Non-finite numbers become null. Object keys keep nlohmann's sorted order.
std::string dump_json(const nlohmann::json& j, int indent = 2);

struct Series {
    std::string name;                  // file stem, e.g. "fig3e"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Header row, comma separated, LF line endings.
std::string to_csv(const Series& s);

// Writes through a temporary file in the same directory and renames it.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace tsvf

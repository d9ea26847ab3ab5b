#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace chiral {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Empty cells mark undefined values; NaN is never written.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits ("%.17g"), enough to round-trip any double.
std::string format_double(double value);

/// UTF-8, header row, comma delimiter, '\n' line endings.
std::string to_csv(const Table& table);
nlohmann::json to_json(const Table& table);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace chiral

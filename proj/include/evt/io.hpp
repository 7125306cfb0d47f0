#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evt {

// Shortest round-trip decimal representation (to_chars).
std::string format_double(double v);

// NaN and unset optionals serialize as empty CSV fields.
std::string csv_field(double v);
std::string csv_field(const std::optional<double>& v);

// RFC 4180: quote fields containing comma, quote or newline.
std::string csv_quote(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Headerless numeric CSV (one row per line).
void write_matrix_csv(const std::string& path, std::size_t rows,
                      std::size_t cols, std::span<const double> row_major);
std::vector<std::vector<double>> read_matrix_csv(const std::string& path);

}  // namespace evt

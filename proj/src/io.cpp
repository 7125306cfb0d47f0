#include "evt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evt/errors.hpp"
#include "evt/ext_real.hpp"

namespace evt {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string ExtReal::str() const {
  return neg_inf_ ? "-inf" : format_double(value_);
}

std::string csv_field(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

std::string csv_field(const std::optional<double>& v) {
  return v ? csv_field(*v) : std::string();
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_quote(fields[i]);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw error("io", "cannot open for writing: " + path);
  f << content;
  if (!f) throw error("io", "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw error("io", "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_matrix_csv(const std::string& path, std::size_t rows,
                      std::size_t cols, std::span<const double> row_major) {
  std::string out;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out += ',';
      out += format_double(row_major[i * cols + j]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::vector<double> row;
      std::size_t c = 0;
      while (c <= line.size()) {
        std::size_t comma = line.find(',', c);
        if (comma == std::string_view::npos) comma = line.size();
        std::string_view tok = line.substr(c, comma - c);
        double v = 0.0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc())
          throw error("io", "bad number in " + path + ": '" + std::string(tok) + "'");
        row.push_back(v);
        c = comma + 1;
        if (comma == line.size()) break;
      }
      rows.push_back(std::move(row));
    }
    pos = eol + 1;
  }
  return rows;
}

}  // namespace evt

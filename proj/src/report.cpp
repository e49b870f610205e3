#include "gibbslab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gibbslab/errors.hpp"

namespace gibbslab {

namespace {

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Cell parse_cell(const std::string& s) {
  std::int64_t i = 0;
  auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
  if (!s.empty() && ei == std::errc() && pi == s.data() + s.size()) return i;
  double d = 0;
  auto [pd, ed] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (!s.empty() && ed == std::errc() && pd == s.data() + s.size()) return d;
  return s;
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw Error(ErrorKind::InvalidArgument, "row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", *d);
    return buf;
  }
  return std::get<std::string>(c);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + quote_csv(t.columns[k]);
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + quote_csv(format_cell(row[k]));
    out += "\n";
  }
  return out;
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size(); ++k) {
      const std::string text = format_cell(row[k]);
      if (std::holds_alternative<std::string>(row[k])) {
        obj[t.columns[k]] = text;
      } else if (std::holds_alternative<std::int64_t>(row[k])) {
        obj[t.columns[k]] = std::get<std::int64_t>(row[k]);
      } else if (std::isfinite(std::get<double>(row[k]))) {
        // Same rounding as the CSV text.
        obj[t.columns[k]] = std::strtod(text.c_str(), nullptr);
      } else {
        obj[t.columns[k]] = text;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (header) {
      t.columns = fields;
      header = false;
      continue;
    }
    std::vector<Cell> row;
    for (const auto& f : fields) row.push_back(parse_cell(f));
    t.add(std::move(row));
  }
  return t;
}

std::string write_table(const Table& t, const std::string& dir, const std::string& stem, const std::string& format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = (std::filesystem::path(dir) / (stem + (format == "json" ? ".json" : ".csv"))).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << (format == "json" ? to_json(t) : to_csv(t));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
  return path;
}

Table covariance_table() { return {{"i", "j", "dist", "value", "stderr", "method"}, {}}; }
Table coefficient_table() { return {{"d", "R", "quantity", "offset", "value", "bound", "ratio"}, {}}; }
Table bootstrap_table() { return {{"iteration", "dist", "max_bound", "C_fit", "alpha_fit", "coupling", "L"}, {}}; }
Table key_value_table() { return {{"key", "value"}, {}}; }

}  // namespace gibbslab

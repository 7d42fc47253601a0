// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pmmfp/errors.hpp"

namespace pmmfp {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_cell(const std::string& field) {
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return value;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return static_cast<int>(j);
  }
  return -1;
}

Vector CsvTable::column(const std::string& name) const {
  const int j = column_index(name);
  if (j < 0) throw ColumnMissing("column '" + name + "' not found");
  const auto& col = data[static_cast<std::size_t>(j)];
  Vector v(static_cast<Eigen::Index>(col.size()));
  for (std::size_t i = 0; i < col.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = col[i];
  }
  return v;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidConfig("'" + path + "' is empty (a header row is required)");
  }
  table.columns = split_line(line);
  if (table.columns.empty()) {
    throw InvalidConfig("'" + path + "' has an empty header row");
  }
  table.data.assign(table.columns.size(), {});

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != table.columns.size()) {
      throw InvalidConfig("'" + path + "' line " + std::to_string(line_no) +
                          " has " + std::to_string(fields.size()) +
                          " fields, expected " +
                          std::to_string(table.columns.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      table.data[j].push_back(parse_cell(fields[j]));
    }
  }
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw FileNotFound("cannot write '" + path + "'");
  for (std::size_t j = 0; j < table.columns.size(); ++j) {
    if (j) out << ',';
    out << table.columns[j];
  }
  out << '\n';
  const std::size_t n = table.rows();
  char buf[64];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      if (j) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", table.data[j][i]);
      out << buf;
    }
    out << '\n';
  }
}

CompleteCases complete_cases(const CsvTable& table, const std::string& x_col,
                             const std::string& y_col,
                             const std::vector<std::string>& covariate_cols) {
  std::vector<int> idx;
  idx.push_back(table.column_index(x_col));
  idx.push_back(table.column_index(y_col));
  for (const auto& c : covariate_cols) idx.push_back(table.column_index(c));
  const std::vector<std::string> wanted = [&] {
    std::vector<std::string> w{x_col, y_col};
    w.insert(w.end(), covariate_cols.begin(), covariate_cols.end());
    return w;
  }();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0) throw ColumnMissing("column '" + wanted[k] + "' not found");
  }

  const std::size_t n = table.rows();
  std::vector<std::size_t> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool complete = true;
    for (int j : idx) {
      if (std::isnan(table.data[static_cast<std::size_t>(j)][i])) {
        complete = false;
        break;
      }
    }
    if (complete) rows.push_back(i);
  }

  CompleteCases out;
  out.dropped = static_cast<int>(n - rows.size());
  out.covariate_names = covariate_cols;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  out.x.resize(m);
  out.y.resize(m);
  out.covariates.resize(m, static_cast<Eigen::Index>(covariate_cols.size()));
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t i = rows[static_cast<std::size_t>(r)];
    out.x[r] = table.data[static_cast<std::size_t>(idx[0])][i];
    out.y[r] = table.data[static_cast<std::size_t>(idx[1])][i];
    for (std::size_t c = 0; c < covariate_cols.size(); ++c) {
      out.covariates(r, static_cast<Eigen::Index>(c)) =
          table.data[static_cast<std::size_t>(idx[2 + c])][i];
    }
  }
  return out;
}

}  // namespace pmmfp

// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <string>
#include <vector>

#include "pmmfp/linalg.hpp"

namespace pmmfp {

// Rectangular numeric table, column major.  Cells that fail to parse as
// numbers (including empty fields and the usual NA spellings) are stored as
// NaN; row filtering happens later, in complete_cases.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[j][i], one vector per column

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  int column_index(const std::string& name) const;
  Vector column(const std::string& name) const;  // throws ColumnMissing
};

// Reads a headered, comma-separated file.  Quoting is not supported; ragged
// rows are rejected.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const CsvTable& table);

// The selected columns with every row containing a NaN removed.
struct CompleteCases {
  Vector x;
  Vector y;
  Matrix covariates;  // rows x covariate_cols.size(); 0 columns when none
  std::vector<std::string> covariate_names;
  int dropped = 0;
};

CompleteCases complete_cases(const CsvTable& table, const std::string& x_col,
                             const std::string& y_col,
                             const std::vector<std::string>& covariate_cols);

}  // namespace pmmfp

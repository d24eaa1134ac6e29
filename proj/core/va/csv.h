// va/csv.h

// Copyright 2026  The va-pipeline Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace va::csv {

// Comma-separated, UTF-8, decimal point, '\n' or '\r\n' line endings,
// mandatory header row. No quoting: cells may not contain commas.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::string& path);

// Reads a table whose data cells are all numeric. Parse failures report the
// file, 1-based line number and column name.
struct NumericTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // rows × header.size()
};

NumericTable read_numeric(const std::string& path);

// Shortest round-trip formatting (std::to_chars); reading the cell back
// recovers the exact double.
std::string format_double(double v);

double parse_double(std::string_view cell, const std::string& path, size_t line,
                    const std::string& column);
long parse_long(std::string_view cell, const std::string& path, size_t line,
                const std::string& column);

class Writer {
 public:
  explicit Writer(const std::string& path);
  ~Writer();

  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  // Common shape in this project: a leading integer index then doubles.
  void row(long index, const double* values, int count);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace va::csv

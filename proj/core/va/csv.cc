// va/csv.cc

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

#include "va/csv.h"

#include <charconv>
#include <cstdio>
#include <system_error>

#include "va/util.h"

namespace va::csv {

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  size_t start = 0;
  for (;;) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace

Table read_table(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open ", path);
  Table table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (line_no == 1) {
      table.header = std::move(cells);
      continue;
    }
    require(cells.size() == table.header.size(), path, ":", line_no,
            ": expected ", table.header.size(), " cells, got ", cells.size());
    table.rows.push_back(std::move(cells));
  }
  require(!table.header.empty(), path, ": missing header row");
  return table;
}

double parse_double(std::string_view cell, const std::string& path, size_t line,
                    const std::string& column) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  require(ec == std::errc() && ptr == end, path, ":", line,
          ": cannot parse '", std::string(cell), "' in column '", column, "'");
  return v;
}

long parse_long(std::string_view cell, const std::string& path, size_t line,
                const std::string& column) {
  long v = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  require(ec == std::errc() && ptr == end, path, ":", line,
          ": cannot parse '", std::string(cell), "' as integer in column '",
          column, "'");
  return v;
}

NumericTable read_numeric(const std::string& path) {
  Table raw = read_table(path);
  NumericTable table;
  table.header = raw.header;
  table.values.resize(static_cast<Eigen::Index>(raw.rows.size()),
                      static_cast<Eigen::Index>(raw.header.size()));
  for (size_t r = 0; r < raw.rows.size(); ++r) {
    for (size_t c = 0; c < raw.header.size(); ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(raw.rows[r][c], path, r + 2, raw.header[c]);
    }
  }
  return table;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc(), "cannot format double");
  return std::string(buf, ptr);
}

Writer::Writer(const std::string& path) : path_(path), out_(path) {
  require(out_.good(), "cannot open ", path, " for writing");
}

Writer::~Writer() {
  if (out_.is_open()) out_.close();
}

void Writer::header(const std::vector<std::string>& names) {
  row(names);
}

void Writer::row(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void Writer::row(long index, const double* values, int count) {
  out_ << index;
  for (int i = 0; i < count; ++i) out_ << ',' << format_double(values[i]);
  out_ << '\n';
}

void Writer::close() {
  out_.close();
  require(out_.good(), "write failure on ", path_);
}

}  // namespace va::csv

//
// Copyright 2026 The fedlmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef FEDLMM_CSV_H_
#define FEDLMM_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fedlmm {

// Comma-separated table with a header row. Fields may be double-quoted, with
// "" as an escaped quote. Blank lines are skipped.
struct CsvTable {
  std::string source;  // used in error messages
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ValidationError when the column is missing.
  int Column(const std::string& name) const;
  // Parses a cell as a finite double. Errors report the 1-based data row and
  // the column name.
  double Number(std::size_t row, int column) const;
};

CsvTable ParseCsv(std::string_view text, const std::string& source = "csv");
CsvTable ReadCsv(const std::filesystem::path& path);

// Shortest decimal string that reads back to the same double.
std::string FormatDouble(double v);

}  // namespace fedlmm

#endif  // FEDLMM_CSV_H_

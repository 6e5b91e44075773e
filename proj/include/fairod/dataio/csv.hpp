#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fairod::dataio {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position by name, or -1.
  int column_index(const std::string& name) const;
};

/// RFC-4180: quoted fields may contain commas, CR/LF and doubled quotes. A UTF-8 BOM is skipped.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

std::string escape_csv_field(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace fairod::dataio

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace grasswalk::cli {

/// %.17g, enough to round-trip a double.
std::string format_double(double v);
/// Quotes fields containing commas, quotes or newlines.
std::string csv_field(const std::string& s);

/// Single-writer CSV file with a header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path file_;
  std::ofstream out_;
};

void write_json(const std::filesystem::path& file, const nlohmann::json& value);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace grasswalk::cli

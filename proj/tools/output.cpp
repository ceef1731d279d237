#include "output.hpp"

#include <cstdio>

#include "grasswalk/error.hpp"

namespace grasswalk::cli {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header)
    : file_(file), out_(file) {
  if (!out_) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_field(fields[i]);
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw Error(ErrorCode::IoError, "failed writing " + file_.string());
}

void write_json(const std::filesystem::path& file, const nlohmann::json& value) {
  write_text(file, value.dump(2) + "\n");
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
}

}  // namespace grasswalk::cli

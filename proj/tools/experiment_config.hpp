#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace grasswalk::cli {

/// Flat key=value settings; blank lines and lines starting with '#' are
/// ignored. Order is preserved so the echo reproduces the input layout.
class ExperimentConfig {
 public:
  using Entry = std::pair<std::string, std::string>;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig read(const std::filesystem::path& file);

  void set(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::string to_text() const;

  bool operator==(const ExperimentConfig&) const = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace grasswalk::cli

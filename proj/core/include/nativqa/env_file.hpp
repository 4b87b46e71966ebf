#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace nativqa {

// KEY=VALUE credential/config file (the --env input). Supports blank lines,
// '#' comments, optional surrounding quotes on values, and an ignored
// leading "export ". Later keys override earlier ones.
class EnvFile {
 public:
  EnvFile() = default;

  static EnvFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;

  // Value or throw ConfigError naming the key and file.
  std::string require(const std::string& key) const;

  void set(std::string key, std::string value);
  bool empty() const { return values_.empty(); }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

}  // namespace nativqa

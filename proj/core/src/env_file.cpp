#include "nativqa/env_file.hpp"

#include <fstream>

#include "nativqa/errors.hpp"
#include "nativqa/text.hpp"

namespace nativqa {

EnvFile EnvFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open env file: " + path.string());
  }
  EnvFile env;
  env.source_ = path.string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') {
      continue;
    }
    if (s.rfind("export ", 0) == 0) {
      s = trim(s.substr(7));
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParseError("env file " + path.string() + " line " +
                       std::to_string(line_no) + ": expected KEY=VALUE");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (value.size() >= 2 &&
        ((value.front() == '"' && value.back() == '"') ||
         (value.front() == '\'' && value.back() == '\''))) {
      value = value.substr(1, value.size() - 2);
    }
    env.values_[key] = value;
  }
  return env;
}

std::optional<std::string> EnvFile::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string EnvFile::require(const std::string& key) const {
  auto v = get(key);
  if (!v) {
    throw ConfigError("missing required key '" + key + "' in env file" +
                      (source_.empty() ? "" : " " + source_));
  }
  return *v;
}

void EnvFile::set(std::string key, std::string value) {
  values_[std::move(key)] = std::move(value);
}

}  // namespace nativqa

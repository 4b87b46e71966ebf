#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace nativqa {

// Minimal absolute-URL breakdown, enough for attribution and domain checks.
struct ParsedUrl {
  std::string scheme;  // lowercase
  std::string host;    // lowercase, no brackets/userinfo
  int port = 0;        // 0 when not given
  std::string path;    // includes query/fragment, may be empty
};

// Parses scheme://[userinfo@]host[:port][/path...]. Returns nullopt when the
// input is not an absolute URL with a non-empty host.
std::optional<ParsedUrl> parse_absolute_url(std::string_view url);

inline bool is_absolute_url(std::string_view url) {
  return parse_absolute_url(url).has_value();
}

// Lowercased host of an absolute URL, or nullopt.
std::optional<std::string> url_host(std::string_view url);

}  // namespace nativqa

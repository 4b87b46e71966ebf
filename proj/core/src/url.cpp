#include "nativqa/url.hpp"

#include <cctype>

namespace nativqa {

namespace {

bool is_scheme_char(char c, bool first) {
  if (std::isalpha(static_cast<unsigned char>(c))) return true;
  if (first) return false;
  return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
         c == '.';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::optional<ParsedUrl> parse_absolute_url(std::string_view url) {
  std::size_t colon = url.find(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  for (std::size_t i = 0; i < colon; ++i) {
    if (!is_scheme_char(url[i], i == 0)) return std::nullopt;
  }
  if (url.substr(colon, 3) != "://") return std::nullopt;

  ParsedUrl out;
  out.scheme = lower(url.substr(0, colon));

  std::string_view rest = url.substr(colon + 3);
  std::size_t authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  if (authority_end != std::string_view::npos) {
    out.path = std::string(rest.substr(authority_end));
  }

  // userinfo@ prefix
  std::size_t at = authority.rfind('@');
  if (at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  if (authority.empty()) return std::nullopt;

  // host[:port]; tolerate bracketed IPv6
  std::string_view hostpart = authority;
  if (hostpart.front() == '[') {
    std::size_t close = hostpart.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    out.host = lower(hostpart.substr(1, close - 1));
    hostpart = hostpart.substr(close + 1);
    if (!hostpart.empty()) {
      if (hostpart.front() != ':') return std::nullopt;
      hostpart = hostpart.substr(1);
    }
  } else {
    std::size_t port_colon = hostpart.rfind(':');
    if (port_colon != std::string_view::npos) {
      out.host = lower(hostpart.substr(0, port_colon));
      hostpart = hostpart.substr(port_colon + 1);
    } else {
      out.host = lower(hostpart);
      hostpart = {};
    }
  }
  if (out.host.empty()) return std::nullopt;

  if (!hostpart.empty()) {
    int port = 0;
    for (char c : hostpart) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      port = port * 10 + (c - '0');
      if (port > 65535) return std::nullopt;
    }
    out.port = port;
  }
  return out;
}

std::optional<std::string> url_host(std::string_view url) {
  auto parsed = parse_absolute_url(url);
  if (!parsed) return std::nullopt;
  return parsed->host;
}

}  // namespace nativqa

#include "nativqa/log.hpp"

#include <iostream>
#include <memory>
#include <mutex>
#include <vector>

namespace nativqa {

namespace {

std::mutex g_mutex;
WarnHandler g_handler;

}  // namespace

void warn(const std::string& message) {
  WarnHandler handler;
  {
    std::lock_guard<std::mutex> lock(g_mutex);
    handler = g_handler;
  }
  if (handler) {
    handler(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

WarnHandler set_warn_handler(WarnHandler handler) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::swap(g_handler, handler);
  return handler;
}

WarnCapture::WarnCapture()
    : messages_(std::make_shared<std::vector<std::string>>()) {
  auto sink = messages_;
  previous_ = set_warn_handler(
      [sink](const std::string& m) { sink->push_back(m); });
}

WarnCapture::~WarnCapture() { set_warn_handler(previous_); }

}  // namespace nativqa

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nativqa {

// Non-fatal diagnostics (skipped rows, evicted cache entries, ...).
// Default handler writes "warning: ..." to stderr; tests swap it out.
using WarnHandler = std::function<void(const std::string&)>;

void warn(const std::string& message);
WarnHandler set_warn_handler(WarnHandler handler);

// RAII scope that captures warnings into a vector, for tests.
class WarnCapture {
 public:
  WarnCapture();
  ~WarnCapture();
  WarnCapture(const WarnCapture&) = delete;
  WarnCapture& operator=(const WarnCapture&) = delete;

  const std::vector<std::string>& messages() const { return *messages_; }

 private:
  std::shared_ptr<std::vector<std::string>> messages_;
  WarnHandler previous_;
};

}  // namespace nativqa

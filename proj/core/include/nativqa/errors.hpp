#pragma once

#include <stdexcept>
#include <string>

namespace nativqa {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad flags, missing files, invalid ratios and the like. CLI maps these to exit 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem / stream failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (CSV rows, JSONL lines, env files). Messages carry line numbers.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Search backend failure. retriable() drives the retry policy:
// transport errors and 408/429/5xx are retried, auth failures are not.
class EngineError : public Error {
 public:
  EngineError(const std::string& what, int status, std::string body_excerpt,
              bool retriable)
      : Error(what),
        status_(status),
        body_excerpt_(std::move(body_excerpt)),
        retriable_(retriable) {}

  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_excerpt_; }
  bool retriable() const { return retriable_; }

 private:
  int status_;
  std::string body_excerpt_;
  bool retriable_;
};

// Quota exhausted. Terminal: retrying would only burn more budget.
class QuotaError : public EngineError {
 public:
  QuotaError(const std::string& what, int status, std::string body_excerpt)
      : EngineError(what, status, std::move(body_excerpt), /*retriable=*/false) {}
};

// Backend answered but the payload does not match the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::string raw_payload)
      : Error(what), raw_payload_(std::move(raw_payload)) {}

  const std::string& raw_payload() const { return raw_payload_; }

 private:
  std::string raw_payload_;
};

// LLM completion backend failure.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool retriable = true)
      : Error(what), retriable_(retriable) {}

  bool retriable() const { return retriable_; }

 private:
  bool retriable_;
};

}  // namespace nativqa

#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nativqa/env_file.hpp"
#include "nativqa/retry.hpp"

namespace nativqa {

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------

// A prompt asset: text with {placeholder} slots and a version pulled from a
// leading "# version:" comment. Built-in defaults ship with the library;
// a prompt directory can override them file by file.
struct PromptTemplate {
  std::string name;
  std::string text;
  std::string version;

  std::string render(const std::map<std::string, std::string>& values) const;
};

struct PromptSet {
  PromptTemplate seed_generation;
  PromptTemplate question_validation;
  PromptTemplate answer_editing;
  PromptTemplate location_relevance;
};

// Built-in templates, or the override files found in `dir`
// (seed_generation.txt etc.). Missing files fall back to the defaults.
PromptSet default_prompts();
PromptSet load_prompts(const std::filesystem::path& dir);

// Parses "# version: N" headers and strips comment lines.
PromptTemplate parse_prompt(std::string name, const std::string& raw);

// ---------------------------------------------------------------------------
// Completion backends
// ---------------------------------------------------------------------------

struct CompletionRequest {
  std::string prompt;
  // Structured context alongside the rendered prompt (task kind, topic,
  // location, count, ...). The HTTP backend ignores it; the stub keys off it.
  std::map<std::string, std::string> params;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

// Deterministic offline backend. In scripted mode it replays queued
// responses; otherwise it synthesizes a plausible reply from request.params
// (numbered query lines for seed generation, well-formed JSON for the
// annotation tasks).
class StubCompletionBackend : public CompletionBackend {
 public:
  StubCompletionBackend() = default;

  std::string id() const override { return "stub"; }
  std::string complete(const CompletionRequest& request) override;

  void enqueue(std::string response);
  std::size_t calls() const { return calls_; }

 private:
  std::deque<std::string> scripted_;
  std::size_t calls_ = 0;
  std::mutex mutex_;
};

// OpenAI-style chat-completions client. Env keys: LLM_API_URL (endpoint,
// e.g. https://api.example.com/v1/chat/completions), LLM_API_KEY, LLM_MODEL.
// Retries transport/5xx failures per the shared engine policy.
class HttpCompletionBackend : public CompletionBackend {
 public:
  struct Config {
    std::string api_url;
    std::string api_key;
    std::string model;
    RetryPolicy retry;
    Sleeper sleeper;  // defaults to real sleep
  };

  explicit HttpCompletionBackend(Config config);
  static HttpCompletionBackend from_env(const EnvFile& env);

  std::string id() const override { return "http:" + config_.model; }
  std::string complete(const CompletionRequest& request) override;

 private:
  Config config_;
};

// Strips leading enumeration markers ("1. ", "2) ", "- ", "* ") from each
// line, drops blanks, returns at most max_lines lines.
std::vector<std::string> completion_lines(const std::string& completion,
                                          std::size_t max_lines);

// Extracts and parses the first {...} JSON object found in a completion.
// Returns nullopt when there is none or it does not parse.
std::optional<std::string> extract_json_object(const std::string& completion);

}  // namespace nativqa

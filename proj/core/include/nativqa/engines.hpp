#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nativqa/env_file.hpp"

namespace nativqa {

enum class SearchType { Text, Images };

std::string to_string(SearchType type);
SearchType search_type_from_string(const std::string& name);

struct SearchRequest {
  std::string engine;
  SearchType search_type = SearchType::Text;
  std::string query;
  std::string location;
  std::string country_code;  // two lowercase letters
  std::string language;

  // Throws ConfigError when the request violates its invariants.
  void validate() const;
};

// One entry of the engine's related-question panel.
struct QaItem {
  std::string question;
  std::string answer;
  std::string source_url;
  std::string source_title;
};

struct ImageItem {
  std::string image_url;
  std::string source_page_url;
  std::string title;
};

struct SearchResponse {
  SearchRequest request;
  std::vector<QaItem> qa_items;
  std::vector<std::string> related_queries;
  std::vector<ImageItem> image_items;
  std::string raw_payload;
  std::string fetched_at;  // ISO-8601 UTC
  std::size_t dropped_incomplete = 0;

  nlohmann::json to_json() const;
  static SearchResponse from_json(const nlohmann::json& j);
};

class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual std::string id() const = 0;
  // Performs one engine call for the request. Implementations must be safe
  // to invoke from concurrent tasks.
  virtual SearchResponse fetch(const SearchRequest& request) = 0;
};

// The two harvesting primitives plus image search, as thin guards over
// SearchBackend::fetch. extract_related_queries shares the same fetch as
// extract_qa when the engine returns both surfaces in one payload; callers
// that already hold a SearchResponse should read .related_queries directly
// instead of fetching twice.
SearchResponse extract_qa(SearchBackend& backend, const SearchRequest& request);
std::vector<std::string> extract_related_queries(SearchBackend& backend,
                                                 const SearchRequest& request);
SearchResponse image_search(SearchBackend& backend,
                            const SearchRequest& request);

// Applied by every backend after parsing: enforces the per-type emptiness
// rules and drops qa_items missing a question, answer or source link,
// counting them in dropped_incomplete.
void finalize_response(SearchResponse& response);

// Deterministic offline backend reading a JSON fixture that maps each exact
// query string to its surfaces:
//
//   {
//     "_fetched_at": "2025-01-01T00:00:00Z",
//     "visit Baladna Farm in Qatar": {
//       "qa": [{"question": "...", "answer": "...", "source_url": "...",
//               "source_title": "..."}],
//       "related": ["..."],
//       "images": [{"image_url": "...", "source_page_url": "...",
//                   "title": "..."}]
//     }
//   }
//
// Keys starting with "_" are metadata. Unknown queries yield an empty
// response. Identical requests yield byte-identical responses.
class MockEngine : public SearchBackend {
 public:
  explicit MockEngine(const std::filesystem::path& fixture_path);
  explicit MockEngine(const nlohmann::json& fixture);

  std::string id() const override { return "mock"; }
  SearchResponse fetch(const SearchRequest& request) override;

  // Number of fetch() calls since construction; cache tests count these.
  std::size_t calls() const { return calls_.load(); }

 private:
  nlohmann::json fixture_;
  std::string fetched_at_;
  std::atomic<std::size_t> calls_{0};
};

// Maps an engine id to a backend. "mock" loads the fixture from
// `fixture_path` or the NATIVQA_MOCK_FIXTURE environment variable; anything
// else becomes a SERP-API-style HTTP client configured from the env file.
std::unique_ptr<SearchBackend> make_backend(
    const std::string& engine_id, const EnvFile& env,
    const std::filesystem::path& fixture_path = {});

}  // namespace nativqa

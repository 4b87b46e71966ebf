#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "nativqa/engines.hpp"

namespace nativqa {

// Persistent request-keyed store for search responses. One JSON file per
// entry under a 2-char fan-out tree:
//
//   <root>/ab/abcdef...0123.json
//
// The key digests the canonical serialization of the request, with the query
// canonicalized first, so re-punctuated queries share an entry. Writes go
// through a temp file plus rename, so a concurrent writer of the same key
// never leaves a torn file. Errors are never stored: only successful
// SearchResponses reach put().
class ResponseCache {
 public:
  struct Stats {
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t puts = 0;
    std::size_t evictions = 0;
    std::size_t expired = 0;
  };

  explicit ResponseCache(
      std::filesystem::path root,
      std::optional<std::chrono::seconds> max_age = std::nullopt);

  // 64-hex digest of (country_code, engine, language, location,
  // canonical query, search_type), serialized with sorted keys.
  static std::string key_for(const SearchRequest& request);

  // Stored response on key match; nullopt on miss. A corrupt entry is
  // evicted with a warning and reported as a miss. Entries older than
  // max_age (when set) count as expired misses.
  std::optional<SearchResponse> get(const SearchRequest& request);

  // Durable once returned; overwrites any existing entry for the key.
  void put(const SearchRequest& request, const SearchResponse& response);

  Stats stats() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const;

  std::filesystem::path root_;
  std::optional<std::chrono::seconds> max_age_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
  std::atomic<std::size_t> puts_{0};
  std::atomic<std::size_t> evictions_{0};
  std::atomic<std::size_t> expired_{0};
};

}  // namespace nativqa

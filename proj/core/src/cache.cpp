#include "nativqa/cache.hpp"

#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nativqa/errors.hpp"
#include "nativqa/log.hpp"
#include "nativqa/sha256.hpp"
#include "nativqa/text.hpp"

namespace nativqa {

ResponseCache::ResponseCache(std::filesystem::path root,
                             std::optional<std::chrono::seconds> max_age)
    : root_(std::move(root)), max_age_(max_age) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) {
    throw IoError("cannot create cache directory " + root_.string() + ": " +
                  ec.message());
  }
}

std::string ResponseCache::key_for(const SearchRequest& request) {
  // nlohmann's default object is sorted by key, which is exactly the
  // canonical serialization the key contract asks for.
  nlohmann::json j;
  j["country_code"] = request.country_code;
  j["engine"] = request.engine;
  j["language"] = request.language;
  j["location"] = request.location;
  j["query"] = canonicalize(request.query).value;
  j["search_type"] = to_string(request.search_type);
  return sha256_hex(j.dump());
}

std::filesystem::path ResponseCache::entry_path(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".json");
}

std::optional<SearchResponse> ResponseCache::get(const SearchRequest& request) {
  std::string key = key_for(request);
  auto path = entry_path(key);
  std::ifstream in(path);
  if (!in) {
    misses_.fetch_add(1);
    return std::nullopt;
  }

  auto evict = [&](const std::string& reason) {
    warn("cache entry " + path.string() + " " + reason + ", evicting");
    std::error_code ec;
    std::filesystem::remove(path, ec);
    evictions_.fetch_add(1);
    misses_.fetch_add(1);
  };

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    evict("is not valid JSON");
    return std::nullopt;
  }

  SearchResponse response;
  std::int64_t stored_at = 0;
  try {
    if (j.at("key").get<std::string>() != key) {
      evict("has a mismatched key");
      return std::nullopt;
    }
    stored_at = j.at("stored_at_unix").get<std::int64_t>();
    response = SearchResponse::from_json(j.at("response"));
  } catch (const std::exception&) {
    evict("does not match the entry schema");
    return std::nullopt;
  }

  if (max_age_) {
    auto age = std::time(nullptr) - static_cast<std::time_t>(stored_at);
    if (age > max_age_->count()) {
      expired_.fetch_add(1);
      misses_.fetch_add(1);
      return std::nullopt;
    }
  }

  // The stored response keeps its original request (raw query included);
  // surface it under the request we were asked about.
  response.request = request;
  hits_.fetch_add(1);
  return response;
}

void ResponseCache::put(const SearchRequest& request,
                        const SearchResponse& response) {
  std::string key = key_for(request);
  auto path = entry_path(key);

  nlohmann::json j;
  j["key"] = key;
  j["stored_at_unix"] = static_cast<std::int64_t>(std::time(nullptr));
  j["engine_version"] = request.engine;
  j["request"] = {{"engine", request.engine},
                  {"search_type", to_string(request.search_type)},
                  {"query", request.query},
                  {"location", request.location},
                  {"country_code", request.country_code},
                  {"language", request.language}};
  j["response"] = response.to_json();

  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) {
    throw IoError("cannot create cache fan-out directory " +
                  path.parent_path().string() + ": " + ec.message());
  }

  // Unique temp name per writer, then rename into place.
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream tmp_name;
  tmp_name << "." << key << "." << std::random_device{}() << "."
           << counter.fetch_add(1) << ".tmp";
  auto tmp_path = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp_path);
    if (!out) {
      throw IoError("cannot write cache entry: " + tmp_path.string());
    }
    out << j.dump() << '\n';
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp_path, ec);
      throw IoError("short write on cache entry: " + tmp_path.string());
    }
  }
  std::filesystem::rename(tmp_path, path, ec);
  if (ec) {
    std::filesystem::remove(tmp_path, ec);
    throw IoError("cannot install cache entry " + path.string() + ": " +
                  ec.message());
  }
  puts_.fetch_add(1);
}

ResponseCache::Stats ResponseCache::stats() const {
  Stats s;
  s.hits = hits_.load();
  s.misses = misses_.load();
  s.puts = puts_.load();
  s.evictions = evictions_.load();
  s.expired = expired_.load();
  return s;
}

}  // namespace nativqa

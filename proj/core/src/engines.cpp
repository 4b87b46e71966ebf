#include "nativqa/engines.hpp"

#include <cstdlib>
#include <fstream>

#include "nativqa/errors.hpp"
#include "nativqa/serp_engine.hpp"

namespace nativqa {

std::string to_string(SearchType type) {
  return type == SearchType::Text ? "text" : "images";
}

SearchType search_type_from_string(const std::string& name) {
  if (name == "text") {
    return SearchType::Text;
  }
  if (name == "images") {
    return SearchType::Images;
  }
  throw ConfigError("unknown search_type: '" + name +
                    "' (expected text or images)");
}

void SearchRequest::validate() const {
  if (query.empty()) {
    throw ConfigError("search request has an empty query");
  }
  if (country_code.size() != 2 ||
      country_code[0] < 'a' || country_code[0] > 'z' ||
      country_code[1] < 'a' || country_code[1] > 'z') {
    throw ConfigError("country_code must be two lowercase letters, got '" +
                      country_code + "'");
  }
}

nlohmann::json SearchResponse::to_json() const {
  nlohmann::json j;
  j["request"] = {{"engine", request.engine},
                  {"search_type", to_string(request.search_type)},
                  {"query", request.query},
                  {"location", request.location},
                  {"country_code", request.country_code},
                  {"language", request.language}};
  j["qa_items"] = nlohmann::json::array();
  for (const auto& item : qa_items) {
    j["qa_items"].push_back({{"question", item.question},
                             {"answer", item.answer},
                             {"source_url", item.source_url},
                             {"source_title", item.source_title}});
  }
  j["related_queries"] = related_queries;
  j["image_items"] = nlohmann::json::array();
  for (const auto& item : image_items) {
    j["image_items"].push_back({{"image_url", item.image_url},
                                {"source_page_url", item.source_page_url},
                                {"title", item.title}});
  }
  j["raw_payload"] = raw_payload;
  j["fetched_at"] = fetched_at;
  j["dropped_incomplete"] = dropped_incomplete;
  return j;
}

SearchResponse SearchResponse::from_json(const nlohmann::json& j) {
  SearchResponse r;
  const auto& req = j.at("request");
  r.request.engine = req.value("engine", "");
  r.request.search_type =
      search_type_from_string(req.value("search_type", "text"));
  r.request.query = req.at("query").get<std::string>();
  r.request.location = req.value("location", "");
  r.request.country_code = req.value("country_code", "");
  r.request.language = req.value("language", "");
  for (const auto& item : j.at("qa_items")) {
    r.qa_items.push_back({item.value("question", ""), item.value("answer", ""),
                          item.value("source_url", ""),
                          item.value("source_title", "")});
  }
  r.related_queries = j.at("related_queries").get<std::vector<std::string>>();
  for (const auto& item : j.at("image_items")) {
    r.image_items.push_back({item.value("image_url", ""),
                             item.value("source_page_url", ""),
                             item.value("title", "")});
  }
  r.raw_payload = j.value("raw_payload", "");
  r.fetched_at = j.value("fetched_at", "");
  r.dropped_incomplete = j.value("dropped_incomplete", std::size_t{0});
  return r;
}

void finalize_response(SearchResponse& response) {
  if (response.request.search_type == SearchType::Text) {
    response.image_items.clear();
  } else {
    response.qa_items.clear();
    response.related_queries.clear();
  }
  std::vector<QaItem> kept;
  kept.reserve(response.qa_items.size());
  for (auto& item : response.qa_items) {
    if (item.question.empty() || item.answer.empty() ||
        item.source_url.empty()) {
      ++response.dropped_incomplete;
      continue;
    }
    kept.push_back(std::move(item));
  }
  response.qa_items = std::move(kept);
}

SearchResponse extract_qa(SearchBackend& backend,
                          const SearchRequest& request) {
  request.validate();
  if (request.search_type != SearchType::Text) {
    throw ConfigError("extract_qa requires search_type=text");
  }
  return backend.fetch(request);
}

std::vector<std::string> extract_related_queries(SearchBackend& backend,
                                                 const SearchRequest& request) {
  return extract_qa(backend, request).related_queries;
}

SearchResponse image_search(SearchBackend& backend,
                            const SearchRequest& request) {
  request.validate();
  if (request.search_type != SearchType::Images) {
    throw ConfigError("image_search requires search_type=images");
  }
  return backend.fetch(request);
}

// ---------------------------------------------------------------------------
// MockEngine
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kDefaultMockFetchedAt = "2025-01-01T00:00:00Z";

nlohmann::json load_fixture_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open mock fixture: " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("mock fixture " + path.string() +
                     " is not valid JSON: " + e.what());
  }
}

}  // namespace

MockEngine::MockEngine(const std::filesystem::path& fixture_path)
    : MockEngine(load_fixture_file(fixture_path)) {}

MockEngine::MockEngine(const nlohmann::json& fixture) : fixture_(fixture) {
  if (!fixture_.is_object()) {
    throw ParseError("mock fixture must be a JSON object keyed by query");
  }
  fetched_at_ = fixture_.value("_fetched_at", kDefaultMockFetchedAt);
}

SearchResponse MockEngine::fetch(const SearchRequest& request) {
  calls_.fetch_add(1);
  SearchResponse response;
  response.request = request;
  response.fetched_at = fetched_at_;

  auto it = fixture_.find(request.query);
  if (it == fixture_.end() || request.query.rfind('_', 0) == 0) {
    response.raw_payload = "{}";
    finalize_response(response);
    return response;
  }
  const nlohmann::json& entry = *it;
  response.raw_payload = entry.dump();
  if (entry.contains("qa")) {
    for (const auto& item : entry.at("qa")) {
      response.qa_items.push_back(
          {item.value("question", ""), item.value("answer", ""),
           item.value("source_url", ""), item.value("source_title", "")});
    }
  }
  if (entry.contains("related")) {
    response.related_queries =
        entry.at("related").get<std::vector<std::string>>();
  }
  if (entry.contains("images")) {
    for (const auto& item : entry.at("images")) {
      response.image_items.push_back({item.value("image_url", ""),
                                      item.value("source_page_url", ""),
                                      item.value("title", "")});
    }
  }
  finalize_response(response);
  return response;
}

std::unique_ptr<SearchBackend> make_backend(
    const std::string& engine_id, const EnvFile& env,
    const std::filesystem::path& fixture_path) {
  if (engine_id == "mock") {
    std::filesystem::path path = fixture_path;
    if (path.empty()) {
      if (const char* from_env = std::getenv("NATIVQA_MOCK_FIXTURE")) {
        path = from_env;
      }
    }
    if (path.empty()) {
      if (auto from_file = env.get("NATIVQA_MOCK_FIXTURE")) {
        path = *from_file;
      }
    }
    if (path.empty()) {
      throw ConfigError(
          "mock engine needs a fixture: pass --fixture or set "
          "NATIVQA_MOCK_FIXTURE");
    }
    return std::make_unique<MockEngine>(path);
  }
  return std::make_unique<SerpEngine>(SerpEngine::config_from_env(env, engine_id));
}

}  // namespace nativqa

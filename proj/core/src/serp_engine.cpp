#include "nativqa/serp_engine.hpp"

#include <algorithm>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nativqa/errors.hpp"
#include "nativqa/types.hpp"
#include "nativqa/url.hpp"

namespace nativqa {

namespace {

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  if (body.size() <= kMax) {
    return body;
  }
  return body.substr(0, kMax) + "...";
}

bool mentions_quota(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower.find("quota") != std::string::npos ||
         lower.find("run out of searches") != std::string::npos ||
         lower.find("plan limit") != std::string::npos;
}

}  // namespace

SerpEngine::Config SerpEngine::config_from_env(const EnvFile& env,
                                               std::string engine) {
  Config c;
  c.base_url = env.require("SERPAPI_URL");
  c.api_key = env.require("SERPAPI_KEY");
  c.engine = std::move(engine);
  return c;
}

SerpEngine::SerpEngine(Config config)
    : config_(std::move(config)),
      limiter_(config_.requests_per_second > 0 ? config_.requests_per_second
                                               : 1.0) {
  if (config_.base_url.empty()) {
    throw ConfigError("search backend needs a base URL (SERPAPI_URL)");
  }
  if (!config_.sleeper) {
    config_.sleeper = real_sleeper();
  }
}

std::string SerpEngine::fetch_body(const SearchRequest& request) {
  auto parsed = parse_absolute_url(config_.base_url);
  if (!parsed) {
    throw ConfigError("SERPAPI_URL is not an absolute URL: " +
                      config_.base_url);
  }
  std::string origin = parsed->scheme + "://" + parsed->host;
  if (parsed->port) {
    origin += ":" + std::to_string(parsed->port);
  }
  std::string path = parsed->path.empty() ? "/search.json" : parsed->path;

  httplib::Params params;
  params.emplace("engine", config_.engine);
  params.emplace("q", request.query);
  params.emplace("location", request.location);
  params.emplace("gl", request.country_code);
  params.emplace("hl", request.language);
  if (request.search_type == SearchType::Images) {
    params.emplace("tbm", "isch");
  }
  if (!config_.api_key.empty()) {
    params.emplace("api_key", config_.api_key);
  }
  std::string url = path + "?" + httplib::detail::params_to_query_str(params);

  auto attempt = [&]() -> std::string {
    limiter_.acquire();
    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    auto res = client.Get(url);
    if (!res) {
      throw EngineError("search request transport failure: " +
                            httplib::to_string(res.error()),
                        /*status=*/0, "", /*retriable=*/true);
    }
    int status = res->status;
    if (status >= 200 && status < 300) {
      return res->body;
    }
    if (status == 402 || mentions_quota(res->body)) {
      throw QuotaError("search quota exhausted (status " +
                           std::to_string(status) + ")",
                       status, excerpt(res->body));
    }
    bool retriable = status == 408 || status == 429 || status >= 500;
    throw EngineError("search request failed with status " +
                          std::to_string(status),
                      status, excerpt(res->body), retriable);
  };

  return retry_with_backoff(
      attempt, config_.retry,
      [](const std::exception& e) {
        auto* ee = dynamic_cast<const EngineError*>(&e);
        return ee != nullptr && ee->retriable();
      },
      config_.sleeper);
}

SearchResponse SerpEngine::parse_payload(const SearchRequest& request,
                                         const std::string& body,
                                         const std::string& fetched_at) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("search payload is not valid JSON: ") +
                          e.what(),
                      body);
  }
  if (!j.is_object()) {
    throw SchemaError("search payload is not a JSON object", body);
  }
  if (j.contains("error") && j.at("error").is_string()) {
    std::string message = j.at("error").get<std::string>();
    if (mentions_quota(message)) {
      throw QuotaError("search quota exhausted: " + message, 200,
                       excerpt(body));
    }
    throw EngineError("search backend reported: " + message, 200,
                      excerpt(body), /*retriable=*/false);
  }

  SearchResponse response;
  response.request = request;
  response.raw_payload = body;
  response.fetched_at = fetched_at;

  if (j.contains("related_questions") && j.at("related_questions").is_array()) {
    for (const auto& item : j.at("related_questions")) {
      QaItem qa;
      qa.question = item.value("question", "");
      qa.answer = item.value("snippet", "");
      if (qa.answer.empty()) {
        qa.answer = item.value("answer", "");
      }
      qa.source_url = item.value("link", "");
      qa.source_title = item.value("title", "");
      response.qa_items.push_back(std::move(qa));
    }
  }
  if (j.contains("related_searches") && j.at("related_searches").is_array()) {
    for (const auto& item : j.at("related_searches")) {
      if (item.is_string()) {
        response.related_queries.push_back(item.get<std::string>());
      } else if (item.is_object() && item.contains("query")) {
        response.related_queries.push_back(
            item.at("query").get<std::string>());
      }
    }
  }
  if (j.contains("images_results") && j.at("images_results").is_array()) {
    for (const auto& item : j.at("images_results")) {
      ImageItem img;
      img.image_url = item.value("original", "");
      if (img.image_url.empty()) {
        img.image_url = item.value("thumbnail", "");
      }
      img.source_page_url = item.value("link", "");
      img.title = item.value("title", "");
      if (!img.image_url.empty()) {
        response.image_items.push_back(std::move(img));
      }
    }
  }

  finalize_response(response);
  return response;
}

SearchResponse SerpEngine::fetch(const SearchRequest& request) {
  std::string body = fetch_body(request);
  return parse_payload(request, body, iso_utc_now());
}

}  // namespace nativqa

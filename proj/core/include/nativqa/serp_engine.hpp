#pragma once

#include <string>

#include "nativqa/engines.hpp"
#include "nativqa/rate_limit.hpp"
#include "nativqa/retry.hpp"

namespace nativqa {

// HTTP client for SERP-API-style services: one GET per search, JSON payloads
// with `related_questions`, `related_searches` and `images_results` blocks.
// The concrete engine (google, bing, ...) is passed through as a request
// parameter, so one deployment key can serve several engines.
class SerpEngine : public SearchBackend {
 public:
  struct Config {
    std::string base_url;  // e.g. https://serpapi.com/search.json
    std::string api_key;
    std::string engine = "google";
    double requests_per_second = 1.0;
    RetryPolicy retry;
    Sleeper sleeper;  // defaults to real sleep
  };

  // Reads SERPAPI_URL and SERPAPI_KEY from the env file.
  static Config config_from_env(const EnvFile& env, std::string engine);

  explicit SerpEngine(Config config);

  std::string id() const override { return "serp:" + config_.engine; }
  SearchResponse fetch(const SearchRequest& request) override;

  // Parsing is exposed separately so payload handling is testable without a
  // server. Throws SchemaError when the payload is not a JSON object.
  static SearchResponse parse_payload(const SearchRequest& request,
                                      const std::string& body,
                                      const std::string& fetched_at);

 private:
  std::string fetch_body(const SearchRequest& request);

  Config config_;
  TokenBucket limiter_;
};

}  // namespace nativqa

#include <doctest.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nativqa/engines.hpp"
#include "nativqa/errors.hpp"
#include "nativqa/serp_engine.hpp"

using namespace nativqa;

namespace {

SearchRequest text_request(const std::string& query) {
  SearchRequest r;
  r.engine = "mock";
  r.search_type = SearchType::Text;
  r.query = query;
  r.location = "Doha, Qatar";
  r.country_code = "qa";
  r.language = "en";
  return r;
}

nlohmann::json small_fixture() {
  return nlohmann::json::parse(R"({
    "_fetched_at": "2025-06-01T12:00:00Z",
    "visit Baladna Farm in Qatar": {
      "qa": [
        {"question": "Is Baladna farm free?",
         "answer": "Entry to the park is free.",
         "source_url": "https://www.baladna.com/visit",
         "source_title": "Visit Baladna"},
        {"question": "incomplete one", "answer": "",
         "source_url": "https://x.example.com"}
      ],
      "related": ["baladna farm opening hours"],
      "images": [{"image_url": "https://img.example.com/1.jpg",
                  "source_page_url": "https://www.baladna.com",
                  "title": "farm"}]
    }
  })");
}

}  // namespace

TEST_CASE("SearchRequest validate enforces query and country code shape") {
  CHECK_NOTHROW(text_request("q").validate());
  SearchRequest empty_query = text_request("");
  CHECK_THROWS_AS(empty_query.validate(), ConfigError);
  SearchRequest bad_cc = text_request("q");
  bad_cc.country_code = "QAT";
  CHECK_THROWS_AS(bad_cc.validate(), ConfigError);
}

TEST_CASE("search_type strings round trip") {
  CHECK(search_type_from_string("text") == SearchType::Text);
  CHECK(search_type_from_string("images") == SearchType::Images);
  CHECK(to_string(SearchType::Images) == "images");
  CHECK_THROWS_AS(search_type_from_string("video"), ConfigError);
}

TEST_CASE("finalize_response drops incomplete qa items and counts them") {
  SearchResponse r;
  r.request = text_request("q");
  r.qa_items = {
      {"good q", "good a", "https://ok.example.com", "t"},
      {"", "a", "https://x.example.com", ""},
      {"q", "", "https://x.example.com", ""},
      {"q", "a", "", ""},
  };
  finalize_response(r);
  REQUIRE(r.qa_items.size() == 1);
  CHECK(r.qa_items[0].question == "good q");
  CHECK(r.dropped_incomplete == 3);
}

TEST_CASE("finalize_response clears the off-type surfaces") {
  SearchResponse text;
  text.request = text_request("q");
  text.image_items = {{"https://i.example.com/a.jpg", "https://p.example.com", "t"}};
  finalize_response(text);
  CHECK(text.image_items.empty());

  SearchResponse images;
  images.request = text_request("q");
  images.request.search_type = SearchType::Images;
  images.qa_items = {{"q", "a", "https://s.example.com", ""}};
  images.related_queries = {"leftover"};
  images.image_items = {{"https://i.example.com/a.jpg", "", ""}};
  finalize_response(images);
  CHECK(images.qa_items.empty());
  CHECK(images.related_queries.empty());
  CHECK(images.image_items.size() == 1);
}

TEST_CASE("MockEngine returns the fixture surfaces for a known query") {
  MockEngine engine(small_fixture());
  auto response = extract_qa(engine, text_request("visit Baladna Farm in Qatar"));
  REQUIRE(response.qa_items.size() == 1);
  CHECK(response.qa_items[0].question == "Is Baladna farm free?");
  CHECK(response.dropped_incomplete == 1);
  CHECK(response.related_queries ==
        std::vector<std::string>{"baladna farm opening hours"});
  CHECK(response.image_items.empty());
  CHECK(response.fetched_at == "2025-06-01T12:00:00Z");
  CHECK(engine.calls() == 1);
}

TEST_CASE("MockEngine yields an empty response for unknown queries") {
  MockEngine engine(small_fixture());
  auto response = extract_qa(engine, text_request("never seen"));
  CHECK(response.qa_items.empty());
  CHECK(response.related_queries.empty());
}

TEST_CASE("MockEngine answers image requests with the images surface") {
  MockEngine engine(small_fixture());
  SearchRequest req = text_request("visit Baladna Farm in Qatar");
  req.search_type = SearchType::Images;
  auto response = image_search(engine, req);
  REQUIRE(response.image_items.size() == 1);
  CHECK(response.image_items[0].image_url == "https://img.example.com/1.jpg");
  CHECK(response.qa_items.empty());
}

TEST_CASE("MockEngine is a pure function of the request") {
  MockEngine engine(small_fixture());
  SearchRequest req = text_request("visit Baladna Farm in Qatar");
  auto a = engine.fetch(req);
  auto b = engine.fetch(req);
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(engine.calls() == 2);
}

TEST_CASE("MockEngine qa strings appear verbatim in the raw payload") {
  MockEngine engine(small_fixture());
  auto response = engine.fetch(text_request("visit Baladna Farm in Qatar"));
  for (const auto& item : response.qa_items) {
    CHECK(response.raw_payload.find(item.question) != std::string::npos);
    CHECK(response.raw_payload.find(item.answer) != std::string::npos);
    CHECK(response.raw_payload.find(item.source_url) != std::string::npos);
  }
}

TEST_CASE("the qa extraction guards reject the wrong search type") {
  MockEngine engine(small_fixture());
  SearchRequest images = text_request("q");
  images.search_type = SearchType::Images;
  CHECK_THROWS_AS(extract_qa(engine, images), ConfigError);

  SearchRequest text = text_request("q");
  CHECK_THROWS_AS(image_search(engine, text), ConfigError);
}

TEST_CASE("SearchResponse json round trip") {
  MockEngine engine(small_fixture());
  auto response = engine.fetch(text_request("visit Baladna Farm in Qatar"));
  auto back = SearchResponse::from_json(response.to_json());
  CHECK(back.to_json().dump() == response.to_json().dump());
  CHECK(back.request.query == response.request.query);
  CHECK(back.fetched_at == response.fetched_at);
}

TEST_CASE("serp payload parsing maps the related-questions panel") {
  std::string body = R"({
    "related_questions": [
      {"question": "Is Baladna farm free?",
       "snippet": "Entry is free.",
       "link": "https://www.baladna.com/visit",
       "title": "Visit Baladna"}
    ],
    "related_searches": [
      {"query": "baladna farm opening hours"},
      "best farms in qatar"
    ]
  })";
  auto response = SerpEngine::parse_payload(text_request("visit baladna"),
                                            body, "2025-01-01T00:00:00Z");
  REQUIRE(response.qa_items.size() == 1);
  CHECK(response.qa_items[0].answer == "Entry is free.");
  CHECK(response.qa_items[0].source_url == "https://www.baladna.com/visit");
  CHECK(response.related_queries ==
        std::vector<std::string>{"baladna farm opening hours",
                                 "best farms in qatar"});
}

TEST_CASE("serp payload parsing maps image results") {
  SearchRequest req = text_request("qatari dress");
  req.search_type = SearchType::Images;
  std::string body = R"({
    "images_results": [
      {"original": "https://img.example.com/a.jpg",
       "link": "https://page.example.com",
       "title": "thobe"}
    ]
  })";
  auto response = SerpEngine::parse_payload(req, body, "2025-01-01T00:00:00Z");
  REQUIRE(response.image_items.size() == 1);
  CHECK(response.image_items[0].image_url == "https://img.example.com/a.jpg");
  CHECK(response.image_items[0].source_page_url == "https://page.example.com");
}

TEST_CASE("serp payload errors map to the error taxonomy") {
  auto req = text_request("q");
  CHECK_THROWS_AS(SerpEngine::parse_payload(req, "not json at all", "t"),
                  SchemaError);
  CHECK_THROWS_AS(SerpEngine::parse_payload(req, "[1,2,3]", "t"), SchemaError);

  auto quota = nlohmann::json{{"error", "You have run out of searches."}}.dump();
  CHECK_THROWS_AS(SerpEngine::parse_payload(req, quota, "t"), QuotaError);

  auto other = nlohmann::json{{"error", "Unsupported location."}}.dump();
  CHECK_THROWS_AS(SerpEngine::parse_payload(req, other, "t"), EngineError);
}

TEST_CASE("make_backend selects mock and serp backends") {
  EnvFile env;
  // Mock with an explicit fixture file is exercised in the harvest tests;
  // here the serp path must demand credentials.
  CHECK_THROWS_AS(make_backend("google", env), ConfigError);

  env.set("SERPAPI_URL", "https://serpapi.example.com/search.json");
  env.set("SERPAPI_KEY", "k");
  auto backend = make_backend("google", env);
  CHECK(backend->id() == "serp:google");
}

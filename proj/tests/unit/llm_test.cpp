#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nativqa/errors.hpp"
#include "nativqa/llm.hpp"

using namespace nativqa;
namespace fs = std::filesystem;

TEST_CASE("PromptTemplate render substitutes every placeholder occurrence") {
  PromptTemplate t{"demo", "List {count} queries about {topic} in {topic}.",
                   "1"};
  std::string out =
      t.render({{"count", "5"}, {"topic", "food"}, {"unused", "x"}});
  CHECK(out == "List 5 queries about food in food.");
}

TEST_CASE("PromptTemplate render leaves unknown placeholders untouched") {
  PromptTemplate t{"demo", "Hello {name}", "1"};
  CHECK(t.render({}) == "Hello {name}");
}

TEST_CASE("parse_prompt pulls the version header and strips comments") {
  PromptTemplate t = parse_prompt("seed_generation",
                                  "# version: 3\n"
                                  "# generator prompt\n"
                                  "List {count} queries.\n");
  CHECK(t.name == "seed_generation");
  CHECK(t.version == "3");
  CHECK(t.text.find("List {count} queries.") != std::string::npos);
  CHECK(t.text.find("generator prompt") == std::string::npos);
}

TEST_CASE("parse_prompt rejects an all-comment file") {
  CHECK_THROWS_AS(parse_prompt("x", "# only a comment\n"), ConfigError);
}

TEST_CASE("default prompts carry the placeholders their tasks need") {
  PromptSet prompts = default_prompts();
  CHECK(prompts.seed_generation.text.find("{location}") != std::string::npos);
  CHECK(prompts.seed_generation.text.find("{topic}") != std::string::npos);
  CHECK(prompts.seed_generation.text.find("{count}") != std::string::npos);
  CHECK(prompts.question_validation.text.find("{question}") !=
        std::string::npos);
  CHECK(prompts.answer_editing.text.find("{answer}") != std::string::npos);
  CHECK(prompts.answer_editing.text.find("{source_url}") != std::string::npos);
  CHECK(prompts.location_relevance.text.find("{location}") !=
        std::string::npos);
  CHECK_FALSE(prompts.seed_generation.version.empty());
}

TEST_CASE("load_prompts overrides per file and falls back otherwise") {
  fs::path dir = fs::temp_directory_path() / "nativqa_prompts_test";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "question_validation.txt");
    out << "# version: 99\ncustom validation of {question}\n";
  }

  PromptSet prompts = load_prompts(dir);
  CHECK(prompts.question_validation.version == "99");
  CHECK(prompts.question_validation.text.find("custom validation") !=
        std::string::npos);
  // Untouched slots keep the built-ins.
  CHECK(prompts.seed_generation.text == default_prompts().seed_generation.text);
  fs::remove_all(dir);
}

TEST_CASE("completion_lines strips enumeration markers and blanks") {
  auto lines = completion_lines(
      "1. best farms near Doha\n"
      "2) qatari breakfast spots\n"
      "- souq waqif opening hours\n"
      "* pearl island restaurants\n"
      "\n"
      "plain trailing line\n",
      10);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "best farms near Doha");
  CHECK(lines[1] == "qatari breakfast spots");
  CHECK(lines[2] == "souq waqif opening hours");
  CHECK(lines[3] == "pearl island restaurants");
  CHECK(lines[4] == "plain trailing line");
}

TEST_CASE("completion_lines truncates at max_lines") {
  auto lines = completion_lines("1. a\n2. b\n3. c\n", 2);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "b");
}

TEST_CASE("extract_json_object finds the first object in prose") {
  auto obj = extract_json_object(
      "Sure! Here is the result:\n{\"label\": \"good\"}\nHope that helps.");
  REQUIRE(obj.has_value());
  CHECK(nlohmann::json::parse(*obj) == nlohmann::json{{"label", "good"}});
}

TEST_CASE("extract_json_object balances braces inside strings") {
  auto obj = extract_json_object(
      "{\"edited_answer\": \"use {curly} braces :}\", \"n\": 1}");
  REQUIRE(obj.has_value());
  auto j = nlohmann::json::parse(*obj);
  CHECK(j["edited_answer"] == "use {curly} braces :}");
}

TEST_CASE("extract_json_object rejects prose without a complete object") {
  CHECK_FALSE(extract_json_object("no json here").has_value());
  CHECK_FALSE(extract_json_object("{\"unterminated\": ").has_value());
  CHECK_FALSE(extract_json_object("{not json}").has_value());
}

TEST_CASE("stub backend replays scripted responses first") {
  StubCompletionBackend stub;
  stub.enqueue("first");
  stub.enqueue("second");
  CompletionRequest req;
  req.params["task"] = "question_validation";
  CHECK(stub.complete(req) == "first");
  CHECK(stub.complete(req) == "second");
  CHECK(stub.calls() == 2);
}

TEST_CASE("stub backend synthesizes well-formed replies per task") {
  StubCompletionBackend stub;

  CompletionRequest validate;
  validate.params["task"] = "question_validation";
  auto label = extract_json_object(stub.complete(validate));
  REQUIRE(label.has_value());
  CHECK(nlohmann::json::parse(*label).contains("label"));

  CompletionRequest edit;
  edit.params["task"] = "answer_editing";
  edit.params["answer"] = "original answer";
  auto edited = extract_json_object(stub.complete(edit));
  REQUIRE(edited.has_value());
  CHECK(nlohmann::json::parse(*edited)["edited_answer"] == "original answer");

  CompletionRequest seeds;
  seeds.params["task"] = "seed_generation";
  seeds.params["topic"] = "food";
  seeds.params["location"] = "Doha, Qatar";
  seeds.params["count"] = "4";
  auto lines = completion_lines(stub.complete(seeds), 10);
  CHECK(lines.size() >= 4);
  for (const auto& line : lines) {
    CHECK(line.find("Doha, Qatar") != std::string::npos);
  }
}

TEST_CASE("http backend rejects an empty or malformed endpoint") {
  HttpCompletionBackend::Config empty_url;
  empty_url.api_key = "k";
  CHECK_THROWS_AS(HttpCompletionBackend{std::move(empty_url)}, ConfigError);

  HttpCompletionBackend::Config bad_url;
  bad_url.api_url = "not a url";
  bad_url.api_key = "k";
  HttpCompletionBackend backend(std::move(bad_url));
  CompletionRequest req;
  req.prompt = "hi";
  CHECK_THROWS_AS(backend.complete(req), ConfigError);
}

TEST_CASE("http backend from_env requires the endpoint url") {
  EnvFile env;
  env.set("LLM_API_KEY", "k");
  CHECK_THROWS_AS(HttpCompletionBackend::from_env(env), ConfigError);
}

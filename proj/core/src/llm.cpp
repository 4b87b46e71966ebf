#include "nativqa/llm.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nativqa/errors.hpp"
#include "nativqa/prompt_defaults.hpp"
#include "nativqa/text.hpp"
#include "nativqa/url.hpp"

namespace nativqa {

// ---------------------------------------------------------------------------
// Prompt templates
// ---------------------------------------------------------------------------

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& values) const {
  std::string out = text;
  for (const auto& [key, value] : values) {
    std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return out;
}

PromptTemplate parse_prompt(std::string name, const std::string& raw) {
  PromptTemplate t;
  t.name = std::move(name);
  std::istringstream in(raw);
  std::string line;
  std::ostringstream body;
  while (std::getline(in, line)) {
    std::string s = trim(line);
    if (s.rfind("# version:", 0) == 0) {
      t.version = trim(s.substr(10));
      continue;
    }
    if (!s.empty() && s[0] == '#') {
      continue;
    }
    body << line << '\n';
  }
  t.text = trim(body.str());
  if (t.text.empty()) {
    throw ConfigError("prompt template '" + t.name + "' is empty");
  }
  return t;
}

PromptSet default_prompts() {
  PromptSet set;
  set.seed_generation =
      parse_prompt("seed_generation", prompt_defaults::seed_generation);
  set.question_validation =
      parse_prompt("question_validation", prompt_defaults::question_validation);
  set.answer_editing =
      parse_prompt("answer_editing", prompt_defaults::answer_editing);
  set.location_relevance =
      parse_prompt("location_relevance", prompt_defaults::location_relevance);
  return set;
}

namespace {

PromptTemplate load_or_default(const std::filesystem::path& dir,
                               const std::string& name,
                               const PromptTemplate& fallback) {
  auto path = dir / (name + ".txt");
  if (!std::filesystem::exists(path)) {
    return fallback;
  }
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open prompt file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_prompt(name, buf.str());
}

}  // namespace

PromptSet load_prompts(const std::filesystem::path& dir) {
  PromptSet defaults = default_prompts();
  PromptSet set;
  set.seed_generation =
      load_or_default(dir, "seed_generation", defaults.seed_generation);
  set.question_validation =
      load_or_default(dir, "question_validation", defaults.question_validation);
  set.answer_editing =
      load_or_default(dir, "answer_editing", defaults.answer_editing);
  set.location_relevance =
      load_or_default(dir, "location_relevance", defaults.location_relevance);
  return set;
}

// ---------------------------------------------------------------------------
// Stub backend
// ---------------------------------------------------------------------------

void StubCompletionBackend::enqueue(std::string response) {
  std::lock_guard<std::mutex> lock(mutex_);
  scripted_.push_back(std::move(response));
}

std::string StubCompletionBackend::complete(const CompletionRequest& request) {
  std::lock_guard<std::mutex> lock(mutex_);
  ++calls_;
  if (!scripted_.empty()) {
    std::string next = std::move(scripted_.front());
    scripted_.pop_front();
    return next;
  }

  auto param = [&](const std::string& key, const std::string& fallback) {
    auto it = request.params.find(key);
    return it == request.params.end() ? fallback : it->second;
  };

  std::string task = param("task", "");
  if (task == "question_validation") {
    return R"({"label": "good"})";
  }
  if (task == "answer_editing") {
    nlohmann::json j;
    j["edited_answer"] = param("answer", "");
    return j.dump();
  }
  if (task == "location_relevance") {
    return R"({"relevant": true})";
  }

  // Seed generation: a numbered list, the caller strips the markers.
  std::size_t count = 3;
  try {
    count = std::stoul(param("count", "3"));
  } catch (...) {
  }
  std::string topic = param("topic", "general");
  std::string location = param("location", "the area");
  static const char* kShapes[] = {
      "best places for %T in %L",       "how to find %T services in %L",
      "%T traditions people follow in %L", "what does %T cost in %L",
      "where to learn about %T in %L",  "popular %T events in %L",
      "is %T different in %L",          "guide to %T for newcomers in %L",
  };
  std::ostringstream out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string line = kShapes[i % (sizeof(kShapes) / sizeof(kShapes[0]))];
    if (i >= sizeof(kShapes) / sizeof(kShapes[0])) {
      line += " #" + std::to_string(i / (sizeof(kShapes) / sizeof(kShapes[0])) + 1);
    }
    auto replace_all = [](std::string s, const std::string& from,
                          const std::string& to) {
      std::size_t pos = 0;
      while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
      }
      return s;
    };
    line = replace_all(line, "%T", topic);
    line = replace_all(line, "%L", location);
    out << (i + 1) << ". " << line << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// HTTP backend
// ---------------------------------------------------------------------------

HttpCompletionBackend::HttpCompletionBackend(Config config)
    : config_(std::move(config)) {
  if (config_.api_url.empty()) {
    throw ConfigError("LLM backend needs an api_url");
  }
  if (!config_.sleeper) {
    config_.sleeper = real_sleeper();
  }
}

HttpCompletionBackend HttpCompletionBackend::from_env(const EnvFile& env) {
  Config c;
  c.api_url = env.require("LLM_API_URL");
  c.api_key = env.get("LLM_API_KEY").value_or("");
  c.model = env.get("LLM_MODEL").value_or("gpt-4o");
  return HttpCompletionBackend(std::move(c));
}

std::string HttpCompletionBackend::complete(const CompletionRequest& request) {
  auto parsed = parse_absolute_url(config_.api_url);
  if (!parsed) {
    throw ConfigError("LLM_API_URL is not an absolute URL: " + config_.api_url);
  }
  std::string origin = parsed->scheme + "://" + parsed->host;
  if (parsed->port) {
    origin += ":" + std::to_string(parsed->port);
  }
  std::string path = parsed->path.empty() ? "/" : parsed->path;

  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array(
      {{{"role", "user"}, {"content", request.prompt}}});

  auto attempt = [&]() -> std::string {
    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      throw BackendError("LLM request transport failure: " +
                         httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
      bool retriable = res->status == 408 || res->status == 429 ||
                       res->status >= 500;
      throw BackendError("LLM request failed with status " +
                             std::to_string(res->status),
                         retriable);
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("unexpected LLM response shape: ") +
                             e.what(),
                         /*retriable=*/false);
    }
  };

  return retry_with_backoff(
      attempt, config_.retry,
      [](const std::exception& e) {
        auto* be = dynamic_cast<const BackendError*>(&e);
        return be != nullptr && be->retriable();
      },
      config_.sleeper);
}

// ---------------------------------------------------------------------------
// Completion parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::string> completion_lines(const std::string& completion,
                                          std::size_t max_lines) {
  std::vector<std::string> out;
  std::istringstream in(completion);
  std::string line;
  while (out.size() < max_lines && std::getline(in, line)) {
    std::string s = trim(line);
    // Leading enumeration markers: digits with ./)/]/: or a bullet.
    std::size_t i = 0;
    std::size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++digits;
    }
    if (digits > 0 && i < s.size() &&
        (s[i] == '.' || s[i] == ')' || s[i] == ']' || s[i] == ':')) {
      s = trim(s.substr(i + 1));
    } else if (!s.empty() && (s[0] == '-' || s[0] == '*')) {
      s = trim(s.substr(1));
    }
    if (!s.empty()) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::optional<std::string> extract_json_object(const std::string& completion) {
  std::size_t start = completion.find('{');
  if (start == std::string::npos) {
    return std::nullopt;
  }
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < completion.size(); ++i) {
    char c = completion[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) {
        std::string candidate = completion.substr(start, i - start + 1);
        if (nlohmann::json::accept(candidate)) {
          return candidate;
        }
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

}  // namespace nativqa

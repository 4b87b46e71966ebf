#include "nativqa/seedgen.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "nativqa/csv.hpp"
#include "nativqa/errors.hpp"
#include "nativqa/log.hpp"

namespace nativqa {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open file: " + path.string());
  }
  return in;
}

// Maps header names to column indices, case-insensitively.
int find_column(const CsvRow& header, const std::string& name) {
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    std::string f = trim(header.fields[i]);
    std::transform(f.begin(), f.end(), f.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (f == name) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::string field_or(const CsvRow& row, int index, const std::string& fallback) {
  if (index < 0 || static_cast<std::size_t>(index) >= row.fields.size()) {
    return fallback;
  }
  return trim(row.fields[static_cast<std::size_t>(index)]);
}

}  // namespace

Denylist Denylist::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return from_lines(lines);
}

Denylist Denylist::from_lines(const std::vector<std::string>& lines) {
  Denylist list;
  for (const auto& line : lines) {
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') {
      continue;
    }
    auto key = canonicalize(s);
    if (!key.value.empty()) {
      list.keys_.insert(std::move(key));
    }
  }
  return list;
}

std::vector<SeedQuery> load_manual_seeds(std::istream& in,
                                         const std::string& location,
                                         const std::string& language) {
  CsvReader reader(in);
  auto header = reader.next();
  if (!header) {
    throw ParseError("no seed queries: file is empty");
  }
  int id_col = find_column(*header, "id");
  int topic_col = find_column(*header, "topic");
  int query_col = find_column(*header, "query");
  if (query_col < 0) {
    throw ParseError("seed CSV header must include a 'query' column");
  }

  std::vector<SeedQuery> seeds;
  while (auto row = reader.next()) {
    std::string text = field_or(*row, query_col, "");
    if (text.empty()) {
      warn("seed row at line " + std::to_string(row->line_no) +
           " has a blank query, skipping");
      continue;
    }
    SeedQuery seed;
    seed.id = field_or(*row, id_col, "m" + std::to_string(seeds.size() + 1));
    if (seed.id.empty()) {
      seed.id = "m" + std::to_string(seeds.size() + 1);
    }
    seed.text = text;
    seed.topic = field_or(*row, topic_col, "general");
    seed.location = location;
    seed.language = language;
    seed.origin = SeedOrigin::Manual;
    seeds.push_back(std::move(seed));
  }
  if (seeds.empty()) {
    throw ParseError("no seed queries: file has no usable rows");
  }
  return seeds;
}

std::vector<SeedQuery> load_manual_seeds(const std::filesystem::path& path,
                                         const std::string& location,
                                         const std::string& language) {
  auto in = open_or_throw(path);
  try {
    return load_manual_seeds(in, location, language);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<QueryTemplate> load_templates(std::istream& in) {
  // Peek at the whole input first; the format sniff needs the first line and
  // the CSV path needs a rewindable stream.
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();

  std::istringstream first_pass(content);
  std::string first_line;
  while (std::getline(first_pass, first_line)) {
    if (!trim(first_line).empty()) {
      break;
    }
  }

  std::vector<QueryTemplate> templates;
  std::istringstream header_probe(first_line);
  CsvReader probe(header_probe);
  auto probe_row = probe.next();
  bool is_csv = probe_row && find_column(*probe_row, "pattern") >= 0;

  if (is_csv) {
    std::istringstream csv_in(content);
    CsvReader reader(csv_in);
    auto header = reader.next();
    int id_col = find_column(*header, "id");
    int topic_col = find_column(*header, "topic");
    int pattern_col = find_column(*header, "pattern");
    while (auto row = reader.next()) {
      std::string pattern = field_or(*row, pattern_col, "");
      if (pattern.empty()) {
        warn("template row at line " + std::to_string(row->line_no) +
             " has a blank pattern, skipping");
        continue;
      }
      QueryTemplate t;
      t.id = field_or(*row, id_col, "t" + std::to_string(templates.size() + 1));
      if (t.id.empty()) {
        t.id = "t" + std::to_string(templates.size() + 1);
      }
      t.topic = field_or(*row, topic_col, "general");
      t.pattern = pattern;
      templates.push_back(std::move(t));
    }
  } else {
    std::istringstream text_in(content);
    std::string line;
    while (std::getline(text_in, line)) {
      std::string s = trim(line);
      if (s.empty() || s[0] == '#') {
        continue;
      }
      QueryTemplate t;
      t.id = "t" + std::to_string(templates.size() + 1);
      t.topic = "general";
      t.pattern = s;
      templates.push_back(std::move(t));
    }
  }
  return templates;
}

std::vector<QueryTemplate> load_templates(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return load_templates(in);
}

std::vector<SeedQuery> expand_templates(
    const std::vector<QueryTemplate>& templates, const std::string& location,
    const std::string& language) {
  static const std::string kPlaceholder = "[LOCATION]";
  std::vector<SeedQuery> seeds;
  for (const auto& t : templates) {
    std::string text = t.pattern;
    std::size_t pos = 0;
    while ((pos = text.find(kPlaceholder, pos)) != std::string::npos) {
      text.replace(pos, kPlaceholder.size(), location);
      pos += location.size();
    }
    text = trim(text);
    if (text.empty()) {
      warn("template '" + t.id + "' expands to a blank query, skipping");
      continue;
    }
    SeedQuery seed;
    seed.id = t.id;
    seed.text = std::move(text);
    seed.topic = t.topic;
    seed.location = location;
    seed.language = language;
    seed.origin = SeedOrigin::Template;
    seeds.push_back(std::move(seed));
  }
  return seeds;
}

std::vector<SeedQuery> generate_llm_seeds(CompletionBackend& backend,
                                          const PromptTemplate& prompt,
                                          const std::string& location,
                                          const std::string& topic,
                                          const std::string& language,
                                          std::size_t count) {
  if (count == 0) {
    throw ConfigError("seed generation count must be at least 1");
  }
  CompletionRequest request;
  request.prompt = prompt.render({{"location", location},
                                  {"topic", topic},
                                  {"language", language},
                                  {"count", std::to_string(count)}});
  request.params = {{"task", "seed_generation"},
                    {"location", location},
                    {"topic", topic},
                    {"language", language},
                    {"count", std::to_string(count)}};
  std::string completion = backend.complete(request);
  auto lines = completion_lines(completion, count);
  if (lines.empty()) {
    throw BackendError("empty generation for topic '" + topic + "'",
                       /*retriable=*/true);
  }
  std::vector<SeedQuery> seeds;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    SeedQuery seed;
    seed.id = "llm_" + topic + "_" + std::to_string(i + 1);
    seed.text = lines[i];
    seed.topic = topic;
    seed.location = location;
    seed.language = language;
    seed.origin = SeedOrigin::Llm;
    seeds.push_back(std::move(seed));
  }
  return seeds;
}

std::vector<SeedQuery> generate_llm_seeds_multi(
    CompletionBackend& backend, const PromptTemplate& prompt,
    const std::string& location, const std::vector<std::string>& topics,
    const std::string& language, std::size_t count_per_topic,
    std::size_t parallelism) {
  if (parallelism == 0) {
    parallelism = 1;
  }
  std::vector<std::vector<SeedQuery>> per_topic(topics.size());
  std::vector<std::exception_ptr> failures(topics.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= topics.size()) {
        return;
      }
      try {
        per_topic[i] = generate_llm_seeds(backend, prompt, location, topics[i],
                                          language, count_per_topic);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  std::vector<std::thread> threads;
  std::size_t n_threads = std::min(parallelism, topics.size());
  for (std::size_t i = 0; i < n_threads; ++i) {
    threads.emplace_back(worker);
  }
  for (auto& t : threads) {
    t.join();
  }

  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (failures[i]) {
      std::rethrow_exception(failures[i]);
    }
  }
  std::vector<SeedQuery> seeds;
  for (auto& group : per_topic) {
    for (auto& seed : group) {
      seeds.push_back(std::move(seed));
    }
  }
  return seeds;
}

SeedSet build_seed_set(const std::vector<SeedQuery>& raw,
                       const std::string& location,
                       const std::string& language,
                       const Denylist& denylist) {
  SeedSet set;
  set.location = location;
  set.language = language;

  std::unordered_set<CanonicalKey> seen;
  std::vector<TrigramSet> retained_trigrams;
  for (const auto& seed : raw) {
    auto key = canonicalize(seed.text);
    if (key.value.empty()) {
      warn("seed '" + seed.id + "' is empty after canonicalization, dropping");
      continue;
    }
    if (denylist.contains(key)) {
      warn("seed '" + seed.id + "' is denylisted, dropping");
      continue;
    }
    if (seen.count(key) > 0) {
      continue;
    }
    auto trigrams = trigram_set(key);
    bool near_duplicate = false;
    for (const auto& prior : retained_trigrams) {
      if (trigram_jaccard(prior, trigrams) >= kNearDuplicateThreshold) {
        near_duplicate = true;
        break;
      }
    }
    if (near_duplicate) {
      continue;
    }
    seen.insert(key);
    retained_trigrams.push_back(std::move(trigrams));
    set.queries.push_back(seed);
  }

  if (set.queries.empty()) {
    throw Error("all seeds filtered");
  }
  return set;
}

}  // namespace nativqa

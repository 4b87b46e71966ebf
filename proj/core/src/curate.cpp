#include "nativqa/curate.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "nativqa/csv.hpp"
#include "nativqa/errors.hpp"
#include "nativqa/log.hpp"
#include "nativqa/url.hpp"

namespace nativqa {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// Strips scheme, path, port and leading "www." noise from a list entry,
// leaving a bare lowercase host.
std::string normalize_entry(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) {
    return s;
  }
  if (is_absolute_url(s)) {
    if (auto parsed = parse_absolute_url(s)) {
      return parsed->host;
    }
  }
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    s = s.substr(0, slash);
  }
  auto colon = s.find(':');
  if (colon != std::string::npos) {
    s = s.substr(0, colon);
  }
  return lowercase(s);
}

std::size_t label_count(const std::string& host) {
  return static_cast<std::size_t>(
             std::count(host.begin(), host.end(), '.')) + 1;
}

}  // namespace

DomainList DomainList::load(const std::filesystem::path& path,
                            Reliability label_on_match, std::string source) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open domain list: " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  if (source.empty()) {
    source = path.string();
  }
  return from_lines(lines, label_on_match, std::move(source));
}

DomainList DomainList::from_lines(const std::vector<std::string>& lines,
                                  Reliability label_on_match,
                                  std::string source) {
  DomainList list;
  list.label_ = label_on_match;
  list.source_ = std::move(source);
  for (const auto& line : lines) {
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') {
      continue;
    }
    std::string entry = normalize_entry(s);
    if (!entry.empty()) {
      list.entries_.insert(std::move(entry));
    }
  }
  return list;
}

bool DomainList::matches_host(const std::string& host) const {
  if (entries_.empty() || host.empty()) {
    return false;
  }
  std::string h = lowercase(host);
  if (entries_.count(h) > 0) {
    return true;
  }
  // Walk up the parent domains; an entry must keep at least two labels so
  // a bare TLD in the list cannot swallow everything.
  std::size_t pos = 0;
  while ((pos = h.find('.', pos)) != std::string::npos) {
    std::string parent = h.substr(pos + 1);
    if (label_count(parent) < 2) {
      break;
    }
    if (entries_.count(parent) > 0) {
      return true;
    }
    pos = pos + 1;
  }
  return false;
}

QaRecord check_domain(const QaRecord& record, const DomainList& list,
                      const DomainList* ugc_denylist) {
  QaRecord out = record;
  auto parsed = parse_absolute_url(record.source_url);
  if (!parsed) {
    out.reliability = Reliability::CompletelyUnreliable;
    return out;
  }
  if (ugc_denylist != nullptr && ugc_denylist->matches_host(parsed->host)) {
    out.reliability = ugc_denylist->label_on_match();
    return out;
  }
  if (list.matches_host(parsed->host)) {
    out.reliability = list.label_on_match();
  } else {
    out.reliability = Reliability::NotSure;
  }
  return out;
}

std::vector<QaRecord> filter_by_reliability(
    const std::vector<QaRecord>& records, const std::set<Reliability>& keep) {
  if (keep.empty()) {
    warn("reliability filter keeps no labels; output is empty");
    return {};
  }
  std::vector<QaRecord> out;
  out.reserve(records.size());
  for (const auto& record : records) {
    if (keep.count(record.reliability) > 0) {
      out.push_back(record);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// LLM annotation
// ---------------------------------------------------------------------------

namespace {

// Issues one prompt, insisting on a one-line JSON reply; re-asks once when
// the reply does not contain a valid JSON object. Returns the parsed object
// or nullopt after the second failure.
std::optional<nlohmann::json> ask_json(CompletionBackend& backend,
                                       const std::string& prompt,
                                       const std::string& task,
                                       const QaRecord& record) {
  CompletionRequest request;
  request.prompt = prompt;
  request.params = {{"task", task},
                    {"question", record.question},
                    {"answer", record.answer},
                    {"source_url", record.source_url}};
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string completion;
    try {
      completion = backend.complete(request);
    } catch (const BackendError& e) {
      warn(std::string("annotation backend failed: ") + e.what());
      return std::nullopt;
    }
    if (auto object = extract_json_object(completion)) {
      return nlohmann::json::parse(*object);
    }
    warn("annotation reply for task '" + task +
         "' was not valid JSON, re-asking");
  }
  return std::nullopt;
}

}  // namespace

QaRecord annotate_llm(const QaRecord& record, CompletionBackend& backend,
                      const PromptSet& prompts, const std::string& location) {
  QaRecord out = record;
  out.annotation.reset();
  out.annotation_failed = false;

  auto fail = [&]() {
    out.annotation.reset();
    out.annotation_failed = true;
    return out;
  };

  AnnotationResult result;
  result.annotator = AnnotatorKind::Llm;
  result.annotator_id = backend.id();

  auto label_json = ask_json(
      backend,
      prompts.question_validation.render(
          {{"question", record.question}, {"location", location}}),
      "question_validation", record);
  if (!label_json || !label_json->contains("label")) {
    return fail();
  }
  try {
    result.question_label =
        question_label_from_string((*label_json)["label"].get<std::string>());
  } catch (const std::exception&) {
    return fail();
  }

  if (result.question_label == QuestionLabel::Good) {
    auto edit_json = ask_json(
        backend,
        prompts.answer_editing.render({{"question", record.question},
                                       {"answer", record.answer},
                                       {"source_url", record.source_url}}),
        "answer_editing", record);
    if (!edit_json || !edit_json->contains("edited_answer") ||
        !(*edit_json)["edited_answer"].is_string()) {
      return fail();
    }
    result.edited_answer = (*edit_json)["edited_answer"].get<std::string>();
  }

  auto relevance_json = ask_json(
      backend,
      prompts.location_relevance.render(
          {{"question", record.question}, {"location", location}}),
      "location_relevance", record);
  if (!relevance_json || !relevance_json->contains("relevant") ||
      !(*relevance_json)["relevant"].is_boolean()) {
    return fail();
  }
  result.location_relevant = (*relevance_json)["relevant"].get<bool>();

  out.annotation = std::move(result);
  return out;
}

std::vector<QaRecord> annotate_all(const std::vector<QaRecord>& records,
                                   CompletionBackend& backend,
                                   const PromptSet& prompts,
                                   const std::string& location,
                                   std::size_t parallelism) {
  if (parallelism == 0) {
    parallelism = 1;
  }
  std::vector<QaRecord> out(records.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= records.size()) {
        return;
      }
      out[i] = annotate_llm(records[i], backend, prompts, location);
    }
  };

  std::size_t n_threads = std::min(parallelism, records.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < n_threads; ++i) {
      threads.emplace_back(worker);
    }
    for (auto& t : threads) {
      t.join();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Preference-task export
// ---------------------------------------------------------------------------

PreferenceExport export_preference_tasks(
    const std::vector<QaRecord>& records,
    const std::unordered_map<CanonicalKey, std::string>& alternatives,
    const std::filesystem::path& tasks_path,
    const std::filesystem::path& key_path, std::uint64_t seed) {
  std::ofstream tasks_out(tasks_path);
  if (!tasks_out) {
    throw IoError("cannot write preference tasks: " + tasks_path.string());
  }
  std::ofstream key_out(key_path);
  if (!key_out) {
    throw IoError("cannot write unblinding key: " + key_path.string());
  }
  write_csv_row(key_out, {"task_id", "answer_1_source", "answer_2_source"});

  std::mt19937_64 rng(seed);
  PreferenceExport result;
  for (const auto& record : records) {
    auto it = alternatives.find(canonicalize(record.question));
    if (it == alternatives.end()) {
      warn("no alternative answer for question '" + record.question +
           "', skipping");
      ++result.skipped;
      continue;
    }
    const std::string& llm_answer = it->second;
    bool original_first = (rng() & 1) == 0;
    bool same_answer =
        canonicalize(record.answer) == canonicalize(llm_answer);

    OrderedJson task;
    task["task_id"] = "task_" + std::to_string(result.tasks_written + 1);
    task["question"] = record.question;
    task["answer_1"] = original_first ? record.answer : llm_answer;
    task["answer_2"] = original_first ? llm_answer : record.answer;
    task["options"] = {"answer_1", "answer_2", "neither"};
    task["source_url"] = record.source_url;
    task["same_answer"] = same_answer;
    tasks_out << task.dump() << '\n';

    write_csv_row(key_out,
                  {task["task_id"].get<std::string>(),
                   original_first ? "original" : "llm_edited",
                   original_first ? "llm_edited" : "original"});
    ++result.tasks_written;
  }
  tasks_out.flush();
  key_out.flush();
  if (!tasks_out || !key_out) {
    throw IoError("short write on preference export");
  }
  return result;
}

}  // namespace nativqa

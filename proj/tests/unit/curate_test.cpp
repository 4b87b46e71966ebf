#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "nativqa/curate.hpp"
#include "nativqa/errors.hpp"
#include "nativqa/llm.hpp"
#include "nativqa/text.hpp"

using namespace nativqa;
namespace fs = std::filesystem;

namespace {

QaRecord record_with_url(const std::string& url) {
  QaRecord r;
  r.question = "Is Baladna farm free?";
  r.answer = "Entry is free.";
  r.source_url = url;
  r.engine = "mock";
  r.location = "Doha, Qatar";
  r.language = "en";
  return r;
}

}  // namespace

TEST_CASE("DomainList normalizes entries down to bare hosts") {
  auto list = DomainList::from_lines({
      "# trusted sources",
      "https://www.BALADNA.com/visit",
      "example.org:8080",
      "gov.qa",
      "",
  });
  CHECK(list.size() == 3);
  CHECK(list.matches_host("www.baladna.com"));
  CHECK(list.matches_host("example.org"));
  CHECK(list.matches_host("gov.qa"));
}

TEST_CASE("DomainList matches hosts by exact name or parent domain") {
  auto list = DomainList::from_lines({"example.com"});
  CHECK(list.matches_host("example.com"));
  CHECK(list.matches_host("blog.example.com"));
  CHECK(list.matches_host("a.b.example.com"));
  CHECK_FALSE(list.matches_host("notexample.com"));
  CHECK_FALSE(list.matches_host("example.com.evil.net"));
}

TEST_CASE("DomainList never walks up to a single-label parent") {
  auto list = DomainList::from_lines({"com"});
  CHECK_FALSE(list.matches_host("example.com"));
  // The single-label entry still matches itself exactly.
  CHECK(list.matches_host("com"));
}

TEST_CASE("check_domain labels by the answer's source host") {
  auto list = DomainList::from_lines({"baladna.com", "visitqatar.com"});

  auto matched = check_domain(record_with_url("https://www.baladna.com/visit"),
                              list);
  CHECK(matched.reliability == Reliability::VeryReliable);

  auto unlisted = check_domain(record_with_url("https://random.example.net/a"),
                               list);
  CHECK(unlisted.reliability == Reliability::NotSure);

  auto unparseable = check_domain(record_with_url("not a url"), list);
  CHECK(unparseable.reliability == Reliability::CompletelyUnreliable);
  // Labeled, never dropped: the rest of the record is intact.
  CHECK(unparseable.question == "Is Baladna farm free?");
}

TEST_CASE("the ugc denylist overrides an allowlist match") {
  auto list = DomainList::from_lines({"reddit.com"});
  auto ugc = DomainList::from_lines({"reddit.com"},
                                    Reliability::CompletelyUnreliable);
  auto labeled = check_domain(
      record_with_url("https://www.reddit.com/r/qatar/post"), list, &ugc);
  CHECK(labeled.reliability == Reliability::CompletelyUnreliable);
}

TEST_CASE("filter_by_reliability keeps order and is identity on all labels") {
  std::vector<QaRecord> records;
  auto add = [&](Reliability r) {
    QaRecord q = record_with_url("https://x.example.com");
    q.question = "q" + std::to_string(records.size());
    q.reliability = r;
    records.push_back(q);
  };
  add(Reliability::VeryReliable);
  add(Reliability::NotSure);
  add(Reliability::CompletelyUnreliable);
  add(Reliability::VeryReliable);

  auto kept = filter_by_reliability(records, {Reliability::VeryReliable});
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].question == "q0");
  CHECK(kept[1].question == "q3");

  std::set<Reliability> all = {
      Reliability::VeryReliable, Reliability::PartiallyReliable,
      Reliability::NotSure, Reliability::CompletelyUnreliable,
      Reliability::Unchecked};
  auto identity = filter_by_reliability(records, all);
  REQUIRE(identity.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(identity[i].question == records[i].question);
  }

  CHECK(filter_by_reliability(records, {}).empty());
}

TEST_CASE("annotate_llm fills the annotation from the three sub-tasks") {
  StubCompletionBackend stub;
  stub.enqueue(R"({"label": "good"})");
  stub.enqueue(R"({"edited_answer": "Entry to Baladna Park is free."})");
  stub.enqueue(R"({"relevant": true})");

  auto record = record_with_url("https://www.baladna.com/visit");
  auto annotated = annotate_llm(record, stub, default_prompts(), "Doha, Qatar");

  REQUIRE(annotated.annotation.has_value());
  CHECK(annotated.annotation->question_label == QuestionLabel::Good);
  CHECK(annotated.annotation->edited_answer ==
        "Entry to Baladna Park is free.");
  CHECK(annotated.annotation->location_relevant);
  CHECK(annotated.annotation->annotator == AnnotatorKind::Llm);
  CHECK(annotated.annotation->annotator_id == "stub");
  CHECK_FALSE(annotated.annotation_failed);
  CHECK(stub.calls() == 3);
}

TEST_CASE("a bad question skips answer editing but still judges relevance") {
  StubCompletionBackend stub;
  stub.enqueue(R"({"label": "bad"})");
  stub.enqueue(R"({"relevant": false})");

  auto annotated = annotate_llm(record_with_url("https://x.example.com"), stub,
                                default_prompts(), "Doha, Qatar");
  REQUIRE(annotated.annotation.has_value());
  CHECK(annotated.annotation->question_label == QuestionLabel::Bad);
  CHECK_FALSE(annotated.annotation->edited_answer.has_value());
  CHECK_FALSE(annotated.annotation->location_relevant);
  CHECK(stub.calls() == 2);
}

TEST_CASE("annotate_llm never mutates question, answer or source attribution") {
  StubCompletionBackend stub;
  stub.enqueue(R"({"label": "good"})");
  stub.enqueue(R"({"edited_answer": "Rewritten."})");
  stub.enqueue(R"({"relevant": true})");

  auto record = record_with_url("https://www.baladna.com/visit");
  auto annotated = annotate_llm(record, stub, default_prompts(), "Doha, Qatar");
  CHECK(annotated.question == record.question);
  CHECK(annotated.answer == record.answer);
  CHECK(annotated.source_url == record.source_url);
}

TEST_CASE("an unparseable reply is re-asked once then flagged") {
  StubCompletionBackend stub;
  stub.enqueue("no json in this reply");
  stub.enqueue("still not json");

  auto annotated = annotate_llm(record_with_url("https://x.example.com"), stub,
                                default_prompts(), "Doha, Qatar");
  CHECK_FALSE(annotated.annotation.has_value());
  CHECK(annotated.annotation_failed);
  CHECK(stub.calls() == 2);

  // One garbage reply followed by a clean one recovers.
  StubCompletionBackend recovering;
  recovering.enqueue("garbage");
  recovering.enqueue(R"({"label": "good"})");
  recovering.enqueue(R"({"edited_answer": "ok"})");
  recovering.enqueue(R"({"relevant": true})");
  auto ok = annotate_llm(record_with_url("https://x.example.com"), recovering,
                         default_prompts(), "Doha, Qatar");
  CHECK(ok.annotation.has_value());
  CHECK_FALSE(ok.annotation_failed);
}

TEST_CASE("annotate_all preserves input order under parallelism") {
  std::vector<QaRecord> records;
  for (int i = 0; i < 12; ++i) {
    QaRecord r = record_with_url("https://x.example.com/" + std::to_string(i));
    r.question = "What about thing number " + std::to_string(i) + "?";
    records.push_back(r);
  }
  StubCompletionBackend stub;  // unscripted: synthesizes parseable replies
  auto annotated =
      annotate_all(records, stub, default_prompts(), "Doha, Qatar", 4);
  REQUIRE(annotated.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(annotated[i].question == records[i].question);
    CHECK(annotated[i].annotation.has_value());
  }
}

TEST_CASE("export_preference_tasks writes blinded tasks and an unblinding key") {
  fs::path tasks = fs::temp_directory_path() / "nativqa_pref_tasks.jsonl";
  fs::path key = fs::temp_directory_path() / "nativqa_pref_key.csv";

  std::vector<QaRecord> records;
  std::unordered_map<CanonicalKey, std::string> alternatives;
  for (int i = 0; i < 6; ++i) {
    QaRecord r = record_with_url("https://x.example.com");
    r.question = "Preference question " + std::to_string(i) + "?";
    r.answer = "original " + std::to_string(i);
    records.push_back(r);
    if (i < 5) {
      alternatives[canonicalize(r.question)] =
          i == 0 ? r.answer : "edited " + std::to_string(i);
    }
  }

  auto result = export_preference_tasks(records, alternatives, tasks, key, 7);
  CHECK(result.tasks_written == 5);
  CHECK(result.skipped == 1);

  std::ifstream tasks_in(tasks);
  std::string line;
  std::size_t lines = 0;
  bool saw_same_answer = false;
  std::set<std::string> answers_seen;
  while (std::getline(tasks_in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("task_id"));
    CHECK(j.contains("question"));
    CHECK(j.contains("answer_1"));
    CHECK(j.contains("answer_2"));
    CHECK(j["options"] ==
          nlohmann::json({"answer_1", "answer_2", "neither"}));
    if (j["same_answer"].get<bool>()) {
      saw_same_answer = true;
      CHECK(j["answer_1"] == j["answer_2"]);
    }
    answers_seen.insert(j["answer_1"].get<std::string>());
    ++lines;
  }
  CHECK(lines == 5);
  // Task 0 pairs two identical answers, flagged rather than hidden.
  CHECK(saw_same_answer);

  std::ifstream key_in(key);
  std::getline(key_in, line);
  CHECK(line == "task_id,answer_1_source,answer_2_source");
  std::set<std::string> sources;
  while (std::getline(key_in, line)) {
    auto comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    sources.insert(line.substr(comma + 1));
  }
  // At seed 7 both presentations occur, so the blinding is real.
  CHECK(sources.count("original,llm_edited") +
            sources.count("llm_edited,original") ==
        sources.size());
  CHECK(sources.size() == 2);

  // Determinism: the same seed reproduces the same files.
  fs::path tasks2 = fs::temp_directory_path() / "nativqa_pref_tasks2.jsonl";
  fs::path key2 = fs::temp_directory_path() / "nativqa_pref_key2.csv";
  export_preference_tasks(records, alternatives, tasks2, key2, 7);
  std::ifstream a(tasks), b(tasks2);
  std::string whole_a((std::istreambuf_iterator<char>(a)),
                      std::istreambuf_iterator<char>());
  std::string whole_b((std::istreambuf_iterator<char>(b)),
                      std::istreambuf_iterator<char>());
  CHECK(whole_a == whole_b);

  fs::remove(tasks);
  fs::remove(key);
  fs::remove(tasks2);
  fs::remove(key2);
}

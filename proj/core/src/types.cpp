#include "nativqa/types.hpp"

#include <cstdio>
#include <ctime>

#include "nativqa/errors.hpp"

namespace nativqa {

std::string_view to_string(SeedOrigin origin) {
  switch (origin) {
    case SeedOrigin::Manual:
      return "manual";
    case SeedOrigin::Template:
      return "template";
    case SeedOrigin::Llm:
      return "llm";
  }
  return "manual";
}

std::string_view to_string(Reliability reliability) {
  switch (reliability) {
    case Reliability::VeryReliable:
      return "very_reliable";
    case Reliability::PartiallyReliable:
      return "partially_reliable";
    case Reliability::NotSure:
      return "not_sure";
    case Reliability::CompletelyUnreliable:
      return "completely_unreliable";
    case Reliability::Unchecked:
      return "unchecked";
  }
  return "unchecked";
}

std::string_view to_string(QuestionLabel label) {
  return label == QuestionLabel::Good ? "good" : "bad";
}

std::string_view to_string(AnnotatorKind kind) {
  return kind == AnnotatorKind::Llm ? "llm" : "human";
}

SeedOrigin seed_origin_from_string(std::string_view s) {
  if (s == "manual") return SeedOrigin::Manual;
  if (s == "template") return SeedOrigin::Template;
  if (s == "llm") return SeedOrigin::Llm;
  throw ParseError("unknown seed origin: " + std::string(s));
}

Reliability reliability_from_string(std::string_view s) {
  if (s == "very_reliable") return Reliability::VeryReliable;
  if (s == "partially_reliable") return Reliability::PartiallyReliable;
  if (s == "not_sure") return Reliability::NotSure;
  if (s == "completely_unreliable") return Reliability::CompletelyUnreliable;
  if (s == "unchecked") return Reliability::Unchecked;
  throw ParseError("unknown reliability label: " + std::string(s));
}

QuestionLabel question_label_from_string(std::string_view s) {
  if (s == "good") return QuestionLabel::Good;
  if (s == "bad") return QuestionLabel::Bad;
  throw ParseError("unknown question label: " + std::string(s));
}

AnnotatorKind annotator_kind_from_string(std::string_view s) {
  if (s == "llm") return AnnotatorKind::Llm;
  if (s == "human") return AnnotatorKind::Human;
  throw ParseError("unknown annotator kind: " + std::string(s));
}

OrderedJson annotation_to_json(const AnnotationResult& annotation) {
  OrderedJson j;
  j["question_label"] = to_string(annotation.question_label);
  if (annotation.edited_answer) {
    j["edited_answer"] = *annotation.edited_answer;
  }
  j["location_relevant"] = annotation.location_relevant;
  j["annotator"] = to_string(annotation.annotator);
  j["annotator_id"] = annotation.annotator_id;
  return j;
}

AnnotationResult annotation_from_json(const nlohmann::json& j) {
  AnnotationResult a;
  a.question_label =
      question_label_from_string(j.at("question_label").get<std::string>());
  if (j.contains("edited_answer") && !j["edited_answer"].is_null()) {
    a.edited_answer = j["edited_answer"].get<std::string>();
  }
  a.location_relevant = j.at("location_relevant").get<bool>();
  a.annotator = annotator_kind_from_string(j.at("annotator").get<std::string>());
  a.annotator_id = j.value("annotator_id", std::string{});
  if (a.question_label == QuestionLabel::Bad && a.edited_answer) {
    throw ParseError("annotation with label 'bad' must not carry edited_answer");
  }
  return a;
}

OrderedJson record_to_json(const QaRecord& record) {
  OrderedJson j;
  j["question"] = record.question;
  j["answer"] = record.answer;
  j["source_url"] = record.source_url;
  j["engine"] = record.engine;
  j["seed_id"] = record.seed_id;
  j["query_text"] = record.query_text;
  j["iteration"] = record.iteration;
  j["location"] = record.location;
  j["language"] = record.language;
  j["topic"] = record.topic;
  j["collected_at"] = record.collected_at;
  j["reliability"] = to_string(record.reliability);
  if (record.annotation) {
    j["annotation"] = annotation_to_json(*record.annotation);
  } else {
    j["annotation"] = nullptr;
  }
  if (record.annotation_failed) {
    j["annotation_failed"] = true;
  }
  return j;
}

QaRecord record_from_json(const nlohmann::json& j) {
  QaRecord r;
  r.question = j.at("question").get<std::string>();
  r.answer = j.at("answer").get<std::string>();
  r.source_url = j.at("source_url").get<std::string>();
  r.engine = j.value("engine", std::string{});
  r.seed_id = j.value("seed_id", std::string{});
  r.query_text = j.value("query_text", std::string{});
  r.iteration = j.value("iteration", 0);
  r.location = j.value("location", std::string{});
  r.language = j.value("language", std::string{});
  r.topic = j.value("topic", std::string{});
  r.collected_at = j.value("collected_at", std::string{});
  r.reliability =
      reliability_from_string(j.value("reliability", std::string{"unchecked"}));
  if (j.contains("annotation") && !j["annotation"].is_null()) {
    r.annotation = annotation_from_json(j["annotation"]);
  }
  r.annotation_failed = j.value("annotation_failed", false);
  return r;
}

std::string iso_utc(std::chrono::system_clock::time_point t) {
  std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04u-%02u-%02uT%02u:%02u:%02uZ",
                static_cast<unsigned>(tm.tm_year + 1900) % 10000u,
                static_cast<unsigned>(tm.tm_mon + 1),
                static_cast<unsigned>(tm.tm_mday),
                static_cast<unsigned>(tm.tm_hour),
                static_cast<unsigned>(tm.tm_min),
                static_cast<unsigned>(tm.tm_sec));
  return buf;
}

std::string iso_utc_now() { return iso_utc(std::chrono::system_clock::now()); }

}  // namespace nativqa

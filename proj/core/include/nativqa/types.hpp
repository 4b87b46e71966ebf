#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace nativqa {

using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

enum class SeedOrigin { Manual, Template, Llm };

enum class Reliability {
  VeryReliable,
  PartiallyReliable,
  NotSure,
  CompletelyUnreliable,
  Unchecked,
};

enum class QuestionLabel { Good, Bad };

enum class AnnotatorKind { Llm, Human };

std::string_view to_string(SeedOrigin origin);
std::string_view to_string(Reliability reliability);
std::string_view to_string(QuestionLabel label);
std::string_view to_string(AnnotatorKind kind);

SeedOrigin seed_origin_from_string(std::string_view s);
Reliability reliability_from_string(std::string_view s);
QuestionLabel question_label_from_string(std::string_view s);
AnnotatorKind annotator_kind_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Core records
// ---------------------------------------------------------------------------

// A topic-tagged, location-bound query that bootstraps harvesting.
struct SeedQuery {
  std::string id;
  std::string text;
  std::string topic;
  std::string location;
  std::string language;
  SeedOrigin origin = SeedOrigin::Manual;
};

struct AnnotationResult {
  QuestionLabel question_label = QuestionLabel::Good;
  std::optional<std::string> edited_answer;  // absent when question_label == Bad
  bool location_relevant = false;
  AnnotatorKind annotator = AnnotatorKind::Llm;
  std::string annotator_id;
};

// One harvested question/answer pair with source attribution and lineage.
struct QaRecord {
  std::string question;
  std::string answer;
  std::string source_url;
  std::string engine;
  std::string seed_id;
  std::string query_text;  // the pool query that surfaced this pair
  int iteration = 0;
  std::string location;
  std::string language;
  std::string topic;
  std::string collected_at;  // ISO-8601 UTC
  Reliability reliability = Reliability::Unchecked;
  std::optional<AnnotationResult> annotation;
  bool annotation_failed = false;  // set when LLM annotation could not be parsed
};

// JSONL field order is part of the dataset contract; record_to_json emits the
// thirteen schema fields in their fixed order (annotation_failed is appended
// only when set).
OrderedJson record_to_json(const QaRecord& record);
QaRecord record_from_json(const nlohmann::json& j);

OrderedJson annotation_to_json(const AnnotationResult& annotation);
AnnotationResult annotation_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Time helpers
// ---------------------------------------------------------------------------

// "2025-01-31T08:00:00Z"
std::string iso_utc(std::chrono::system_clock::time_point t);
std::string iso_utc_now();

}  // namespace nativqa

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "nativqa/llm.hpp"
#include "nativqa/text.hpp"
#include "nativqa/types.hpp"

namespace nativqa {

// Allowlist (or denylist) of hosts and registrable domains, one per line,
// '#' comments. Entries are stored lowercase with any scheme or path
// stripped. A host matches when it equals an entry or when one of its
// parent domains with at least two labels does, so "blog.example.com"
// matches an "example.com" entry.
class DomainList {
 public:
  DomainList() = default;

  static DomainList load(const std::filesystem::path& path,
                         Reliability label_on_match = Reliability::VeryReliable,
                         std::string source = "");
  static DomainList from_lines(const std::vector<std::string>& lines,
                               Reliability label_on_match =
                                   Reliability::VeryReliable,
                               std::string source = "");

  bool matches_host(const std::string& host) const;
  Reliability label_on_match() const { return label_; }
  const std::string& source() const { return source_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;
  Reliability label_ = Reliability::VeryReliable;
  std::string source_;
};

// Labels the record by where its answer was found: the list label on a
// host match, not_sure otherwise (unlisted is not evidence of
// unreliability), completely_unreliable when the URL does not parse. The
// optional UGC list overrides an allowlist match for platforms whose
// content is user-generated. Never drops records.
QaRecord check_domain(const QaRecord& record, const DomainList& list,
                      const DomainList* ugc_denylist = nullptr);

// Stable filter on reliability labels. An empty keep set yields an empty
// result with a warning.
std::vector<QaRecord> filter_by_reliability(
    const std::vector<QaRecord>& records, const std::set<Reliability>& keep);

// The three annotation sub-tasks against a completion backend: validate the
// question, edit the answer from the source page, judge location relevance.
// Every reply must be a one-line JSON object; an unparseable reply gets one
// re-ask, after which the record is flagged annotation_failed and returned
// unannotated. Question and source_url are never mutated.
QaRecord annotate_llm(const QaRecord& record, CompletionBackend& backend,
                      const PromptSet& prompts, const std::string& location);

// Bounded-parallel annotation of a whole batch; output order = input order.
std::vector<QaRecord> annotate_all(const std::vector<QaRecord>& records,
                                   CompletionBackend& backend,
                                   const PromptSet& prompts,
                                   const std::string& location,
                                   std::size_t parallelism);

// Blinded A/B evaluation export: each record with an alternative answer
// becomes one task row whose two answers are presented in an order decided
// by the seeded RNG. The unblinding key maps task ids back to which side
// was the original. Records without an alternative are skipped with a
// warning.
struct PreferenceExport {
  std::size_t tasks_written = 0;
  std::size_t skipped = 0;
};

PreferenceExport export_preference_tasks(
    const std::vector<QaRecord>& records,
    const std::unordered_map<CanonicalKey, std::string>& alternatives,
    const std::filesystem::path& tasks_path,
    const std::filesystem::path& key_path, std::uint64_t seed);

}  // namespace nativqa

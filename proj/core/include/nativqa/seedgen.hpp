#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <unordered_set>
#include <vector>

#include "nativqa/llm.hpp"
#include "nativqa/text.hpp"
#include "nativqa/types.hpp"

namespace nativqa {

struct QueryTemplate {
  std::string id;
  std::string pattern;  // may contain literal "[LOCATION]" placeholders
  std::string topic;
};

struct SeedSet {
  std::vector<SeedQuery> queries;
  std::string location;
  std::string language;
};

// Canonical keys that must never appear in a seed set. Loaded from a plain
// text file, one key per line; lines are canonicalized on load so the file
// can hold either raw queries or precomputed keys.
class Denylist {
 public:
  Denylist() = default;
  static Denylist load(const std::filesystem::path& path);
  static Denylist from_lines(const std::vector<std::string>& lines);

  bool contains(const CanonicalKey& key) const {
    return keys_.count(key) > 0;
  }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_set<CanonicalKey> keys_;
};

// CSV with header id?,topic,query; one SeedQuery per non-empty row, in file
// order, origin = manual. Rows with a blank query are skipped with a warning.
std::vector<SeedQuery> load_manual_seeds(std::istream& in,
                                         const std::string& location,
                                         const std::string& language);
std::vector<SeedQuery> load_manual_seeds(const std::filesystem::path& path,
                                         const std::string& location,
                                         const std::string& language);

// Template file: either CSV with header id,topic,pattern or plain text with
// one pattern per line ('#' lines are comments in the plain form).
std::vector<QueryTemplate> load_templates(std::istream& in);
std::vector<QueryTemplate> load_templates(const std::filesystem::path& path);

// Replaces each literal "[LOCATION]" occurrence with the location string.
// Patterns without the placeholder pass through unchanged; expansions that
// end up blank are dropped with a warning.
std::vector<SeedQuery> expand_templates(
    const std::vector<QueryTemplate>& templates, const std::string& location,
    const std::string& language);

// Asks the completion backend for up to `count` queries about one topic.
// Each usable line of the completion becomes one SeedQuery with origin = llm;
// enumeration markers are stripped and blank lines dropped.
std::vector<SeedQuery> generate_llm_seeds(CompletionBackend& backend,
                                          const PromptTemplate& prompt,
                                          const std::string& location,
                                          const std::string& topic,
                                          const std::string& language,
                                          std::size_t count);

// Runs generate_llm_seeds for several topics with a bounded number of
// concurrent requests. Output order follows topic order regardless of which
// request finishes first.
std::vector<SeedQuery> generate_llm_seeds_multi(
    CompletionBackend& backend, const PromptTemplate& prompt,
    const std::string& location, const std::vector<std::string>& topics,
    const std::string& language, std::size_t count_per_topic,
    std::size_t parallelism);

// Filtering pass over raw seeds: keeps the first occurrence, drops exact
// duplicates (equal canonical key), then near duplicates (trigram Jaccard
// >= the duplicate threshold against any retained seed), then denylisted
// keys. Throws when nothing survives.
SeedSet build_seed_set(const std::vector<SeedQuery>& raw,
                       const std::string& location,
                       const std::string& language,
                       const Denylist& denylist = Denylist());

}  // namespace nativqa

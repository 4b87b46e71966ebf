#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace nativqa {

// Normalized form of a text used for exact-duplicate detection and as the
// keying side of cache digests and split hashing: NFKC, case-folded,
// Unicode punctuation stripped, whitespace runs collapsed to single spaces,
// trimmed. Construct via canonicalize(); equality on CanonicalKey is what
// "exact duplicate" means everywhere in this pipeline.
struct CanonicalKey {
  std::string value;

  bool empty() const { return value.empty(); }
  auto operator<=>(const CanonicalKey&) const = default;
};

CanonicalKey canonicalize(std::string_view text);

// Character-trigram Jaccard similarity between two canonical keys, in [0,1].
// Trigrams are over Unicode code points; a non-empty key shorter than three
// code points is padded with sentinels so it still yields one trigram.
// Equal keys compare 1.0; if exactly one side has no trigrams the result is 0.
double trigram_jaccard(const CanonicalKey& a, const CanonicalKey& b);

// A text's trigram set with each code-point triple packed into a uint64.
// Exposed so bulk dedup can build each set once.
using TrigramSet = std::unordered_set<std::uint64_t>;
TrigramSet trigram_set(const CanonicalKey& key);
double trigram_jaccard(const TrigramSet& a, const TrigramSet& b);

// Near-duplicate threshold used by seed filtering and QA dedup.
inline constexpr double kNearDuplicateThreshold = 0.85;

// Filesystem-safe slug for a location string ("Doha, Qatar" -> "doha_qatar").
std::string location_slug(std::string_view location);

// Whitespace trim (ASCII + Unicode spaces are already collapsed upstream;
// this is the plain byte-level helper used on raw strings).
std::string trim(std::string_view s);

}  // namespace nativqa

template <>
struct std::hash<nativqa::CanonicalKey> {
  std::size_t operator()(const nativqa::CanonicalKey& k) const noexcept {
    return std::hash<std::string>{}(k.value);
  }
};

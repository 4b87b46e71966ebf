#include "nativqa/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <cctype>

#include "nativqa/errors.hpp"

namespace nativqa {

namespace {

const icu::Normalizer2& nfkc() {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* instance = icu::Normalizer2::getNFKCInstance(ec);
  if (U_FAILURE(ec) || instance == nullptr) {
    throw Error("ICU NFKC normalizer unavailable");
  }
  return *instance;
}

// One pass of the canonical transform over UTF-8 input.
std::string transform_once(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));

  UErrorCode ec = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfkc().normalize(s, ec);
  if (U_FAILURE(ec)) {
    throw Error("ICU normalization failed");
  }
  normalized.foldCase(U_FOLD_CASE_DEFAULT);

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < normalized.length();) {
    UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    if (u_ispunct(c)) {
      continue;  // all general categories P*
    }
    if (u_isUWhiteSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.isEmpty()) {
      out.append(static_cast<UChar32>(' '));
    }
    pending_space = false;
    out.append(c);
  }

  std::string result;
  out.toUTF8String(result);
  return result;
}

// Decode UTF-8 to code points; invalid bytes become U+FFFD, matching ICU's
// fromUTF8 handling so trigram sets agree with canonicalization.
std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b < 0x80) {
      cp = b;
    } else if ((b >> 5) == 0x6 && i + 1 < s.size()) {
      cp = (b & 0x1F) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      len = 2;
    } else if ((b >> 4) == 0xE && i + 2 < s.size()) {
      cp = (b & 0x0F) << 12 |
           (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6 |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F);
      len = 3;
    } else if ((b >> 3) == 0x1E && i + 3 < s.size()) {
      cp = (b & 0x07) << 18 |
           (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12 |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6 |
           (static_cast<unsigned char>(s[i + 3]) & 0x3F);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

constexpr char32_t kPadSentinel = 0x0001;

constexpr std::uint64_t pack_trigram(char32_t a, char32_t b, char32_t c) {
  // Code points fit in 21 bits; three pack losslessly into 63.
  return (static_cast<std::uint64_t>(a) << 42) |
         (static_cast<std::uint64_t>(b) << 21) | static_cast<std::uint64_t>(c);
}

}  // namespace

CanonicalKey canonicalize(std::string_view text) {
  // Fold/normalize/strip is not guaranteed one-pass stable on every exotic
  // input, and idempotence is a contract here, so iterate to a fixed point.
  std::string current = transform_once(text);
  for (int round = 0; round < 4; ++round) {
    std::string next = transform_once(current);
    if (next == current) {
      break;
    }
    current = std::move(next);
  }
  return CanonicalKey{std::move(current)};
}

std::unordered_set<std::uint64_t> trigram_set(const CanonicalKey& key) {
  std::unordered_set<std::uint64_t> grams;
  if (key.value.empty()) {
    return grams;
  }
  std::vector<char32_t> cps = decode_utf8(key.value);
  while (cps.size() < 3) {
    cps.push_back(kPadSentinel);
  }
  grams.reserve(cps.size());
  for (std::size_t i = 0; i + 2 < cps.size(); ++i) {
    grams.insert(pack_trigram(cps[i], cps[i + 1], cps[i + 2]));
  }
  return grams;
}

double trigram_jaccard(const std::unordered_set<std::uint64_t>& a,
                       const std::unordered_set<std::uint64_t>& b) {
  if (a.empty() && b.empty()) {
    return 1.0;
  }
  if (a.empty() || b.empty()) {
    return 0.0;
  }
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t common = 0;
  for (std::uint64_t g : small) {
    if (large.count(g)) {
      ++common;
    }
  }
  std::size_t unioned = a.size() + b.size() - common;
  return static_cast<double>(common) / static_cast<double>(unioned);
}

double trigram_jaccard(const CanonicalKey& a, const CanonicalKey& b) {
  if (a.value == b.value) {
    return 1.0;
  }
  return trigram_jaccard(trigram_set(a), trigram_set(b));
}

std::string location_slug(std::string_view location) {
  CanonicalKey key = canonicalize(location);
  std::string slug;
  slug.reserve(key.value.size());
  for (char c : key.value) {
    slug.push_back(c == ' ' ? '_' : c);
  }
  if (slug.empty()) {
    slug = "unknown";
  }
  return slug;
}

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return std::string(s.substr(begin, end - begin));
}

}  // namespace nativqa

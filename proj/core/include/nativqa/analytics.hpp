#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace nativqa {

// ---------------------------------------------------------------------------
// Rating ingestion
// ---------------------------------------------------------------------------

enum class RatingKind { Preference, Likert };

// The three options a preference annotator chooses between.
enum class PreferenceChoice { Answer1, LlmEdited, Neither };

std::string_view to_string(RatingKind kind);
std::string_view to_string(PreferenceChoice choice);
RatingKind rating_kind_from_string(std::string_view s);
PreferenceChoice preference_from_string(std::string_view s);

// One annotator's judgment of one item: either a preference choice or a
// per-metric Likert map, matching kind.
struct RatingRecord {
  std::string item_id;
  std::string rater_id;
  RatingKind kind = RatingKind::Preference;
  std::optional<PreferenceChoice> preference;
  std::map<std::string, int> likert;  // metric -> value on the Likert scale
  bool edited_by_annotator = false;
};

RatingRecord rating_from_json(const nlohmann::json& j);
nlohmann::json rating_to_json(const RatingRecord& record);

// JSONL, one RatingRecord per line. Malformed lines raise ParseError with
// the line number.
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Categorical agreement (two raters)
// ---------------------------------------------------------------------------

// table[i][j] = number of items rater 1 put in category i and rater 2 in j.
// Must be square; the side is the category universe C, which may exceed the
// observed categories.
using ContingencyTable = std::vector<std::vector<std::size_t>>;

double observed_agreement(const ContingencyTable& table);

struct KappaResult {
  double value = 0.0;
  bool degenerate = false;  // p_e = 1: both raters constant on one category
};
// (p_o - p_e) / (1 - p_e) with p_e from the product of marginals. Exactly
// 1.0 under perfect agreement.
KappaResult cohen_kappa(const ContingencyTable& table);

struct Ac1Result {
  double value = 0.0;
  bool degenerate = false;  // C = 1
};
// (p_o - pe_gamma) / (1 - pe_gamma) with
// pe_gamma = (1/(C-1)) * sum_c pi_c (1 - pi_c), pi_c the mean of the two
// raters' marginal proportions.
Ac1Result gwet_ac1(const ContingencyTable& table);

struct RwgResult {
  double value = 0.0;
  bool clamped = false;  // raw value was negative
};
// Lindell variant of the within-group agreement index:
// 1 - mean(per-item sample variance) / sigma_EU^2 with
// sigma_EU^2 = (A^2 - 1) / 12 for an A-point scale. Negative raw values
// clamp to 0 with the flag set.
RwgResult rwg_star(const std::vector<std::vector<int>>& ratings_per_item,
                   int scale_points);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct AgreementReport {
  double observed_agreement = 0.0;
  double cohen_kappa = 0.0;
  double gwet_ac1 = 0.0;
  bool kappa_degenerate = false;
  bool ac1_degenerate = false;
  std::size_t n_items = 0;
  std::size_t n_raters = 0;
  std::size_t n_categories = 0;
};

// Two-rater agreement over preference ratings. The category universe is the
// full option set (answer_1, llm_edited, neither) whether or not every
// option was used. Items missing a rater raise an error listing their ids.
AgreementReport preference_agreement(const std::vector<RatingRecord>& ratings);

struct LikertReport {
  int scale_points = 5;
  std::size_t n_items = 0;
  std::size_t n_raters = 0;
  std::vector<std::string> metrics;  // sorted
  std::map<std::string, double> mean;
  std::map<std::string, RwgResult> rwg;
  double pct_not_edited = 0.0;  // share of ratings with no annotator edit
};

LikertReport likert_report(const std::vector<RatingRecord>& ratings,
                           int scale_points);

std::string format_agreement_report(const AgreementReport& report);
// Per-metric mean Likert plus the agreement index, one row per metric.
std::string format_likert_report(const LikertReport& report);
std::string likert_report_to_csv(const LikertReport& report);

// ---------------------------------------------------------------------------
// Dataset distribution
// ---------------------------------------------------------------------------

struct SplitCounts {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;
  std::size_t total() const { return train + dev + test; }
};

struct StatsRow {
  std::string language;
  std::string location;
  SplitCounts counts;
};

struct DatasetStats {
  std::vector<StatsRow> rows;  // sorted by (language, location)
  SplitCounts totals;
};

DatasetStats make_dataset_stats(std::vector<StatsRow> rows);

// Scans an output tree laid out as <dir>/<language>/<location>/{train,dev,
// test}.jsonl, counting one record per line.
DatasetStats scan_dataset_stats(const std::filesystem::path& out_dir);

std::string stats_to_csv(const DatasetStats& stats);
std::string format_stats_table(const DatasetStats& stats);

}  // namespace nativqa

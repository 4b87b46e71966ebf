#include "nativqa/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "nativqa/errors.hpp"
#include "nativqa/text.hpp"

namespace nativqa {

// ---------------------------------------------------------------------------
// Rating ingestion
// ---------------------------------------------------------------------------

std::string_view to_string(RatingKind kind) {
  return kind == RatingKind::Preference ? "preference" : "likert";
}

std::string_view to_string(PreferenceChoice choice) {
  switch (choice) {
    case PreferenceChoice::Answer1:
      return "answer_1";
    case PreferenceChoice::LlmEdited:
      return "llm_edited";
    case PreferenceChoice::Neither:
      return "neither";
  }
  return "neither";
}

RatingKind rating_kind_from_string(std::string_view s) {
  if (s == "preference") {
    return RatingKind::Preference;
  }
  if (s == "likert") {
    return RatingKind::Likert;
  }
  throw ParseError("unknown rating kind: '" + std::string(s) + "'");
}

PreferenceChoice preference_from_string(std::string_view s) {
  if (s == "answer_1") {
    return PreferenceChoice::Answer1;
  }
  if (s == "llm_edited") {
    return PreferenceChoice::LlmEdited;
  }
  if (s == "neither") {
    return PreferenceChoice::Neither;
  }
  throw ParseError("unknown preference choice: '" + std::string(s) + "'");
}

RatingRecord rating_from_json(const nlohmann::json& j) {
  RatingRecord r;
  r.item_id = j.at("item_id").get<std::string>();
  r.rater_id = j.at("rater_id").get<std::string>();
  r.kind = rating_kind_from_string(j.at("kind").get<std::string>());
  r.edited_by_annotator = j.value("edited_by_annotator", false);
  bool has_preference = j.contains("preference") && !j["preference"].is_null();
  bool has_likert = j.contains("likert") && !j["likert"].is_null();
  if (has_preference == has_likert) {
    throw ParseError(
        "rating must carry exactly one of preference/likert, matching kind");
  }
  if (r.kind == RatingKind::Preference) {
    if (!has_preference) {
      throw ParseError("preference rating is missing its preference field");
    }
    r.preference =
        preference_from_string(j.at("preference").get<std::string>());
  } else {
    if (!has_likert) {
      throw ParseError("likert rating is missing its likert field");
    }
    for (const auto& [metric, value] : j.at("likert").items()) {
      if (!value.is_number_integer()) {
        throw ParseError("likert value for '" + metric +
                         "' is not an integer");
      }
      int v = value.get<int>();
      if (v < 1 || v > 5) {
        throw ParseError("likert value for '" + metric +
                         "' is out of the 1..5 range");
      }
      r.likert[metric] = v;
    }
    if (r.likert.empty()) {
      throw ParseError("likert rating has no metrics");
    }
  }
  return r;
}

nlohmann::json rating_to_json(const RatingRecord& record) {
  nlohmann::json j;
  j["item_id"] = record.item_id;
  j["rater_id"] = record.rater_id;
  j["kind"] = std::string(to_string(record.kind));
  if (record.kind == RatingKind::Preference) {
    j["preference"] = std::string(to_string(*record.preference));
  } else {
    j["likert"] = record.likert;
  }
  j["edited_by_annotator"] = record.edited_by_annotator;
  return j;
}

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open ratings file: " + path.string());
  }
  std::vector<RatingRecord> ratings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    try {
      ratings.push_back(rating_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) +
                       ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) +
                       ": " + e.what());
    }
  }
  return ratings;
}

// ---------------------------------------------------------------------------
// Categorical agreement
// ---------------------------------------------------------------------------

namespace {

std::size_t table_total(const ContingencyTable& table) {
  std::size_t total = 0;
  for (const auto& row : table) {
    for (std::size_t cell : row) {
      total += cell;
    }
  }
  return total;
}

void check_square(const ContingencyTable& table) {
  for (const auto& row : table) {
    if (row.size() != table.size()) {
      throw ConfigError("contingency table must be square");
    }
  }
  if (table_total(table) == 0) {
    throw ConfigError("contingency table has no rated items");
  }
}

}  // namespace

double observed_agreement(const ContingencyTable& table) {
  check_square(table);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    agree += table[i][i];
  }
  return static_cast<double>(agree) / static_cast<double>(table_total(table));
}

KappaResult cohen_kappa(const ContingencyTable& table) {
  check_square(table);
  double n = static_cast<double>(table_total(table));
  double p_o = observed_agreement(table);
  double p_e = 0.0;
  for (std::size_t c = 0; c < table.size(); ++c) {
    double row_marginal = 0.0;
    double col_marginal = 0.0;
    for (std::size_t k = 0; k < table.size(); ++k) {
      row_marginal += static_cast<double>(table[c][k]);
      col_marginal += static_cast<double>(table[k][c]);
    }
    p_e += (row_marginal / n) * (col_marginal / n);
  }
  if (p_e >= 1.0) {
    return {1.0, true};
  }
  if (p_o == 1.0) {
    return {1.0, false};
  }
  return {(p_o - p_e) / (1.0 - p_e), false};
}

Ac1Result gwet_ac1(const ContingencyTable& table) {
  check_square(table);
  std::size_t c_count = table.size();
  if (c_count < 2) {
    return {1.0, true};
  }
  double n = static_cast<double>(table_total(table));
  double p_o = observed_agreement(table);
  double pe_gamma = 0.0;
  for (std::size_t c = 0; c < c_count; ++c) {
    double row_marginal = 0.0;
    double col_marginal = 0.0;
    for (std::size_t k = 0; k < c_count; ++k) {
      row_marginal += static_cast<double>(table[c][k]);
      col_marginal += static_cast<double>(table[k][c]);
    }
    double pi_c = (row_marginal / n + col_marginal / n) / 2.0;
    pe_gamma += pi_c * (1.0 - pi_c);
  }
  pe_gamma /= static_cast<double>(c_count - 1);
  if (pe_gamma >= 1.0) {
    return {1.0, true};
  }
  if (p_o == 1.0) {
    return {1.0, false};
  }
  return {(p_o - pe_gamma) / (1.0 - pe_gamma), false};
}

RwgResult rwg_star(const std::vector<std::vector<int>>& ratings_per_item,
                   int scale_points) {
  if (scale_points < 2) {
    throw ConfigError("rwg_star needs a scale with at least 2 points");
  }
  if (ratings_per_item.empty()) {
    throw ConfigError("rwg_star needs at least one rated item");
  }
  double variance_sum = 0.0;
  for (std::size_t i = 0; i < ratings_per_item.size(); ++i) {
    const auto& ratings = ratings_per_item[i];
    if (ratings.size() < 2) {
      throw ConfigError("rwg_star item " + std::to_string(i) +
                        " has fewer than 2 ratings");
    }
    double mean = 0.0;
    for (int r : ratings) {
      if (r < 1 || r > scale_points) {
        throw ConfigError("rwg_star rating " + std::to_string(r) +
                          " is outside the 1.." +
                          std::to_string(scale_points) + " scale");
      }
      mean += static_cast<double>(r);
    }
    mean /= static_cast<double>(ratings.size());
    double ss = 0.0;
    for (int r : ratings) {
      double d = static_cast<double>(r) - mean;
      ss += d * d;
    }
    variance_sum += ss / static_cast<double>(ratings.size() - 1);
  }
  double mean_variance =
      variance_sum / static_cast<double>(ratings_per_item.size());
  double sigma_eu =
      (static_cast<double>(scale_points) * scale_points - 1.0) / 12.0;
  double value = 1.0 - mean_variance / sigma_eu;
  if (value < 0.0) {
    return {0.0, true};
  }
  return {value, false};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

AgreementReport preference_agreement(
    const std::vector<RatingRecord>& ratings) {
  std::set<std::string> raters;
  // item -> rater -> choice, insertion-ordered for stable error messages
  std::vector<std::string> item_order;
  std::map<std::string, std::map<std::string, PreferenceChoice>> by_item;
  for (const auto& r : ratings) {
    if (r.kind != RatingKind::Preference) {
      continue;
    }
    raters.insert(r.rater_id);
    if (by_item.find(r.item_id) == by_item.end()) {
      item_order.push_back(r.item_id);
    }
    by_item[r.item_id][r.rater_id] = *r.preference;
  }
  if (by_item.empty()) {
    throw ConfigError("no preference ratings found");
  }
  if (raters.size() != 2) {
    throw ConfigError("preference agreement needs exactly 2 raters, found " +
                      std::to_string(raters.size()));
  }
  auto rater_it = raters.begin();
  std::string rater_a = *rater_it++;
  std::string rater_b = *rater_it;

  std::vector<std::string> missing;
  ContingencyTable table(3, std::vector<std::size_t>(3, 0));
  for (const auto& item_id : item_order) {
    const auto& raters_of_item = by_item[item_id];
    auto a = raters_of_item.find(rater_a);
    auto b = raters_of_item.find(rater_b);
    if (a == raters_of_item.end() || b == raters_of_item.end()) {
      missing.push_back(item_id);
      continue;
    }
    table[static_cast<std::size_t>(a->second)]
         [static_cast<std::size_t>(b->second)] += 1;
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) {
      if (!ids.empty()) {
        ids += ", ";
      }
      ids += id;
    }
    throw ConfigError("items missing a rater: " + ids);
  }

  AgreementReport report;
  report.observed_agreement = observed_agreement(table);
  auto kappa = cohen_kappa(table);
  report.cohen_kappa = kappa.value;
  report.kappa_degenerate = kappa.degenerate;
  auto ac1 = gwet_ac1(table);
  report.gwet_ac1 = ac1.value;
  report.ac1_degenerate = ac1.degenerate;
  report.n_items = item_order.size();
  report.n_raters = 2;
  report.n_categories = 3;
  return report;
}

LikertReport likert_report(const std::vector<RatingRecord>& ratings,
                           int scale_points) {
  LikertReport report;
  report.scale_points = scale_points;

  std::set<std::string> raters;
  std::set<std::string> metrics;
  std::vector<std::string> item_order;
  // item -> metric -> ratings in input order
  std::map<std::string, std::map<std::string, std::vector<int>>> by_item;
  std::size_t n_ratings = 0;
  std::size_t n_not_edited = 0;
  for (const auto& r : ratings) {
    if (r.kind != RatingKind::Likert) {
      continue;
    }
    raters.insert(r.rater_id);
    ++n_ratings;
    if (!r.edited_by_annotator) {
      ++n_not_edited;
    }
    if (by_item.find(r.item_id) == by_item.end()) {
      item_order.push_back(r.item_id);
    }
    for (const auto& [metric, value] : r.likert) {
      metrics.insert(metric);
      by_item[r.item_id][metric].push_back(value);
    }
  }
  if (by_item.empty()) {
    throw ConfigError("no likert ratings found");
  }

  for (const auto& metric : metrics) {
    std::vector<std::vector<int>> per_item;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& item_id : item_order) {
      auto it = by_item[item_id].find(metric);
      if (it == by_item[item_id].end()) {
        continue;
      }
      if (it->second.size() < 2) {
        throw ConfigError("item '" + item_id + "' has fewer than 2 ratings " +
                          "for metric '" + metric + "'");
      }
      per_item.push_back(it->second);
      for (int v : it->second) {
        sum += static_cast<double>(v);
        ++count;
      }
    }
    if (per_item.empty()) {
      throw ConfigError("metric '" + metric + "' has no rated items");
    }
    report.metrics.push_back(metric);
    report.mean[metric] = sum / static_cast<double>(count);
    report.rwg[metric] = rwg_star(per_item, scale_points);
  }

  report.n_items = item_order.size();
  report.n_raters = raters.size();
  report.pct_not_edited =
      100.0 * static_cast<double>(n_not_edited) /
      static_cast<double>(n_ratings);
  return report;
}

namespace {

std::string fixed(double value, int precision) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << value;
  return out.str();
}

}  // namespace

std::string format_agreement_report(const AgreementReport& report) {
  std::ostringstream out;
  out << "items: " << report.n_items << "  raters: " << report.n_raters
      << "  categories: " << report.n_categories << "\n";
  out << "observed_agreement  " << fixed(report.observed_agreement, 4) << "\n";
  out << "cohen_kappa         " << fixed(report.cohen_kappa, 4);
  if (report.kappa_degenerate) {
    out << "  (degenerate: single category)";
  }
  out << "\n";
  out << "gwet_ac1            " << fixed(report.gwet_ac1, 4);
  if (report.ac1_degenerate) {
    out << "  (degenerate: single category)";
  }
  out << "\n";
  return out.str();
}

std::string format_likert_report(const LikertReport& report) {
  std::size_t width = 0;
  for (const auto& metric : report.metrics) {
    width = std::max(width, metric.size());
  }
  width = std::max(width, std::string("metric").size());

  std::ostringstream out;
  out << "items: " << report.n_items << "  raters: " << report.n_raters
      << "  scale: 1-" << report.scale_points << "\n";
  out << std::left << std::setw(static_cast<int>(width) + 2) << "metric"
      << std::right << std::setw(12) << "avg_likert" << std::setw(10)
      << "rwg_star" << "\n";
  for (const auto& metric : report.metrics) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << metric
        << std::right << std::setw(12) << fixed(report.mean.at(metric), 2)
        << std::setw(10) << fixed(report.rwg.at(metric).value, 3);
    if (report.rwg.at(metric).clamped) {
      out << "  (clamped)";
    }
    out << "\n";
  }
  out << "answers_not_edited: " << fixed(report.pct_not_edited, 1) << "%\n";
  return out.str();
}

std::string likert_report_to_csv(const LikertReport& report) {
  std::ostringstream out;
  out << "metric,avg_likert,rwg_star,clamped\n";
  for (const auto& metric : report.metrics) {
    out << metric << ',' << fixed(report.mean.at(metric), 4) << ','
        << fixed(report.rwg.at(metric).value, 6) << ','
        << (report.rwg.at(metric).clamped ? "true" : "false") << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Dataset distribution
// ---------------------------------------------------------------------------

DatasetStats make_dataset_stats(std::vector<StatsRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const StatsRow& a, const StatsRow& b) {
    if (a.language != b.language) {
      return a.language < b.language;
    }
    return a.location < b.location;
  });
  DatasetStats stats;
  stats.rows = std::move(rows);
  for (const auto& row : stats.rows) {
    stats.totals.train += row.counts.train;
    stats.totals.dev += row.counts.dev;
    stats.totals.test += row.counts.test;
  }
  return stats;
}

namespace {

std::size_t count_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return 0;
  }
  std::size_t count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      ++count;
    }
  }
  return count;
}

}  // namespace

DatasetStats scan_dataset_stats(const std::filesystem::path& out_dir) {
  std::vector<StatsRow> rows;
  if (!std::filesystem::exists(out_dir)) {
    throw IoError("dataset directory does not exist: " + out_dir.string());
  }
  for (const auto& lang_entry :
       std::filesystem::directory_iterator(out_dir)) {
    if (!lang_entry.is_directory()) {
      continue;
    }
    for (const auto& loc_entry :
         std::filesystem::directory_iterator(lang_entry.path())) {
      if (!loc_entry.is_directory()) {
        continue;
      }
      StatsRow row;
      row.language = lang_entry.path().filename().string();
      row.location = loc_entry.path().filename().string();
      row.counts.train = count_lines(loc_entry.path() / "train.jsonl");
      row.counts.dev = count_lines(loc_entry.path() / "dev.jsonl");
      row.counts.test = count_lines(loc_entry.path() / "test.jsonl");
      if (row.counts.total() > 0 ||
          std::filesystem::exists(loc_entry.path() / "manifest.json")) {
        rows.push_back(std::move(row));
      }
    }
  }
  return make_dataset_stats(std::move(rows));
}

std::string stats_to_csv(const DatasetStats& stats) {
  std::ostringstream out;
  out << "language,location,train,dev,test,total\n";
  for (const auto& row : stats.rows) {
    out << row.language << ',' << row.location << ',' << row.counts.train
        << ',' << row.counts.dev << ',' << row.counts.test << ','
        << row.counts.total() << "\n";
  }
  out << "TOTAL,," << stats.totals.train << ',' << stats.totals.dev << ','
      << stats.totals.test << ',' << stats.totals.total() << "\n";
  return out.str();
}

std::string format_stats_table(const DatasetStats& stats) {
  std::size_t lang_width = std::string("language").size();
  std::size_t loc_width = std::string("location").size();
  for (const auto& row : stats.rows) {
    lang_width = std::max(lang_width, row.language.size());
    loc_width = std::max(loc_width, row.location.size());
  }

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(lang_width) + 2) << "language"
      << std::setw(static_cast<int>(loc_width) + 2) << "location" << std::right
      << std::setw(9) << "train" << std::setw(8) << "dev" << std::setw(8)
      << "test" << std::setw(9) << "total" << "\n";
  for (const auto& row : stats.rows) {
    out << std::left << std::setw(static_cast<int>(lang_width) + 2)
        << row.language << std::setw(static_cast<int>(loc_width) + 2)
        << row.location << std::right << std::setw(9) << row.counts.train
        << std::setw(8) << row.counts.dev << std::setw(8) << row.counts.test
        << std::setw(9) << row.counts.total() << "\n";
  }
  out << std::left << std::setw(static_cast<int>(lang_width) + 2) << "TOTAL"
      << std::setw(static_cast<int>(loc_width) + 2) << "" << std::right
      << std::setw(9) << stats.totals.train << std::setw(8) << stats.totals.dev
      << std::setw(8) << stats.totals.test << std::setw(9)
      << stats.totals.total() << "\n";
  return out.str();
}

}  // namespace nativqa

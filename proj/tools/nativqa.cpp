// Command-line front end for the QA harvesting pipeline: seed preparation,
// iterative search-engine harvesting, reliability checking, optional LLM
// annotation, split export, and the evaluation reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "nativqa/analytics.hpp"
#include "nativqa/cache.hpp"
#include "nativqa/csv.hpp"
#include "nativqa/curate.hpp"
#include "nativqa/dataset_io.hpp"
#include "nativqa/engines.hpp"
#include "nativqa/env_file.hpp"
#include "nativqa/errors.hpp"
#include "nativqa/harvest.hpp"
#include "nativqa/llm.hpp"
#include "nativqa/seedgen.hpp"
#include "nativqa/text.hpp"
#include "nativqa/types.hpp"

namespace {

using namespace nativqa;

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEngine = 3;

EnvFile load_env(const std::string& env_path, bool required) {
  std::string path = env_path;
  if (path.empty()) {
    if (const char* from_env = std::getenv("NATIVQA_ENV")) {
      path = from_env;
    }
  }
  if (path.empty()) {
    if (required) {
      throw ConfigError("no env file: pass --env or set NATIVQA_ENV");
    }
    return EnvFile();
  }
  return EnvFile::load(path);
}

std::filesystem::path resolve_cache_dir(const std::string& flag_value,
                                        const std::filesystem::path& out_dir) {
  if (!flag_value.empty()) {
    return flag_value;
  }
  if (const char* from_env = std::getenv("NATIVQA_CACHE_DIR")) {
    return from_env;
  }
  return out_dir / ".cache";
}

std::set<Reliability> parse_keep_labels(const std::string& csv) {
  std::set<Reliability> keep;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto comma = csv.find(',', start);
    std::string token = trim(csv.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!token.empty()) {
      if (token == "all") {
        keep.insert({Reliability::VeryReliable, Reliability::PartiallyReliable,
                     Reliability::NotSure, Reliability::CompletelyUnreliable,
                     Reliability::Unchecked});
      } else {
        keep.insert(reliability_from_string(token));
      }
    }
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return keep;
}

void write_seed_csv(const std::vector<SeedQuery>& seeds,
                    const std::filesystem::path& path, bool with_origin) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write seed file: " + path.string());
  }
  if (with_origin) {
    write_csv_row(out, {"id", "topic", "query", "origin"});
  } else {
    write_csv_row(out, {"id", "topic", "query"});
  }
  for (const auto& seed : seeds) {
    if (with_origin) {
      write_csv_row(out, {seed.id, seed.topic, seed.text,
                          std::string(to_string(seed.origin))});
    } else {
      write_csv_row(out, {seed.id, seed.topic, seed.text});
    }
  }
  out.flush();
  if (!out) {
    throw IoError("short write on seed file: " + path.string());
  }
}

std::unique_ptr<CompletionBackend> make_completion_backend(
    const std::string& name, const EnvFile& env) {
  if (name == "stub") {
    return std::make_unique<StubCompletionBackend>();
  }
  if (name == "http") {
    return std::make_unique<HttpCompletionBackend>(
        HttpCompletionBackend::from_env(env));
  }
  throw ConfigError("unknown completion backend '" + name +
                    "' (expected stub or http)");
}

// ---------------------------------------------------------------------------
// harvest
// ---------------------------------------------------------------------------

struct HarvestConfig {
  std::string engine;
  std::string search_type = "text";
  std::string input_file;
  std::string country_code;
  std::string location;
  std::string language = "en";
  std::string env_path;
  int n_iter = 1;
  std::string cache_dir;
  std::string out_dir = "nativqa_out";
  std::size_t parallelism = 4;
  std::string reliability_keep = "very_reliable";
  std::string annotate = "off";
  std::uint64_t seed = 42;
  std::string fixture;
  bool full_pool = false;
  long cache_max_age = 0;  // seconds; 0 = never expires
  std::string denylist;
  std::string domains;
  std::string ugc_denylist;
  bool drop_irrelevant = false;
  std::size_t min_split_size = 1000;
  std::string prompt_dir;
};

int cmd_harvest(const HarvestConfig& config) {
  SearchRequest prototype;
  prototype.engine = config.engine;
  prototype.search_type = search_type_from_string(config.search_type);
  prototype.location = config.location;
  prototype.country_code = config.country_code;
  prototype.language = config.language;
  if (config.n_iter < 0) {
    throw ConfigError("--n_iter must be non-negative");
  }

  EnvFile env = load_env(config.env_path, config.engine != "mock");

  Denylist denylist;
  if (!config.denylist.empty()) {
    denylist = Denylist::load(config.denylist);
  }
  auto raw_seeds =
      load_manual_seeds(config.input_file, config.location, config.language);
  auto seeds = build_seed_set(raw_seeds, config.location, config.language,
                              denylist);

  auto backend = make_backend(config.engine, env, config.fixture);
  std::filesystem::path out_dir = config.out_dir;
  auto cache_dir = resolve_cache_dir(config.cache_dir, out_dir);
  std::optional<std::chrono::seconds> max_age;
  if (config.cache_max_age > 0) {
    max_age = std::chrono::seconds(config.cache_max_age);
  }
  ResponseCache cache(cache_dir, max_age);

  // Scratch state (checkpoint, run report) lives outside the dataset
  // directory so dataset bytes depend only on the harvested content.
  std::string run_slug =
      config.language + "_" + location_slug(config.location);
  auto scratch_dir = out_dir / ".run";
  std::error_code ec;
  std::filesystem::create_directories(scratch_dir, ec);

  HarvestOptions options;
  options.n_iter = config.n_iter;
  options.parallelism = config.parallelism;
  options.full_pool = config.full_pool;
  options.cache = &cache;
  options.checkpoint_path = scratch_dir / (run_slug + ".checkpoint.jsonl");

  std::filesystem::path dataset_dir;
  HarvestCounters counters;
  std::size_t harvested = 0;
  std::size_t after_drc = 0;
  std::size_t annotated = 0;

  if (prototype.search_type == SearchType::Images) {
    auto images = run_image_harvest(seeds, *backend, prototype, options,
                                    &counters);
    dataset_dir = out_dir / config.language / location_slug(config.location);
    std::filesystem::create_directories(dataset_dir, ec);
    std::ostringstream content;
    for (const auto& image : images) {
      OrderedJson j;
      j["query_text"] = image.query_text;
      j["seed_id"] = image.seed_id;
      j["topic"] = image.topic;
      j["image_url"] = image.image_url;
      j["source_page_url"] = image.source_page_url;
      j["title"] = image.title;
      j["engine"] = image.engine;
      j["location"] = image.location;
      j["language"] = image.language;
      j["collected_at"] = image.collected_at;
      content << j.dump() << '\n';
    }
    std::ofstream images_out(dataset_dir / "images.jsonl", std::ios::binary);
    if (!images_out) {
      throw IoError("cannot write images.jsonl under " + dataset_dir.string());
    }
    images_out << content.str();
    images_out.flush();
    harvested = images.size();
    std::cout << "collected " << images.size() << " image results into "
              << (dataset_dir / "images.jsonl").string() << "\n";
  } else {
    auto state = run_harvest(seeds, *backend, prototype, options);
    counters = state.counters;
    harvested = state.qa_set.size();

    std::vector<QaRecord> records = std::move(state.qa_set);

    // Reliability checking runs only when a domain list is supplied;
    // without one every record would be not_sure and the default keep set
    // would empty the dataset.
    if (!config.domains.empty()) {
      DomainList allow = DomainList::load(config.domains);
      DomainList ugc;
      const DomainList* ugc_ptr = nullptr;
      if (!config.ugc_denylist.empty()) {
        ugc = DomainList::load(config.ugc_denylist,
                               Reliability::CompletelyUnreliable);
        ugc_ptr = &ugc;
      }
      for (auto& record : records) {
        record = check_domain(record, allow, ugc_ptr);
      }
      records = filter_by_reliability(
          records, parse_keep_labels(config.reliability_keep));
    }
    after_drc = records.size();

    if (config.annotate != "off") {
      PromptSet prompts = config.prompt_dir.empty()
                              ? default_prompts()
                              : load_prompts(config.prompt_dir);
      std::unique_ptr<CompletionBackend> llm;
      if (config.annotate == "llm") {
        llm = std::make_unique<HttpCompletionBackend>(
            HttpCompletionBackend::from_env(env));
      } else if (config.annotate == "stub") {
        llm = std::make_unique<StubCompletionBackend>();
      } else {
        throw ConfigError("--annotate must be off, llm or stub");
      }
      records = annotate_all(records, *llm, prompts, config.location,
                             config.parallelism);
      for (const auto& record : records) {
        if (record.annotation) {
          ++annotated;
        }
      }
      if (config.drop_irrelevant) {
        std::vector<QaRecord> kept;
        for (auto& record : records) {
          if (record.annotation && !record.annotation->location_relevant) {
            continue;
          }
          kept.push_back(std::move(record));
        }
        records = std::move(kept);
      }
    }

    SplitRatios ratios;
    dataset_dir = write_dataset(records, out_dir, config.language,
                                config.location, ratios, config.seed,
                                config.min_split_size);

    // Distribution CSV for this run's dataset, next to the manifest.
    auto stats = scan_dataset_stats(out_dir);
    std::ofstream stats_out(dataset_dir / "stats.csv", std::ios::binary);
    if (stats_out) {
      stats_out << stats_to_csv(stats);
    }
    std::cout << "wrote dataset splits under " << dataset_dir.string() << "\n";
  }

  auto cache_stats = cache.stats();
  double lookups =
      static_cast<double>(cache_stats.hits + cache_stats.misses);
  double hit_rate =
      lookups > 0 ? static_cast<double>(cache_stats.hits) / lookups : 0.0;

  OrderedJson report;
  report["engine"] = config.engine;
  report["search_type"] = config.search_type;
  report["location"] = config.location;
  report["language"] = config.language;
  report["n_iter"] = config.n_iter;
  report["seeds"] = seeds.queries.size();
  report["harvested"] = harvested;
  if (prototype.search_type == SearchType::Text) {
    report["after_reliability_filter"] = after_drc;
    report["annotated"] = annotated;
  }
  report["counters"] = {{"fetched", counters.fetched},
                        {"cache_hits", counters.cache_hits},
                        {"dropped_duplicates", counters.dropped_duplicates},
                        {"dropped_incomplete", counters.dropped_incomplete},
                        {"errors", counters.errors}};
  report["cache"] = {{"hits", cache_stats.hits},
                     {"misses", cache_stats.misses},
                     {"hit_rate", hit_rate}};
  std::ofstream report_out(scratch_dir / (run_slug + ".report.json"));
  if (report_out) {
    report_out << report.dump(2) << '\n';
  }

  std::cout << "run report: fetched=" << counters.fetched
            << " cache_hits=" << counters.cache_hits
            << " dropped_duplicates=" << counters.dropped_duplicates
            << " dropped_incomplete=" << counters.dropped_incomplete
            << " errors=" << counters.errors << " cache_hit_rate=" << hit_rate
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// seeds
// ---------------------------------------------------------------------------

struct SeedsExpandConfig {
  std::string templates;
  std::string location;
  std::string language = "en";
  std::string denylist;
  std::string out = "seeds_expanded.csv";
};

int cmd_seeds_expand(const SeedsExpandConfig& config) {
  auto templates = load_templates(config.templates);
  auto expanded =
      expand_templates(templates, config.location, config.language);
  Denylist denylist;
  if (!config.denylist.empty()) {
    denylist = Denylist::load(config.denylist);
  }
  auto seeds = build_seed_set(expanded, config.location, config.language,
                              denylist);
  write_seed_csv(seeds.queries, config.out, /*with_origin=*/false);
  std::cout << "wrote " << seeds.queries.size() << " seeds to " << config.out
            << "\n";
  return kExitOk;
}

struct SeedsGenerateConfig {
  std::string backend = "stub";
  std::vector<std::string> topics;
  std::size_t count = 5;
  std::string location;
  std::string language = "en";
  std::string env_path;
  std::string prompt_dir;
  std::size_t parallelism = 2;
  std::string denylist;
  std::string out = "seeds_generated.csv";
  std::string review;
};

int cmd_seeds_generate(const SeedsGenerateConfig& config) {
  EnvFile env = load_env(config.env_path, config.backend == "http");
  auto backend = make_completion_backend(config.backend, env);
  PromptSet prompts = config.prompt_dir.empty()
                          ? default_prompts()
                          : load_prompts(config.prompt_dir);
  auto raw = generate_llm_seeds_multi(*backend, prompts.seed_generation,
                                      config.location, config.topics,
                                      config.language, config.count,
                                      config.parallelism);
  Denylist denylist;
  if (!config.denylist.empty()) {
    denylist = Denylist::load(config.denylist);
  }
  auto seeds =
      build_seed_set(raw, config.location, config.language, denylist);
  write_seed_csv(seeds.queries, config.out, /*with_origin=*/false);

  // Generated queries still need a human pass before use; the review file
  // carries the origin column so reviewers see where each row came from.
  std::string review_path =
      config.review.empty() ? config.out + ".review.csv" : config.review;
  write_seed_csv(seeds.queries, review_path, /*with_origin=*/true);
  std::cout << "wrote " << seeds.queries.size() << " seeds to " << config.out
            << " (review copy: " << review_path << ")\n";
  return kExitOk;
}

struct SeedsMergeConfig {
  std::vector<std::string> inputs;
  std::string location;
  std::string language = "en";
  std::string denylist;
  std::string out = "seeds_merged.csv";
};

int cmd_seeds_merge(const SeedsMergeConfig& config) {
  std::vector<SeedQuery> raw;
  for (const auto& input : config.inputs) {
    auto seeds = load_manual_seeds(input, config.location, config.language);
    raw.insert(raw.end(), seeds.begin(), seeds.end());
  }
  Denylist denylist;
  if (!config.denylist.empty()) {
    denylist = Denylist::load(config.denylist);
  }
  auto seeds =
      build_seed_set(raw, config.location, config.language, denylist);
  write_seed_csv(seeds.queries, config.out, /*with_origin=*/false);
  std::cout << "wrote " << seeds.queries.size() << " seeds to " << config.out
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats / agree / prefs
// ---------------------------------------------------------------------------

int cmd_stats(const std::string& out_dir, const std::string& csv_path) {
  auto stats = scan_dataset_stats(out_dir);
  std::cout << format_stats_table(stats);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) {
      throw IoError("cannot write stats CSV: " + csv_path);
    }
    out << stats_to_csv(stats);
    std::cout << "wrote " << csv_path << "\n";
  }
  return kExitOk;
}

int cmd_agree(const std::string& ratings_path, const std::string& kind,
              int scale, const std::string& csv_path) {
  auto ratings = load_ratings(ratings_path);
  if (ratings.empty()) {
    throw ConfigError("ratings file is empty: " + ratings_path);
  }
  if (kind == "preference") {
    auto report = preference_agreement(ratings);
    std::cout << format_agreement_report(report);
  } else if (kind == "likert") {
    auto report = likert_report(ratings, scale);
    std::cout << format_likert_report(report);
    if (!csv_path.empty()) {
      std::ofstream out(csv_path);
      if (!out) {
        throw IoError("cannot write agreement CSV: " + csv_path);
      }
      out << likert_report_to_csv(report);
      std::cout << "wrote " << csv_path << "\n";
    }
  } else {
    throw ConfigError("--kind must be preference or likert");
  }
  return kExitOk;
}

struct PrefsConfig {
  std::string dataset;
  std::string out = "preference_tasks.jsonl";
  std::string key = "preference_key.csv";
  std::uint64_t seed = 42;
};

int cmd_prefs(const PrefsConfig& config) {
  auto imported = import_jsonl(config.dataset);
  for (const auto& reject : imported.rejects) {
    std::cerr << "warning: " << config.dataset << " line " << reject.line_no
              << " rejected: " << reject.reason << "\n";
  }
  std::unordered_map<CanonicalKey, std::string> alternatives;
  for (const auto& record : imported.records) {
    if (record.annotation && record.annotation->edited_answer) {
      alternatives[canonicalize(record.question)] =
          *record.annotation->edited_answer;
    }
  }
  auto result = export_preference_tasks(imported.records, alternatives,
                                        config.out, config.key, config.seed);
  std::cout << "wrote " << result.tasks_written << " tasks to " << config.out
            << " (key: " << config.key << ", skipped " << result.skipped
            << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Builds location- and language-specific QA datasets by expanding seed "
      "queries through a search engine's related-question surface, then "
      "filtering, annotating and splitting the harvested pairs."};
  app.require_subcommand(1);

  // harvest
  HarvestConfig harvest_config;
  auto* harvest = app.add_subcommand(
      "harvest", "Run the full pipeline: seeds -> iterative search harvest -> "
                 "reliability check -> optional annotation -> dataset splits");
  harvest->add_option("--engine", harvest_config.engine,
                      "Search backend id (google, bing, ... via the SERP API "
                      "endpoint; 'mock' for the offline fixture backend)")
      ->required();
  harvest->add_option("--search_type,--search-type",
                      harvest_config.search_type,
                      "Search surface: text or images")
      ->check(CLI::IsMember({"text", "images"}));
  harvest->add_option("--input_file,--input-file", harvest_config.input_file,
                      "Seed query CSV with header id,topic,query")
      ->required();
  harvest->add_option("--country_code,--country-code",
                      harvest_config.country_code,
                      "Two-letter country code passed to the engine (e.g. qa)")
      ->required();
  harvest->add_option("--location", harvest_config.location,
                      "Location string for the engine and the dataset "
                      "(e.g. \"Doha, Qatar\")")
      ->required();
  harvest->add_option("--language", harvest_config.language,
                      "Language tag for the engine and the dataset");
  harvest->add_option("--env", harvest_config.env_path,
                      "KEY=VALUE env file with API credentials "
                      "(default: $NATIVQA_ENV)");
  harvest
      ->add_option("--n_iter,--n-iter", harvest_config.n_iter,
                   "Number of expansion iterations over the query pool")
      ->check(CLI::NonNegativeNumber);
  harvest
      ->add_option("--limit", harvest_config.n_iter,
                   "Deprecated alias for --n_iter")
      ->check(CLI::NonNegativeNumber);
  harvest->add_option("--cache-dir", harvest_config.cache_dir,
                      "Response cache directory (default: $NATIVQA_CACHE_DIR "
                      "or <out-dir>/.cache)");
  harvest->add_option("--out-dir", harvest_config.out_dir,
                      "Dataset output directory");
  harvest
      ->add_option("--parallelism", harvest_config.parallelism,
                   "Maximum concurrent backend requests")
      ->check(CLI::PositiveNumber);
  harvest->add_option("--reliability-keep", harvest_config.reliability_keep,
                      "Comma-separated reliability labels to keep after the "
                      "domain check (or 'all')");
  harvest->add_option("--annotate", harvest_config.annotate,
                      "QA annotation backend: off, llm (HTTP API from the env "
                      "file) or stub (offline testing backend)")
      ->check(CLI::IsMember({"off", "llm", "stub"}));
  harvest->add_option("--seed", harvest_config.seed,
                      "Seed for the deterministic split assignment");
  harvest->add_option("--fixture", harvest_config.fixture,
                      "Fixture JSON for --engine mock "
                      "(default: $NATIVQA_MOCK_FIXTURE)");
  harvest->add_flag("--full-pool", harvest_config.full_pool,
                    "Refetch the entire query pool every iteration instead "
                    "of only the new frontier");
  harvest->add_option("--cache-max-age", harvest_config.cache_max_age,
                      "Expire cache entries older than this many seconds "
                      "(0 = never)");
  harvest->add_option("--denylist", harvest_config.denylist,
                      "File of queries to exclude from the seed set, one per "
                      "line");
  harvest->add_option("--domains", harvest_config.domains,
                      "Reliable-domain list for the reliability check, one "
                      "host per line; without it the check is skipped");
  harvest->add_option("--ugc-denylist", harvest_config.ugc_denylist,
                      "Domains whose content is user-generated; matches are "
                      "labeled completely_unreliable");
  harvest->add_flag("--drop-irrelevant", harvest_config.drop_irrelevant,
                    "Drop records the annotator judged not relevant to the "
                    "location");
  harvest->add_option("--min-split-size", harvest_config.min_split_size,
                      "Datasets smaller than this go entirely to the test "
                      "split");
  harvest->add_option("--prompt-dir", harvest_config.prompt_dir,
                      "Directory overriding the built-in prompt templates");

  // seeds
  auto* seeds = app.add_subcommand("seeds", "Seed-set preparation utilities");
  seeds->require_subcommand(1);

  SeedsExpandConfig expand_config;
  auto* seeds_expand = seeds->add_subcommand(
      "expand", "Expand location templates into a filtered seed CSV");
  seeds_expand
      ->add_option("--templates", expand_config.templates,
                   "Template file: CSV with header id,topic,pattern or plain "
                   "text, one pattern per line; patterns may contain "
                   "[LOCATION]")
      ->required();
  seeds_expand->add_option("--location", expand_config.location,
                           "Location substituted for [LOCATION]")
      ->required();
  seeds_expand->add_option("--language", expand_config.language,
                           "Language tag recorded on the seeds");
  seeds_expand->add_option("--denylist", expand_config.denylist,
                           "Queries to exclude, one per line");
  seeds_expand->add_option("--out", expand_config.out, "Output CSV path");

  SeedsGenerateConfig generate_config;
  auto* seeds_generate = seeds->add_subcommand(
      "generate", "Generate topic seeds with a completion backend");
  seeds_generate->add_option("--backend", generate_config.backend,
                             "Completion backend: stub or http")
      ->check(CLI::IsMember({"stub", "http"}));
  seeds_generate
      ->add_option("--topic", generate_config.topics,
                   "Topic to generate queries for (repeatable)")
      ->required();
  seeds_generate
      ->add_option("--count", generate_config.count,
                   "Queries to request per topic")
      ->check(CLI::PositiveNumber);
  seeds_generate->add_option("--location", generate_config.location,
                             "Location the queries should be about")
      ->required();
  seeds_generate->add_option("--language", generate_config.language,
                             "Language tag recorded on the seeds");
  seeds_generate->add_option("--env", generate_config.env_path,
                             "Env file with LLM_API_URL / LLM_API_KEY / "
                             "LLM_MODEL (http backend)");
  seeds_generate->add_option("--prompt-dir", generate_config.prompt_dir,
                             "Directory overriding the built-in prompt "
                             "templates");
  seeds_generate->add_option("--parallelism", generate_config.parallelism,
                             "Concurrent generation requests");
  seeds_generate->add_option("--denylist", generate_config.denylist,
                             "Queries to exclude, one per line");
  seeds_generate->add_option("--out", generate_config.out, "Output CSV path");
  seeds_generate->add_option("--review", generate_config.review,
                             "Review-copy CSV path (default: <out>.review.csv)");

  SeedsMergeConfig merge_config;
  auto* seeds_merge = seeds->add_subcommand(
      "merge", "Merge seed CSVs into one deduplicated set");
  seeds_merge->add_option("inputs", merge_config.inputs, "Seed CSV files")
      ->required()
      ->expected(-1);
  seeds_merge->add_option("--location", merge_config.location,
                          "Location recorded on the seeds")
      ->required();
  seeds_merge->add_option("--language", merge_config.language,
                          "Language tag recorded on the seeds");
  seeds_merge->add_option("--denylist", merge_config.denylist,
                          "Queries to exclude, one per line");
  seeds_merge->add_option("--out", merge_config.out, "Output CSV path");

  // stats
  std::string stats_dir;
  std::string stats_csv;
  auto* stats = app.add_subcommand(
      "stats", "Report dataset sizes per language, location and split");
  stats->add_option("out_dir", stats_dir, "Dataset output directory")
      ->required();
  stats->add_option("--csv", stats_csv, "Also write the report as CSV");

  // agree
  std::string agree_path;
  std::string agree_kind = "preference";
  int agree_scale = 5;
  std::string agree_csv;
  auto* agree = app.add_subcommand(
      "agree", "Compute annotator agreement from a ratings JSONL file");
  agree->add_option("ratings", agree_path, "Ratings JSONL file")->required();
  agree->add_option("--kind", agree_kind,
                    "Rating kind: preference (categorical agreement) or "
                    "likert (per-metric agreement index)")
      ->check(CLI::IsMember({"preference", "likert"}));
  agree->add_option("--scale", agree_scale, "Likert scale points")
      ->check(CLI::Range(2, 100));
  agree->add_option("--csv", agree_csv, "Also write the report as CSV");

  // prefs
  PrefsConfig prefs_config;
  auto* prefs = app.add_subcommand(
      "prefs", "Export blinded A/B preference tasks from an annotated "
               "dataset");
  prefs->add_option("dataset", prefs_config.dataset,
                    "Annotated dataset JSONL file")
      ->required();
  prefs->add_option("--out", prefs_config.out, "Task JSONL output path");
  prefs->add_option("--key", prefs_config.key, "Unblinding key CSV path");
  prefs->add_option("--seed", prefs_config.seed,
                    "Seed for the blinded answer order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (harvest->parsed()) {
      return cmd_harvest(harvest_config);
    }
    if (seeds_expand->parsed()) {
      return cmd_seeds_expand(expand_config);
    }
    if (seeds_generate->parsed()) {
      return cmd_seeds_generate(generate_config);
    }
    if (seeds_merge->parsed()) {
      return cmd_seeds_merge(merge_config);
    }
    if (stats->parsed()) {
      return cmd_stats(stats_dir, stats_csv);
    }
    if (agree->parsed()) {
      return cmd_agree(agree_path, agree_kind, agree_scale, agree_csv);
    }
    if (prefs->parsed()) {
      return cmd_prefs(prefs_config);
    }
  } catch (const QuotaError& e) {
    std::cerr << "error (quota): " << e.what() << "\n";
    return kExitEngine;
  } catch (const EngineError& e) {
    std::cerr << "error (engine): " << e.what() << "\n";
    return kExitEngine;
  } catch (const SchemaError& e) {
    std::cerr << "error (engine payload): " << e.what() << "\n";
    return kExitEngine;
  } catch (const BackendError& e) {
    std::cerr << "error (llm backend): " << e.what() << "\n";
    return kExitEngine;
  } catch (const ConfigError& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "error (input): " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitOk;
}

#include "nativqa/harvest.hpp"

#include <atomic>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "nativqa/errors.hpp"
#include "nativqa/log.hpp"

namespace nativqa {

namespace {

struct FetchOutcome {
  std::optional<SearchResponse> response;
  std::exception_ptr error;
  bool from_cache = false;
};

// Fetches the given pool entries cache-first with a bounded number of
// worker threads. Outcomes land at the index of their query, so the caller
// can merge in deterministic pool order no matter how the fetches
// interleaved. A quota error makes the remaining workers stop picking up
// new queries.
std::vector<FetchOutcome> fetch_all(const std::vector<PoolQuery>& queries,
                                    SearchBackend& backend,
                                    const SearchRequest& prototype,
                                    const HarvestOptions& options) {
  std::vector<FetchOutcome> outcomes(queries.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> quota_hit{false};

  auto worker = [&]() {
    while (!quota_hit.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= queries.size()) {
        return;
      }
      SearchRequest request = prototype;
      request.query = queries[i].text;
      FetchOutcome& slot = outcomes[i];
      try {
        if (options.cache) {
          if (auto cached = options.cache->get(request)) {
            slot.response = std::move(*cached);
            slot.from_cache = true;
            continue;
          }
        }
        slot.response = backend.fetch(request);
        if (options.cache) {
          try {
            options.cache->put(request, *slot.response);
          } catch (const IoError& e) {
            warn(std::string("cache write failed: ") + e.what());
          }
        }
      } catch (const QuotaError&) {
        slot.error = std::current_exception();
        quota_hit.store(true);
      } catch (const std::exception&) {
        slot.error = std::current_exception();
      }
    }
  };

  std::size_t n_threads = options.parallelism > 0 ? options.parallelism : 1;
  n_threads = std::min(n_threads, queries.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < n_threads; ++i) {
      threads.emplace_back(worker);
    }
    for (auto& t : threads) {
      t.join();
    }
  }

  // Quota failures surface in pool order for reproducible abort messages.
  for (auto& outcome : outcomes) {
    if (outcome.error) {
      try {
        std::rethrow_exception(outcome.error);
      } catch (const QuotaError&) {
        throw;
      } catch (...) {
      }
    }
  }
  return outcomes;
}

}  // namespace

HarvestState init_harvest_state(const SeedSet& seeds) {
  HarvestState state;
  for (const auto& seed : seeds.queries) {
    auto key = canonicalize(seed.text);
    if (key.empty() || state.pool_keys.count(key) > 0) {
      continue;
    }
    state.pool_keys.insert(std::move(key));
    state.frontier.push_back(state.query_pool.size());
    state.query_pool.push_back({seed.text, seed.id, seed.topic, 0});
  }
  return state;
}

HarvestState run_iteration(HarvestState state, SearchBackend& backend,
                           const SearchRequest& prototype,
                           const HarvestOptions& options) {
  int iteration = state.iteration + 1;

  std::vector<std::size_t> targets;
  if (options.full_pool) {
    targets.resize(state.query_pool.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      targets[i] = i;
    }
  } else {
    targets = state.frontier;
  }

  // Copies, not pointers: the pool growth below reallocates query_pool
  // while the batch lineage is still being read.
  std::vector<PoolQuery> queries;
  queries.reserve(targets.size());
  for (std::size_t idx : targets) {
    queries.push_back(state.query_pool[idx]);
  }

  auto outcomes = fetch_all(queries, backend, prototype, options);

  std::size_t failed = 0;
  for (const auto& outcome : outcomes) {
    if (outcome.from_cache) {
      ++state.counters.cache_hits;
    } else if (outcome.response) {
      ++state.counters.fetched;
    }
    if (outcome.error) {
      ++failed;
      ++state.counters.errors;
      try {
        std::rethrow_exception(outcome.error);
      } catch (const std::exception& e) {
        warn(std::string("query failed, skipping: ") + e.what());
      }
    }
  }
  if (!outcomes.empty() && failed == outcomes.size()) {
    throw Error("iteration " + std::to_string(iteration) + " failed for all " +
                std::to_string(outcomes.size()) + " queries");
  }

  // The iteration's QA batch, deduplicated on questions: canonical-exact
  // first, then near-duplicates against what this batch already retained.
  std::vector<QaRecord> batch;
  std::unordered_set<CanonicalKey> batch_keys;
  std::vector<TrigramSet> batch_trigrams;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].response) {
      continue;
    }
    const SearchResponse& response = *outcomes[i].response;
    const PoolQuery& source = queries[i];
    state.counters.dropped_incomplete += response.dropped_incomplete;
    for (const auto& item : response.qa_items) {
      auto key = canonicalize(item.question);
      if (key.empty()) {
        ++state.counters.dropped_incomplete;
        continue;
      }
      if (batch_keys.count(key) > 0) {
        ++state.counters.dropped_duplicates;
        continue;
      }
      auto trigrams = trigram_set(key);
      bool near_duplicate = false;
      for (const auto& prior : batch_trigrams) {
        if (trigram_jaccard(prior, trigrams) >= kNearDuplicateThreshold) {
          near_duplicate = true;
          break;
        }
      }
      if (near_duplicate) {
        ++state.counters.dropped_duplicates;
        continue;
      }
      batch_keys.insert(key);
      batch_trigrams.push_back(std::move(trigrams));

      QaRecord record;
      record.question = item.question;
      record.answer = item.answer;
      record.source_url = item.source_url;
      record.engine = prototype.engine;
      record.seed_id = source.seed_id;
      record.query_text = source.text;
      record.iteration = iteration;
      record.location = prototype.location;
      record.language = prototype.language;
      record.topic = source.topic;
      record.collected_at = response.fetched_at;
      record.reliability = Reliability::Unchecked;
      batch.push_back(std::move(record));
    }
  }

  // Merge into the accumulated set; across iterations dedup is
  // canonical-exact, first occurrence wins.
  for (auto& record : batch) {
    auto key = canonicalize(record.question);
    if (state.qa_keys.count(key) > 0) {
      ++state.counters.dropped_duplicates;
      continue;
    }
    state.qa_keys.insert(std::move(key));
    state.qa_set.push_back(std::move(record));
  }

  // Pool growth: related queries unseen so far join the pool and form the
  // next frontier, inheriting the lineage of the query that suggested them.
  std::vector<std::size_t> new_frontier;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].response) {
      continue;
    }
    const PoolQuery& source = queries[i];
    for (const auto& text : outcomes[i].response->related_queries) {
      auto key = canonicalize(text);
      if (key.empty() || state.pool_keys.count(key) > 0) {
        continue;
      }
      state.pool_keys.insert(std::move(key));
      new_frontier.push_back(state.query_pool.size());
      state.query_pool.push_back(
          {text, source.seed_id, source.topic, iteration});
    }
  }

  state.frontier = std::move(new_frontier);
  state.iteration = iteration;
  return state;
}

HarvestState run_harvest(const SeedSet& seeds, SearchBackend& backend,
                         const SearchRequest& prototype,
                         const HarvestOptions& options) {
  HarvestState state = init_harvest_state(seeds);
  for (int i = 0; i < options.n_iter; ++i) {
    state = run_iteration(std::move(state), backend, prototype, options);
    if (!options.checkpoint_path.empty()) {
      write_checkpoint(state, options.checkpoint_path);
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

void write_checkpoint(const HarvestState& state,
                      const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp_path = path;
  tmp_path += ".tmp";
  {
    std::ofstream out(tmp_path);
    if (!out) {
      throw IoError("cannot write checkpoint: " + tmp_path.string());
    }
    std::unordered_set<std::size_t> frontier(state.frontier.begin(),
                                             state.frontier.end());
    nlohmann::json meta;
    meta["type"] = "meta";
    meta["iteration"] = state.iteration;
    meta["counters"] = {{"fetched", state.counters.fetched},
                        {"cache_hits", state.counters.cache_hits},
                        {"dropped_duplicates", state.counters.dropped_duplicates},
                        {"dropped_incomplete", state.counters.dropped_incomplete},
                        {"errors", state.counters.errors}};
    out << meta.dump() << '\n';
    for (std::size_t i = 0; i < state.query_pool.size(); ++i) {
      const auto& q = state.query_pool[i];
      nlohmann::json line;
      line["type"] = "pool";
      line["text"] = q.text;
      line["seed_id"] = q.seed_id;
      line["topic"] = q.topic;
      line["added_iteration"] = q.added_iteration;
      line["frontier"] = frontier.count(i) > 0;
      out << line.dump() << '\n';
    }
    for (const auto& record : state.qa_set) {
      nlohmann::json line;
      line["type"] = "qa";
      line["record"] = record_to_json(record);
      out << line.dump() << '\n';
    }
    out.flush();
    if (!out) {
      throw IoError("short write on checkpoint: " + tmp_path.string());
    }
  }
  std::filesystem::rename(tmp_path, path, ec);
  if (ec) {
    throw IoError("cannot install checkpoint " + path.string() + ": " +
                  ec.message());
  }
}

HarvestState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open checkpoint: " + path.string());
  }
  HarvestState state;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("checkpoint " + path.string() + " line " +
                       std::to_string(line_no) + ": " + e.what());
    }
    std::string type = j.value("type", "");
    if (type == "meta") {
      state.iteration = j.value("iteration", 0);
      if (j.contains("counters")) {
        const auto& c = j.at("counters");
        state.counters.fetched = c.value("fetched", std::size_t{0});
        state.counters.cache_hits = c.value("cache_hits", std::size_t{0});
        state.counters.dropped_duplicates =
            c.value("dropped_duplicates", std::size_t{0});
        state.counters.dropped_incomplete =
            c.value("dropped_incomplete", std::size_t{0});
        state.counters.errors = c.value("errors", std::size_t{0});
      }
    } else if (type == "pool") {
      PoolQuery q;
      q.text = j.at("text").get<std::string>();
      q.seed_id = j.value("seed_id", "");
      q.topic = j.value("topic", "");
      q.added_iteration = j.value("added_iteration", 0);
      auto key = canonicalize(q.text);
      if (state.pool_keys.count(key) > 0) {
        continue;
      }
      state.pool_keys.insert(std::move(key));
      if (j.value("frontier", false)) {
        state.frontier.push_back(state.query_pool.size());
      }
      state.query_pool.push_back(std::move(q));
    } else if (type == "qa") {
      QaRecord record = record_from_json(j.at("record"));
      auto key = canonicalize(record.question);
      if (state.qa_keys.count(key) > 0) {
        continue;
      }
      state.qa_keys.insert(std::move(key));
      state.qa_set.push_back(std::move(record));
    } else {
      throw ParseError("checkpoint " + path.string() + " line " +
                       std::to_string(line_no) + ": unknown type '" + type +
                       "'");
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Image harvesting
// ---------------------------------------------------------------------------

std::vector<ImageRecord> run_image_harvest(const SeedSet& seeds,
                                           SearchBackend& backend,
                                           const SearchRequest& prototype,
                                           const HarvestOptions& options,
                                           HarvestCounters* counters) {
  HarvestState state = init_harvest_state(seeds);
  std::vector<PoolQuery> queries = state.query_pool;

  auto outcomes = fetch_all(queries, backend, prototype, options);

  std::size_t failed = 0;
  std::vector<ImageRecord> records;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].from_cache && counters) {
      ++counters->cache_hits;
    } else if (outcomes[i].response && counters) {
      ++counters->fetched;
    }
    if (outcomes[i].error) {
      ++failed;
      if (counters) {
        ++counters->errors;
      }
      try {
        std::rethrow_exception(outcomes[i].error);
      } catch (const std::exception& e) {
        warn(std::string("image query failed, skipping: ") + e.what());
      }
      continue;
    }
    const SearchResponse& response = *outcomes[i].response;
    const PoolQuery& source = queries[i];
    for (const auto& item : response.image_items) {
      ImageRecord record;
      record.query_text = source.text;
      record.seed_id = source.seed_id;
      record.topic = source.topic;
      record.image_url = item.image_url;
      record.source_page_url = item.source_page_url;
      record.title = item.title;
      record.engine = prototype.engine;
      record.location = prototype.location;
      record.language = prototype.language;
      record.collected_at = response.fetched_at;
      records.push_back(std::move(record));
    }
  }
  if (!outcomes.empty() && failed == outcomes.size()) {
    throw Error("image search failed for all " +
                std::to_string(outcomes.size()) + " queries");
  }
  return records;
}

}  // namespace nativqa

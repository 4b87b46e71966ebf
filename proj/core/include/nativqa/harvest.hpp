#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "nativqa/cache.hpp"
#include "nativqa/engines.hpp"
#include "nativqa/seedgen.hpp"
#include "nativqa/text.hpp"
#include "nativqa/types.hpp"

namespace nativqa {

// One entry of the enriched query pool with its seed lineage.
struct PoolQuery {
  std::string text;
  std::string seed_id;  // seed whose expansion chain surfaced this query
  std::string topic;
  int added_iteration = 0;  // 0 for seeds
};

struct HarvestCounters {
  std::size_t fetched = 0;  // real backend dispatches
  std::size_t cache_hits = 0;
  std::size_t dropped_duplicates = 0;
  std::size_t dropped_incomplete = 0;
  std::size_t errors = 0;  // queries skipped after exhausting retries
};

// The loop state: the query pool, the frontier added by the last iteration,
// and the accumulated deduplicated QA set.
struct HarvestState {
  std::vector<PoolQuery> query_pool;
  std::unordered_set<CanonicalKey> pool_keys;
  std::vector<std::size_t> frontier;  // indices into query_pool
  std::vector<QaRecord> qa_set;
  std::unordered_set<CanonicalKey> qa_keys;
  int iteration = 0;
  HarvestCounters counters;
};

struct HarvestOptions {
  int n_iter = 1;
  std::size_t parallelism = 4;
  // Refetch the whole pool every iteration instead of only the frontier.
  // Observably equivalent for qa_set and query_pool; costs more requests
  // on a cold cache.
  bool full_pool = false;
  ResponseCache* cache = nullptr;                // optional
  std::filesystem::path checkpoint_path;         // empty: no checkpoints
};

HarvestState init_harvest_state(const SeedSet& seeds);

// One pass of the loop body: fetches every frontier query (cache-first,
// bounded fan-out), builds the iteration's QA batch, deduplicates it
// (canonical-exact, then near-duplicate questions), merges survivors into
// qa_set, appends unseen related queries to the pool and makes them the new
// frontier. Queries that keep failing are skipped and counted; an iteration
// where every query failed throws. Quota exhaustion aborts immediately.
HarvestState run_iteration(HarvestState state, SearchBackend& backend,
                           const SearchRequest& prototype,
                           const HarvestOptions& options);

// Runs n_iter iterations from the seed set and returns the final state
// (qa_set plus enriched pool). Deterministic given a deterministic backend:
// results depend only on seed order, backend contents and n_iter. Writes a
// checkpoint after every iteration when options name a path.
HarvestState run_harvest(const SeedSet& seeds, SearchBackend& backend,
                         const SearchRequest& prototype,
                         const HarvestOptions& options);

// Checkpoints are JSONL with one typed object per line (meta, pool, qa),
// replaced atomically on every write.
void write_checkpoint(const HarvestState& state,
                      const std::filesystem::path& path);
HarvestState load_checkpoint(const std::filesystem::path& path);

// Image collection is a single pass over the seed queries: image results
// have no related-query surface to expand.
struct ImageRecord {
  std::string query_text;
  std::string seed_id;
  std::string topic;
  std::string image_url;
  std::string source_page_url;
  std::string title;
  std::string engine;
  std::string location;
  std::string language;
  std::string collected_at;
};

std::vector<ImageRecord> run_image_harvest(const SeedSet& seeds,
                                           SearchBackend& backend,
                                           const SearchRequest& prototype,
                                           const HarvestOptions& options,
                                           HarvestCounters* counters = nullptr);

}  // namespace nativqa

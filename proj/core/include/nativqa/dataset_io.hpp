#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nativqa/text.hpp"
#include "nativqa/types.hpp"

namespace nativqa {

enum class Split { Train, Dev, Test };

std::string_view to_string(Split split);
Split split_from_string(std::string_view s);

struct SplitRatios {
  double train = 0.70;
  double dev = 0.10;
  double test = 0.20;

  // Throws ConfigError unless the ratios are non-negative and sum to 1
  // within 1e-9.
  void validate() const;
};

// Pure function of (canonical question key, seed): hashes the key into
// [0,1) and cuts at the cumulative ratios. Records keep their assignment
// when new records arrive, since nothing else enters the hash.
Split assign_split(const CanonicalKey& question_key, std::uint64_t seed,
                   const SplitRatios& ratios);

struct ExportManifest {
  std::size_t count = 0;
  std::string sha256;  // digest of the file's bytes
};

// One record per line, fixed field order, trailing newline per line.
// Deterministic: identical records yield an identical digest.
ExportManifest export_jsonl(const std::vector<QaRecord>& records,
                            const std::filesystem::path& path);

struct ImportReject {
  std::size_t line_no = 0;
  std::string reason;
};

struct ImportResult {
  std::vector<QaRecord> records;
  std::vector<ImportReject> rejects;
};

// Parses a JSONL dataset file. Malformed lines go to the reject report;
// more than 10% rejected lines is a hard error.
ImportResult import_jsonl(const std::filesystem::path& path);

struct SplitResult {
  std::vector<QaRecord> train;
  std::vector<QaRecord> dev;
  std::vector<QaRecord> test;
  bool all_test = false;  // under min_size_threshold everything goes to test
};

// Deterministic hash split at the given ratios. Datasets smaller than
// min_size_threshold go entirely to test.
SplitResult split_dataset(const std::vector<QaRecord>& records,
                          const SplitRatios& ratios, std::uint64_t seed,
                          std::size_t min_size_threshold = 1000);

// Writes the public layout for one (language, location) dataset:
//
//   <out_dir>/<language>/<location_slug>/{train,dev,test}.jsonl
//   <out_dir>/<language>/<location_slug>/manifest.json
//
// and returns the directory written. The manifest carries per-split counts
// and digests plus the split configuration; it contains no timestamps, so
// re-running an identical harvest reproduces every byte.
std::filesystem::path write_dataset(const std::vector<QaRecord>& records,
                                    const std::filesystem::path& out_dir,
                                    const std::string& language,
                                    const std::string& location,
                                    const SplitRatios& ratios,
                                    std::uint64_t seed,
                                    std::size_t min_size_threshold = 1000);

}  // namespace nativqa

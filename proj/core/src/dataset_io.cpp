#include "nativqa/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nativqa/errors.hpp"
#include "nativqa/sha256.hpp"

namespace nativqa {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train:
      return "train";
    case Split::Dev:
      return "dev";
    case Split::Test:
      return "test";
  }
  return "test";
}

Split split_from_string(std::string_view s) {
  if (s == "train") {
    return Split::Train;
  }
  if (s == "dev") {
    return Split::Dev;
  }
  if (s == "test") {
    return Split::Test;
  }
  throw ParseError("unknown split: '" + std::string(s) + "'");
}

void SplitRatios::validate() const {
  if (train < 0.0 || dev < 0.0 || test < 0.0) {
    throw ConfigError("split ratios must be non-negative");
  }
  if (std::abs(train + dev + test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

Split assign_split(const CanonicalKey& question_key, std::uint64_t seed,
                   const SplitRatios& ratios) {
  ratios.validate();
  double u = sha256_unit_interval(question_key.value + "\x1f" +
                                  std::to_string(seed));
  if (u < ratios.train) {
    return Split::Train;
  }
  if (u < ratios.train + ratios.dev) {
    return Split::Dev;
  }
  return Split::Test;
}

ExportManifest export_jsonl(const std::vector<QaRecord>& records,
                            const std::filesystem::path& path) {
  std::ostringstream content;
  for (const auto& record : records) {
    content << record_to_json(record).dump() << '\n';
  }
  std::string bytes = content.str();

  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " +
                    path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write dataset file: " + path.string());
  }
  out << bytes;
  out.flush();
  if (!out) {
    throw IoError("short write on dataset file: " + path.string());
  }

  ExportManifest manifest;
  manifest.count = records.size();
  manifest.sha256 = sha256_hex(bytes);
  return manifest;
}

ImportResult import_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open dataset file: " + path.string());
  }
  ImportResult result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t considered = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    ++considered;
    try {
      result.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      result.rejects.push_back({line_no, e.what()});
    }
  }
  if (considered > 0 &&
      static_cast<double>(result.rejects.size()) >
          0.10 * static_cast<double>(considered)) {
    throw ParseError(path.string() + ": " +
                     std::to_string(result.rejects.size()) + " of " +
                     std::to_string(considered) +
                     " lines rejected (over the 10% limit)");
  }
  return result;
}

SplitResult split_dataset(const std::vector<QaRecord>& records,
                          const SplitRatios& ratios, std::uint64_t seed,
                          std::size_t min_size_threshold) {
  ratios.validate();
  SplitResult result;
  if (records.size() < min_size_threshold) {
    result.all_test = true;
    result.test = records;
    return result;
  }
  for (const auto& record : records) {
    switch (assign_split(canonicalize(record.question), seed, ratios)) {
      case Split::Train:
        result.train.push_back(record);
        break;
      case Split::Dev:
        result.dev.push_back(record);
        break;
      case Split::Test:
        result.test.push_back(record);
        break;
    }
  }
  return result;
}

std::filesystem::path write_dataset(const std::vector<QaRecord>& records,
                                    const std::filesystem::path& out_dir,
                                    const std::string& language,
                                    const std::string& location,
                                    const SplitRatios& ratios,
                                    std::uint64_t seed,
                                    std::size_t min_size_threshold) {
  auto dir = out_dir / language / location_slug(location);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create dataset directory " + dir.string() + ": " +
                  ec.message());
  }

  auto split = split_dataset(records, ratios, seed, min_size_threshold);
  auto train = export_jsonl(split.train, dir / "train.jsonl");
  auto dev = export_jsonl(split.dev, dir / "dev.jsonl");
  auto test = export_jsonl(split.test, dir / "test.jsonl");

  OrderedJson manifest;
  manifest["language"] = language;
  manifest["location"] = location;
  manifest["location_slug"] = location_slug(location);
  manifest["seed"] = seed;
  manifest["ratios"] = {{"train", ratios.train},
                        {"dev", ratios.dev},
                        {"test", ratios.test}};
  manifest["min_size_threshold"] = min_size_threshold;
  manifest["all_test"] = split.all_test;
  manifest["splits"] = {
      {"train", {{"count", train.count}, {"sha256", train.sha256}}},
      {"dev", {{"count", dev.count}, {"sha256", dev.sha256}}},
      {"test", {{"count", test.count}, {"sha256", test.sha256}}}};
  manifest["total"] = records.size();

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) {
    throw IoError("cannot write manifest: " + (dir / "manifest.json").string());
  }
  out << manifest.dump(2) << '\n';
  out.flush();
  if (!out) {
    throw IoError("short write on manifest: " +
                  (dir / "manifest.json").string());
  }
  return dir;
}

}  // namespace nativqa

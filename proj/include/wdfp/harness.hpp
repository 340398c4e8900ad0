#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wdfp/matcher.hpp"
#include "wdfp/pipelines.hpp"
#include "wdfp/store.hpp"

namespace wdfp {

struct DatasetEntry {
  std::filesystem::path path;
  std::string camera;

  /// "camera/filename", the identifier used in reports.
  std::string id() const;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<DatasetEntry> entries;  // sorted by (camera, filename)
  std::vector<std::string> warnings;

  std::vector<std::string> cameras() const;
};

/// Images live at root/<camera>/<image> (.jpg, .jpeg, .png, any case).
/// Throws FileNotFound or EmptyDataset; a single camera only adds a warning.
DatasetManifest scan_dataset(const std::filesystem::path& root);

/// Runs fn(i) for i in [0, n) on `workers` threads (0 = hardware threads).
/// The first exception thrown by any call is rethrown after all threads stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

struct PairScores {
  std::vector<ScoredPair> pairs;  // (i, j) for i < j, row-major
  double mean_seconds = 0.0;      // mean time of one cosine call
  double total_seconds = 0.0;
};

/// All C(n, 2) cosine scores; labels decide same_source.
PairScores score_all_pairs(std::span<const std::string> ids, std::span<const std::string> labels,
                           std::span<const std::vector<float>> fingerprints, std::size_t workers);

/// Mean seconds per cosine call over `repeats` evaluations of the same pair.
double time_cosine(std::span<const float> a, std::span<const float> b, std::size_t repeats);

struct RunConfig {
  ExtractionConfig extraction;
  std::size_t crop = 1024;
  double tnr_target = 0.99;
  std::size_t workers = 0;
  bool write_fingerprints = true;
};

struct ImageFailure {
  std::string id;
  std::string reason;
};

struct MethodReport {
  Method method = Method::Law;
  std::size_t images = 0;  // images that produced a fingerprint
  std::vector<ImageFailure> failures;
  std::size_t fingerprint_length = 0;

  RocCurve roc;
  ThresholdReport thresholds;
  std::vector<ScoredPair> pairs;

  double mean_decode_seconds = 0.0;
  double mean_extraction_seconds = 0.0;
  double mean_comparison_seconds = 0.0;
  /// Extraction plus comparison time, decode excluded.
  double total_seconds = 0.0;
  double wall_seconds = 0.0;

  std::size_t positives() const { return roc.positives; }
  std::size_t negatives() const { return roc.negatives; }
};

struct RunReport {
  std::vector<MethodReport> methods;
  std::size_t dataset_images = 0;
  std::size_t cameras = 0;
  std::size_t crop = 0;
  int levels = 0;
  double sigma_n2 = 0.0;
};

/// Extracts, scores and summarizes each method in turn. When output_dir is
/// given it receives fingerprints/<method>/<camera>/<stem>.wdfp, pairs.csv,
/// summary.json and roc_<method>.csv.
RunReport run_experiment(const DatasetManifest& manifest, std::span<const Method> methods,
                         const RunConfig& cfg,
                         const std::optional<std::filesystem::path>& output_dir);

void write_pairs_csv(std::span<const MethodReport> reports, const std::filesystem::path& path);
void write_summary_json(const RunReport& report, const std::filesystem::path& path);

/// roc_<method>.csv with columns threshold,tpr,fpr, one per method.
void emit_roc_data(const RunReport& report, const std::filesystem::path& dir);
void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path);

/// Reads a pairs CSV back, grouped by method name in file order.
std::vector<std::pair<std::string, std::vector<ScoredPair>>> read_pairs_csv(
    const std::filesystem::path& path);

/// "inf" / "-inf" for the sentinels, shortest round-trip text otherwise.
std::string format_real(double v);

}  // namespace wdfp

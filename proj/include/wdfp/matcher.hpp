#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wdfp/pipelines.hpp"

namespace wdfp {

/// Fingerprints whose RMS falls at or below this are treated as zero (a
/// constant image leaves only rounding residue behind).
inline constexpr double kZeroNormRms = 1e-9;

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
/// Throws LengthMismatch or ZeroNormFingerprint.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(const Fingerprint& a, const Fingerprint& b);

struct ScoredPair {
  std::string id_a;
  std::string id_b;
  bool same_source = false;
  double score = 0.0;
};

struct RocPoint {
  double threshold = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  double tpr = 0.0;
  double fpr = 0.0;

  double tnr() const noexcept { return 1.0 - fpr; }
};

/// Points in increasing threshold order: -inf, each distinct score, +inf.
/// A pair is called same-source when score >= threshold.
struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double auc = 0.0;
};

RocCurve build_roc(std::span<const ScoredPair> pairs);
RocCurve build_roc(std::span<const double> positive_scores, std::span<const double> negative_scores);

/// Maximizes TPR - FPR over the distinct score thresholds; ties go to the
/// higher TPR, then to the smaller threshold.
RocPoint youden_threshold(const RocCurve& roc);

/// Smallest swept threshold whose TNR reaches `target` (0 < target < 1).
RocPoint threshold_at_tnr(const RocCurve& roc, double target);

struct ThresholdReport {
  double lambda_youden = 0.0;
  double tpr_youden = 0.0;
  double tnr_youden = 0.0;
  double target_tnr = 0.99;
  double lambda_at_tnr = 0.0;
  double tpr_at_tnr = 0.0;
  double tnr_at_tnr = 0.0;
};

ThresholdReport threshold_report(const RocCurve& roc, double target_tnr);

}  // namespace wdfp

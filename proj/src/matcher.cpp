#include "wdfp/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace wdfp {
namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "fingerprint lengths " + std::to_string(a.size()) +
                                               " and " + std::to_string(b.size()));
  }
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    aa += x * x;
    bb += y * y;
  }
  const double n = static_cast<double>(a.size());
  if (a.empty() || std::sqrt(aa / n) <= kZeroNormRms || std::sqrt(bb / n) <= kZeroNormRms) {
    throw Error(ErrorCode::ZeroNormFingerprint, "fingerprint has (near) zero norm");
  }
  return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(const Fingerprint& a, const Fingerprint& b) {
  return cosine(std::span<const double>(a.values), std::span<const double>(b.values));
}

RocCurve build_roc(std::span<const double> positive_scores, std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw Error(ErrorCode::DegenerateLabels, "ROC needs both same-source and different-source pairs");
  }
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) scored.emplace_back(s, true);
  for (double s : negative_scores) scored.emplace_back(s, false);
  for (const auto& [s, _] : scored) {
    if (!std::isfinite(s)) throw Error(ErrorCode::InvalidConfig, "non-finite score");
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });

  RocCurve roc;
  roc.positives = positive_scores.size();
  roc.negatives = negative_scores.size();
  const double p = static_cast<double>(roc.positives);
  const double n = static_cast<double>(roc.negatives);
  auto point = [&](double threshold, std::size_t tp, std::size_t fp) {
    return RocPoint{threshold, tp, fp, static_cast<double>(tp) / p, static_cast<double>(fp) / n};
  };

  // Sweep from the top score down; each distinct value adds one point.
  std::vector<RocPoint> descending;
  descending.push_back(point(std::numeric_limits<double>::infinity(), 0, 0));
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < scored.size();) {
    const double s = scored[i].first;
    for (; i < scored.size() && scored[i].first == s; ++i) {
      (scored[i].second ? tp : fp) += 1;
    }
    descending.push_back(point(s, tp, fp));
  }
  descending.push_back(point(-std::numeric_limits<double>::infinity(), tp, fp));
  roc.points.assign(descending.rbegin(), descending.rend());

  // Trapezoids in integer arithmetic: sum (dfp)(tp_i + tp_{i+1}) / (2PN).
  std::uint64_t twice_area = 0;
  for (std::size_t i = 0; i + 1 < roc.points.size(); ++i) {
    const RocPoint& lo = roc.points[i];
    const RocPoint& hi = roc.points[i + 1];
    twice_area += static_cast<std::uint64_t>(lo.false_positives - hi.false_positives) *
                  (lo.true_positives + hi.true_positives);
  }
  roc.auc = static_cast<double>(twice_area) /
            (2.0 * static_cast<double>(roc.positives) * static_cast<double>(roc.negatives));
  return roc;
}

RocCurve build_roc(std::span<const ScoredPair> pairs) {
  std::vector<double> pos, neg;
  for (const ScoredPair& pair : pairs) (pair.same_source ? pos : neg).push_back(pair.score);
  return build_roc(pos, neg);
}

RocPoint youden_threshold(const RocCurve& roc) {
  if (roc.points.size() < 3) {
    throw Error(ErrorCode::DegenerateLabels, "ROC curve has no swept thresholds");
  }
  const auto p = static_cast<std::int64_t>(roc.positives);
  const auto n = static_cast<std::int64_t>(roc.negatives);
  // J * P * N, exact.
  auto scaled_j = [&](const RocPoint& pt) {
    return static_cast<std::int64_t>(pt.true_positives) * n -
           static_cast<std::int64_t>(pt.false_positives) * p;
  };
  const RocPoint* best = nullptr;
  for (std::size_t i = 1; i + 1 < roc.points.size(); ++i) {
    const RocPoint& pt = roc.points[i];
    if (!best || scaled_j(pt) > scaled_j(*best) ||
        (scaled_j(pt) == scaled_j(*best) && pt.true_positives > best->true_positives)) {
      best = &pt;
    }
  }
  return *best;
}

RocPoint threshold_at_tnr(const RocCurve& roc, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "TNR target must lie in (0, 1)");
  }
  for (const RocPoint& pt : roc.points) {
    if (pt.tnr() >= target) return pt;
  }
  throw Error(ErrorCode::DegenerateLabels, "empty ROC curve");
}

ThresholdReport threshold_report(const RocCurve& roc, double target_tnr) {
  const RocPoint youden = youden_threshold(roc);
  const RocPoint at_tnr = threshold_at_tnr(roc, target_tnr);
  ThresholdReport r;
  r.lambda_youden = youden.threshold;
  r.tpr_youden = youden.tpr;
  r.tnr_youden = youden.tnr();
  r.target_tnr = target_tnr;
  r.lambda_at_tnr = at_tnr.threshold;
  r.tpr_at_tnr = at_tnr.tpr;
  r.tnr_at_tnr = at_tnr.tnr();
  return r;
}

}  // namespace wdfp

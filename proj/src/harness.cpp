#include "wdfp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wdfp/image_io.hpp"

namespace wdfp {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::DecodeError, "bad number '" + s + "'");
  }
  return v;
}

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

double rms(std::span<const float> v) {
  double ss = 0.0;
  for (float x : v) ss += static_cast<double>(x) * x;
  return v.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

std::string DatasetEntry::id() const { return camera + "/" + path.filename().string(); }

std::vector<std::string> DatasetManifest::cameras() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (out.empty() || out.back() != e.camera) out.push_back(e.camera);
  }
  return out;
}

DatasetManifest scan_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::FileNotFound, root.string());
  DatasetManifest m;
  m.root = root;
  for (const auto& cam : fs::directory_iterator(root)) {
    if (!cam.is_directory()) continue;
    const std::string label = cam.path().filename().string();
    for (const auto& file : fs::directory_iterator(cam.path())) {
      if (file.is_regular_file() && is_image_file(file.path())) {
        m.entries.push_back({file.path(), label});
      }
    }
  }
  if (m.entries.empty()) throw Error(ErrorCode::EmptyDataset, "no images under " + root.string());
  std::sort(m.entries.begin(), m.entries.end(), [](const DatasetEntry& a, const DatasetEntry& b) {
    if (a.camera != b.camera) return a.camera < b.camera;
    return a.path.filename().string() < b.path.filename().string();
  });
  if (m.cameras().size() < 2) {
    m.warnings.push_back("only one camera (" + m.entries.front().camera +
                         "); ROC analysis needs at least two");
  }
  return m;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

PairScores score_all_pairs(std::span<const std::string> ids, std::span<const std::string> labels,
                           std::span<const std::vector<float>> fingerprints, std::size_t workers) {
  const std::size_t n = fingerprints.size();
  if (ids.size() != n || labels.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "ids, labels and fingerprints differ in count");
  }
  PairScores out;
  out.pairs.resize(n < 2 ? 0 : n * (n - 1) / 2);
  std::vector<double> seconds(out.pairs.size());
  std::vector<std::size_t> row_start(n);
  for (std::size_t i = 0, k = 0; i < n; ++i) {
    row_start[i] = k;
    k += n - 1 - i;
  }
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t k = row_start[i] + (j - i - 1);
      const auto start = Clock::now();
      const double s = cosine(std::span<const float>(fingerprints[i]),
                              std::span<const float>(fingerprints[j]));
      seconds[k] = seconds_since(start);
      out.pairs[k] = ScoredPair{ids[i], ids[j], labels[i] == labels[j], s};
    }
  });
  for (double s : seconds) out.total_seconds += s;
  if (!seconds.empty()) out.mean_seconds = out.total_seconds / static_cast<double>(seconds.size());
  return out;
}

double time_cosine(std::span<const float> a, std::span<const float> b, std::size_t repeats) {
  volatile double sink = 0.0;
  const auto start = Clock::now();
  for (std::size_t r = 0; r < repeats; ++r) sink = sink + cosine(a, b);
  const double total = seconds_since(start);
  return repeats == 0 ? 0.0 : total / static_cast<double>(repeats);
}

RunReport run_experiment(const DatasetManifest& manifest, std::span<const Method> methods,
                         const RunConfig& cfg, const std::optional<fs::path>& output_dir) {
  if (manifest.cameras().size() < 2) {
    throw Error(ErrorCode::SingleCamera, "dataset has a single camera; no negative pairs");
  }
  cfg.extraction.filter.validate();
  if (output_dir) fs::create_directories(*output_dir);

  RunReport report;
  report.dataset_images = manifest.entries.size();
  report.cameras = manifest.cameras().size();
  report.crop = cfg.crop;
  report.levels = cfg.extraction.levels;
  report.sigma_n2 = cfg.extraction.filter.sigma_n2;

  const std::size_t n = manifest.entries.size();
  for (Method method : methods) {
    const auto wall_start = Clock::now();
    const std::string name(method_name(method));
    std::vector<std::vector<float>> fps(n);
    std::vector<std::string> failure(n);
    std::vector<double> decode_s(n, 0.0), extract_s(n, 0.0);

    parallel_for(n, cfg.workers, [&](std::size_t i) {
      const DatasetEntry& entry = manifest.entries[i];
      try {
        auto t0 = Clock::now();
        const RgbImage img = center_crop(load_image(entry.path), cfg.crop);
        decode_s[i] = seconds_since(t0);
        t0 = Clock::now();
        const Fingerprint fp = extract(method, img, cfg.extraction);
        extract_s[i] = seconds_since(t0);
        StoredFingerprint stored = narrow(fp);
        if (rms(stored.values) <= kZeroNormRms) {
          throw Error(ErrorCode::ZeroNormFingerprint, "fingerprint is zero (flat image?)");
        }
        if (output_dir) {
          const fs::path dir = *output_dir / "fingerprints" / name / entry.camera;
          fs::create_directories(dir);
          write_fingerprint(stored, dir / (entry.path.stem().string() + ".wdfp"));
        }
        fps[i] = std::move(stored.values);
      } catch (const std::exception& e) {
        failure[i] = e.what();
      }
    });

    MethodReport mr;
    mr.method = method;
    std::vector<std::string> ids, labels;
    std::vector<std::vector<float>> kept;
    double decode_total = 0.0, extract_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const DatasetEntry& entry = manifest.entries[i];
      if (!failure[i].empty()) {
        std::clog << "[" << name << "] excluded " << entry.id() << ": " << failure[i] << "\n";
        mr.failures.push_back({entry.id(), failure[i]});
        continue;
      }
      ids.push_back(entry.id());
      labels.push_back(entry.camera);
      kept.push_back(std::move(fps[i]));
      decode_total += decode_s[i];
      extract_total += extract_s[i];
    }
    mr.images = kept.size();
    if (!kept.empty()) {
      mr.fingerprint_length = kept.front().size();
      mr.mean_decode_seconds = decode_total / static_cast<double>(kept.size());
      mr.mean_extraction_seconds = extract_total / static_cast<double>(kept.size());
    }

    PairScores scores = score_all_pairs(ids, labels, kept, cfg.workers);
    kept.clear();
    kept.shrink_to_fit();
    mr.mean_comparison_seconds = scores.mean_seconds;
    mr.total_seconds = extract_total + scores.total_seconds;
    mr.pairs = std::move(scores.pairs);
    mr.roc = build_roc(mr.pairs);
    mr.thresholds = threshold_report(mr.roc, cfg.tnr_target);
    mr.wall_seconds = seconds_since(wall_start);
    std::clog << "[" << name << "] " << mr.images << " images, " << mr.pairs.size()
              << " pairs, AUC " << mr.roc.auc << "\n";
    report.methods.push_back(std::move(mr));
  }

  if (output_dir) {
    write_pairs_csv(report.methods, *output_dir / "pairs.csv");
    write_summary_json(report, *output_dir / "summary.json");
    emit_roc_data(report, *output_dir);
  }
  return report;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_pairs_csv(std::span<const MethodReport> reports, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "method,image_a,image_b,same_source,score\n";
  for (const MethodReport& mr : reports) {
    const std::string name(method_name(mr.method));
    for (const ScoredPair& p : mr.pairs) {
      out << name << ',' << csv_field(p.id_a) << ',' << csv_field(p.id_b) << ','
          << (p.same_source ? 1 : 0) << ',' << format_real(p.score) << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<std::pair<std::string, std::vector<ScoredPair>>> read_pairs_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 5) {
    throw Error(ErrorCode::DecodeError, path.string() + ": missing pairs header");
  }
  std::vector<std::pair<std::string, std::vector<ScoredPair>>> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw Error(ErrorCode::DecodeError,
                  path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    }
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == f[0]; });
    if (it == out.end()) it = out.insert(out.end(), {f[0], {}});
    it->second.push_back(ScoredPair{f[1], f[2], f[3] == "1" || f[3] == "true", parse_real(f[4])});
  }
  return out;
}

void write_summary_json(const RunReport& report, const fs::path& path) {
  nlohmann::json j;
  j["images"] = report.dataset_images;
  j["cameras"] = report.cameras;
  j["crop"] = report.crop;
  j["levels"] = report.levels;
  j["sigma_n2"] = report.sigma_n2;
  j["methods"] = nlohmann::json::array();
  for (const MethodReport& mr : report.methods) {
    const ThresholdReport& t = mr.thresholds;
    nlohmann::json m;
    m["method"] = method_name(mr.method);
    m["images"] = mr.images;
    m["fingerprint_length"] = mr.fingerprint_length;
    m["pairs"] = mr.pairs.size();
    m["positive_pairs"] = mr.positives();
    m["negative_pairs"] = mr.negatives();
    m["auc"] = mr.roc.auc;
    m["youden"] = {{"lambda", real_json(t.lambda_youden)}, {"tpr", t.tpr_youden}, {"tnr", t.tnr_youden}};
    m["tnr_target"] = {{"target", t.target_tnr},
                       {"lambda", real_json(t.lambda_at_tnr)},
                       {"tpr", t.tpr_at_tnr},
                       {"tnr", t.tnr_at_tnr}};
    m["timing"] = {{"mean_decode_seconds", mr.mean_decode_seconds},
                   {"mean_extraction_seconds", mr.mean_extraction_seconds},
                   {"mean_comparison_seconds", mr.mean_comparison_seconds},
                   {"total_seconds", mr.total_seconds},
                   {"wall_seconds", mr.wall_seconds}};
    m["excluded"] = nlohmann::json::array();
    for (const auto& f : mr.failures) m["excluded"].push_back({{"image", f.id}, {"reason", f.reason}});
    j["methods"].push_back(std::move(m));
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_roc_csv(const RocCurve& roc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "threshold,tpr,fpr\n";
  for (const RocPoint& p : roc.points) {
    out << format_real(p.threshold) << ',' << format_real(p.tpr) << ',' << format_real(p.fpr) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void emit_roc_data(const RunReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  for (const MethodReport& mr : report.methods) {
    write_roc_csv(mr.roc, dir / ("roc_" + std::string(method_name(mr.method)) + ".csv"));
  }
}

}  // namespace wdfp

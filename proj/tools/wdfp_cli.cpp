// wdfp: batch front end for fingerprint extraction, comparison and ROC reports.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "wdfp/harness.hpp"
#include "wdfp/image_io.hpp"
#include "wdfp/matcher.hpp"
#include "wdfp/pipelines.hpp"
#include "wdfp/store.hpp"

namespace fs = std::filesystem;
using namespace wdfp;

namespace {

struct CommonOptions {
  std::vector<std::string> methods;
  int levels = 4;
  std::string wavelet = "db4";
  double sigma_n2 = 3.24;
  std::size_t crop = 1024;
  double tnr_target = 0.99;
  std::size_t workers = 0;
  std::string out;
};

void add_extraction_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--levels", o.levels, "Decomposition levels J")->capture_default_str();
  cmd->add_option("--wavelet", o.wavelet, "DWT wavelet")->capture_default_str();
  cmd->add_option("--sigma-n2", o.sigma_n2, "Noise variance of the adaptive filter")
      ->capture_default_str();
  cmd->add_option("--crop", o.crop, "Center crop side m")->capture_default_str();
  cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
}

ExtractionConfig extraction_config(const CommonOptions& o) {
  ExtractionConfig cfg;
  cfg.levels = o.levels;
  cfg.wavelet = parse_wavelet(o.wavelet);
  cfg.filter.sigma_n2 = o.sigma_n2;
  cfg.filter.validate();
  return cfg;
}

std::vector<Method> selected_methods(const CommonOptions& o) {
  if (o.methods.empty() || (o.methods.size() == 1 && o.methods[0] == "all")) {
    return {kAllMethods.begin(), kAllMethods.end()};
  }
  std::vector<Method> out;
  for (const auto& name : o.methods) out.push_back(parse_method(name));
  return out;
}

std::string method_list() {
  std::string s;
  for (Method m : kAllMethods) s += (s.empty() ? "" : ", ") + std::string(method_name(m));
  return s;
}

void print_thresholds(const std::string& name, const RocCurve& roc, const ThresholdReport& t) {
  std::printf("%-18s AUC %.4f  Youden TPR/TNR %.4f/%.4f (lambda %s)  TPR@TNR=%.2f %.4f (lambda %s)\n",
              name.c_str(), roc.auc, t.tpr_youden, t.tnr_youden,
              format_real(t.lambda_youden).c_str(), t.target_tnr, t.tpr_at_tnr,
              format_real(t.lambda_at_tnr).c_str());
}

int cmd_extract(const CommonOptions& o, const std::string& input) {
  if (o.methods.size() > 1) throw Error(ErrorCode::InvalidConfig, "extract takes one --method");
  const Method method = parse_method(o.methods.empty() ? "gray-wdlaw" : o.methods[0]);
  const ExtractionConfig cfg = extraction_config(o);

  if (fs::is_regular_file(input)) {
    const fs::path out =
        o.out.empty() ? fs::path(input).stem().concat(".wdfp") : fs::path(o.out);
    const Fingerprint fp = extract(method, center_crop(load_image(input), o.crop), cfg);
    write_fingerprint(fp, out);
    std::printf("%s -> %s (%zu values)\n", input.c_str(), out.string().c_str(), fp.length());
    return 0;
  }

  const DatasetManifest manifest = scan_dataset(input);
  for (const auto& w : manifest.warnings) std::clog << "warning: " << w << "\n";
  const fs::path out_root = o.out.empty() ? fs::path("fingerprints") : fs::path(o.out);
  std::vector<std::string> errors(manifest.entries.size());
  parallel_for(manifest.entries.size(), o.workers, [&](std::size_t i) {
    const DatasetEntry& e = manifest.entries[i];
    try {
      const Fingerprint fp = extract(method, center_crop(load_image(e.path), o.crop), cfg);
      fs::create_directories(out_root / e.camera);
      write_fingerprint(fp, out_root / e.camera / (e.path.stem().string() + ".wdfp"));
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) continue;
    ++failed;
    std::clog << "excluded " << manifest.entries[i].id() << ": " << errors[i] << "\n";
  }
  std::printf("%zu fingerprints written under %s, %zu failed\n", manifest.entries.size() - failed,
              out_root.string().c_str(), failed);
  return failed == 0 ? 0 : 2;
}

int cmd_compare(const CommonOptions& o, const std::vector<std::string>& inputs) {
  if (inputs.size() == 2 && fs::is_regular_file(inputs[0]) && fs::is_regular_file(inputs[1])) {
    const auto a = read_stored_fingerprint(inputs[0]);
    const auto b = read_stored_fingerprint(inputs[1]);
    if (a.method != b.method) {
      std::clog << "warning: comparing fingerprints of different methods\n";
    }
    std::printf("%s\n", format_real(cosine(std::span<const float>(a.values),
                                           std::span<const float>(b.values))).c_str());
    return 0;
  }
  if (inputs.size() != 1) throw Error(ErrorCode::InvalidConfig, "compare takes two files or one directory");

  // Tree written by `extract`: <root>/<camera>/<stem>.wdfp
  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& cam : fs::directory_iterator(inputs[0])) {
    if (!cam.is_directory()) continue;
    for (const auto& f : fs::directory_iterator(cam.path())) {
      if (f.path().extension() == ".wdfp") files.emplace_back(cam.path().filename().string(), f.path());
    }
  }
  if (files.empty()) throw Error(ErrorCode::EmptyDataset, "no .wdfp files under " + inputs[0]);
  std::sort(files.begin(), files.end());

  std::vector<std::string> ids, labels;
  std::vector<std::vector<float>> fps;
  std::optional<Method> method;
  for (const auto& [camera, path] : files) {
    StoredFingerprint fp = read_stored_fingerprint(path);
    if (method && *method != fp.method) {
      throw Error(ErrorCode::InvalidConfig, "directory mixes fingerprint methods");
    }
    method = fp.method;
    ids.push_back(camera + "/" + path.stem().string());
    labels.push_back(camera);
    fps.push_back(std::move(fp.values));
  }
  PairScores scores = score_all_pairs(ids, labels, fps, o.workers);
  MethodReport mr;
  mr.method = *method;
  mr.pairs = std::move(scores.pairs);
  const fs::path out = o.out.empty() ? fs::path("pairs.csv") : fs::path(o.out);
  write_pairs_csv(std::span<const MethodReport>(&mr, 1), out);
  std::printf("%zu pairs scored (mean %.3g s per cosine) -> %s\n", mr.pairs.size(),
              scores.mean_seconds, out.string().c_str());
  return 0;
}

int cmd_roc(const CommonOptions& o, const std::string& pairs_csv) {
  const fs::path out_dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(out_dir);
  for (const auto& [name, pairs] : read_pairs_csv(pairs_csv)) {
    const RocCurve roc = build_roc(pairs);
    const ThresholdReport t = threshold_report(roc, o.tnr_target);
    write_roc_csv(roc, out_dir / ("roc_" + name + ".csv"));
    print_thresholds(name, roc, t);
  }
  return 0;
}

int cmd_bench(const CommonOptions& o, std::size_t repeats, std::size_t extract_repeats) {
  const ExtractionConfig cfg = extraction_config(o);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  ImagePlane r(o.crop, o.crop), g(o.crop, o.crop), b(o.crop, o.crop);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double base = 128.0 + 20.0 * noise(rng);
    r.data()[i] = base + noise(rng);
    g.data()[i] = base + noise(rng);
    b.data()[i] = base + noise(rng);
  }
  const RgbImage img(std::move(r), std::move(g), std::move(b));

  std::printf("%-18s %12s %14s %14s\n", "method", "length", "extract [s]", "cosine [s]");
  for (Method m : selected_methods(o)) {
    double extract_total = 0.0;
    Fingerprint fp;
    for (std::size_t k = 0; k < extract_repeats; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      fp = extract(m, img, cfg);
      extract_total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    const StoredFingerprint a = narrow(fp);
    StoredFingerprint bfp = a;
    for (float& v : bfp.values) v = static_cast<float>(v + 0.1 * noise(rng));
    const double cos_s = time_cosine(a.values, bfp.values, repeats);
    std::printf("%-18s %12zu %14.4f %14.3e\n", std::string(method_name(m)).c_str(), fp.length(),
                extract_total / static_cast<double>(std::max<std::size_t>(extract_repeats, 1)), cos_s);
  }
  return 0;
}

int cmd_run_all(const CommonOptions& o, const std::string& root) {
  const DatasetManifest manifest = scan_dataset(root);
  for (const auto& w : manifest.warnings) std::clog << "warning: " << w << "\n";
  RunConfig cfg;
  cfg.extraction = extraction_config(o);
  cfg.crop = o.crop;
  cfg.tnr_target = o.tnr_target;
  cfg.workers = o.workers;
  const auto methods = selected_methods(o);
  const fs::path out = o.out.empty() ? fs::path("wdfp-run") : fs::path(o.out);
  const RunReport report = run_experiment(manifest, methods, cfg, out);
  for (const MethodReport& mr : report.methods) {
    print_thresholds(std::string(method_name(mr.method)), mr.roc, mr.thresholds);
    std::printf("%-18s extract %.4f s/image, compare %.3e s/pair, total %.3f s, %zu excluded\n", "",
                mr.mean_extraction_seconds, mr.mean_comparison_seconds, mr.total_seconds,
                mr.failures.size());
  }
  std::printf("reports written to %s\n", out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet-domain camera fingerprints: extraction, matching and ROC analysis"};
  app.require_subcommand(1);
  CommonOptions o;
  const std::string method_help = "Extraction method: " + method_list();

  auto* extract_cmd = app.add_subcommand("extract", "Extract fingerprints from an image or a dataset tree");
  std::string extract_input;
  extract_cmd->add_option("input", extract_input, "Image file or root/<camera>/<image> tree")->required();
  extract_cmd->add_option("--method", o.methods, method_help);
  add_extraction_flags(extract_cmd, o);
  extract_cmd->add_option("--out", o.out, "Output file (single image) or directory");

  auto* compare_cmd = app.add_subcommand("compare", "Score two fingerprint files or every pair in a tree");
  std::vector<std::string> compare_inputs;
  compare_cmd->add_option("inputs", compare_inputs, "a.wdfp b.wdfp, or a directory from extract")
      ->required();
  compare_cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
  compare_cmd->add_option("--out", o.out, "Pairs CSV to write");

  auto* roc_cmd = app.add_subcommand("roc", "ROC curve, AUC and thresholds from a pairs CSV");
  std::string pairs_csv;
  roc_cmd->add_option("pairs", pairs_csv, "CSV with method,image_a,image_b,same_source,score")->required();
  roc_cmd->add_option("--tnr-target", o.tnr_target, "Target true negative rate")->capture_default_str();
  roc_cmd->add_option("--out", o.out, "Directory for roc_<method>.csv");

  auto* bench_cmd = app.add_subcommand("bench", "Time extraction and cosine scoring on a synthetic image");
  std::size_t repeats = 1000, extract_repeats = 1;
  bench_cmd->add_option("--method", o.methods, method_help + " (default: all)");
  add_extraction_flags(bench_cmd, o);
  bench_cmd->add_option("--repeats", repeats, "Cosine evaluations per method")->capture_default_str();
  bench_cmd->add_option("--extract-repeats", extract_repeats, "Extractions per method")
      ->capture_default_str();

  auto* run_cmd = app.add_subcommand("run-all", "Full experiment: extract, score all pairs, report");
  std::string dataset_root;
  run_cmd->add_option("dataset", dataset_root, "Dataset root/<camera>/<image>")->required();
  run_cmd->add_option("--method", o.methods, method_help + " (default: all)");
  add_extraction_flags(run_cmd, o);
  run_cmd->add_option("--tnr-target", o.tnr_target, "Target true negative rate")->capture_default_str();
  run_cmd->add_option("--out", o.out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*extract_cmd) return cmd_extract(o, extract_input);
    if (*compare_cmd) return cmd_compare(o, compare_inputs);
    if (*roc_cmd) return cmd_roc(o, pairs_csv);
    if (*bench_cmd) return cmd_bench(o, repeats, extract_repeats);
    if (*run_cmd) return cmd_run_all(o, dataset_root);
  } catch (const Error& e) {
    std::cerr << "wdfp: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "wdfp: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include <doctest.h>

#include <fstream>
#include <set>

#include <json.hpp>

#include "support/synthetic.hpp"
#include "wdfp/harness.hpp"

using namespace wdfp;
namespace fs = std::filesystem;

namespace {

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

RunConfig small_run() {
  RunConfig cfg;
  cfg.crop = 256;
  cfg.workers = 2;
  return cfg;
}

}  // namespace

TEST_CASE("scan_dataset orders entries and labels cameras") {
  synth::TempDir dir("scan");
  synth::CameraSetSpec layout;
  layout.cameras = 2;
  layout.images_per_camera = 2;
  layout.rows = layout.cols = 32;
  synth::write_dataset(dir.path(), layout);
  std::ofstream(dir.path() / "cam00" / "notes.txt") << "ignored";
  fs::copy_file(dir.path() / "cam01" / "img00.jpg", dir.path() / "cam01" / "IMG99.JPG");

  const DatasetManifest m = scan_dataset(dir.path());
  REQUIRE(m.entries.size() == 5);
  CHECK(m.cameras() == std::vector<std::string>{"cam00", "cam01"});
  CHECK(m.entries[0].id() == "cam00/img00.jpg");
  CHECK(m.entries[2].id() == "cam01/IMG99.JPG");
  CHECK(m.warnings.empty());
}

TEST_CASE("scan_dataset errors and warnings") {
  synth::TempDir dir("scan");
  try {
    scan_dataset(dir.path());
    FAIL("expected EmptyDataset");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyDataset);
  }
  CHECK_THROWS_AS(scan_dataset(dir.path() / "nope"), Error);

  synth::CameraSetSpec layout;
  layout.cameras = 1;
  layout.images_per_camera = 2;
  layout.rows = layout.cols = 32;
  synth::write_dataset(dir.path(), layout);
  const DatasetManifest m = scan_dataset(dir.path());
  CHECK(m.warnings.size() == 1);
  try {
    run_experiment(m, std::vector<Method>{Method::GrayWdlaw}, small_run(), std::nullopt);
    FAIL("expected SingleCamera");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingleCamera);
  }
}

TEST_CASE("parallel_for visits every index and propagates failures") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(50, 3, [](std::size_t i) {
                    if (i == 17) throw Error(ErrorCode::IoError, "boom");
                  }),
                  Error);
}

TEST_CASE("two cameras with two images each") {
  synth::TempDir data("run-data"), out("run-out");
  synth::CameraSetSpec layout;
  layout.cameras = 2;
  layout.images_per_camera = 2;
  synth::write_dataset(data.path(), layout);
  const DatasetManifest m = scan_dataset(data.path());
  const std::vector<Method> methods{Method::Law, Method::GrayWdlaw};
  const RunReport report = run_experiment(m, methods, small_run(), out.path());

  REQUIRE(report.methods.size() == 2);
  for (const MethodReport& mr : report.methods) {
    CHECK(mr.images == 4);
    CHECK(mr.pairs.size() == 6);
    CHECK(mr.positives() == 2);
    CHECK(mr.negatives() == 4);
    CHECK(mr.mean_extraction_seconds > 0.0);
    CHECK(mr.fingerprint_length == expected_length(mr.method, 256, 4));
    std::set<double> distinct;
    for (const auto& p : mr.pairs) distinct.insert(p.score);
    const fs::path roc = out.path() / ("roc_" + std::string(method_name(mr.method)) + ".csv");
    CHECK(count_lines(roc) == 1 + distinct.size() + 2);
  }
  CHECK(count_lines(out.path() / "pairs.csv") == 1 + 12);
  CHECK(fs::exists(out.path() / "fingerprints" / "gray-wdlaw" / "cam01" / "img01.wdfp"));

  std::ifstream js(out.path() / "summary.json");
  const auto summary = nlohmann::json::parse(js);
  CHECK(summary["methods"].size() == 2);
  CHECK(summary["methods"][1]["method"] == "gray-wdlaw");
  CHECK(summary["methods"][1]["pairs"] == 6);
  CHECK(summary["methods"][1]["fingerprint_length"] == 1044480 / 16);

  // The CSV reads back to the same pairs.
  const auto groups = read_pairs_csv(out.path() / "pairs.csv");
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == "law");
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(groups[1].second[i].id_a == report.methods[1].pairs[i].id_a);
    CHECK(groups[1].second[i].same_source == report.methods[1].pairs[i].same_source);
    CHECK(groups[1].second[i].score == report.methods[1].pairs[i].score);
  }

  // Scores recomputed from the stored files equal the in-memory ones.
  std::vector<std::string> ids, labels;
  std::vector<std::vector<float>> fps;
  for (const DatasetEntry& e : m.entries) {
    ids.push_back(e.id());
    labels.push_back(e.camera);
    fps.push_back(read_stored_fingerprint(out.path() / "fingerprints" / "gray-wdlaw" / e.camera /
                                          (e.path.stem().string() + ".wdfp"))
                      .values);
  }
  const PairScores again = score_all_pairs(ids, labels, fps, 1);
  for (std::size_t i = 0; i < again.pairs.size(); ++i) {
    CHECK(again.pairs[i].score == report.methods[1].pairs[i].score);
  }
}

TEST_CASE("results do not depend on the worker count") {
  synth::TempDir data("det-data");
  synth::CameraSetSpec layout;
  layout.cameras = 2;
  layout.images_per_camera = 3;
  layout.png = true;
  synth::write_dataset(data.path(), layout);
  const DatasetManifest m = scan_dataset(data.path());
  RunConfig one = small_run(), many = small_run();
  one.workers = 1;
  many.workers = 4;
  const std::vector<Method> methods{Method::GrayWdlawDtcwt};
  const RunReport a = run_experiment(m, methods, one, std::nullopt);
  const RunReport b = run_experiment(m, methods, many, std::nullopt);
  REQUIRE(a.methods[0].pairs.size() == 15);
  for (std::size_t i = 0; i < 15; ++i) {
    CHECK(a.methods[0].pairs[i].id_a == b.methods[0].pairs[i].id_a);
    CHECK(a.methods[0].pairs[i].score == b.methods[0].pairs[i].score);
  }
  CHECK(a.methods[0].roc.auc == b.methods[0].roc.auc);
}

TEST_CASE("a broken image is excluded and the run continues") {
  synth::TempDir data("bad-data");
  synth::CameraSetSpec layout;
  layout.cameras = 2;
  layout.images_per_camera = 2;
  synth::write_dataset(data.path(), layout);
  std::ofstream(data.path() / "cam00" / "broken.jpg") << "not really a jpeg";
  std::vector<ImagePlane> tiny(3, ImagePlane(100, 100, 50.0));
  write_png(RgbImage(tiny[0], tiny[1], tiny[2]), data.path() / "cam01" / "small.png");

  const DatasetManifest m = scan_dataset(data.path());
  REQUIRE(m.entries.size() == 6);
  const RunReport r = run_experiment(m, std::vector<Method>{Method::GrayWdlaw}, small_run(), std::nullopt);
  const MethodReport& mr = r.methods[0];
  CHECK(mr.images == 4);
  REQUIRE(mr.failures.size() == 2);
  CHECK(mr.failures[0].id == "cam00/broken.jpg");
  CHECK(mr.failures[0].reason.find("DecodeError") != std::string::npos);
  CHECK(mr.failures[1].reason.find("CropTooLarge") != std::string::npos);
  CHECK(mr.pairs.size() == 6);
}

TEST_CASE("synthetic cameras are told apart") {
  synth::TempDir data("sep-data");
  synth::CameraSetSpec layout;
  layout.cameras = 3;
  layout.images_per_camera = 3;
  synth::write_dataset(data.path(), layout);
  const RunReport r = run_experiment(scan_dataset(data.path()),
                                     std::vector<Method>{Method::GrayWdlaw, Method::LawDtcwt},
                                     small_run(), std::nullopt);
  for (const MethodReport& mr : r.methods) {
    CAPTURE(method_name(mr.method));
    CHECK(mr.roc.auc > 0.9);
  }
}

TEST_CASE("real formatting") {
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_real(0.1) == "0.1");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

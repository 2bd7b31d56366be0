#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "lexidiff/io.hpp"

using namespace lexidiff;

namespace {

const ipa::PhonemeInventory& inv() { return ipa::PhonemeInventory::builtin(); }

std::string data_path(const char* name) {
  return std::string(LEXIDIFF_DATA_DIR) + "/" + name;
}

bool mentions(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("bundled flower dataset loads and tokenizes eagerly") {
  const auto dataset = io::load_dataset(data_path("flower.json"), inv());
  CHECK(dataset.languages.size() == 16);
  CHECK(dataset.clusters.size() == 3);
  CHECK(dataset.concepts.size() == 1);
  CHECK(dataset.clusters[0].name == "Slavic");
  CHECK(dataset.clusters[1].members.size() == 5);

  const auto* scots = dataset.find("Scots", "flower");
  REQUIRE(scots != nullptr);
  REQUIRE(scots->words.size() == 1);
  CHECK(scots->words[0].size() == 4);  // f l uː r
  CHECK(scots->words[0].phonemes[2].symbol == "uː");

  CHECK(dataset.classified_ids() == std::vector<std::string>{"Scots"});
}

TEST_CASE("bundled scythe dataset loads") {
  const auto dataset = io::load_dataset(data_path("scythe.json"), inv());
  CHECK(dataset.languages.size() == 11);
  CHECK(dataset.clusters.size() == 3);
  CHECK(dataset.clusters[2].members == std::vector<std::string>{"Albanian"});
}

TEST_CASE("dataset parse errors carry context") {
  const std::string classified_with_cluster = R"({
    "concepts": ["c"], "clusters": ["X"],
    "languages": [
      {"id": "r", "role": "reference", "cluster": "X",
       "translations": {"c": [{"ipa": "pa"}]}},
      {"id": "l", "role": "classified", "cluster": "X",
       "translations": {"c": [{"ipa": "ta"}]}}
    ]})";
  CHECK_THROWS_AS(io::parse_dataset(classified_with_cluster, inv(), "t"),
                  ValidationError);

  const std::string typo = R"({
    "concepts": ["c"], "clusters": ["X"],
    "languages": [
      {"id": "r", "role": "reference", "cluster": "X",
       "translations": {"c": [{"ipa": "pa7a"}]}}
    ]})";
  try {
    io::parse_dataset(typo, inv(), "t");
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(mentions(e, "'r'"));
    CHECK(mentions(e, "'c'"));
    CHECK(mentions(e, "byte offset"));
  }

  const std::string duplicate = R"({
    "concepts": ["c"], "clusters": ["X"],
    "languages": [
      {"id": "r", "role": "reference", "cluster": "X",
       "translations": {"c": [{"ipa": "pa"}]}},
      {"id": "r", "role": "reference", "cluster": "X",
       "translations": {"c": [{"ipa": "ta"}]}}
    ]})";
  try {
    io::parse_dataset(duplicate, inv(), "t");
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(mentions(e, "duplicate language"));
  }

  const std::string unknown_cluster = R"({
    "concepts": ["c"], "clusters": ["X"],
    "languages": [
      {"id": "r", "role": "reference", "cluster": "Y",
       "translations": {"c": [{"ipa": "pa"}]}}
    ]})";
  CHECK_THROWS_AS(io::parse_dataset(unknown_cluster, inv(), "t"), ValidationError);

  CHECK_THROWS_AS(io::parse_dataset("{not json", inv(), "t"), ValidationError);
  CHECK_THROWS_AS(io::load_dataset("/nonexistent/file.json", inv()),
                  ValidationError);
}

TEST_CASE("fixed-point CSV formatting") {
  CHECK(io::format_fixed(0.5) == "0.500000");
  CHECK(io::format_fixed(0.0) == "0.000000");
  CHECK(io::format_fixed(1.0) == "1.000000");
  CHECK(io::format_fixed(0.1234564) == "0.123456");
}

TEST_CASE("classification outputs are byte-stable across runs and workers") {
  const auto dataset = io::load_dataset(data_path("flower.json"), inv());
  io::RunConfig config;

  config.jobs = 1;
  const auto report1 = pipeline::classify(dataset, dataset.clusters,
                                          config.params(), config.mode, 1);
  const auto files1 = io::classification_outputs(dataset, report1, config);

  config.jobs = 8;
  const auto report8 = pipeline::classify(dataset, dataset.clusters,
                                          config.params(), config.mode, 8);
  const auto files8 = io::classification_outputs(dataset, report8, config);

  REQUIRE(files1.size() == files8.size());
  for (const auto& [name, bytes] : files1) {
    REQUIRE(files8.count(name) == 1);
    CHECK(bytes == files8.at(name));
  }
  CHECK(files1.count("per_concept.csv") == 1);
  CHECK(files1.count("aggregate.json") == 1);
  CHECK(files1.count("nmwd_Scots.csv") == 1);
  CHECK(files1.count("pca.csv") == 1);

  // every probability cell is in [0,1] and each row sums to 1 within
  // serialization rounding: up to 5e-7 per 6-decimal column plus the solver
  // tolerance
  const double row_tolerance = 3 * 5e-7 + 1e-9;
  const std::string& csv = files1.at("per_concept.csv");
  std::size_t pos = csv.find('\n') + 1;
  while (pos < csv.size()) {
    const std::size_t end = csv.find('\n', pos);
    const std::string line = csv.substr(pos, end - pos);
    double sum = 0.0;
    int cells = 0;
    std::size_t cursor = 0;
    for (int field = 0; cursor != std::string::npos; ++field) {
      const std::size_t comma = line.find(',', cursor);
      const std::string cell = line.substr(
          cursor, comma == std::string::npos ? std::string::npos : comma - cursor);
      if (field >= 2) {
        const double v = std::stod(cell);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
        ++cells;
      }
      cursor = comma == std::string::npos ? std::string::npos : comma + 1;
    }
    CHECK(cells == 3);
    CHECK(std::abs(sum - 1.0) <= row_tolerance);
    pos = end + 1;
  }
}

TEST_CASE("distance matrices: shape and symmetry") {
  const std::string two = R"({
    "concepts": ["c"], "clusters": ["X", "Y"],
    "languages": [
      {"id": "r1", "role": "reference", "cluster": "X",
       "translations": {"c": [{"ipa": "pata"}]}},
      {"id": "r2", "role": "reference", "cluster": "Y",
       "translations": {"c": [{"ipa": "milu"}]}}
    ]})";
  const auto dataset = io::parse_dataset(two, inv(), "t");
  io::RunConfig config;
  const auto files = io::distance_outputs(dataset, config);
  REQUIRE(files.count("distances_c.csv") == 1);
  const std::string& csv = files.at("distances_c.csv");
  // header + 2 rows; diagonal zero; symmetric
  CHECK(csv.find("language,r1,r2\n") == 0);
  const auto line = [&](int row) {
    std::size_t pos = 0;
    for (int skip = 0; skip <= row; ++skip) pos = csv.find('\n', pos) + 1;
    return csv.substr(pos, csv.find('\n', pos) - pos);
  };
  const std::string row1 = line(0);
  const std::string row2 = line(1);
  CHECK(row1.substr(0, 12) == "r1,0.000000,");
  const std::string off_diag = row1.substr(12);
  CHECK(row2 == "r2," + off_diag + ",0.000000");
}

TEST_CASE("write_outputs: overwrite is stable, failures leave nothing behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "lexidiff_io_test";
  fs::remove_all(dir);

  const std::map<std::string, std::string> files = {
      {"aggregate.json", "{}\n"}, {"per_concept.csv", "concept\n"}};
  io::write_outputs(dir.string(), files);
  io::write_outputs(dir.string(), files);  // rerun overwrites in place
  CHECK(fs::exists(dir / "aggregate.json"));
  CHECK(fs::file_size(dir / "per_concept.csv") == files.at("per_concept.csv").size());

  // make the last file unwritable: a directory squats on its name
  fs::remove_all(dir);
  fs::create_directories(dir / "per_concept.csv");
  CHECK_THROWS_AS(io::write_outputs(dir.string(), files), ValidationError);
  // the earlier file was cleaned up again
  CHECK(!fs::exists(dir / "aggregate.json"));
  fs::remove_all(dir);
}

TEST_CASE("skip log is serialized into aggregate.json") {
  const std::string with_gap = R"({
    "concepts": ["c1", "c2"], "clusters": ["X", "Y"],
    "languages": [
      {"id": "r1", "role": "reference", "cluster": "X",
       "translations": {"c1": [{"ipa": "pata"}], "c2": [{"ipa": "pole"}]}},
      {"id": "r2", "role": "reference", "cluster": "Y",
       "translations": {"c1": [{"ipa": "milu"}]}}
    ]})";
  const auto dataset = io::parse_dataset(with_gap, inv(), "t");
  io::RunConfig config;
  const auto report = pipeline::classify(dataset, dataset.clusters,
                                         config.params(), config.mode, 1);
  const auto files = io::classification_outputs(dataset, report, config);
  const std::string& json = files.at("aggregate.json");
  CHECK(json.find("\"skipped\"") != std::string::npos);
  CHECK(json.find("cluster 'Y' has no translations") != std::string::npos);
}

TEST_CASE("calibration json shape") {
  std::vector<calibration::FitResult> runs = {{1.0, 0.7, 0.1}, {0.9, 0.6, 0.2}};
  const std::string json = io::calibration_json({0.5, 0.6}, runs);
  CHECK(json.find("\"runs\"") != std::string::npos);
  CHECK(json.find("\"mean\"") != std::string::npos);
  CHECK(json.find("0.95") != std::string::npos);  // mean w_con
}

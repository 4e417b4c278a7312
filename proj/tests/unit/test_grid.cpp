#include <doctest.h>

#include <fstream>
#include <sstream>

#include "emotesent/error.hpp"
#include "emotesent/grid.hpp"
#include "emotesent/manifest.hpp"
#include "test_support.hpp"

using namespace emotesent;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("baseline grid covers every combination") {
  const auto data = testing::emote_signal_data(400, 200, 2);
  BaselineGridConfig cfg;
  cfg.hyper.rf.trees = 15;
  cfg.hyper.svm.epochs = 20;
  const auto cells = run_baseline_grid(data.train, data.test, data.emotes, cfg, 1);
  REQUIRE(cells.size() == 24);

  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& ex : data.test) ++counts[class_index(ex.label)];
  const double majority =
      static_cast<double>(*std::max_element(counts.begin(), counts.end())) / data.test.size();
  for (const auto& c : cells) {
    CHECK(c.accuracy >= 0.0);
    CHECK(c.accuracy <= 1.0);
    // The emote in every message decides its label, so every model beats the majority guess.
    CHECK(c.accuracy > majority);
  }

  const auto rows = lines_of(baseline_grid_csv(cells));
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == "model,P1,P2,P3");
  CHECK(rows[1].rfind("NB.1,", 0) == 0);
  CHECK(rows[2].rfind("NB.2,", 0) == 0);
  CHECK(rows[8].rfind("RF.2,", 0) == 0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    CHECK(std::count(rows[r].begin(), rows[r].end(), ',') == 3);
  }
  CHECK_THROWS_AS(run_baseline_grid({}, data.test, data.emotes, cfg, 1), ConfigError);
}

TEST_CASE("LOOVE grid shape and edge cells") {
  const auto data = testing::emote_signal_data(300, 150, 3);
  const auto other = testing::emote_signal_data(300, 0, 4);
  std::vector<ExternalDataset> datasets = {{"T", data.paraphrases}, {"Y", other.paraphrases}};
  LooveGridConfig cfg;
  cfg.clf1_options.order = NgramOrder::Unigram;
  cfg.clf1_options.hyper.rf.trees = 10;
  cfg.loove.hyper.rf.trees = 20;
  const auto grid =
      run_loove_grid(datasets, data.train, data.test, data.pseudodict, data.emotes, cfg, 5);
  CHECK(grid.rows == std::vector<std::string>{"T", "Y", "none"});
  CHECK(grid.columns == std::vector<std::string>{"ME", "SVM", "RF", "no_stats"});
  CHECK(grid.cell_count() == 12);
  REQUIRE(grid.accuracy.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) {
    REQUIRE(grid.accuracy[r].size() == 4);
    for (std::size_t c = 0; c < 4; ++c) {
      const bool empty = r == 2 && c == 3;
      CHECK(grid.accuracy[r][c].has_value() == !empty);
    }
  }
  // Emote statistics carry the label; CLF1 trained on signal-free text does not.
  for (std::size_t r = 0; r < 2; ++r) CHECK(*grid.accuracy[r][0] > *grid.accuracy[r][3]);
  const auto csv = lines_of(grid.to_csv());
  CHECK(csv[0] == "clf1_dataset,ME,SVM,RF,no_stats");
  CHECK(csv[3].substr(csv[3].size() - 1) == ",");
}

TEST_CASE("manifest hashes and verification") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = testing::scratch_dir("manifest");
  { std::ofstream(dir / "in.txt") << "input"; }
  { std::ofstream(dir / "out.csv") << "a,b\n1,2\n"; }
  Manifest m;
  m.command = "grid baseline";
  m.seed = 42;
  m.config = {{"k", 5}};
  m.add_input(dir / "in.txt");
  m.add_output(dir, "out.csv");
  write_manifest(m, dir / "manifest.json");

  const auto back = read_manifest(dir / "manifest.json");
  CHECK(back.to_json() == m.to_json());
  CHECK(back.outputs.at("out.csv") == sha256_hex("a,b\n1,2\n"));
  CHECK(verify_manifest(back, dir).ok());

  { std::ofstream(dir / "out.csv") << "a,b\n1,3\n"; }
  auto check = verify_manifest(back, dir);
  CHECK(check.mismatched == std::vector<std::string>{"out.csv"});
  std::filesystem::remove(dir / "in.txt");
  check = verify_manifest(back, dir);
  CHECK(check.missing.size() == 1);
  CHECK_THROWS_AS(sha256_file(dir / "in.txt"), IoError);
}

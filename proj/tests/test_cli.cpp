#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pairforge/cli.hpp"
#include "pairforge/error.hpp"
#include "pairforge/text_util.hpp"
#include "test_support.hpp"

namespace pairforge {
namespace {

using test::data_path;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Cli, AugmentNvWnsWritesJsonLines) {
  const auto dir = test::scratch_dir("cli-augment");
  const auto r = cli({"augment", "--dataset", data_path("pairs_9n3c.csv"), "--lexicon", data_path("wordnet"),
                      "--technique", "nv_wns", "--case", "I+II+III", "--seed", "7", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto content = read_file((dir / "augmented.jsonl").string());
  EXPECT_TRUE(content.starts_with("{\"provenance\":{\"tool\":\"pairforge\""));
  const auto parsed = parse_augmented(content);
  EXPECT_FALSE(parsed.empty());
  for (const auto& inst : parsed) EXPECT_EQ(inst.pair.label, Label::conflict);
}

TEST(Cli, UsageAndConfigErrors) {
  auto r = cli({"augment", "--dataset", data_path("pairs_9n3c.csv"), "--case", "IV"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(lines(r.err), 1u) << r.err;
  EXPECT_NE(r.err.find("IV"), std::string::npos);

  r = cli({"evaluate", "--technique", "shuffling"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'dataset'"), std::string::npos) << r.err;

  r = cli({"evaluate", "--bogus-flag", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(lines(r.err), 1u);

  r = cli({"launch"});
  EXPECT_EQ(r.code, 2);

  r = cli({"augment", "--dataset", data_path("pairs_9n3c.csv"), "--technique", "nv_wns"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("lexicon"), std::string::npos) << r.err;

  r = cli({"augment", "--dataset", data_path("nope.csv")});
  EXPECT_EQ(r.code, 2);

  r = cli({"augment", "--dataset", data_path("pairs_9n3c.csv"), "--seed", "x"});
  EXPECT_EQ(r.code, 2);

  r = cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("augment"), std::string::npos);
}

TEST(Cli, ProviderFailureIsRuntimeError) {
  const auto dir = test::scratch_dir("cli-provider");
  const auto r = cli({"augment", "--dataset", data_path("pairs_9n3c.csv"), "--technique", "back_translation",
                      "--provider", "http://127.0.0.1:1", "--out", dir.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(lines(r.err), 1u);
}

TEST(Cli, ConfigFilesAndPrecedence) {
  const auto dir = test::scratch_dir("cli-config");
  std::filesystem::copy(data_path("pairs_9n3c.csv"), dir / "pairs.csv");
  std::ofstream(dir / "run.json") << R"({"dataset": "pairs.csv", "technique": ["shuffling"], "case": "I+II",
                                        "seed": 3, "folds": 3, "provider": "mock:fixture.tsv"})";
  auto cfg = RunConfig::resolve("augment", {{"seed", "9"}}, (dir / "run.json").string(), std::nullopt);
  EXPECT_EQ(cfg.dataset, (dir / "pairs.csv").string());
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.techniques, (std::vector<std::string>{"shuffling"}));
  EXPECT_EQ(cfg.cases.front().to_string(), "I+II");
  EXPECT_EQ(cfg.provider, "mock:" + (dir / "fixture.tsv").string());

  cfg = RunConfig::resolve("augment", {}, (dir / "run.json").string(), std::string("http://localhost:9000"));
  EXPECT_EQ(cfg.provider, "http://localhost:9000");
  cfg = RunConfig::resolve("augment", {{"provider", "mock:identity"}}, (dir / "run.json").string(),
                           std::string("http://localhost:9000"));
  EXPECT_EQ(cfg.provider, "mock:identity");

  std::ofstream(dir / "run.toml") << "# comment\ndataset = \"pairs.csv\"\ntechnique = [\"nv_wns\", \"t_wnl\"]\n"
                                     "case = 'all'\nseed = 11 # inline\nmax_variants = 4\n";
  cfg = RunConfig::resolve("evaluate", {}, (dir / "run.toml").string(), std::nullopt);
  EXPECT_EQ(cfg.techniques, (std::vector<std::string>{"nv_wns", "t_wnl"}));
  EXPECT_EQ(cfg.cases.size(), 7u);
  EXPECT_EQ(cfg.seed, 11u);
  EXPECT_EQ(cfg.max_variants, 4u);

  EXPECT_THROW(parse_config_text("colour = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[table]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("{\"seed\": {\"x\": 1}}"), ConfigError);
  EXPECT_THROW(RunConfig::resolve("augment", {{"case", "IV"}}, std::nullopt, std::nullopt), ConfigError);
}

TEST(Cli, EnvironmentProviderIsUsed) {
  const auto dir = test::scratch_dir("cli-env");
  ::setenv("PAIRFORGE_PROVIDER_URL", ("mock:" + data_path("mock_bt.tsv")).c_str(), 1);
  const auto r = cli({"augment", "--dataset", data_path("pairs_9n3c.csv"), "--technique", "back_translation",
                      "--out", dir.string()});
  ::unsetenv("PAIRFORGE_PROVIDER_URL");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(read_file((dir / "augmented.jsonl").string()).find("mock_bt.tsv"), std::string::npos);
}

TEST(Cli, RunsAreByteIdenticalAcrossJobs) {
  const auto a = test::scratch_dir("cli-det-a");
  const auto b = test::scratch_dir("cli-det-b");
  for (const auto& [dir, jobs] : {std::pair{a, "1"}, std::pair{b, "4"}}) {
    const auto r = cli({"evaluate", "--dataset", data_path("pairs_9n3c.csv"), "--lexicon", data_path("wordnet"),
                        "--technique", "nv_wns,shuffling", "--case", "I,I+II+III", "--seed", "5", "--jobs", jobs,
                        "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"report.json", "report.csv", "report.txt"}) {
    EXPECT_EQ(read_file((a / f).string()), read_file((b / f).string())) << f;
  }
}

TEST(Cli, EvaluateThenReport) {
  const auto dir = test::scratch_dir("cli-report");
  auto r = cli({"evaluate", "--dataset", data_path("pairs_9n3c.csv"), "--technique", "shuffling", "--case", "all",
                "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("No Augmentation conflict-F1"), std::string::npos) << r.out;
  const auto rows = report_from_json(read_file((dir / "report.json").string()));
  EXPECT_EQ(rows.size(), 8u);

  r = cli({"report", (dir / "report.json").string(), "--metric", "macro-F1", "--out", (dir / "r").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("No Augmentation macro-F1"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("shuffling"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "r" / "report.txt"));
}

TEST(Cli, IngestAndIncremental) {
  const auto dir = test::scratch_dir("cli-ingest");
  auto r = cli({"ingest", "--dataset", data_path("pairs_9n3c.csv"), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("12 records, neutral=9, conflict=3"), std::string::npos) << r.out;
  const auto d = load_dataset((dir / "dataset.jsonl").string(), DataFormat::json_lines);
  EXPECT_EQ(d.size(), 12u);

  r = cli({"incremental", "--dataset", data_path("pairs_9n3c.csv"), "--technique", "shuffling", "--sizes", "3",
           "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.starts_with("size,condition,metric,mean,std\n3,No Augmentation,"));
  r = cli({"incremental", "--dataset", data_path("pairs_9n3c.csv"), "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, ExternalClassifierExportsFolds) {
  const auto dir = test::scratch_dir("cli-external");
  const auto r = cli({"evaluate", "--dataset", data_path("pairs_9n3c.csv"), "--classifier", "external",
                      "--technique", "shuffling", "--case", "II+III", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto root = dir / "external";
  EXPECT_TRUE(std::filesystem::exists(root / "classifier.json"));
  for (const char* cond : {"no_augmentation", "shuffling_II+III"}) {
    for (int f = 0; f < 3; ++f) {
      const auto fold = root / cond / ("fold-" + std::to_string(f));
      const auto train = load_dataset((fold / "train.jsonl").string(), DataFormat::json_lines);
      const auto test = load_dataset((fold / "test.jsonl").string(), DataFormat::json_lines);
      EXPECT_EQ(test.size(), 4u);
      for (const auto& rec : test.records) EXPECT_EQ(train.find(rec.id), nullptr);
    }
  }
  const auto ext = ExternalClassifierConfig::from_json(read_file((root / "classifier.json").string()));
  EXPECT_EQ(ext.selection_metric, "conflict-F1");
}

}  // namespace
}  // namespace pairforge

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "pairforge/corpus.hpp"
#include "pairforge/error.hpp"
#include "test_support.hpp"

namespace pairforge {
namespace {

using test::data_path;

Dataset fixture_9n3c() { return load_dataset(data_path("pairs_9n3c.csv"), DataFormat::delimited); }

Dataset synthetic(std::size_t neutral, std::size_t conflict) {
  Dataset d{"synthetic", {}};
  for (std::size_t i = 0; i < neutral + conflict; ++i) {
    d.records.push_back(test::pair("s" + std::to_string(i), "a " + std::to_string(i), "b " + std::to_string(i),
                                   i < neutral ? Label::neutral : Label::conflict));
  }
  return d;
}

TEST(Corpus, ThreeRowFixturePreservesFileOrderAndQuoting) {
  const auto d = load_dataset(data_path("three_rows.csv"), DataFormat::delimited);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.records[0].id, "p3");
  EXPECT_EQ(d.records[1].id, "p1");
  EXPECT_EQ(d.records[2].id, "p2");
  EXPECT_EQ(d.records[0].text_a, "The UAV shall charge, quickly");
  EXPECT_EQ(d.records[1].text_a, "He said \"stop\"");
  EXPECT_EQ(d.records[1].label, Label::conflict);
  EXPECT_EQ(d.name, "three_rows");
}

TEST(Corpus, HeaderOnlyFileIsEmpty) {
  const auto d = load_dataset(data_path("header_only.csv"), DataFormat::delimited);
  EXPECT_EQ(d.size(), 0u);
  EXPECT_TRUE(class_distribution(d).empty());
}

TEST(Corpus, ClassDistributionCountsFixture) {
  const auto dist = class_distribution(fixture_9n3c());
  EXPECT_EQ(dist.size(), 2u);
  EXPECT_EQ(dist.at(Label::neutral), 9u);
  EXPECT_EQ(dist.at(Label::conflict), 3u);
  EXPECT_EQ(minority_label(fixture_9n3c()), Label::conflict);
}

TEST(Corpus, LargeDistributionCounts) {
  const auto d = synthetic(6652, 18);
  const auto dist = class_distribution(d);
  EXPECT_EQ(dist.at(Label::neutral), 6652u);
  EXPECT_EQ(dist.at(Label::conflict), 18u);
  EXPECT_EQ(filter_by_label(d, {Label::conflict}).size(), 18u);
}

TEST(Corpus, DelimitedAndJsonLinesRoundTrip) {
  const auto d = fixture_9n3c();
  for (auto fmt : {DataFormat::delimited, DataFormat::json_lines}) {
    const auto again = parse_dataset(serialize_dataset(d, fmt), fmt, d.name);
    EXPECT_EQ(again, d);
  }
  const auto three = load_dataset(data_path("three_rows.csv"), DataFormat::delimited);
  EXPECT_EQ(parse_dataset(serialize_dataset(three, DataFormat::delimited), DataFormat::delimited, three.name), three);
}

TEST(Corpus, SaveAndLoadRoundTrip) {
  const auto dir = test::scratch_dir("corpus-roundtrip");
  const auto d = fixture_9n3c();
  const auto path = (dir / "pairs_9n3c.jsonl").string();
  save_dataset(d, path, DataFormat::json_lines);
  EXPECT_EQ(load_dataset(path, DataFormat::json_lines), d);
  EXPECT_EQ(guess_data_format(path), DataFormat::json_lines);
  EXPECT_EQ(guess_data_format("x.csv"), DataFormat::delimited);
}

TEST(Corpus, JsonLinesSkipsProvenanceAndAcceptsNumericIds) {
  const auto d = parse_dataset(
      "{\"provenance\":{\"seed\":1}}\n{\"id\":7,\"text_a\":\"a\",\"text_b\":\"b\",\"label\":\"Conflict\"}\n",
      DataFormat::json_lines, "x");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.records[0].id, "7");
  EXPECT_EQ(d.records[0].label, Label::conflict);
}

TEST(Corpus, ReaderErrorsNameTheRow) {
  EXPECT_THROW(parse_dataset("id,text_a,text_b,label\nx,a,b,maybe\n", DataFormat::delimited), DataError);
  EXPECT_THROW(parse_dataset("id,text_a,label\nx,a,neutral\n", DataFormat::delimited), DataError);
  EXPECT_THROW(parse_dataset("{\"id\":\"x\"", DataFormat::json_lines), DataError);
  try {
    parse_dataset("id,text_a,text_b,label\nx,a,b,neutral\ny,a,b,bogus\n", DataFormat::delimited);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_dataset(data_path("missing.csv"), DataFormat::delimited), DataError);
}

TEST(Corpus, ValidationRejectsDuplicateIdsAndMixedMinorities) {
  Dataset d{"d", {test::pair("a", "x", "y", Label::neutral), test::pair("a", "x", "z", Label::neutral)}};
  EXPECT_THROW(validate_dataset(d), DataError);
  Dataset mixed{"m",
                {test::pair("a", "x", "y", Label::conflict), test::pair("b", "x", "z", Label::duplicate)}};
  EXPECT_THROW(validate_dataset(mixed), DataError);
  Dataset empty_text{"e", {test::pair("a", "", "y", Label::neutral)}};
  EXPECT_THROW(validate_dataset(empty_text), DataError);
  EXPECT_NO_THROW(validate_dataset(fixture_9n3c()));
}

TEST(Corpus, FilterByLabelKeepsRelativeOrder) {
  const auto d = fixture_9n3c();
  const auto c = filter_by_label(d, {Label::conflict});
  std::vector<std::string> expected;
  for (const auto& r : d.records) {
    if (r.label == Label::conflict) expected.push_back(r.id);
  }
  ASSERT_EQ(c.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(c.records[i].id, expected[i]);
  EXPECT_EQ(filter_by_label(d, {Label::neutral, Label::conflict, Label::duplicate}), d);
}

std::map<Label, std::size_t> test_counts(const Dataset& d, const FoldSplit& f) {
  std::map<Label, std::size_t> out;
  for (const auto& id : f.test_ids) ++out[d.find(id)->label];
  return out;
}

TEST(Corpus, StratifiedFoldsExactDivisibility) {
  const auto d = fixture_9n3c();
  const auto folds = stratified_folds(d, 3, 11);
  ASSERT_EQ(folds.size(), 3u);
  std::set<std::string> seen;
  for (const auto& f : folds) {
    const auto c = test_counts(d, f);
    EXPECT_EQ(c.at(Label::neutral), 3u);
    EXPECT_EQ(c.at(Label::conflict), 1u);
    EXPECT_EQ(f.train_ids.size() + f.test_ids.size(), d.size());
    for (const auto& id : f.test_ids) EXPECT_TRUE(seen.insert(id).second) << id;
    for (const auto& id : f.test_ids) {
      EXPECT_EQ(std::count(f.train_ids.begin(), f.train_ids.end(), id), 0);
    }
  }
  EXPECT_EQ(seen.size(), d.size());
}

TEST(Corpus, StratifiedFoldsAreDeterministic) {
  const auto d = synthetic(50, 7);
  const auto a = stratified_folds(d, 3, 5);
  const auto b = stratified_folds(d, 3, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].test_ids, b[i].test_ids);
    EXPECT_EQ(a[i].train_ids, b[i].train_ids);
  }
}

TEST(Corpus, StratifiedFoldsUnevenCounts) {
  const auto d = synthetic(10, 3);
  std::multiset<std::size_t> neutral_counts;
  for (const auto& f : stratified_folds(d, 3, 2)) neutral_counts.insert(test_counts(d, f)[Label::neutral]);
  EXPECT_EQ(neutral_counts, (std::multiset<std::size_t>{3, 3, 4}));
}

TEST(Corpus, StratifiedFoldsRejectTooFewMembers) {
  EXPECT_THROW(stratified_folds(synthetic(10, 2), 3, 0), DataError);
  EXPECT_THROW(stratified_folds(synthetic(10, 3), 1, 0), Error);
}

TEST(Corpus, SubsetFollowsRequestedIds) {
  const auto d = fixture_9n3c();
  const auto s = subset(d, {d.records[3].id, d.records[0].id});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_THROW(subset(d, {"nope"}), DataError);
}

TEST(Corpus, LabelNamesRoundTrip) {
  for (Label l : kAllLabels) EXPECT_EQ(parse_label(label_name(l)), l);
  EXPECT_EQ(try_parse_label("DUPLICATE"), Label::duplicate);
  EXPECT_FALSE(try_parse_label("other").has_value());
}

}  // namespace
}  // namespace pairforge

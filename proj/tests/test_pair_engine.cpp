#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "pairforge/error.hpp"
#include "pairforge/pair_engine.hpp"
#include "test_support.hpp"

namespace pairforge {
namespace {

std::shared_ptr<const Augmenter> stub(std::size_t m) {
  return make_function_augmenter("stub", [m](std::string_view text, std::uint64_t) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < m; ++i) out.push_back(std::string(text) + " v" + std::to_string(i + 1));
    return out;
  });
}

Dataset conflicts(std::size_t n, std::size_t neutral = 0) {
  Dataset d{"d", {}};
  for (std::size_t i = 0; i < neutral; ++i) {
    d.records.push_back(test::pair("n" + std::to_string(i), "na" + std::to_string(i), "nb" + std::to_string(i),
                                   Label::neutral));
  }
  for (std::size_t i = 0; i < n; ++i) {
    d.records.push_back(test::pair("c" + std::to_string(i), "a" + std::to_string(i), "b" + std::to_string(i),
                                   Label::conflict));
  }
  return d;
}

PairAugmentOptions no_dedup() {
  PairAugmentOptions o;
  o.deduplicate = false;
  return o;
}

TEST(CaseSpec, ParseAndRender) {
  EXPECT_EQ(CaseSpec::parse("I+II+III").to_string(), "I+II+III");
  EXPECT_EQ(CaseSpec::parse("III+I").to_string(), "I+III");
  EXPECT_THROW(CaseSpec::parse("IV"), ConfigError);
  EXPECT_THROW(CaseSpec::parse(""), ConfigError);
  EXPECT_THROW(CaseSpec::parse("I+I"), ConfigError);
  const auto all = CaseSpec::all();
  ASSERT_EQ(all.size(), 7u);
  std::vector<std::string> names;
  for (const auto& s : all) names.push_back(s.to_string());
  EXPECT_EQ(names, (std::vector<std::string>{"I", "II", "III", "I+II", "I+III", "II+III", "I+II+III"}));
}

TEST(AugmentCase, CaseIKeepsOriginalTextB) {
  const auto d = conflicts(2);
  const auto out = augment_case(d, *stub(2), CaseSpec({Case::I}), no_dedup());
  ASSERT_EQ(out.size(), 4u);
  for (const auto& inst : out) {
    const auto* src = d.find(inst.source_id);
    ASSERT_NE(src, nullptr);
    EXPECT_EQ(inst.pair.text_b, src->text_b);
    EXPECT_NE(inst.pair.text_a, src->text_a);
    EXPECT_EQ(inst.pair.label, Label::conflict);
    EXPECT_EQ(inst.case_id, Case::I);
  }
}

TEST(AugmentCase, CaseIIKeepsOriginalTextA) {
  const auto d = conflicts(2);
  for (const auto& inst : augment_case(d, *stub(2), CaseSpec({Case::II}), no_dedup())) {
    EXPECT_EQ(inst.pair.text_a, d.find(inst.source_id)->text_a);
    EXPECT_NE(inst.pair.text_b, d.find(inst.source_id)->text_b);
  }
}

TEST(AugmentCase, CaseIIIPairsByIndex) {
  const auto d = conflicts(2);
  const auto out = augment_case(d, *stub(2), CaseSpec({Case::III}), no_dedup());
  ASSERT_EQ(out.size(), 4u);
  for (const auto& inst : out) {
    const auto suffix = " v" + std::to_string(inst.variant_index + 1);
    EXPECT_TRUE(inst.pair.text_a.ends_with(suffix));
    EXPECT_TRUE(inst.pair.text_b.ends_with(suffix));
  }
}

TEST(AugmentCase, UnionCountsAddUp) {
  const auto d = conflicts(2);
  EXPECT_EQ(augment_case(d, *stub(2), CaseSpec::parse("I+II+III"), no_dedup()).size(), 12u);
  for (const auto& spec : CaseSpec::all()) {
    const auto n = augment_case(d, *stub(3), spec, no_dedup()).size();
    EXPECT_EQ(n, 6u * spec.cases().size()) << spec.to_string();
  }
}

TEST(AugmentCase, OnlyTargetLabelsAreAugmented) {
  const auto d = conflicts(2, 5);
  for (const auto& inst : augment_case(d, *stub(2), CaseSpec::parse("I+II"), {})) {
    EXPECT_EQ(d.find(inst.source_id)->label, Label::conflict);
  }
}

TEST(AugmentCase, DeduplicatesAgainstOriginalsAndEachOther) {
  Dataset d{"d",
            {test::pair("c0", "x", "y", Label::conflict), test::pair("c1", "x", "y2", Label::conflict),
             test::pair("n0", "z", "y", Label::neutral)}};
  // Every text maps to "z": ("z","y") collides with an original pair.
  const auto same = make_function_augmenter("same", [](std::string_view, std::uint64_t) {
    return std::vector<std::string>{"z"};
  });
  const auto out = augment_case(d, *same, CaseSpec::parse("I+II+III"), {});
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& inst : out) {
    EXPECT_TRUE(keys.insert({inst.pair.text_a, inst.pair.text_b}).second);
    EXPECT_FALSE(inst.pair.text_a == "z" && inst.pair.text_b == "y");
  }
  EXPECT_EQ(keys.size(), out.size());
  EXPECT_EQ(out.size(), 3u);  // (x,z) (z,z) (z,y2); (z,y) is an original pair
}

TEST(AugmentCase, IdsAreUniqueAndTraceable) {
  const auto out = augment_case(conflicts(3), *stub(2), CaseSpec::parse("I+II+III"), {});
  std::set<std::string> ids;
  for (const auto& inst : out) {
    EXPECT_TRUE(ids.insert(inst.pair.id).second);
    EXPECT_TRUE(inst.pair.id.starts_with(inst.source_id + "#"));
  }
}

TEST(AugmentCase, OutputIndependentOfJobs) {
  const auto d = conflicts(40, 10);
  const auto shuffle = make_augmenter(AugmenterConfig{}, {});
  PairAugmentOptions one;
  one.seed = 3;
  PairAugmentOptions many = one;
  many.jobs = 8;
  const auto a = serialize_augmented(augment_case(d, *shuffle, CaseSpec::parse("I+II+III"), one));
  const auto b = serialize_augmented(augment_case(d, *shuffle, CaseSpec::parse("I+II+III"), many));
  EXPECT_EQ(a, b);
}

TEST(AugmentCase, FailurePolicies) {
  const auto d = conflicts(3);
  const auto flaky = make_function_augmenter("flaky", [](std::string_view text, std::uint64_t) {
    if (text == "a1") throw ProviderError("provider down");
    return std::vector<std::string>{std::string(text) + "!"};
  });
  PairAugmentOptions abort;
  try {
    augment_case(d, *flaky, CaseSpec({Case::I}), abort);
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.text_id(), "c1");
  }
  PairAugmentOptions skip;
  skip.policy = FailurePolicy::skip;
  std::vector<std::string> skipped;
  skip.on_skip = [&](const std::string& id, const std::string&) { skipped.push_back(id); };
  const auto out = augment_case(d, *flaky, CaseSpec({Case::I}), skip);
  EXPECT_EQ(out.size(), 2u);
  EXPECT_EQ(skipped, (std::vector<std::string>{"c1"}));
}

std::vector<AugmentedInstance> pool_of(std::size_t n) {
  std::vector<AugmentedInstance> pool;
  for (std::size_t i = 0; i < n; ++i) {
    AugmentedInstance inst;
    inst.pair = test::pair("p" + std::to_string(i), "a", "b" + std::to_string(i), Label::conflict);
    inst.source_id = "c";
    pool.push_back(inst);
  }
  return pool;
}

TEST(CombinedDa, SampleSizing) {
  EXPECT_EQ(sample_pool(pool_of(500), 100, 1).size(), 100u);
  EXPECT_EQ(sample_pool(pool_of(50), 100, 1).size(), 50u);
  const auto a = sample_pool(pool_of(500), 100, 42);
  const auto b = sample_pool(pool_of(500), 100, 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].pair.id, b[i].pair.id);
  std::set<std::string> ids;
  for (const auto& x : a) ids.insert(x.pair.id);
  EXPECT_EQ(ids.size(), 100u);
  EXPECT_THROW(sample_pool({}, 10, 1), DataError);
}

TEST(CombinedDa, PoolsTechniquesAndCapsAtNeutralCount) {
  const auto d = conflicts(10, 25);
  const auto out = combined_da(d, {stub(3), make_function_augmenter("other", [](std::string_view t, std::uint64_t) {
                                      return std::vector<std::string>{std::string(t) + " w"};
                                    })},
                               CaseSpec::parse("I+II"), {});
  EXPECT_EQ(out.size(), 25u);
  const auto small = combined_da(conflicts(2, 100), {stub(1)}, CaseSpec({Case::I}), {});
  EXPECT_EQ(small.size(), 2u);
  EXPECT_THROW(combined_da(d, {}, CaseSpec({Case::I}), {}), ConfigError);
}

TEST(TrainingSet, AppendsAugmentedRecords) {
  Dataset d{"d", {}};
  for (int i = 0; i < 100; ++i) {
    d.records.push_back(test::pair("r" + std::to_string(i), "a", "b" + std::to_string(i),
                                   i < 12 ? Label::conflict : Label::neutral));
  }
  const auto aug = augment_case(d, *stub(1), CaseSpec::parse("I+II+III"), {});
  ASSERT_EQ(aug.size(), 36u);
  const auto t = build_training_set(d, aug);
  EXPECT_EQ(t.size(), 136u);
  EXPECT_EQ(build_training_set(d, {}), d);
  std::vector<AugmentedInstance> bad(1);
  bad[0].source_id = "ghost";
  EXPECT_THROW(build_training_set(d, bad), DataError);
}

TEST(AugmentedIo, RoundTripWithProvenance) {
  const auto out = augment_case(conflicts(3), *stub(2), CaseSpec::parse("I+III"), {});
  const auto text = serialize_augmented(out, R"({"seed":7})");
  EXPECT_TRUE(text.starts_with(R"({"provenance":{"seed":7}})"));
  const auto back = parse_augmented(text);
  ASSERT_EQ(back.size(), out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(back[i].pair, out[i].pair);
    EXPECT_EQ(back[i].source_id, out[i].source_id);
    EXPECT_EQ(back[i].case_id, out[i].case_id);
    EXPECT_EQ(back[i].variant_index, out[i].variant_index);
  }
}

}  // namespace
}  // namespace pairforge

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "pairforge/error.hpp"
#include "pairforge/evaluate.hpp"
#include "test_support.hpp"

namespace pairforge {
namespace {

constexpr Label N = Label::neutral;
constexpr Label C = Label::conflict;

TEST(Confusion, HandCountedCells) {
  const auto cm = confusion({N, C, C, N}, {N, N, C, C});
  EXPECT_EQ(cm.count(N, N), 1u);
  EXPECT_EQ(cm.count(N, C), 1u);
  EXPECT_EQ(cm.count(C, N), 1u);
  EXPECT_EQ(cm.count(C, C), 1u);
  const auto per = per_class_prf(cm);
  for (Label l : {N, C}) {
    EXPECT_DOUBLE_EQ(per.at(l).precision, 0.5);
    EXPECT_DOUBLE_EQ(per.at(l).recall, 0.5);
    EXPECT_DOUBLE_EQ(per.at(l).f1, 0.5);
  }
  EXPECT_DOUBLE_EQ(macro_prf(cm).f1, 0.5);
}

TEST(Confusion, PerfectWrongAndEmpty) {
  const std::vector<Label> g{N, C, N, N, C};
  const auto perfect = confusion(g, g);
  std::size_t diag = 0;
  for (std::size_t i = 0; i < perfect.size(); ++i) diag += perfect.at(i, i);
  EXPECT_EQ(diag, 5u);
  EXPECT_DOUBLE_EQ(macro_prf(perfect).f1, 1.0);
  EXPECT_DOUBLE_EQ(per_class_prf(perfect).at(C).precision, 1.0);
  EXPECT_DOUBLE_EQ(macro_prf(confusion({N, C}, {C, N})).f1, 0.0);
  EXPECT_THROW(confusion({}, {}), Error);
  EXPECT_THROW(confusion({N}, {N, C}), Error);
}

TEST(Confusion, AbsentClassScoresZero) {
  const auto cm = confusion({N, N}, {N, N}, {N, C, Label::duplicate});
  const auto per = per_class_prf(cm);
  EXPECT_DOUBLE_EQ(per.at(Label::duplicate).precision, 0.0);
  EXPECT_DOUBLE_EQ(per.at(Label::duplicate).recall, 0.0);
  EXPECT_DOUBLE_EQ(per.at(Label::duplicate).f1, 0.0);
  EXPECT_DOUBLE_EQ(macro_prf(cm).f1, 1.0);  // only labels present in gold count
}

TEST(Metrics, RandomMatricesMatchFormulaOracle) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + gen() % 2;
    std::vector<Label> labels(kAllLabels.begin(), kAllLabels.begin() + k);
    std::vector<std::size_t> counts(k * k);
    for (auto& c : counts) c = gen() % 1001;
    const ConfusionMatrix cm(labels, counts);
    const auto per = per_class_prf(cm);
    double pf = 0, pp = 0, pr = 0;
    std::size_t present = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double tp = counts[i * k + i], col = 0, row = 0;
      for (std::size_t j = 0; j < k; ++j) {
        col += counts[j * k + i];
        row += counts[i * k + j];
      }
      const double p = col ? tp / col : 0, r = row ? tp / row : 0, f = (p + r) ? 2 * p * r / (p + r) : 0;
      EXPECT_NEAR(per.at(labels[i]).precision, p, 1e-9);
      EXPECT_NEAR(per.at(labels[i]).recall, r, 1e-9);
      EXPECT_NEAR(per.at(labels[i]).f1, f, 1e-9);
      if (row > 0) {
        pf += f, pp += p, pr += r;
        ++present;
      }
    }
    const auto m = macro_prf(cm);
    EXPECT_NEAR(m.f1, present ? pf / present : 0, 1e-9);
    const auto alt = macro_prf(cm, MacroMode::f1_of_means);
    const double mp = pp / present, mr = pr / present;
    EXPECT_NEAR(alt.f1, (mp + mr) ? 2 * mp * mr / (mp + mr) : 0, 1e-9);
  }
}

TEST(Metrics, SampleStandardDeviation) {
  const auto ms = mean_std({0.8, 0.9, 1.0});
  EXPECT_NEAR(ms.mean, 0.9, 1e-12);
  EXPECT_NEAR(ms.std, 0.1, 1e-12);
  EXPECT_EQ(mean_std({0.4}).std, 0.0);
  EXPECT_EQ(mean_std({}).mean, 0.0);
}

TEST(Delta, RenderedCells) {
  EXPECT_EQ(format_delta(0.908 - 0.817), "+0.09");
  EXPECT_EQ(format_delta(0.836 - 0.841), "~0.00");
  EXPECT_EQ(format_delta(0.0), "+0.00");
  EXPECT_EQ(format_delta(-0.02), "-0.02");
  EXPECT_EQ(format_delta(0.0051), "+0.01");
  EXPECT_EQ(format_delta(0.004), "~0.00");
  EXPECT_EQ(format_delta(-0.004), "~0.00");
}

ReportRow row(const std::string& ds, const std::string& tech, const std::string& spec, double minority_f1,
              double macro_p, double macro_r, double macro_f1, double sd = 0.0) {
  ReportRow r;
  r.dataset = ds;
  r.technique = tech;
  r.case_spec = spec;
  r.per_class[C].f1 = {minority_f1, sd};
  r.per_class[N].f1 = {0.99, 0.0};
  r.macro = {{macro_p, 0.0}, {macro_r, 0.0}, {macro_f1, 0.0}};
  return r;
}

TEST(DeltaTable, CellsAndGrid) {
  const auto base = row("WorldVista", "", "", 0.817, 0.8, 0.8, 0.8, 0.087);
  std::vector<ReportRow> rows{row("WorldVista", "shuffling", "II+III", 0.908, 0.9, 0.9, 0.9, 0.006),
                              row("WorldVista", "back_translation", "I", 0.836, 0.8, 0.8, 0.8, 0.01)};
  auto b2 = base;
  b2.per_class[C].f1.mean = 0.841;
  const auto key = MetricKey::parse("conflict-F1");
  const auto t = improvement_table(rows, base, key);
  ASSERT_EQ(t.cells.size(), 2u);
  EXPECT_EQ(t.cells[0].render(), "0.908 ± 0.006 (+0.09)");
  EXPECT_NEAR(t.cells[0].delta, 0.908 - 0.817, 1e-9);
  EXPECT_EQ(improvement_table(rows, b2, key).cells[1].rendered_delta, "~0.00");
  const auto grid = render_grid(t);
  EXPECT_NE(grid.find("No Augmentation conflict-F1: 0.817 ± 0.087"), std::string::npos) << grid;
  EXPECT_NE(grid.find("0.908 ± 0.006 (+0.09)"), std::string::npos);
  EXPECT_NE(grid.find("I+II+III"), std::string::npos);
  rows.push_back(row("UAV", "shuffling", "I", 0.5, 0.5, 0.5, 0.5));
  EXPECT_THROW(improvement_table(rows, base, key), ConfigError);
  auto same = row("WorldVista", "shuffling", "I", 0.817, 0.8, 0.8, 0.8);
  EXPECT_EQ(improvement_table({same}, base, key).cells[0].rendered_delta, "+0.00");
}

TEST(DeltaTable, MetricKeys) {
  EXPECT_EQ(MetricKey::parse("macro-F1").to_string(), "macro-F1");
  EXPECT_EQ(MetricKey::parse("duplicate-precision").to_string(), "duplicate-precision");
  EXPECT_THROW(MetricKey::parse("F1"), ConfigError);
  EXPECT_THROW(MetricKey::parse("macro-accuracy"), ConfigError);
  EXPECT_THROW(MetricKey::parse("other-F1"), ConfigError);
}

TEST(Summary, TwoDatasetsHandComputed) {
  DatasetResults a{row("A", "", "", 0.5, 0.60, 0.50, 0.40), {}};
  a.rows = {row("A", "nv_wns", "I", 0.55, 0.66, 0.55, 0.44), row("A", "nv_wns", "II", 0.70, 0.72, 0.45, 0.50),
            row("A", "shuffling", "I", 0.40, 0.30, 0.30, 0.30)};
  DatasetResults b{row("B", "", "", 0.5, 0.80, 0.80, 0.80), {}};
  b.rows = {row("B", "nv_wns", "III", 0.60, 0.84, 0.76, 0.82), row("B", "shuffling", "I", 0.60, 0.90, 0.90, 0.90)};
  const auto s = improvement_summary({a, b});
  ASSERT_EQ(s.techniques.size(), 2u);
  const auto& nv = s.techniques[0];
  EXPECT_EQ(nv.technique, "nv_wns");
  EXPECT_EQ(nv.best_configurations, (std::vector<std::string>{"A:II", "B:III"}));
  // Best rows: A/II (P +0.12, R -0.05, F1 +0.10) and B/III (P +0.04, R -0.04, F1 +0.02).
  EXPECT_NEAR(nv.average[0].absolute, (0.12 + 0.04) / 2, 1e-9);
  EXPECT_NEAR(nv.maximum[0].absolute, 0.12, 1e-9);
  EXPECT_NEAR(nv.average[1].absolute, (-0.05 - 0.04) / 2, 1e-9);
  EXPECT_NEAR(nv.maximum[1].absolute, -0.04, 1e-9);
  EXPECT_NEAR(nv.average[2].relative, (0.10 / 0.40 * 100 + 0.02 / 0.80 * 100) / 2, 1e-9);
  EXPECT_NEAR(nv.maximum[2].relative, 25.0, 1e-9);
  const auto text = render_summary(s);
  EXPECT_NE(text.find("nv_wns"), std::string::npos);
}

TEST(Summary, SingleDatasetAverageEqualsMaximum) {
  DatasetResults a{row("A", "", "", 0.5, 0.6, 0.5, 0.4), {row("A", "t_wnl", "I", 0.6, 0.7, 0.6, 0.5)}};
  const auto s = improvement_summary({a});
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_DOUBLE_EQ(s.techniques[0].average[m].absolute, s.techniques[0].maximum[m].absolute);
    EXPECT_DOUBLE_EQ(s.techniques[0].average[m].relative, s.techniques[0].maximum[m].relative);
  }
  EXPECT_NEAR(s.techniques[0].average[2].relative, 0.1 / 0.4 * 100, 1e-9);
}

Dataset small_corpus() {
  Dataset d{"small", {}};
  for (int i = 0; i < 30; ++i) {
    const bool c = i % 5 == 0;
    d.records.push_back(test::pair("r" + std::to_string(i), "The unit " + std::to_string(i) + " shall log data",
                                   c ? "The unit shall never log data rare" + std::to_string(i % 2)
                                     : "The portal shall show item " + std::to_string(i),
                                   c ? C : N));
  }
  return d;
}

TEST(CrossValidate, BaselineRowAndDeterminism) {
  const auto d = small_corpus();
  const BaselineClassifier clf;
  CrossValidationOptions o;
  o.seed = 4;
  const auto a = cross_validate(d, nullptr, clf, o);
  EXPECT_TRUE(a.row.is_baseline());
  EXPECT_EQ(a.row.condition(), "No Augmentation");
  EXPECT_EQ(a.row.delta_macro.f1, 0.0);
  EXPECT_EQ(a.row.folds.size(), 3u);
  o.jobs = 3;
  const auto b = cross_validate(d, nullptr, clf, o);
  EXPECT_EQ(report_to_json({a.row}), report_to_json({b.row}));
}

TEST(CrossValidate, TestFoldsAreNeverAugmented) {
  const auto d = small_corpus();
  AugmentationPlan plan;
  plan.technique = "shuffling";
  plan.augmenters = {make_augmenter(AugmenterConfig{}, {})};
  plan.spec = CaseSpec::parse("I+II+III");
  const auto res = cross_validate(d, &plan, BaselineClassifier{}, {});
  for (const auto& t : res.traces) {
    const std::set<std::string> test(t.test_ids.begin(), t.test_ids.end());
    const std::set<std::string> train(t.train_ids.begin(), t.train_ids.end());
    EXPECT_FALSE(t.augmented_ids.empty());
    for (const auto& id : t.augmented_ids) EXPECT_FALSE(test.contains(id));
    for (const auto& src : t.augmented_source_ids) {
      EXPECT_FALSE(test.contains(src));
      EXPECT_TRUE(train.contains(src));
    }
  }
  EXPECT_EQ(res.row.condition(), "shuffling I+II+III");
  EXPECT_GT(res.row.folds[0].augmented, 0u);
}

TEST(Incremental, PairedRowsPerSize) {
  Dataset d{"inc", {}};
  for (int i = 0; i < 120; ++i) {
    const bool c = i % 3 == 0;
    d.records.push_back(test::pair("r" + std::to_string(i), "alpha " + std::to_string(i) + " shall run",
                                   c ? "alpha shall stop " + std::to_string(i) : "beta shall go " + std::to_string(i),
                                   c ? C : N));
  }
  AugmentationPlan plan;
  plan.technique = "shuffling";
  plan.augmenters = {make_augmenter(AugmenterConfig{}, {})};
  const auto rows = incremental_run(d, {15, 25, 35}, plan, BaselineClassifier{}, {});
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    EXPECT_TRUE(rows[i].is_baseline());
    EXPECT_FALSE(rows[i + 1].is_baseline());
    EXPECT_EQ(rows[i].minority_size, rows[i + 1].minority_size);
  }
  EXPECT_EQ(rows[4].minority_size, 35u);
  EXPECT_THROW(incremental_run(d, {41}, plan, BaselineClassifier{}, {}), DataError);
  EXPECT_THROW(incremental_run(d, {25, 15}, plan, BaselineClassifier{}, {}), ConfigError);
  EXPECT_EQ(subsample_minority(d, 40, 1), d);
  const auto s1 = subsample_minority(d, 20, 9);
  EXPECT_EQ(s1, subsample_minority(d, 20, 9));
  EXPECT_EQ(class_distribution(s1).at(C), 20u);
  EXPECT_EQ(class_distribution(s1).at(N), 80u);
  const auto csv = incremental_to_csv(rows);
  EXPECT_TRUE(csv.starts_with("size,condition,metric,mean,std\n15,No Augmentation,conflict-F1,"));
}

TEST(ReportIo, JsonRoundTripAndCsv) {
  auto r = row("A", "nv_wns", "I+II", 0.6, 0.7, 0.6, 0.5, 0.01);
  r.minority_size = 25;
  r.seed = 1234567890123ull;
  r.folds.push_back({0, {{C, {0.1, 0.2, 0.3}}}, {0.4, 0.5, 0.6}, 10, 3, 5});
  apply_baseline(r, row("A", "", "", 0.5, 0.6, 0.5, 0.4));
  const auto json = report_to_json({r}, R"({"seed":1})");
  const auto back = report_from_json(json);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(report_to_json(back, R"({"seed":1})"), json);
  EXPECT_EQ(back[0].minority_size, 25u);
  EXPECT_EQ(back[0].delta_per_class.at(C).f1, r.delta_per_class.at(C).f1);
  EXPECT_TRUE(report_to_csv({r}).starts_with("dataset,technique,case,minority_size,seed,metric,mean,std,delta\n"));
  EXPECT_THROW(report_from_json("{"), DataError);
}

}  // namespace
}  // namespace pairforge

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pairforge/classify.hpp"
#include "pairforge/corpus.hpp"
#include "pairforge/pair_engine.hpp"

namespace pairforge {

// Square count matrix indexed by (gold, predicted) over an ordered label axis.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<Label> labels);
  // Row-major counts, labels.size()^2 entries.
  ConfusionMatrix(std::vector<Label> labels, std::vector<std::size_t> counts);

  const std::vector<Label>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t at(std::size_t gold, std::size_t pred) const { return counts_[gold * size() + pred]; }
  std::size_t& at(std::size_t gold, std::size_t pred) { return counts_[gold * size() + pred]; }
  std::size_t count(Label gold, Label pred) const;
  std::size_t gold_total(std::size_t gold) const;
  std::size_t pred_total(std::size_t pred) const;
  std::size_t total() const;
  std::optional<std::size_t> index_of(Label l) const;

 private:
  std::vector<Label> labels_;
  std::vector<std::size_t> counts_;
};

// Axis defaults to the labels seen in gold or pred, in label order.
ConfusionMatrix confusion(const std::vector<Label>& gold, const std::vector<Label>& pred,
                          std::vector<Label> labels = {});

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Undefined ratios (zero denominators) are reported as 0.
std::map<Label, Prf> per_class_prf(const ConfusionMatrix& cm);

enum class MacroMode {
  mean_of_f1,   // F1 = unweighted mean of per-class F1
  f1_of_means,  // F1 = harmonic mean of macro precision and macro recall
};

// Unweighted mean over the labels that occur in gold.
Prf macro_prf(const ConfusionMatrix& cm, MacroMode mode = MacroMode::mean_of_f1);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n-1) standard deviation; 0 for n < 2
};

MeanStd mean_std(const std::vector<double>& values);

struct MetricSummary {
  MeanStd precision;
  MeanStd recall;
  MeanStd f1;
};

struct FoldScore {
  std::size_t fold_index = 0;
  std::map<Label, Prf> per_class;
  Prf macro;
  std::size_t train_size = 0;  // after augmentation
  std::size_t augmented = 0;
  std::size_t test_size = 0;
};

struct ReportRow {
  std::string dataset;
  std::string technique;  // empty: no augmentation
  std::string case_spec;  // empty: no augmentation
  std::optional<std::size_t> minority_size;
  std::uint64_t seed = 0;
  std::map<Label, MetricSummary> per_class;
  MetricSummary macro;
  std::map<Label, Prf> delta_per_class;  // mean - baseline mean
  Prf delta_macro;
  std::vector<FoldScore> folds;

  bool is_baseline() const { return technique.empty(); }
  std::string condition() const;  // "No Augmentation" or "<technique> <case>"
};

// Fills the delta fields. Throws ConfigError if datasets differ.
void apply_baseline(ReportRow& row, const ReportRow& baseline);

// How the training split of each fold is augmented.
struct AugmentationPlan {
  std::string technique;  // report name, e.g. "nv_wns" or "combined"
  std::vector<std::shared_ptr<const Augmenter>> augmenters;
  bool combined = false;
  CaseSpec spec = CaseSpec({Case::I});
  PairAugmentOptions options;
};

struct CrossValidationOptions {
  std::size_t folds = 3;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  MacroMode macro_mode = MacroMode::mean_of_f1;
};

// Provenance of one fold run, for hygiene checks.
struct FoldTrace {
  std::size_t fold_index = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::vector<std::string> augmented_ids;
  std::vector<std::string> augmented_source_ids;
};

struct CrossValidationResult {
  ReportRow row;
  std::vector<FoldTrace> traces;
};

// One fold with its (possibly augmented) training split and untouched test split.
struct PreparedFold {
  FoldTrace trace;
  Dataset train;
  Dataset test;
  std::size_t augmented = 0;
};

std::vector<PreparedFold> prepare_folds(const Dataset& d, const AugmentationPlan* plan,
                                        const CrossValidationOptions& opts);

// Per fold: augment the training split only, train, score the untouched test
// split. plan == nullptr gives the no-augmentation baseline.
CrossValidationResult cross_validate(const Dataset& d, const AugmentationPlan* plan,
                                     const Classifier& classifier, const CrossValidationOptions& opts);

// Which number a delta table shows: a class metric or a macro metric.
struct MetricKey {
  std::optional<Label> label;  // nullopt: macro
  enum class Kind { precision, recall, f1 } kind = Kind::f1;

  static MetricKey parse(std::string_view text);  // "conflict-F1", "macro-F1", "duplicate-precision"
  std::string to_string() const;
  MeanStd of(const ReportRow& row) const;
  double delta_of(const ReportRow& row) const;
};

// "+0.09", "-0.01", "~0.00" when 0 < |delta| <= 0.005, "+0.00" when exactly 0.
std::string format_delta(double delta);

struct DeltaCell {
  std::string technique;
  std::string case_spec;
  MeanStd score;
  double delta = 0.0;
  std::string rendered_delta;

  std::string render() const;  // "0.908 ± 0.006 (+0.09)"
};

struct DeltaTable {
  std::string dataset;
  MetricKey metric;
  MeanStd baseline;
  std::vector<DeltaCell> cells;  // input row order
};

DeltaTable improvement_table(const std::vector<ReportRow>& rows, const ReportRow& baseline,
                             const MetricKey& metric);

// Techniques as rows, the seven case configurations as columns.
std::string render_grid(const DeltaTable& table);

struct DatasetResults {
  ReportRow baseline;
  std::vector<ReportRow> rows;
};

struct Change {
  double absolute = 0.0;
  double relative = 0.0;  // percent of baseline
};

struct TechniqueImprovement {
  std::string technique;
  // Indexed precision, recall, f1.
  std::array<Change, 3> average{};
  std::array<Change, 3> maximum{};
  std::vector<std::string> best_configurations;  // "<dataset>:<case>"
};

struct ImprovementSummary {
  std::vector<TechniqueImprovement> techniques;  // first-seen order
};

// For each technique, picks each dataset's best row by `selection` (default:
// the minority-class F1), then averages and maximizes macro P/R/F1 changes.
ImprovementSummary improvement_summary(const std::vector<DatasetResults>& results,
                                       std::optional<MetricKey> selection = std::nullopt);

std::string render_summary(const ImprovementSummary& summary);

// For each minority size: seeded subsample of the minority class, then a
// baseline row followed by an augmented row.
std::vector<ReportRow> incremental_run(const Dataset& d, const std::vector<std::size_t>& minority_sizes,
                                       const AugmentationPlan& plan, const Classifier& classifier,
                                       const CrossValidationOptions& opts);

// Neutral records plus `size` minority records chosen by seed, dataset order.
Dataset subsample_minority(const Dataset& d, std::size_t size, std::uint64_t seed);

// Report serialization. JSON keeps full precision and embeds provenance.
std::string report_to_json(const std::vector<ReportRow>& rows, const std::string& provenance_json = {});
std::vector<ReportRow> report_from_json(std::string_view json);
std::string report_to_csv(const std::vector<ReportRow>& rows);
// size,condition,metric,mean,std
std::string incremental_to_csv(const std::vector<ReportRow>& rows);

}  // namespace pairforge

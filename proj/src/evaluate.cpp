#include "pairforge/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pairforge/error.hpp"
#include "pairforge/parallel.hpp"
#include "pairforge/random.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace {

using ojson = nlohmann::ordered_json;

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Display width of a UTF-8 string (code points).
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string pad(std::string s, std::size_t width) {
  const auto w = display_width(s);
  if (w < width) s.append(width - w, ' ');
  return s;
}

double field(const Prf& p, MetricKey::Kind k) {
  switch (k) {
    case MetricKey::Kind::precision:
      return p.precision;
    case MetricKey::Kind::recall:
      return p.recall;
    case MetricKey::Kind::f1:
      return p.f1;
  }
  return p.f1;
}

MeanStd field(const MetricSummary& m, MetricKey::Kind k) {
  switch (k) {
    case MetricKey::Kind::precision:
      return m.precision;
    case MetricKey::Kind::recall:
      return m.recall;
    case MetricKey::Kind::f1:
      return m.f1;
  }
  return m.f1;
}

MetricSummary summarize(const std::vector<Prf>& values) {
  std::vector<double> p, r, f;
  for (const auto& v : values) {
    p.push_back(v.precision);
    r.push_back(v.recall);
    f.push_back(v.f1);
  }
  return {mean_std(p), mean_std(r), mean_std(f)};
}

Prf delta(const MetricSummary& row, const MetricSummary& base) {
  return {row.precision.mean - base.precision.mean, row.recall.mean - base.recall.mean,
          row.f1.mean - base.f1.mean};
}

std::vector<Label> label_axis(const Dataset& d) {
  std::set<Label> present;
  for (const auto& r : d.records) present.insert(r.label);
  return {present.begin(), present.end()};
}

ojson prf_json(const Prf& p) {
  return ojson{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

Prf prf_from(const nlohmann::json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

ojson summary_json(const MetricSummary& m) {
  const auto ms = [](const MeanStd& x) { return ojson{{"mean", x.mean}, {"std", x.std}}; };
  return ojson{{"precision", ms(m.precision)}, {"recall", ms(m.recall)}, {"f1", ms(m.f1)}};
}

MetricSummary summary_from(const nlohmann::json& j) {
  const auto ms = [](const nlohmann::json& x) {
    return MeanStd{x.at("mean").get<double>(), x.at("std").get<double>()};
  };
  return {ms(j.at("precision")), ms(j.at("recall")), ms(j.at("f1"))};
}

}  // namespace

// ---------------------------------------------------------------------------
// Confusion matrix and P/R/F1

ConfusionMatrix::ConfusionMatrix(std::vector<Label> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

ConfusionMatrix::ConfusionMatrix(std::vector<Label> labels, std::vector<std::size_t> counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  if (counts_.size() != labels_.size() * labels_.size()) {
    throw Error("confusion matrix: expected " + std::to_string(labels_.size() * labels_.size()) + " counts");
  }
}

std::optional<std::size_t> ConfusionMatrix::index_of(Label l) const {
  const auto it = std::find(labels_.begin(), labels_.end(), l);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ConfusionMatrix::count(Label gold, Label pred) const {
  const auto g = index_of(gold);
  const auto p = index_of(pred);
  return g && p ? at(*g, *p) : 0;
}

std::size_t ConfusionMatrix::gold_total(std::size_t gold) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < size(); ++p) s += at(gold, p);
  return s;
}

std::size_t ConfusionMatrix::pred_total(std::size_t pred) const {
  std::size_t s = 0;
  for (std::size_t g = 0; g < size(); ++g) s += at(g, pred);
  return s;
}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

ConfusionMatrix confusion(const std::vector<Label>& gold, const std::vector<Label>& pred,
                          std::vector<Label> labels) {
  if (gold.size() != pred.size()) {
    throw Error("confusion: gold has " + std::to_string(gold.size()) + " labels, pred has " +
                std::to_string(pred.size()));
  }
  if (gold.empty()) throw Error("confusion: no labels to score");
  if (labels.empty()) {
    std::set<Label> seen(gold.begin(), gold.end());
    seen.insert(pred.begin(), pred.end());
    labels.assign(seen.begin(), seen.end());
  }
  ConfusionMatrix cm(labels);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = cm.index_of(gold[i]);
    const auto p = cm.index_of(pred[i]);
    if (!g || !p) throw Error("confusion: label outside the matrix axis");
    ++cm.at(*g, *p);
  }
  return cm;
}

std::map<Label, Prf> per_class_prf(const ConfusionMatrix& cm) {
  std::map<Label, Prf> out;
  for (std::size_t i = 0; i < cm.size(); ++i) {
    const std::size_t tp = cm.at(i, i);
    const double p = ratio(tp, cm.pred_total(i));
    const double r = ratio(tp, cm.gold_total(i));
    out[cm.labels()[i]] = {p, r, harmonic(p, r)};
  }
  return out;
}

Prf macro_prf(const ConfusionMatrix& cm, MacroMode mode) {
  const auto per = per_class_prf(cm);
  Prf sum;
  std::size_t n = 0;
  for (std::size_t i = 0; i < cm.size(); ++i) {
    if (cm.gold_total(i) == 0) continue;
    const auto& v = per.at(cm.labels()[i]);
    sum.precision += v.precision;
    sum.recall += v.recall;
    sum.f1 += v.f1;
    ++n;
  }
  if (n == 0) return {};
  Prf out{sum.precision / static_cast<double>(n), sum.recall / static_cast<double>(n),
          sum.f1 / static_cast<double>(n)};
  if (mode == MacroMode::f1_of_means) out.f1 = harmonic(out.precision, out.recall);
  return out;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

// ---------------------------------------------------------------------------
// Rows and cross-validation

std::string ReportRow::condition() const {
  return is_baseline() ? "No Augmentation" : technique + " " + case_spec;
}

void apply_baseline(ReportRow& row, const ReportRow& baseline) {
  if (row.dataset != baseline.dataset) {
    throw ConfigError("baseline dataset '" + baseline.dataset + "' does not match row dataset '" +
                      row.dataset + "'");
  }
  row.delta_macro = delta(row.macro, baseline.macro);
  row.delta_per_class.clear();
  for (const auto& [label, m] : row.per_class) {
    const auto it = baseline.per_class.find(label);
    row.delta_per_class[label] = it == baseline.per_class.end() ? Prf{} : delta(m, it->second);
  }
}

std::vector<PreparedFold> prepare_folds(const Dataset& d, const AugmentationPlan* plan,
                                        const CrossValidationOptions& opts) {
  if (plan && !plan->combined && plan->augmenters.size() != 1) {
    throw ConfigError("a single-technique plan needs exactly one augmenter");
  }
  std::vector<PreparedFold> out;
  for (const auto& split : stratified_folds(d, opts.folds, opts.seed)) {
    PreparedFold f;
    f.trace.fold_index = split.fold_index;
    f.trace.train_ids = split.train_ids;
    f.trace.test_ids = split.test_ids;
    const Dataset train = subset(d, split.train_ids, d.name);
    f.test = subset(d, split.test_ids, d.name);

    std::vector<AugmentedInstance> augmented;
    if (plan) {
      PairAugmentOptions o = plan->options;
      o.seed = mix_seed(mix_seed(opts.seed, split.fold_index), plan->options.seed);
      o.jobs = std::max<std::size_t>(1, opts.jobs);
      augmented = plan->combined ? combined_da(train, plan->augmenters, plan->spec, o)
                                 : augment_case(train, *plan->augmenters.front(), plan->spec, o);
    }
    f.train = build_training_set(train, augmented);
    f.augmented = augmented.size();
    for (std::size_t i = train.size(); i < f.train.size(); ++i) f.trace.augmented_ids.push_back(f.train.records[i].id);
    for (const auto& inst : augmented) f.trace.augmented_source_ids.push_back(inst.source_id);
    out.push_back(std::move(f));
  }
  return out;
}

CrossValidationResult cross_validate(const Dataset& d, const AugmentationPlan* plan,
                                     const Classifier& classifier, const CrossValidationOptions& opts) {
  auto folds = prepare_folds(d, plan, opts);
  const auto axis = label_axis(d);

  std::vector<FoldScore> scores(folds.size());
  parallel_for(folds.size(), opts.jobs, [&](std::size_t f) {
    const auto& fold = folds[f];
    const auto predictor = classifier.train(fold.train, mix_seed(opts.seed, fold.trace.fold_index));
    std::vector<Label> gold, pred;
    for (const auto& r : fold.test.records) {
      gold.push_back(r.label);
      pred.push_back(predictor->predict(r));
    }
    const auto cm = confusion(gold, pred, axis);
    scores[f] = {fold.trace.fold_index, per_class_prf(cm), macro_prf(cm, opts.macro_mode), fold.train.size(),
                 fold.augmented, fold.test.size()};
  });

  ReportRow row;
  row.dataset = d.name;
  row.seed = opts.seed;
  if (plan) {
    row.technique = plan->technique;
    row.case_spec = plan->spec.to_string();
  }
  for (Label l : axis) {
    std::vector<Prf> v;
    for (const auto& s : scores) v.push_back(s.per_class.at(l));
    row.per_class[l] = summarize(v);
  }
  std::vector<Prf> macro;
  for (const auto& s : scores) macro.push_back(s.macro);
  row.macro = summarize(macro);
  row.folds = std::move(scores);
  if (!plan) apply_baseline(row, row);

  std::vector<FoldTrace> traces;
  for (auto& f : folds) traces.push_back(std::move(f.trace));
  return {std::move(row), std::move(traces)};
}

// ---------------------------------------------------------------------------
// Delta tables

MetricKey MetricKey::parse(std::string_view text) {
  const auto dash = text.rfind('-');
  if (dash == std::string_view::npos) throw ConfigError("metric must look like 'conflict-F1', got '" + std::string(text) + "'");
  MetricKey key;
  const auto scope = to_lower(text.substr(0, dash));
  const auto kind = to_lower(text.substr(dash + 1));
  if (scope != "macro") {
    key.label = try_parse_label(scope);
    if (!key.label) throw ConfigError("unknown metric scope '" + scope + "'");
  }
  if (kind == "f1") {
    key.kind = Kind::f1;
  } else if (kind == "precision" || kind == "p") {
    key.kind = Kind::precision;
  } else if (kind == "recall" || kind == "r") {
    key.kind = Kind::recall;
  } else {
    throw ConfigError("unknown metric kind '" + kind + "'");
  }
  return key;
}

std::string MetricKey::to_string() const {
  std::string scope = label ? std::string(label_name(*label)) : "macro";
  switch (kind) {
    case Kind::precision:
      return scope + "-precision";
    case Kind::recall:
      return scope + "-recall";
    case Kind::f1:
      return scope + "-F1";
  }
  return scope;
}

MeanStd MetricKey::of(const ReportRow& row) const {
  if (!label) return field(row.macro, kind);
  const auto it = row.per_class.find(*label);
  return it == row.per_class.end() ? MeanStd{} : field(it->second, kind);
}

double MetricKey::delta_of(const ReportRow& row) const {
  if (!label) return field(row.delta_macro, kind);
  const auto it = row.delta_per_class.find(*label);
  return it == row.delta_per_class.end() ? 0.0 : field(it->second, kind);
}

std::string format_delta(double delta) {
  if (delta == 0.0) return "+0.00";
  // The tolerance keeps decimal boundary cases such as 0.836 - 0.841 on the
  // "~0.00" side despite binary rounding.
  if (std::fabs(delta) <= 0.005 + 1e-9) return "~0.00";
  return (delta > 0 ? "+" : "-") + fixed(std::fabs(delta), 2);
}

std::string DeltaCell::render() const {
  return fixed(score.mean, 3) + " ± " + fixed(score.std, 3) + " (" + rendered_delta + ")";
}

DeltaTable improvement_table(const std::vector<ReportRow>& rows, const ReportRow& baseline,
                             const MetricKey& metric) {
  DeltaTable table{baseline.dataset, metric, metric.of(baseline), {}};
  for (const auto& row : rows) {
    if (row.dataset != baseline.dataset) {
      throw ConfigError("row dataset '" + row.dataset + "' does not match baseline '" + baseline.dataset + "'");
    }
    if (row.is_baseline()) continue;
    DeltaCell cell;
    cell.technique = row.technique;
    cell.case_spec = row.case_spec;
    cell.score = metric.of(row);
    cell.delta = cell.score.mean - table.baseline.mean;
    cell.rendered_delta = format_delta(cell.delta);
    table.cells.push_back(std::move(cell));
  }
  return table;
}

std::string render_grid(const DeltaTable& table) {
  std::vector<std::string> columns;
  for (const auto& spec : CaseSpec::all()) columns.push_back(spec.to_string());
  std::vector<std::string> techniques;
  for (const auto& c : table.cells) {
    if (std::find(techniques.begin(), techniques.end(), c.technique) == techniques.end()) {
      techniques.push_back(c.technique);
    }
  }
  std::vector<std::vector<std::string>> grid;
  grid.push_back({""});
  for (const auto& c : columns) grid.back().push_back(c);
  for (const auto& t : techniques) {
    std::vector<std::string> line{t};
    for (const auto& col : columns) {
      std::string text = "-";
      for (const auto& c : table.cells) {
        if (c.technique == t && c.case_spec == col) text = c.render();
      }
      line.push_back(std::move(text));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(columns.size() + 1, 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], display_width(line[i]));
  }

  std::ostringstream out;
  out << table.dataset << " (No Augmentation " << table.metric.to_string() << ": "
      << fixed(table.baseline.mean, 3) << " ± " << fixed(table.baseline.std, 3) << ")\n";
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < grid[r].size(); ++i) {
      if (i) line += " | ";
      line += pad(grid[r][i], width[i]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 3 * (width.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Summary across datasets

ImprovementSummary improvement_summary(const std::vector<DatasetResults>& results,
                                       std::optional<MetricKey> selection) {
  std::vector<std::string> order;
  for (const auto& ds : results) {
    for (const auto& r : ds.rows) {
      if (!r.is_baseline() && std::find(order.begin(), order.end(), r.technique) == order.end()) {
        order.push_back(r.technique);
      }
    }
  }

  ImprovementSummary summary;
  for (const auto& tech : order) {
    TechniqueImprovement ti;
    ti.technique = tech;
    std::array<std::vector<Change>, 3> changes;
    for (const auto& ds : results) {
      MetricKey key;
      if (selection) {
        key = *selection;
      } else {
        for (const auto& [label, _] : ds.baseline.per_class) {
          if (label != Label::neutral) key.label = label;
        }
      }
      const ReportRow* best = nullptr;
      for (const auto& r : ds.rows) {
        if (r.technique != tech) continue;
        if (!best || key.of(r).mean > key.of(*best).mean) best = &r;
      }
      if (!best) continue;
      ti.best_configurations.push_back(ds.baseline.dataset + ":" + best->case_spec);
      const std::array<std::pair<double, double>, 3> pairs{
          std::pair{best->macro.precision.mean, ds.baseline.macro.precision.mean},
          std::pair{best->macro.recall.mean, ds.baseline.macro.recall.mean},
          std::pair{best->macro.f1.mean, ds.baseline.macro.f1.mean}};
      for (std::size_t m = 0; m < 3; ++m) {
        const double abs = pairs[m].first - pairs[m].second;
        const double rel = pairs[m].second == 0.0 ? 0.0 : abs / pairs[m].second * 100.0;
        changes[m].push_back({abs, rel});
      }
    }
    for (std::size_t m = 0; m < 3; ++m) {
      if (changes[m].empty()) continue;
      Change avg, mx{changes[m].front()};
      for (const auto& c : changes[m]) {
        avg.absolute += c.absolute;
        avg.relative += c.relative;
        mx.absolute = std::max(mx.absolute, c.absolute);
        mx.relative = std::max(mx.relative, c.relative);
      }
      avg.absolute /= static_cast<double>(changes[m].size());
      avg.relative /= static_cast<double>(changes[m].size());
      ti.average[m] = avg;
      ti.maximum[m] = mx;
    }
    summary.techniques.push_back(std::move(ti));
  }
  return summary;
}

std::string render_summary(const ImprovementSummary& summary) {
  const auto cell = [](const Change& c) {
    return std::string(c.absolute >= 0 ? "+" : "-") + fixed(std::fabs(c.absolute), 3) + " / " +
           fixed(c.relative, 3) + "%";
  };
  std::vector<std::vector<std::string>> grid{
      {"technique", "P avg", "P max", "R avg", "R max", "F1 avg", "F1 max"}};
  for (const auto& t : summary.techniques) {
    std::vector<std::string> line{t.technique};
    for (std::size_t m = 0; m < 3; ++m) {
      line.push_back(cell(t.average[m]));
      line.push_back(cell(t.maximum[m]));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(7, 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], display_width(line[i]));
  }
  std::ostringstream out;
  for (const auto& line : grid) {
    std::string s;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) s += " | ";
      s += pad(line[i], width[i]);
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Incremental analysis

Dataset subsample_minority(const Dataset& d, std::size_t size, std::uint64_t seed) {
  const auto minority = minority_label(d);
  if (!minority) throw DataError("dataset '" + d.name + "' has no minority-class records");
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (d.records[i].label == *minority) members.push_back(i);
  }
  if (size > members.size()) {
    throw DataError("requested " + std::to_string(size) + " minority records but only " +
                    std::to_string(members.size()) + " are available");
  }
  Rng rng(mix_seed(seed, 0x1AC));
  rng.shuffle(std::span<std::size_t>(members));
  std::vector<bool> keep(d.records.size(), false);
  for (std::size_t i = 0; i < size; ++i) keep[members[i]] = true;
  Dataset out{d.name, {}};
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (d.records[i].label == Label::neutral || keep[i]) out.records.push_back(d.records[i]);
  }
  return out;
}

std::vector<ReportRow> incremental_run(const Dataset& d, const std::vector<std::size_t>& minority_sizes,
                                       const AugmentationPlan& plan, const Classifier& classifier,
                                       const CrossValidationOptions& opts) {
  for (std::size_t i = 1; i < minority_sizes.size(); ++i) {
    if (minority_sizes[i] <= minority_sizes[i - 1]) throw ConfigError("minority sizes must be strictly ascending");
  }
  std::vector<ReportRow> rows;
  for (std::size_t size : minority_sizes) {
    const Dataset sub = subsample_minority(d, size, opts.seed);
    auto base = cross_validate(sub, nullptr, classifier, opts).row;
    auto aug = cross_validate(sub, &plan, classifier, opts).row;
    apply_baseline(aug, base);
    base.minority_size = size;
    aug.minority_size = size;
    rows.push_back(std::move(base));
    rows.push_back(std::move(aug));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization

std::string report_to_json(const std::vector<ReportRow>& rows, const std::string& provenance_json) {
  ojson doc;
  if (!provenance_json.empty()) doc["provenance"] = ojson::parse(provenance_json);
  auto& arr = doc["rows"] = ojson::array();
  for (const auto& r : rows) {
    ojson j;
    j["dataset"] = r.dataset;
    j["technique"] = r.technique;
    j["case"] = r.case_spec;
    j["minority_size"] = r.minority_size ? ojson(*r.minority_size) : ojson(nullptr);
    j["seed"] = r.seed;
    auto& pc = j["per_class"] = ojson::object();
    for (const auto& [l, m] : r.per_class) pc[std::string(label_name(l))] = summary_json(m);
    j["macro"] = summary_json(r.macro);
    auto& dpc = j["delta"]["per_class"] = ojson::object();
    for (const auto& [l, p] : r.delta_per_class) dpc[std::string(label_name(l))] = prf_json(p);
    j["delta"]["macro"] = prf_json(r.delta_macro);
    auto& folds = j["folds"] = ojson::array();
    for (const auto& f : r.folds) {
      ojson fj{{"fold", f.fold_index},
               {"train_size", f.train_size},
               {"augmented", f.augmented},
               {"test_size", f.test_size},
               {"macro", prf_json(f.macro)}};
      auto& fpc = fj["per_class"] = ojson::object();
      for (const auto& [l, p] : f.per_class) fpc[std::string(label_name(l))] = prf_json(p);
      folds.push_back(std::move(fj));
    }
    arr.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::vector<ReportRow> report_from_json(std::string_view json) {
  try {
    const auto doc = nlohmann::json::parse(json);
    std::vector<ReportRow> rows;
    for (const auto& j : doc.at("rows")) {
      ReportRow r;
      r.dataset = j.at("dataset").get<std::string>();
      r.technique = j.value("technique", "");
      r.case_spec = j.value("case", "");
      if (j.contains("minority_size") && !j["minority_size"].is_null()) {
        r.minority_size = j["minority_size"].get<std::size_t>();
      }
      r.seed = j.value("seed", std::uint64_t{0});
      for (const auto& [l, m] : j.at("per_class").items()) r.per_class[parse_label(l)] = summary_from(m);
      r.macro = summary_from(j.at("macro"));
      if (j.contains("delta")) {
        const auto& dj = j["delta"];
        if (dj.contains("macro")) r.delta_macro = prf_from(dj["macro"]);
        if (dj.contains("per_class")) {
          for (const auto& [l, p] : dj["per_class"].items()) r.delta_per_class[parse_label(l)] = prf_from(p);
        }
      }
      if (j.contains("folds")) {
        for (const auto& fj : j["folds"]) {
          FoldScore f;
          f.fold_index = fj.value("fold", std::size_t{0});
          f.train_size = fj.value("train_size", std::size_t{0});
          f.augmented = fj.value("augmented", std::size_t{0});
          f.test_size = fj.value("test_size", std::size_t{0});
          f.macro = prf_from(fj.at("macro"));
          for (const auto& [l, p] : fj.at("per_class").items()) f.per_class[parse_label(l)] = prf_from(p);
          r.folds.push_back(std::move(f));
        }
      }
      rows.push_back(std::move(r));
    }
    return rows;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "dataset,technique,case,minority_size,seed,metric,mean,std,delta\n";
  for (const auto& r : rows) {
    std::vector<MetricKey> keys;
    for (const auto& [l, _] : r.per_class) {
      for (auto k : {MetricKey::Kind::precision, MetricKey::Kind::recall, MetricKey::Kind::f1}) keys.push_back({l, k});
    }
    for (auto k : {MetricKey::Kind::precision, MetricKey::Kind::recall, MetricKey::Kind::f1}) {
      keys.push_back({std::nullopt, k});
    }
    for (const auto& key : keys) {
      const auto v = key.of(r);
      out += r.dataset + ',' + r.technique + ',' + r.case_spec + ',' +
             (r.minority_size ? std::to_string(*r.minority_size) : std::string()) + ',' +
             std::to_string(r.seed) + ',' + key.to_string() + ',' + fixed(v.mean, 6) + ',' +
             fixed(v.std, 6) + ',' + fixed(key.delta_of(r), 6) + '\n';
    }
  }
  return out;
}

std::string incremental_to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "size,condition,metric,mean,std\n";
  for (const auto& r : rows) {
    std::vector<MetricKey> keys;
    for (const auto& [l, _] : r.per_class) {
      if (l != Label::neutral) keys.push_back({l, MetricKey::Kind::f1});
    }
    for (auto k : {MetricKey::Kind::precision, MetricKey::Kind::recall, MetricKey::Kind::f1}) {
      keys.push_back({std::nullopt, k});
    }
    for (const auto& key : keys) {
      const auto v = key.of(r);
      out += (r.minority_size ? std::to_string(*r.minority_size) : std::string()) + ',' + r.condition() +
             ',' + key.to_string() + ',' + fixed(v.mean, 6) + ',' + fixed(v.std, 6) + '\n';
    }
  }
  return out;
}

}  // namespace pairforge

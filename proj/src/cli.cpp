#include "pairforge/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>

#include <CLI11.hpp>
#include <json.hpp>

#include "pairforge/augment.hpp"
#include "pairforge/classify.hpp"
#include "pairforge/error.hpp"
#include "pairforge/parallel.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace fs = std::filesystem;

namespace {

using ojson = nlohmann::ordered_json;

struct KeyInfo {
  const char* name;
  const char* help;
  bool path;
};

constexpr KeyInfo kKeys[] = {
    {"dataset", "pair corpus (CSV/TSV or JSON lines)", true},
    {"format", "dataset format: delimited | json_lines", false},
    {"name", "dataset name used in reports", false},
    {"lexicon", "WordNet dict directory or synonym TSV", true},
    {"embeddings", "word2vec embeddings file", true},
    {"embedding-format", "embedding format: text | binary", false},
    {"tagger-lexicon", "extra word<TAB>tag entries for the POS tagger", true},
    {"comparators", "comparator phrase list for entity extraction", true},
    {"technique", "technique(s), 'combined' or 'all'", false},
    {"case", "case configuration(s) such as I+II+III, or 'all'", false},
    {"target-labels", "labels to augment (default: minority label)", false},
    {"seed", "random seed", false},
    {"provider", "mock:<fixture.tsv>, mock:identity or http://host:port", false},
    {"classifier", "baseline | external", false},
    {"folds", "cross-validation folds", false},
    {"out", "output directory", true},
    {"policy", "augmentation failure policy: abort | skip", false},
    {"jobs", "worker threads (0: logical cores)", false},
    {"sizes", "minority sizes for incremental runs, e.g. 25,50,100", false},
    {"max-variants", "maximum variants per text", false},
    {"macro-mode", "mean-of-f1 | f1-of-means", false},
    {"metric", "table metric such as conflict-F1 or macro-F1", false},
    {"inputs", "report JSON files", true},
};

const KeyInfo* find_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (key == k.name) return &k;
  }
  return nullptr;
}

std::string normalize_key(std::string_view key) {
  std::string k = to_lower(trim(key));
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid value for '" + key + "': '" + text + "'");
  }
  return value;
}

std::vector<std::string> list(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& item : split(text, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ConfigError("config key '" + key + "' must be a string, number, boolean or list");
}

// TOML basic string or literal string starting at s[0].
std::string toml_string(std::string_view s, std::size_t& i, const std::string& where) {
  const char quote = s[i++];
  std::string out;
  while (i < s.size() && s[i] != quote) {
    if (quote == '"' && s[i] == '\\' && i + 1 < s.size()) {
      const char e = s[++i];
      out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
    } else {
      out += s[i];
    }
    ++i;
  }
  if (i >= s.size()) throw ConfigError(where + ": unterminated string");
  ++i;
  return out;
}

std::string toml_value(std::string_view s, const std::string& where) {
  std::size_t i = 0;
  const auto skip = [&] {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  };
  const auto scalar = [&]() -> std::string {
    skip();
    if (i < s.size() && (s[i] == '"' || s[i] == '\'')) return toml_string(s, i, where);
    const auto start = i;
    while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#') ++i;
    auto bare = trim(s.substr(start, i - start));
    if (bare.empty()) throw ConfigError(where + ": missing value");
    return std::string(bare);
  };
  std::string value;
  skip();
  if (i < s.size() && s[i] == '[') {
    ++i;
    std::vector<std::string> items;
    skip();
    while (i < s.size() && s[i] != ']') {
      items.push_back(scalar());
      skip();
      if (i < s.size() && s[i] == ',') ++i;
      skip();
    }
    if (i >= s.size()) throw ConfigError(where + ": unterminated array");
    ++i;
    for (std::size_t k = 0; k < items.size(); ++k) value += (k ? "," : "") + items[k];
  } else {
    value = scalar();
  }
  skip();
  if (i < s.size() && s[i] != '#') throw ConfigError(where + ": unexpected text after value");
  return value;
}

std::string resolve_path(const fs::path& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

std::string format_name(DataFormat f) { return f == DataFormat::json_lines ? "json_lines" : "delimited"; }

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << content;
  if (!os) throw Error("write failed: " + path.string());
}

std::string with_provenance(const std::string& provenance, const std::string& body) {
  return ojson{{"provenance", ojson::parse(provenance)}}.dump() + "\n" + body;
}

// Collects skip notices from worker threads and prints them in id order.
class SkipLog {
 public:
  void add(const std::string& id, const std::string& reason) {
    std::lock_guard lock(mu_);
    entries_.emplace_back(id, reason);
  }
  void flush(std::ostream& err) {
    std::sort(entries_.begin(), entries_.end());
    for (const auto& [id, reason] : entries_) err << "skipped " << id << ": " << one_line(reason) << '\n';
    entries_.clear();
  }

 private:
  std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

class Pipeline {
 public:
  Pipeline(const RunConfig& cfg, std::ostream& err) : cfg_(cfg), err_(err) {}

  Dataset load_data() const {
    const auto fmt = cfg_.format ? *cfg_.format : guess_data_format(cfg_.dataset);
    Dataset d = load_dataset(cfg_.dataset, fmt);
    if (!cfg_.name.empty()) d.name = cfg_.name;
    validate_dataset(d);
    return d;
  }

  const AugmentResources& resources() {
    if (loaded_) return res_;
    auto tagger = std::make_shared<PosTagger>();
    if (!cfg_.tagger_lexicon.empty()) tagger->load_lexicon(cfg_.tagger_lexicon);
    res_.tagger = tagger;
    res_.extractor = std::make_shared<RuleEntityExtractor>(
        tagger, cfg_.comparators.empty() ? default_comparators()
                                         : RuleEntityExtractor::load_comparators(cfg_.comparators));
    if (!cfg_.lexicon.empty()) res_.lexicon = std::make_shared<Lexicon>(Lexicon::load(cfg_.lexicon));
    if (!cfg_.embeddings.empty()) {
      auto table = std::make_shared<EmbeddingTable>(load_embeddings(cfg_.embeddings, cfg_.embedding_format));
      for (const auto& w : table->warnings()) err_ << "warning: " << one_line(w) << '\n';
      res_.embeddings = table;
    }
    if (!cfg_.provider.empty()) res_.provider = make_provider(cfg_.provider);
    loaded_ = true;
    return res_;
  }

  std::shared_ptr<const Augmenter> augmenter(Technique t) {
    AugmenterConfig ac;
    ac.technique = t;
    ac.max_variants = cfg_.max_variants;
    ac.seed = cfg_.seed;
    return make_augmenter(ac, resources());
  }

  AugmentationPlan plan(const std::string& technique, const CaseSpec& spec, const Dataset& d) {
    AugmentationPlan p;
    p.technique = technique;
    p.spec = spec;
    if (technique == "combined") {
      p.combined = true;
      const auto& r = resources();
      for (Technique t : kAllTechniques) {
        const bool needs_provider = t == Technique::back_translation || t == Technique::paraphrasing;
        const bool needs_lexicon = t == Technique::nv_wns || t == Technique::t_wnl;
        if ((needs_provider && !r.provider) || (needs_lexicon && !r.lexicon) ||
            (t == Technique::aa_w2v && !r.embeddings)) {
          continue;
        }
        p.augmenters.push_back(augmenter(t));
      }
    } else {
      p.augmenters.push_back(augmenter(parse_technique(technique)));
    }
    p.options = options(d);
    return p;
  }

  PairAugmentOptions options(const Dataset& d) {
    PairAugmentOptions o;
    if (!cfg_.target_labels.empty()) {
      o.target_labels = cfg_.target_labels;
    } else if (const auto m = minority_label(d)) {
      o.target_labels = {*m};
    }
    o.seed = cfg_.seed;
    o.jobs = cfg_.jobs;
    o.policy = cfg_.policy;
    o.on_skip = [this](const std::string& id, const std::string& reason) { skips_.add(id, reason); };
    return o;
  }

  CrossValidationOptions cv_options() const {
    CrossValidationOptions o;
    o.folds = cfg_.folds;
    o.seed = cfg_.seed;
    o.jobs = cfg_.jobs;
    o.macro_mode = cfg_.macro_mode;
    return o;
  }

  void flush() { skips_.flush(err_); }

 private:
  const RunConfig& cfg_;
  std::ostream& err_;
  AugmentResources res_;
  bool loaded_ = false;
  SkipLog skips_;
};

MetricKey table_metric(const RunConfig& cfg, const ReportRow& baseline) {
  if (!cfg.metric.empty()) return MetricKey::parse(cfg.metric);
  MetricKey key;
  for (const auto& [label, _] : baseline.per_class) {
    if (label != Label::neutral) key.label = label;
  }
  return key;
}

std::string condition_slug(const std::string& technique, const CaseSpec* spec) {
  return spec ? technique + "_" + spec->to_string() : "no_augmentation";
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg, err);
  const Dataset d = p.load_data();
  const auto path = fs::path(cfg.out) / "dataset.jsonl";
  write_file(path, with_provenance(cfg.provenance_json(), serialize_dataset(d, DataFormat::json_lines)));
  out << d.name << ": " << d.size() << " records";
  for (const auto& [label, n] : class_distribution(d)) out << ", " << label_name(label) << '=' << n;
  out << "\nwrote " << path.string() << '\n';
  return 0;
}

int cmd_augment(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg, err);
  const Dataset d = p.load_data();
  std::vector<AugmentedInstance> all;
  for (const auto& tech : cfg.techniques) {
    for (const auto& spec : cfg.cases) {
      const auto plan = p.plan(tech, spec, d);
      auto got = plan.combined ? combined_da(d, plan.augmenters, spec, plan.options)
                               : augment_case(d, *plan.augmenters.front(), spec, plan.options);
      p.flush();
      all.insert(all.end(), std::make_move_iterator(got.begin()), std::make_move_iterator(got.end()));
    }
  }
  const auto path = fs::path(cfg.out) / "augmented.jsonl";
  write_file(path, serialize_augmented(all, cfg.provenance_json()));
  out << "wrote " << all.size() << " augmented pairs to " << path.string() << '\n';
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg, err);
  const Dataset d = p.load_data();
  const auto cv = p.cv_options();

  if (cfg.classifier == "external") {
    const fs::path root = fs::path(cfg.out) / "external";
    const auto minority = minority_label(d);
    const auto ext = minority ? ExternalClassifierConfig::for_label(*minority) : ExternalClassifierConfig{};
    write_file(root / "classifier.json", ext.to_json() + "\n");
    const auto export_folds = [&](const std::string& slug, const std::vector<PreparedFold>& folds) {
      for (const auto& f : folds) {
        const auto dir = root / slug / ("fold-" + std::to_string(f.trace.fold_index));
        write_file(dir / "train.jsonl", with_provenance(cfg.provenance_json(), serialize_dataset(f.train, DataFormat::json_lines)));
        write_file(dir / "test.jsonl", with_provenance(cfg.provenance_json(), serialize_dataset(f.test, DataFormat::json_lines)));
      }
    };
    export_folds(condition_slug("", nullptr), prepare_folds(d, nullptr, cv));
    std::size_t conditions = 1;
    for (const auto& tech : cfg.techniques) {
      for (const auto& spec : cfg.cases) {
        const auto plan = p.plan(tech, spec, d);
        export_folds(condition_slug(tech, &spec), prepare_folds(d, &plan, cv));
        p.flush();
        ++conditions;
      }
    }
    out << "exported " << conditions << " conditions x " << cfg.folds << " folds to " << root.string() << '\n';
    return 0;
  }

  const BaselineClassifier classifier;
  std::vector<ReportRow> rows;
  rows.push_back(cross_validate(d, nullptr, classifier, cv).row);
  for (const auto& tech : cfg.techniques) {
    for (const auto& spec : cfg.cases) {
      const auto plan = p.plan(tech, spec, d);
      auto row = cross_validate(d, &plan, classifier, cv).row;
      p.flush();
      apply_baseline(row, rows.front());
      rows.push_back(std::move(row));
    }
  }
  const auto grid = render_grid(improvement_table(rows, rows.front(), table_metric(cfg, rows.front())));
  const fs::path dir(cfg.out);
  write_file(dir / "report.json", report_to_json(rows, cfg.provenance_json()));
  write_file(dir / "report.csv", report_to_csv(rows));
  write_file(dir / "report.txt", grid);
  out << grid;
  return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  std::vector<DatasetResults> results;
  for (const auto& input : cfg.inputs) {
    for (auto& row : report_from_json(read_file(input))) {
      auto it = std::find_if(results.begin(), results.end(),
                             [&](const DatasetResults& r) { return r.baseline.dataset == row.dataset; });
      if (it == results.end()) {
        results.push_back({});
        it = results.end() - 1;
        it->baseline.dataset = row.dataset;
      }
      if (row.is_baseline() && it->baseline.technique.empty() && it->baseline.folds.empty() &&
          it->baseline.per_class.empty()) {
        it->baseline = std::move(row);
      } else if (!row.is_baseline()) {
        it->rows.push_back(std::move(row));
      }
    }
  }
  std::string text;
  for (auto& r : results) {
    if (r.baseline.per_class.empty()) throw DataError("no baseline row for dataset '" + r.baseline.dataset + "'");
    for (auto& row : r.rows) apply_baseline(row, r.baseline);
    text += render_grid(improvement_table(r.rows, r.baseline, table_metric(cfg, r.baseline))) + "\n";
  }
  std::optional<MetricKey> selection;
  if (!cfg.metric.empty()) selection = MetricKey::parse(cfg.metric);
  text += "Macro improvement over no augmentation\n" + render_summary(improvement_summary(results, selection));
  write_file(fs::path(cfg.out) / "report.txt", text);
  out << text;
  return 0;
}

int cmd_incremental(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg, err);
  const Dataset d = p.load_data();
  if (cfg.techniques.size() != 1 || cfg.cases.size() != 1) {
    throw ConfigError("incremental runs take exactly one technique and one case");
  }
  const auto plan = p.plan(cfg.techniques.front(), cfg.cases.front(), d);
  const BaselineClassifier classifier;
  const auto rows = incremental_run(d, cfg.sizes, plan, classifier, p.cv_options());
  p.flush();
  const fs::path dir(cfg.out);
  const auto csv = incremental_to_csv(rows);
  write_file(dir / "incremental.json", report_to_json(rows, cfg.provenance_json()));
  write_file(dir / "incremental.csv", csv);
  out << csv;
  return 0;
}

}  // namespace

Settings parse_config_text(std::string_view content, const std::string& origin) {
  Settings out;
  const auto put = [&](const std::string& raw_key, std::string value) {
    const auto key = normalize_key(raw_key);
    if (key != "config" && !find_key(key)) throw ConfigError(origin + ": unknown config key '" + raw_key + "'");
    out[key] = std::move(value);
  };
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && content[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    for (const auto& [k, v] : doc.items()) {
      if (v.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? "," : "") + json_scalar(v[i], k);
        put(k, joined);
      } else {
        put(k, json_scalar(v, k));
      }
    }
    return out;
  }
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    const auto where = origin + ":" + std::to_string(line_no);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') throw ConfigError(where + ": tables are not supported in config files");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    if (key.size() >= 2 && (key.front() == '"' || key.front() == '\'')) key = key.substr(1, key.size() - 2);
    put(std::string(key), toml_value(line.substr(eq + 1), where));
  }
  return out;
}

RunConfig RunConfig::resolve(const std::string& command, const Settings& flags,
                             const std::optional<std::string>& config_path,
                             const std::optional<std::string>& provider_env) {
  Settings s;
  if (config_path) {
    const auto base = fs::path(*config_path).parent_path();
    std::string content;
    try {
      content = read_file(*config_path);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    for (auto [key, value] : parse_config_text(content, *config_path)) {
      if (key == "config") continue;
      if (key == "inputs") {
        std::string joined;
        for (const auto& item : list(value)) joined += (joined.empty() ? "" : ",") + resolve_path(base, item);
        value = joined;
      } else if (find_key(key)->path) {
        value = resolve_path(base, value);
      } else if (key == "provider" && value.starts_with("mock:") && value != "mock:identity" && value.size() > 5) {
        value = "mock:" + resolve_path(base, value.substr(5));
      }
      s[key] = value;
    }
  }
  if (provider_env && !provider_env->empty()) s["provider"] = *provider_env;
  for (const auto& [key, value] : flags) s[key] = value;

  RunConfig c;
  c.command = command;
  c.jobs = default_jobs();
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };
  if (auto v = get("dataset")) c.dataset = *v;
  if (auto v = get("format")) c.format = parse_data_format(*v);
  if (auto v = get("name")) c.name = *v;
  if (auto v = get("lexicon")) c.lexicon = *v;
  if (auto v = get("embeddings")) c.embeddings = *v;
  if (auto v = get("embedding-format")) c.embedding_format = parse_embedding_format(*v);
  if (auto v = get("tagger-lexicon")) c.tagger_lexicon = *v;
  if (auto v = get("comparators")) c.comparators = *v;
  if (auto v = get("technique")) {
    c.techniques.clear();
    for (const auto& t : list(*v)) {
      if (t == "all") {
        for (Technique x : kAllTechniques) c.techniques.emplace_back(technique_name(x));
      } else if (t == "combined") {
        c.techniques.push_back(t);
      } else {
        c.techniques.emplace_back(technique_name(parse_technique(t)));
      }
    }
    if (c.techniques.empty()) throw ConfigError("'technique' is empty");
  }
  if (auto v = get("case")) {
    c.cases.clear();
    for (const auto& t : list(*v)) {
      if (t == "all") {
        const auto every = CaseSpec::all();
        c.cases.insert(c.cases.end(), every.begin(), every.end());
      } else {
        c.cases.push_back(CaseSpec::parse(t));
      }
    }
    if (c.cases.empty()) throw ConfigError("'case' is empty");
  }
  if (auto v = get("target-labels")) {
    for (const auto& t : list(*v)) {
      const auto l = try_parse_label(t);
      if (!l) throw ConfigError("invalid value for 'target-labels': '" + t + "'");
      c.target_labels.insert(*l);
    }
  }
  if (auto v = get("seed")) c.seed = parse_number<std::uint64_t>("seed", *v);
  if (auto v = get("provider")) c.provider = *v;
  if (auto v = get("classifier")) {
    c.classifier = to_lower(trim(*v));
    if (c.classifier != "baseline" && c.classifier != "external") {
      throw ConfigError("invalid value for 'classifier': '" + *v + "' (expected baseline or external)");
    }
  }
  if (auto v = get("folds")) {
    c.folds = parse_number<std::size_t>("folds", *v);
    if (c.folds < 2) throw ConfigError("'folds' must be at least 2");
  }
  if (auto v = get("out")) c.out = *v;
  if (auto v = get("policy")) c.policy = parse_failure_policy(*v);
  if (auto v = get("jobs")) {
    c.jobs = parse_number<std::size_t>("jobs", *v);
    if (c.jobs == 0) c.jobs = default_jobs();
  }
  if (auto v = get("sizes")) {
    for (const auto& t : list(*v)) c.sizes.push_back(parse_number<std::size_t>("sizes", t));
  }
  if (auto v = get("max-variants")) {
    c.max_variants = parse_number<std::size_t>("max-variants", *v);
    if (c.max_variants == 0) throw ConfigError("'max-variants' must be at least 1");
  }
  if (auto v = get("macro-mode")) {
    const auto m = normalize_key(*v);
    if (m == "mean-of-f1") {
      c.macro_mode = MacroMode::mean_of_f1;
    } else if (m == "f1-of-means") {
      c.macro_mode = MacroMode::f1_of_means;
    } else {
      throw ConfigError("invalid value for 'macro-mode': '" + *v + "' (expected mean-of-f1 or f1-of-means)");
    }
  }
  if (auto v = get("metric")) {
    MetricKey::parse(*v);
    c.metric = *v;
  }
  if (auto v = get("inputs")) c.inputs = list(*v);
  return c;
}

void RunConfig::validate() const {
  const auto require_file = [](const char* key, const std::string& path) {
    if (!path.empty() && !fs::exists(path)) {
      throw ConfigError(std::string("'") + key + "' not found: " + path);
    }
  };
  if (command == "report") {
    if (inputs.empty()) throw ConfigError("missing required field 'inputs'");
    for (const auto& i : inputs) require_file("inputs", i);
    return;
  }
  if (dataset.empty()) throw ConfigError("missing required field 'dataset'");
  require_file("dataset", dataset);
  require_file("lexicon", lexicon);
  require_file("embeddings", embeddings);
  require_file("tagger-lexicon", tagger_lexicon);
  require_file("comparators", comparators);
  if (provider.starts_with("mock:") && provider != "mock:identity" && provider.size() > 5) {
    require_file("provider", provider.substr(5));
  }
  if (command == "incremental" && sizes.empty()) throw ConfigError("missing required field 'sizes'");
}

std::string RunConfig::provenance_json() const {
  ojson j;
  j["tool"] = "pairforge";
  j["command"] = command;
  j["dataset"] = dataset;
  j["format"] = format ? ojson(format_name(*format)) : ojson(nullptr);
  j["name"] = name;
  j["lexicon"] = lexicon;
  j["embeddings"] = embeddings;
  j["embedding_format"] = embedding_format == EmbeddingFormat::binary ? "binary" : "text";
  j["tagger_lexicon"] = tagger_lexicon;
  j["comparators"] = comparators;
  j["technique"] = techniques;
  auto& cases_json = j["case"] = ojson::array();
  for (const auto& c : cases) cases_json.push_back(c.to_string());
  auto& labels = j["target_labels"] = ojson::array();
  for (Label l : target_labels) labels.push_back(label_name(l));
  j["seed"] = seed;
  j["provider"] = provider;
  j["classifier"] = classifier;
  j["folds"] = folds;
  j["policy"] = policy == FailurePolicy::skip ? "skip" : "abort";
  j["max_variants"] = max_variants;
  j["macro_mode"] = macro_mode == MacroMode::f1_of_means ? "f1-of-means" : "mean-of-f1";
  j["metric"] = metric;
  j["sizes"] = sizes;
  return j.dump();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Augmentation and evaluation toolkit for imbalanced sentence-pair classification", "pairforge"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::string> raw;
  std::vector<std::string> positional_inputs;
  std::string config;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"ingest", "validate a pair corpus and write it as JSON lines"},
      {"augment", "write augmented minority pairs"},
      {"evaluate", "cross-validate with and without augmentation"},
      {"report", "render delta tables and the improvement summary from report JSON"},
      {"incremental", "evaluate over growing minority-class sizes"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "config file (JSON or flat TOML)");
    for (const auto& k : kKeys) sub->add_option(std::string("--") + k.name, raw[k.name], k.help);
    if (std::string_view(name) == "report") sub->add_option("input-files", positional_inputs, "report JSON files");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    Settings flags;
    for (const auto& k : kKeys) {
      if (sub->get_option(std::string("--") + k.name)->count() > 0) flags[k.name] = raw[k.name];
    }
    if (!positional_inputs.empty()) {
      std::string joined = flags.count("inputs") ? flags["inputs"] : "";
      for (const auto& i : positional_inputs) joined += (joined.empty() ? "" : ",") + i;
      flags["inputs"] = joined;
    }
    std::optional<std::string> config_path;
    if (sub->get_option("--config")->count() > 0) config_path = config;
    std::optional<std::string> env;
    if (const char* v = std::getenv("PAIRFORGE_PROVIDER_URL")) env = v;

    const auto cfg = RunConfig::resolve(command, flags, config_path, env);
    cfg.validate();
    if (command == "ingest") return cmd_ingest(cfg, out, err);
    if (command == "augment") return cmd_augment(cfg, out, err);
    if (command == "evaluate") return cmd_evaluate(cfg, out, err);
    if (command == "report") return cmd_report(cfg, out, err);
    return cmd_incremental(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
}

}  // namespace pairforge

#include "pairforge/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "pairforge/annotate.hpp"
#include "pairforge/error.hpp"
#include "pairforge/random.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace {

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) {
    if (is_word_token(t.text)) out.push_back(to_lower(t.text));
  }
  return out;
}

void add_ngrams(std::vector<std::uint32_t>& idx, std::string_view prefix,
                const std::vector<std::string>& words) {
  const auto hash = [&](std::string_view feature) {
    return static_cast<std::uint32_t>(fnv1a(feature, fnv1a(prefix)) & (kHashSpace - 1));
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    idx.push_back(hash(words[i]));
    if (i + 1 < words.size()) idx.push_back(hash(words[i] + ' ' + words[i + 1]));
  }
}

std::uint32_t hash_feature(std::string_view feature) {
  return static_cast<std::uint32_t>(fnv1a(feature) & (kHashSpace - 1));
}

void softmax_inplace(std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

class BaselinePredictor final : public Predictor {
 public:
  explicit BaselinePredictor(BaselineModel m) : model_(std::move(m)) {}
  Label predict(const PairRecord& pair) const override {
    return model_.predict(pair.text_a, pair.text_b).label;
  }

 private:
  BaselineModel model_;
};

}  // namespace

PairFeatures featurize(std::string_view text_a, std::string_view text_b) {
  const auto wa = words_of(text_a);
  const auto wb = words_of(text_b);
  std::vector<std::uint32_t> idx;
  add_ngrams(idx, "a:", wa);
  add_ngrams(idx, "b:", wb);

  const std::set<std::string> sa(wa.begin(), wa.end());
  const std::set<std::string> sb(wb.begin(), wb.end());
  std::size_t shared = 0;
  for (const auto& w : sa) {
    if (sb.contains(w)) {
      idx.push_back(hash_feature("i:" + w));
      ++shared;
    } else {
      idx.push_back(hash_feature("d:" + w));
    }
  }
  for (const auto& w : sb) {
    if (!sa.contains(w)) idx.push_back(hash_feature("d:" + w));
  }
  idx.push_back(hash_feature("o:" + std::to_string(std::min<std::size_t>(shared, 4))));
  const std::size_t uni = sa.size() + sb.size() - shared;
  const auto jaccard_bucket = uni == 0 ? 0 : static_cast<int>(10.0 * static_cast<double>(shared) / static_cast<double>(uni));
  idx.push_back(hash_feature("j:" + std::to_string(jaccard_bucket)));

  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  PairFeatures f;
  f.index = std::move(idx);
  f.value.assign(f.index.size(), 1.0 / std::sqrt(static_cast<double>(f.index.size())));
  return f;
}

BaselineModel::BaselineModel(std::vector<Label> labels, BaselineConfig cfg)
    : labels_(std::move(labels)),
      cfg_(cfg),
      weights_(labels_.size(), std::vector<double>(kHashSpace, 0.0)),
      bias_(labels_.size(), 0.0) {}

std::vector<double> BaselineModel::logits(const PairFeatures& f) const {
  std::vector<double> z(bias_);
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    const auto& w = weights_[c];
    for (std::size_t k = 0; k < f.index.size(); ++k) z[c] += w[f.index[k]] * f.value[k];
  }
  return z;
}

Prediction decide(const std::vector<Label>& labels, const std::vector<double>& logits) {
  if (labels.empty() || labels.size() != logits.size()) throw Error("decide: label/logit size mismatch");
  std::vector<double> p(logits);
  softmax_inplace(p);
  Prediction out;
  std::size_t best = 0;
  for (std::size_t c = 1; c < labels.size(); ++c) {
    if (logits[c] > logits[best]) best = c;
  }
  out.label = labels[best];
  for (std::size_t c = 0; c < labels.size(); ++c) out.scores[labels[c]] = p[c];
  return out;
}

Prediction BaselineModel::predict(std::string_view text_a, std::string_view text_b) const {
  return decide(labels_, logits(featurize(text_a, text_b)));
}

BaselineModel train_baseline(const Dataset& train, const BaselineConfig& cfg) {
  if (train.records.empty()) throw DataError("cannot train on an empty dataset");
  std::set<Label> present;
  for (const auto& r : train.records) present.insert(r.label);
  BaselineModel model(std::vector<Label>(present.begin(), present.end()), cfg);
  const auto& labels = model.labels();
  if (labels.size() == 1) return model;

  std::vector<PairFeatures> feats;
  std::vector<std::size_t> target;
  feats.reserve(train.size());
  for (const auto& r : train.records) {
    feats.push_back(featurize(r.text_a, r.text_b));
    target.push_back(static_cast<std::size_t>(
        std::find(labels.begin(), labels.end(), r.label) - labels.begin()));
  }

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(mix_seed(cfg.seed, epoch));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const auto& f = feats[i];
      auto p = model.logits(f);
      softmax_inplace(p);
      for (std::size_t c = 0; c < labels.size(); ++c) {
        const double g = p[c] - (c == target[i] ? 1.0 : 0.0);
        for (std::size_t k = 0; k < f.index.size(); ++k) {
          double& w = model.weight(c, f.index[k]);
          w -= cfg.learning_rate * (g * f.value[k] + cfg.l2 * w);
        }
        model.bias(c) -= cfg.learning_rate * g;
      }
    }
  }
  return model;
}

std::string BaselineModel::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "pairforge-baseline";
  j["version"] = 1;
  j["hash_bits"] = kHashBits;
  j["config"] = {{"epochs", cfg_.epochs},
                 {"learning_rate", cfg_.learning_rate},
                 {"l2", cfg_.l2},
                 {"seed", cfg_.seed}};
  auto& labels = j["labels"] = nlohmann::ordered_json::array();
  for (Label l : labels_) labels.push_back(label_name(l));
  j["bias"] = bias_;
  auto& weights = j["weights"] = nlohmann::ordered_json::array();
  for (const auto& w : weights_) {
    auto sparse = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] != 0.0) sparse.push_back({k, w[k]});
    }
    weights.push_back(std::move(sparse));
  }
  return j.dump();
}

BaselineModel BaselineModel::from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    if (j.at("format") != "pairforge-baseline" || j.at("version") != 1) {
      throw DataError("not a pairforge baseline model (format/version mismatch)");
    }
    if (j.at("hash_bits").get<unsigned>() != kHashBits) throw DataError("model hash size mismatch");
    BaselineConfig cfg;
    const auto& c = j.at("config");
    cfg.epochs = c.at("epochs").get<std::size_t>();
    cfg.learning_rate = c.at("learning_rate").get<double>();
    cfg.l2 = c.at("l2").get<double>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
    std::vector<Label> labels;
    for (const auto& l : j.at("labels")) labels.push_back(parse_label(l.get<std::string>()));
    BaselineModel m(labels, cfg);
    const auto bias = j.at("bias").get<std::vector<double>>();
    const auto& weights = j.at("weights");
    if (bias.size() != labels.size() || weights.size() != labels.size()) {
      throw DataError("model weight/label count mismatch");
    }
    for (std::size_t l = 0; l < labels.size(); ++l) {
      m.bias(l) = bias[l];
      for (const auto& kv : weights[l]) {
        const auto k = kv.at(0).get<std::size_t>();
        if (k >= kHashSpace) throw DataError("model feature index out of range");
        m.weight(l, k) = kv.at(1).get<double>();
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void BaselineModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model: " + path);
  out << to_json();
}

BaselineModel BaselineModel::load(const std::string& path) { return from_json(read_file(path)); }

std::unique_ptr<Predictor> BaselineClassifier::train(const Dataset& train, std::uint64_t seed) const {
  BaselineConfig cfg = cfg_;
  cfg.seed = mix_seed(cfg_.seed, seed);
  return std::make_unique<BaselinePredictor>(train_baseline(train, cfg));
}

ExternalClassifierConfig ExternalClassifierConfig::requirements() { return {}; }

ExternalClassifierConfig ExternalClassifierConfig::platform() {
  ExternalClassifierConfig c;
  c.batch_size = 8;
  c.epochs = 5;
  c.max_length = 512;
  c.selection_metric = "duplicate-F1";
  return c;
}

ExternalClassifierConfig ExternalClassifierConfig::for_label(Label minority) {
  return minority == Label::duplicate ? platform() : requirements();
}

std::string ExternalClassifierConfig::to_json() const {
  nlohmann::ordered_json j{{"checkpoint", checkpoint},
                           {"batch_size", batch_size},
                           {"epochs", epochs},
                           {"max_length", max_length},
                           {"selection_metric", selection_metric},
                           {"early_stopping", early_stopping},
                           {"validation_fraction", validation_fraction},
                           {"input_format", input_format}};
  return j.dump(2);
}

ExternalClassifierConfig ExternalClassifierConfig::from_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    ExternalClassifierConfig c;
    c.checkpoint = j.value("checkpoint", c.checkpoint);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.max_length = j.value("max_length", c.max_length);
    c.selection_metric = j.value("selection_metric", c.selection_metric);
    c.early_stopping = j.value("early_stopping", c.early_stopping);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    c.input_format = j.value("input_format", c.input_format);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed external classifier config: ") + e.what());
  }
}

}  // namespace pairforge

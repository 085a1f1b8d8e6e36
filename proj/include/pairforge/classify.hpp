#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pairforge/corpus.hpp"

namespace pairforge {

inline constexpr unsigned kHashBits = 20;
inline constexpr std::size_t kHashSpace = std::size_t{1} << kHashBits;

// Sparse, L2-normalized binary features, sorted by index.
struct PairFeatures {
  std::vector<std::uint32_t> index;
  std::vector<double> value;
};

// Hashed word uni/bigrams of each side, plus the shared and one-sided token
// sets and a bucketed overlap size.
PairFeatures featurize(std::string_view text_a, std::string_view text_b);

struct BaselineConfig {
  std::size_t epochs = 10;
  double learning_rate = 0.5;
  double l2 = 0.0;
  std::uint64_t seed = 0;
};

struct Prediction {
  Label label = Label::neutral;
  std::map<Label, double> scores;  // softmax over the model's labels
};

// Multinomial logistic regression over hashed pair features.
class BaselineModel {
 public:
  BaselineModel() = default;
  BaselineModel(std::vector<Label> labels, BaselineConfig cfg);

  const std::vector<Label>& labels() const { return labels_; }
  const BaselineConfig& config() const { return cfg_; }

  // Raw logits in labels() order.
  std::vector<double> logits(const PairFeatures& f) const;
  Prediction predict(std::string_view text_a, std::string_view text_b) const;

  double& weight(std::size_t label_idx, std::size_t feature) { return weights_[label_idx][feature]; }
  double weight(std::size_t label_idx, std::size_t feature) const { return weights_[label_idx][feature]; }
  double& bias(std::size_t label_idx) { return bias_[label_idx]; }

  std::string to_json() const;
  static BaselineModel from_json(std::string_view json);
  void save(const std::string& path) const;
  static BaselineModel load(const std::string& path);

 private:
  std::vector<Label> labels_;
  BaselineConfig cfg_;
  std::vector<std::vector<double>> weights_;  // labels x kHashSpace
  std::vector<double> bias_;
};

// Seeded SGD on the softmax cross-entropy. Throws DataError on empty input.
BaselineModel train_baseline(const Dataset& train, const BaselineConfig& cfg);

// Argmax of softmax(logits); ties go to the earlier label in `labels`.
Prediction decide(const std::vector<Label>& labels, const std::vector<double>& logits);

inline Prediction predict(const BaselineModel& model, std::string_view text_a, std::string_view text_b) {
  return model.predict(text_a, text_b);
}

// Train/predict contract shared by the local baseline and external providers.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Label predict(const PairRecord& pair) const = 0;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Predictor> train(const Dataset& train, std::uint64_t seed) const = 0;
};

class BaselineClassifier final : public Classifier {
 public:
  explicit BaselineClassifier(BaselineConfig cfg = {}) : cfg_(cfg) {}
  std::string name() const override { return "baseline"; }
  std::unique_ptr<Predictor> train(const Dataset& train, std::uint64_t seed) const override;

 private:
  BaselineConfig cfg_;
};

// Settings handed to an external transformer fine-tuning provider. Inputs are
// encoded "[CLS] text_a [SEP] text_b [SEP]"; the [CLS] representation goes
// through a softmax classification head.
struct ExternalClassifierConfig {
  std::string checkpoint = "bert-base-uncased-MNLI";
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  std::size_t max_length = 128;
  std::string selection_metric = "conflict-F1";
  bool early_stopping = true;  // monitor validation loss
  double validation_fraction = 0.1;
  std::string input_format = "[CLS] text_a [SEP] text_b [SEP]";

  // Conflict-detection corpora (WorldVista, UAV, PURE, OPENCOSS).
  static ExternalClassifierConfig requirements();
  // Duplicate-detection corpora (Stack Overflow, Bugzilla).
  static ExternalClassifierConfig platform();
  static ExternalClassifierConfig for_label(Label minority);

  std::string to_json() const;
  static ExternalClassifierConfig from_json(std::string_view json);

  friend bool operator==(const ExternalClassifierConfig&, const ExternalClassifierConfig&) = default;
};

}  // namespace pairforge

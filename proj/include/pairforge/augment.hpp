#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pairforge/annotate.hpp"
#include "pairforge/lexicons.hpp"
#include "pairforge/random.hpp"

namespace pairforge {

enum class Technique { shuffling, back_translation, paraphrasing, nv_wns, aa_w2v, t_wnl };

inline constexpr Technique kAllTechniques[] = {Technique::shuffling,    Technique::back_translation,
                                               Technique::paraphrasing, Technique::nv_wns,
                                               Technique::aa_w2v,       Technique::t_wnl};

std::string_view technique_name(Technique t);
Technique parse_technique(std::string_view text);  // throws ConfigError

enum class ShuffleMode { permutation, swaps };

struct AugmenterConfig {
  Technique technique = Technique::shuffling;
  std::size_t max_variants = 10;
  std::uint64_t seed = 0;
  std::string source_language = "en";
  std::string pivot_language = "de";
  int paraphrase_n = 10;
  std::size_t neighbor_k = 5;
  double min_sim = 0.5;
  ShuffleMode shuffle_mode = ShuffleMode::permutation;
  std::size_t swap_count = 2;     // random swaps per variant in ShuffleMode::swaps
  std::size_t max_in_flight = 4;  // concurrent provider requests

  void validate() const;  // throws ConfigError
};

// Byte-range replacement against the source text.
struct Edit {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string replacement;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct Variant {
  std::string text;
  std::string technique;
  std::vector<Edit> edits;                // substitution techniques
  std::vector<std::size_t> permutation;  // shuffling: source token index per output slot
};

// Applies non-overlapping edits (any order) to `source`.
std::string apply_edits(std::string_view source, std::vector<Edit> edits);

// Translation and paraphrase backend behind the provider wire protocol.
class TextProvider {
 public:
  virtual ~TextProvider() = default;
  virtual std::string translate(std::string_view text, std::string_view src,
                                std::string_view tgt) const = 0;
  virtual std::vector<std::string> paraphrase(std::string_view text, int n) const = 0;
  virtual std::string describe() const = 0;
};

// Deterministic provider backed by an `input<TAB>output` table. A row may be
// scoped with a leading `translate<TAB>` or `paraphrase<TAB>` column.
// Translation returns the first matching output; paraphrase returns every
// matching output. Unlisted inputs come back unchanged.
class MockProvider final : public TextProvider {
 public:
  MockProvider() = default;  // identity
  static MockProvider load(const std::string& path);
  static MockProvider parse(std::string_view content, const std::string& origin = "<mock>");

  std::string translate(std::string_view text, std::string_view src,
                        std::string_view tgt) const override;
  std::vector<std::string> paraphrase(std::string_view text, int n) const override;
  std::string describe() const override { return description_; }

 private:
  enum class Scope { any, translate, paraphrase };
  struct Row {
    Scope scope = Scope::any;
    std::string input;
    std::string output;
  };
  std::vector<Row> rows_;
  std::string description_ = "mock:identity";
};

// Client for `POST /translate` and `POST /paraphrase` JSON endpoints.
class HttpProvider final : public TextProvider {
 public:
  explicit HttpProvider(std::string base_url,
                        std::chrono::milliseconds timeout = std::chrono::seconds(60));

  std::string translate(std::string_view text, std::string_view src,
                        std::string_view tgt) const override;
  std::vector<std::string> paraphrase(std::string_view text, int n) const override;
  std::string describe() const override { return base_url_; }

 private:
  std::string post(const std::string& path, const std::string& body) const;

  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

// "mock:<fixture.tsv>", "mock:identity", or an http(s) base URL.
std::shared_ptr<const TextProvider> make_provider(const std::string& spec);

std::vector<Variant> shuffle_augment(std::string_view text, const AugmenterConfig& cfg, Rng& rng);
std::vector<Variant> back_translate(std::string_view text, const TextProvider& provider,
                                    const AugmenterConfig& cfg);
std::vector<Variant> paraphrase(std::string_view text, const TextProvider& provider,
                                const AugmenterConfig& cfg);
std::vector<Variant> nv_wns(std::string_view text, const Lexicon& lexicon, const PosTagger& tagger,
                            const AugmenterConfig& cfg);
std::vector<Variant> aa_w2v(std::string_view text, const EntityExtractor& extractor,
                            const EmbeddingTable& embeddings, const AugmenterConfig& cfg);
std::vector<Variant> t_wnl(std::string_view text, const EntityExtractor& extractor,
                           const Lexicon& lexicon, const AugmenterConfig& cfg);

// Single-text augmentation behind one interface. Implementations are pure
// given (text, seed) and safe to call concurrently.
class Augmenter {
 public:
  virtual ~Augmenter() = default;
  virtual std::string name() const = 0;
  virtual std::vector<Variant> augment(std::string_view text, std::uint64_t seed) const = 0;
  // Upper bound on concurrent augment() calls; provider-backed ones cap this.
  virtual std::size_t max_concurrency() const { return SIZE_MAX; }
};

struct AugmentResources {
  std::shared_ptr<const Lexicon> lexicon;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<const PosTagger> tagger;
  std::shared_ptr<const EntityExtractor> extractor;
  std::shared_ptr<const TextProvider> provider;
};

// Throws ConfigError when the technique needs a resource that is missing.
std::shared_ptr<const Augmenter> make_augmenter(const AugmenterConfig& cfg,
                                                const AugmentResources& resources);

// Wraps a callable; mostly for tests and custom techniques.
std::shared_ptr<const Augmenter> make_function_augmenter(
    std::string name, std::function<std::vector<std::string>(std::string_view, std::uint64_t)> fn);

}  // namespace pairforge

#include "pairforge/augment.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "pairforge/error.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace {

// Deduplicates by exact text, drops source-equal variants, stops at the cap.
class VariantCollector {
 public:
  VariantCollector(std::string_view source, std::size_t cap) : source_(source), cap_(cap) {}

  bool full() const { return out_.size() >= cap_; }

  void add(Variant v) {
    if (full() || v.text == source_ || trim(v.text).empty()) return;
    if (!seen_.insert(v.text).second) return;
    out_.push_back(std::move(v));
  }

  std::vector<Variant> take() { return std::move(out_); }

 private:
  std::string_view source_;
  std::size_t cap_;
  std::unordered_set<std::string> seen_;
  std::vector<Variant> out_;
};

Variant substitution(std::string_view source, std::string_view technique, std::size_t begin,
                     std::size_t end, std::string replacement) {
  Variant v;
  v.technique = std::string(technique);
  v.text = std::string(source.substr(0, begin)) + replacement + std::string(source.substr(end));
  v.edits.push_back({begin, end, std::move(replacement)});
  return v;
}

std::string join_tokens(const std::vector<Token>& tokens, const std::vector<std::size_t>& order) {
  std::string out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) out += ' ';
    out += tokens[order[i]].text;
  }
  return out;
}

// Lookup POS classes for a T-WNL target.
std::vector<Pos> target_pos(EntityRole role) {
  switch (role) {
    case EntityRole::action:
      return {Pos::verb};
    case EntityRole::op:
      return {Pos::adj, Pos::adv};
    default:
      return {Pos::noun};
  }
}

std::size_t head_token(const EntitySpan& span, const std::vector<TaggedToken>& tagged) {
  std::optional<std::size_t> fallback;
  for (std::size_t i = span.last_token; i-- > span.first_token;) {
    const auto& w = tagged[i].token.text;
    if (!is_word_token(w) || is_number_token(w)) continue;
    if (tagged[i].tag != Tag::other) return i;
    if (!fallback) fallback = i;
  }
  return fallback.value_or(span.last_token - 1);
}

class ShuffleAugmenter final : public Augmenter {
 public:
  explicit ShuffleAugmenter(AugmenterConfig cfg) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "shuffling"; }
  std::vector<Variant> augment(std::string_view text, std::uint64_t seed) const override {
    Rng rng(seed);
    return shuffle_augment(text, cfg_, rng);
  }

 private:
  AugmenterConfig cfg_;
};

class ProviderAugmenter final : public Augmenter {
 public:
  ProviderAugmenter(AugmenterConfig cfg, std::shared_ptr<const TextProvider> provider)
      : cfg_(std::move(cfg)), provider_(std::move(provider)) {}
  std::string name() const override { return std::string(technique_name(cfg_.technique)); }
  std::vector<Variant> augment(std::string_view text, std::uint64_t) const override {
    return cfg_.technique == Technique::back_translation ? back_translate(text, *provider_, cfg_)
                                                         : paraphrase(text, *provider_, cfg_);
  }
  std::size_t max_concurrency() const override { return std::max<std::size_t>(1, cfg_.max_in_flight); }

 private:
  AugmenterConfig cfg_;
  std::shared_ptr<const TextProvider> provider_;
};

class NvWnsAugmenter final : public Augmenter {
 public:
  NvWnsAugmenter(AugmenterConfig cfg, std::shared_ptr<const Lexicon> lex,
                 std::shared_ptr<const PosTagger> tagger)
      : cfg_(std::move(cfg)), lex_(std::move(lex)), tagger_(std::move(tagger)) {}
  std::string name() const override { return "nv_wns"; }
  std::vector<Variant> augment(std::string_view text, std::uint64_t) const override {
    return nv_wns(text, *lex_, *tagger_, cfg_);
  }

 private:
  AugmenterConfig cfg_;
  std::shared_ptr<const Lexicon> lex_;
  std::shared_ptr<const PosTagger> tagger_;
};

class AaW2vAugmenter final : public Augmenter {
 public:
  AaW2vAugmenter(AugmenterConfig cfg, std::shared_ptr<const EntityExtractor> extractor,
                 std::shared_ptr<const EmbeddingTable> emb)
      : cfg_(std::move(cfg)), extractor_(std::move(extractor)), emb_(std::move(emb)) {}
  std::string name() const override { return "aa_w2v"; }
  std::vector<Variant> augment(std::string_view text, std::uint64_t) const override {
    return aa_w2v(text, *extractor_, *emb_, cfg_);
  }

 private:
  AugmenterConfig cfg_;
  std::shared_ptr<const EntityExtractor> extractor_;
  std::shared_ptr<const EmbeddingTable> emb_;
};

class TWnlAugmenter final : public Augmenter {
 public:
  TWnlAugmenter(AugmenterConfig cfg, std::shared_ptr<const EntityExtractor> extractor,
                std::shared_ptr<const Lexicon> lex)
      : cfg_(std::move(cfg)), extractor_(std::move(extractor)), lex_(std::move(lex)) {}
  std::string name() const override { return "t_wnl"; }
  std::vector<Variant> augment(std::string_view text, std::uint64_t) const override {
    return t_wnl(text, *extractor_, *lex_, cfg_);
  }

 private:
  AugmenterConfig cfg_;
  std::shared_ptr<const EntityExtractor> extractor_;
  std::shared_ptr<const Lexicon> lex_;
};

class FunctionAugmenter final : public Augmenter {
 public:
  FunctionAugmenter(std::string name,
                    std::function<std::vector<std::string>(std::string_view, std::uint64_t)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  std::vector<Variant> augment(std::string_view text, std::uint64_t seed) const override {
    std::vector<Variant> out;
    for (auto& t : fn_(text, seed)) {
      Variant v;
      v.technique = name_;
      v.edits.push_back({0, text.size(), t});
      v.text = std::move(t);
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  std::string name_;
  std::function<std::vector<std::string>(std::string_view, std::uint64_t)> fn_;
};

}  // namespace

std::string_view technique_name(Technique t) {
  switch (t) {
    case Technique::shuffling:
      return "shuffling";
    case Technique::back_translation:
      return "back_translation";
    case Technique::paraphrasing:
      return "paraphrasing";
    case Technique::nv_wns:
      return "nv_wns";
    case Technique::aa_w2v:
      return "aa_w2v";
    case Technique::t_wnl:
      return "t_wnl";
  }
  return "shuffling";
}

Technique parse_technique(std::string_view text) {
  std::string t = to_lower(trim(text));
  std::replace(t.begin(), t.end(), '-', '_');
  for (Technique tech : kAllTechniques) {
    if (t == technique_name(tech)) return tech;
  }
  if (t == "shuffle") return Technique::shuffling;
  if (t == "paraphrase") return Technique::paraphrasing;
  if (t == "bt" || t == "backtranslation") return Technique::back_translation;
  throw ConfigError("unknown technique '" + std::string(text) + "'");
}

void AugmenterConfig::validate() const {
  if (max_variants < 1) throw ConfigError("max_variants must be at least 1");
  if (paraphrase_n < 1) throw ConfigError("paraphrase_n must be at least 1");
  if (neighbor_k < 1) throw ConfigError("neighbor_k must be at least 1");
  if (min_sim < -1.0 || min_sim > 1.0) throw ConfigError("min_sim must lie in [-1, 1]");
  if (pivot_language.empty()) throw ConfigError("pivot_language must not be empty");
}

std::string apply_edits(std::string_view source, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
  std::string out;
  std::size_t cursor = 0;
  for (const auto& e : edits) {
    if (e.begin < cursor || e.end < e.begin || e.end > source.size()) {
      throw Error("apply_edits: overlapping or out-of-range edit");
    }
    out += source.substr(cursor, e.begin - cursor);
    out += e.replacement;
    cursor = e.end;
  }
  out += source.substr(cursor);
  return out;
}

// ---------------------------------------------------------------------------
// Providers

MockProvider MockProvider::load(const std::string& path) {
  auto p = parse(read_file(path), path);
  p.description_ = "mock:" + path;
  return p;
}

MockProvider MockProvider::parse(std::string_view content, const std::string& origin) {
  MockProvider p;
  p.description_ = "mock:" + origin;
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    Row row;
    if (cols.size() == 3 && (cols[0] == "translate" || cols[0] == "paraphrase")) {
      row = {cols[0] == "translate" ? Scope::translate : Scope::paraphrase, cols[1], cols[2]};
    } else if (cols.size() == 2) {
      row = {Scope::any, cols[0], cols[1]};
    } else {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected [scope<TAB>]input<TAB>output");
    }
    p.rows_.push_back(std::move(row));
  }
  return p;
}

std::string MockProvider::translate(std::string_view text, std::string_view, std::string_view) const {
  for (const auto& row : rows_) {
    if (row.scope != Scope::paraphrase && row.input == text) return row.output;
  }
  return std::string(text);
}

std::vector<std::string> MockProvider::paraphrase(std::string_view text, int n) const {
  std::vector<std::string> out;
  for (const auto& row : rows_) {
    if (row.scope != Scope::translate && row.input == text && static_cast<int>(out.size()) < n) {
      out.push_back(row.output);
    }
  }
  if (out.empty()) out.emplace_back(text);
  return out;
}

HttpProvider::HttpProvider(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (!base_url_.starts_with("http://")) {
    throw ConfigError("provider URL must start with http:// : " + base_url_);
  }
}

std::string HttpProvider::post(const std::string& path, const std::string& body) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  const auto res = client.Post(path, body, "application/json");
  if (!res) {
    throw ProviderError("provider " + base_url_ + path + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ProviderError("provider " + base_url_ + path + " returned HTTP " +
                        std::to_string(res->status) + ": " + std::string(trim(res->body)));
  }
  return res->body;
}

std::string HttpProvider::translate(std::string_view text, std::string_view src,
                                    std::string_view tgt) const {
  const nlohmann::json req{{"text", text}, {"src", src}, {"tgt", tgt}};
  const auto body = post("/translate", req.dump());
  try {
    const auto res = nlohmann::json::parse(body);
    return res.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError("malformed /translate response: " + std::string(e.what()));
  }
}

std::vector<std::string> HttpProvider::paraphrase(std::string_view text, int n) const {
  const nlohmann::json req{{"text", text}, {"n", n}};
  const auto body = post("/paraphrase", req.dump());
  try {
    const auto res = nlohmann::json::parse(body);
    return res.at("texts").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError("malformed /paraphrase response: " + std::string(e.what()));
  }
}

std::shared_ptr<const TextProvider> make_provider(const std::string& spec) {
  if (spec.starts_with("mock:")) {
    const auto path = spec.substr(5);
    if (path.empty() || path == "identity") return std::make_shared<const MockProvider>();
    return std::make_shared<const MockProvider>(MockProvider::load(path));
  }
  if (spec.starts_with("http://")) return std::make_shared<const HttpProvider>(spec);
  throw ConfigError("provider must be 'mock:<fixture.tsv>' or an http:// URL, got '" + spec + "'");
}

// ---------------------------------------------------------------------------
// Techniques

std::vector<Variant> shuffle_augment(std::string_view text, const AugmenterConfig& cfg, Rng& rng) {
  const auto tokens = tokenize(text);
  const std::size_t n = tokens.size();
  if (n < 2) return {};
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const std::string identity_text = join_tokens(tokens, identity);

  VariantCollector out(text, cfg.max_variants);
  std::unordered_set<std::string> rejected{identity_text};
  const std::size_t attempts = std::max<std::size_t>(64, 32 * cfg.max_variants);
  for (std::size_t a = 0; a < attempts && !out.full(); ++a) {
    std::vector<std::size_t> order = identity;
    if (cfg.shuffle_mode == ShuffleMode::permutation) {
      rng.shuffle(std::span<std::size_t>(order));
    } else {
      for (std::size_t s = 0; s < std::max<std::size_t>(1, cfg.swap_count); ++s) {
        const std::size_t i = rng.uniform(n);
        std::size_t j = rng.uniform(n - 1);
        if (j >= i) ++j;
        std::swap(order[i], order[j]);
      }
    }
    std::string candidate = join_tokens(tokens, order);
    if (rejected.contains(candidate)) continue;
    Variant v;
    v.technique = "shuffling";
    v.text = std::move(candidate);
    v.permutation = std::move(order);
    out.add(std::move(v));
  }
  return out.take();
}

std::vector<Variant> back_translate(std::string_view text, const TextProvider& provider,
                                    const AugmenterConfig& cfg) {
  const auto pivot = provider.translate(text, cfg.source_language, cfg.pivot_language);
  auto back = provider.translate(pivot, cfg.pivot_language, cfg.source_language);
  VariantCollector out(text, cfg.max_variants);
  Variant v;
  v.technique = "back_translation";
  v.edits.push_back({0, text.size(), back});
  v.text = std::move(back);
  out.add(std::move(v));
  return out.take();
}

std::vector<Variant> paraphrase(std::string_view text, const TextProvider& provider,
                                const AugmenterConfig& cfg) {
  if (cfg.paraphrase_n < 1) throw ConfigError("paraphrase_n must be at least 1");
  auto outputs = provider.paraphrase(text, cfg.paraphrase_n);
  if (outputs.size() > static_cast<std::size_t>(cfg.paraphrase_n)) outputs.resize(cfg.paraphrase_n);
  VariantCollector out(text, cfg.max_variants);
  for (auto& o : outputs) {
    Variant v;
    v.technique = "paraphrasing";
    v.edits.push_back({0, text.size(), o});
    v.text = std::move(o);
    out.add(std::move(v));
  }
  return out.take();
}

std::vector<Variant> nv_wns(std::string_view text, const Lexicon& lexicon, const PosTagger& tagger,
                            const AugmenterConfig& cfg) {
  VariantCollector out(text, cfg.max_variants);
  for (const auto& tt : tagger.tag(tokenize(text))) {
    if (out.full()) break;
    if (tt.tag != Tag::noun && tt.tag != Tag::verb) continue;
    const Pos pos = tt.tag == Tag::noun ? Pos::noun : Pos::verb;
    for (const auto& syn : synonyms(lexicon, tt.token.text, pos)) {
      auto repl = match_initial_case(tt.token.text, replace_all(syn, "_", " "));
      if (iequals(repl, tt.token.text)) continue;
      out.add(substitution(text, "nv_wns", tt.token.begin, tt.token.end, std::move(repl)));
    }
  }
  return out.take();
}

std::vector<Variant> aa_w2v(std::string_view text, const EntityExtractor& extractor,
                            const EmbeddingTable& embeddings, const AugmenterConfig& cfg) {
  const auto ents = extractor.extract(text);
  VariantCollector out(text, cfg.max_variants);
  for (const auto* span : {&ents.actor, &ents.action}) {
    if (!*span) continue;
    const std::string& word = (*span)->text;
    std::string key = word;
    if (!embeddings.index_of(key)) key = to_lower(word);
    for (const auto& nb : nearest(embeddings, key, cfg.neighbor_k, cfg.min_sim)) {
      auto repl = match_initial_case(word, replace_all(nb.word, "_", " "));
      if (iequals(repl, word)) continue;
      out.add(substitution(text, "aa_w2v", (*span)->begin, (*span)->end, std::move(repl)));
    }
  }
  return out.take();
}

std::vector<Variant> t_wnl(std::string_view text, const EntityExtractor& extractor,
                           const Lexicon& lexicon, const AugmenterConfig& cfg) {
  const auto ents = extractor.extract(text);
  if (ents.empty()) return {};
  const auto tagged = extractor.tagger().tag(tokenize(text));
  VariantCollector out(text, cfg.max_variants);
  for (EntityRole role : kAllRoles) {
    const auto& span = ents.get(role);
    if (!span) continue;
    const auto& head = tagged[head_token(*span, tagged)].token;
    std::vector<std::string> forms;
    for (Pos pos : target_pos(role)) {
      for (auto& f : lemma_forms(lexicon, head.text, pos)) {
        if (std::find(forms.begin(), forms.end(), f) == forms.end()) forms.push_back(std::move(f));
      }
    }
    for (const auto& form : forms) {
      auto repl = match_initial_case(head.text, form);
      if (iequals(repl, head.text)) continue;
      out.add(substitution(text, "t_wnl", head.begin, head.end, std::move(repl)));
    }
  }
  return out.take();
}

std::shared_ptr<const Augmenter> make_augmenter(const AugmenterConfig& cfg,
                                                const AugmentResources& res) {
  cfg.validate();
  const auto need = [&](bool present, const char* what) {
    if (!present) {
      throw ConfigError(std::string(technique_name(cfg.technique)) + " requires " + what);
    }
  };
  auto tagger = res.tagger ? res.tagger : std::make_shared<const PosTagger>();
  auto extractor = res.extractor ? res.extractor : std::make_shared<const RuleEntityExtractor>(tagger);
  switch (cfg.technique) {
    case Technique::shuffling:
      return std::make_shared<const ShuffleAugmenter>(cfg);
    case Technique::back_translation:
    case Technique::paraphrasing:
      need(res.provider != nullptr, "a provider (--provider)");
      return std::make_shared<const ProviderAugmenter>(cfg, res.provider);
    case Technique::nv_wns:
      need(res.lexicon != nullptr, "a WordNet lexicon (--lexicon)");
      return std::make_shared<const NvWnsAugmenter>(cfg, res.lexicon, tagger);
    case Technique::aa_w2v:
      need(res.embeddings != nullptr, "word embeddings (--embeddings)");
      return std::make_shared<const AaW2vAugmenter>(cfg, extractor, res.embeddings);
    case Technique::t_wnl:
      need(res.lexicon != nullptr, "a WordNet lexicon (--lexicon)");
      return std::make_shared<const TWnlAugmenter>(cfg, extractor, res.lexicon);
  }
  throw ConfigError("unsupported technique");
}

std::shared_ptr<const Augmenter> make_function_augmenter(
    std::string name, std::function<std::vector<std::string>(std::string_view, std::uint64_t)> fn) {
  return std::make_shared<const FunctionAugmenter>(std::move(name), std::move(fn));
}

}  // namespace pairforge

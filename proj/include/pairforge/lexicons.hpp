#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pairforge {

enum class Pos { noun, verb, adj, adv };

std::string_view pos_name(Pos pos);
// Accepts WordNet codes (n, v, a, s, r) and full names.
std::optional<Pos> try_parse_pos(std::string_view text);

struct Synset {
  std::uint64_t offset = 0;  // byte offset in data.<pos>; row number for TSV sources
  Pos pos = Pos::noun;
  std::vector<std::string> lemmas;  // lowercase, multiword joined by '_'
  std::string gloss;
};

// Read-only view of WordNet synset membership.
class Lexicon {
 public:
  // Directory holding WordNet 3.0 index.* / data.* files (and optional *.exc
  // exception lists), or a single fallback TSV file.
  static Lexicon load(const std::string& source);
  static Lexicon load_wordnet_dir(const std::string& dir);
  static Lexicon load_tsv(const std::string& path);
  static Lexicon parse_tsv(std::string_view content, const std::string& origin = "<tsv>");

  // Synsets of an exact (lemma, pos) entry, in sense order.
  std::vector<const Synset*> lookup(std::string_view lemma, Pos pos) const;

  // Dictionary base forms of an inflected word: the word itself if indexed,
  // otherwise exception-list entries and suffix-detachment candidates that
  // are indexed.
  std::vector<std::string> base_forms(std::string_view word, Pos pos) const;

  std::size_t entry_count() const { return index_.size(); }
  std::size_t synset_count() const { return synsets_.size(); }

 private:
  static std::string key(std::string_view lemma, Pos pos);
  void add_entry(const std::string& lemma, Pos pos, std::size_t synset);

  std::vector<Synset> synsets_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
  std::unordered_map<std::string, std::vector<std::string>> exceptions_;  // key(inflected,pos) -> bases
};

// Normalizes a surface word to WordNet lemma spelling: lowercase, spaces to '_'.
std::string normalize_lemma(std::string_view word);

// Union of lemmas over every synset of (lemma, pos), without the query lemma,
// deduplicated, in sense order. Underscores are kept.
std::vector<std::string> synonyms(const Lexicon& lex, std::string_view lemma, Pos pos);

// Every distinct lemma spelling reachable from the word's synsets, with
// underscores turned into spaces, excluding the surface word.
std::vector<std::string> lemma_forms(const Lexicon& lex, std::string_view word, Pos pos);

// Vocabulary plus a dense row-major |V| x dim matrix.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  // Appends a row. Returns false (and stores nothing) if the word exists.
  bool add(std::string word, std::vector<float> vec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<std::size_t> index_of(std::string_view word) const;
  std::vector<float> vector(std::size_t row) const;
  const float* row(std::size_t row) const { return data_.data() + row * dim_; }
  double norm(std::size_t row) const { return norms_[row]; }

  // Cosine similarity of two stored rows; 0 if either has zero norm.
  double cosine(std::size_t a, std::size_t b) const;

  // Non-fatal issues seen while loading (duplicate words).
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> vocab_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::vector<std::string> warnings_;
};

enum class EmbeddingFormat { text, binary };

EmbeddingFormat parse_embedding_format(std::string_view text);

EmbeddingTable load_embeddings(const std::string& path, EmbeddingFormat format);
EmbeddingTable parse_embeddings(std::string_view content, EmbeddingFormat format);
std::string serialize_embeddings(const EmbeddingTable& t, EmbeddingFormat format);
void save_embeddings(const EmbeddingTable& t, const std::string& path, EmbeddingFormat format);

struct Neighbor {
  std::string word;
  double cosine = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Top-k cosine neighbors of `word`, excluding itself and zero-norm rows,
// cosine descending with ties in vocabulary order. Out-of-vocabulary -> {}.
std::vector<Neighbor> nearest(const EmbeddingTable& t, std::string_view word, std::size_t k,
                              double min_sim);

}  // namespace pairforge

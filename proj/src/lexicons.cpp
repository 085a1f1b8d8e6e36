#include "pairforge/lexicons.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <type_traits>
#include <fstream>
#include <unordered_set>

#include "pairforge/error.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace fs = std::filesystem;

namespace {

constexpr std::array<Pos, 4> kAllPos{Pos::noun, Pos::verb, Pos::adj, Pos::adv};

std::string_view file_suffix(Pos pos) {
  switch (pos) {
    case Pos::noun:
      return "noun";
    case Pos::verb:
      return "verb";
    case Pos::adj:
      return "adj";
    case Pos::adv:
      return "adv";
  }
  return "noun";
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value, int base = 10) {
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>) {
    r = std::from_chars(s.data(), s.data() + s.size(), value);
  } else {
    r = std::from_chars(s.data(), s.data() + s.size(), value, base);
  }
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

// Adjective lemmas in data.adj may carry a syntactic marker: "(a)", "(p)", "(ip)".
std::string strip_adj_marker(std::string_view word) {
  if (!word.empty() && word.back() == ')') {
    const auto open = word.rfind('(');
    if (open != std::string_view::npos) word = word.substr(0, open);
  }
  return std::string(word);
}

// Suffix detachment rules from WordNet's morphological processor.
const std::vector<std::pair<std::string_view, std::string_view>>& detachment_rules(Pos pos) {
  static const std::vector<std::pair<std::string_view, std::string_view>> noun{
      {"s", ""}, {"ses", "s"}, {"xes", "x"}, {"zes", "z"}, {"ches", "ch"}, {"shes", "sh"},
      {"men", "man"}, {"ies", "y"}};
  static const std::vector<std::pair<std::string_view, std::string_view>> verb{
      {"s", ""}, {"ies", "y"}, {"es", "e"}, {"es", ""}, {"ed", "e"}, {"ed", ""}, {"ing", "e"},
      {"ing", ""}};
  static const std::vector<std::pair<std::string_view, std::string_view>> adj{
      {"er", ""}, {"est", ""}, {"er", "e"}, {"est", "e"}};
  static const std::vector<std::pair<std::string_view, std::string_view>> none;
  switch (pos) {
    case Pos::noun:
      return noun;
    case Pos::verb:
      return verb;
    case Pos::adj:
      return adj;
    case Pos::adv:
      return none;
  }
  return none;
}

template <typename T>
void push_unique(std::vector<T>& v, T item) {
  if (std::find(v.begin(), v.end(), item) == v.end()) v.push_back(std::move(item));
}

std::vector<const Synset*> synsets_for(const Lexicon& lex, std::string_view word, Pos pos,
                                       std::vector<std::string>& forms) {
  forms = lex.base_forms(word, pos);
  std::vector<const Synset*> result;
  for (const auto& f : forms) {
    for (const Synset* s : lex.lookup(f, pos)) push_unique(result, s);
  }
  return result;
}

}  // namespace

std::string_view pos_name(Pos pos) { return file_suffix(pos); }

std::optional<Pos> try_parse_pos(std::string_view text) {
  const auto t = to_lower(trim(text));
  if (t == "n" || t == "noun") return Pos::noun;
  if (t == "v" || t == "verb") return Pos::verb;
  if (t == "a" || t == "s" || t == "adj" || t == "adjective") return Pos::adj;
  if (t == "r" || t == "adv" || t == "adverb") return Pos::adv;
  return std::nullopt;
}

std::string normalize_lemma(std::string_view word) {
  std::string out = to_lower(trim(word));
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string Lexicon::key(std::string_view lemma, Pos pos) {
  std::string k(lemma);
  k += '\t';
  k += file_suffix(pos);
  return k;
}

void Lexicon::add_entry(const std::string& lemma, Pos pos, std::size_t synset) {
  auto& list = index_[key(lemma, pos)];
  if (std::find(list.begin(), list.end(), synset) == list.end()) list.push_back(synset);
}

std::vector<const Synset*> Lexicon::lookup(std::string_view lemma, Pos pos) const {
  std::vector<const Synset*> out;
  const auto it = index_.find(key(normalize_lemma(lemma), pos));
  if (it == index_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t i : it->second) out.push_back(&synsets_[i]);
  return out;
}

std::vector<std::string> Lexicon::base_forms(std::string_view word, Pos pos) const {
  const std::string w = normalize_lemma(word);
  std::vector<std::string> out;
  const auto indexed = [&](const std::string& s) { return index_.contains(key(s, pos)); };
  if (indexed(w)) out.push_back(w);
  if (const auto it = exceptions_.find(key(w, pos)); it != exceptions_.end()) {
    for (const auto& base : it->second) {
      if (indexed(base)) push_unique(out, base);
    }
  }
  if (out.empty()) {
    for (const auto& [suffix, repl] : detachment_rules(pos)) {
      if (w.size() > suffix.size() && w.ends_with(suffix)) {
        std::string cand = w.substr(0, w.size() - suffix.size()) + std::string(repl);
        if (indexed(cand)) push_unique(out, std::move(cand));
      }
    }
  }
  return out;
}

Lexicon Lexicon::load(const std::string& source) {
  if (fs::is_directory(source)) return load_wordnet_dir(source);
  if (fs::is_regular_file(source)) return load_tsv(source);
  throw DataError("lexicon source not found: " + source);
}

Lexicon Lexicon::load_tsv(const std::string& path) { return parse_tsv(read_file(path), path); }

Lexicon Lexicon::parse_tsv(std::string_view content, const std::string& origin) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    const auto where = origin + ":" + std::to_string(line_no);
    const auto cols = split(line, '\t');
    if (cols.size() != 3) throw DataError(where + ": expected lemma<TAB>pos<TAB>synonyms");
    const auto pos = try_parse_pos(cols[1]);
    if (!pos) throw DataError(where + ": unknown pos code '" + cols[1] + "'");
    const std::string head = normalize_lemma(cols[0]);
    if (head.empty()) throw DataError(where + ": empty lemma");

    Synset s;
    s.offset = line_no;
    s.pos = *pos;
    s.lemmas.push_back(head);
    for (const auto& syn : split(cols[2], '|')) {
      auto lemma = normalize_lemma(syn);
      if (!lemma.empty()) push_unique(s.lemmas, std::move(lemma));
    }
    lex.synsets_.push_back(std::move(s));
    lex.add_entry(head, *pos, lex.synsets_.size() - 1);
  }
  return lex;
}

Lexicon Lexicon::load_wordnet_dir(const std::string& dir) {
  Lexicon lex;
  bool any = false;
  for (Pos pos : kAllPos) {
    const fs::path index_path = fs::path(dir) / ("index." + std::string(file_suffix(pos)));
    const fs::path data_path = fs::path(dir) / ("data." + std::string(file_suffix(pos)));
    if (!fs::exists(index_path)) continue;
    if (!fs::exists(data_path)) throw DataError("missing " + data_path.string());
    any = true;

    // data.<pos>: offset lex_filenum ss_type w_cnt (word lex_id)* p_cnt (ptr)* [frames] | gloss
    std::unordered_map<std::uint64_t, std::size_t> by_offset;
    {
      const std::string content = read_file(data_path.string());
      std::size_t line_no = 0;
      for (const auto& raw : split(content, '\n')) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == ' ') continue;  // license header
        const auto where = data_path.string() + ":" + std::to_string(line_no);
        std::string_view gloss;
        if (const auto bar = line.find(" | "); bar != std::string_view::npos) {
          gloss = trim(line.substr(bar + 3));
          line = line.substr(0, bar);
        }
        const auto f = fields(line);
        Synset s;
        std::size_t w_cnt = 0;
        if (f.size() < 4 || !parse_number(f[0], s.offset) || !parse_number(f[3], w_cnt, 16)) {
          throw DataError(where + ": malformed synset line");
        }
        const auto ss_type = try_parse_pos(f[2]);
        if (!ss_type || f[2].size() != 1) throw DataError(where + ": unknown pos code '" + std::string(f[2]) + "'");
        s.pos = *ss_type;
        if (w_cnt == 0 || f.size() < 4 + 2 * w_cnt + 1) throw DataError(where + ": truncated word list");
        for (std::size_t w = 0; w < w_cnt; ++w) {
          push_unique(s.lemmas, normalize_lemma(strip_adj_marker(f[4 + 2 * w])));
        }
        std::size_t p_cnt = 0;
        if (!parse_number(f[4 + 2 * w_cnt], p_cnt)) throw DataError(where + ": bad pointer count");
        if (f.size() < 5 + 2 * w_cnt + 4 * p_cnt) throw DataError(where + ": truncated pointer list");
        s.gloss = std::string(gloss);
        by_offset[s.offset] = lex.synsets_.size();
        lex.synsets_.push_back(std::move(s));
      }
    }

    // index.<pos>: lemma pos synset_cnt p_cnt (ptr_symbol)* sense_cnt tagsense_cnt (offset)*
    {
      const std::string content = read_file(index_path.string());
      std::size_t line_no = 0;
      for (const auto& raw : split(content, '\n')) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == ' ') continue;
        const auto where = index_path.string() + ":" + std::to_string(line_no);
        const auto f = fields(line);
        std::size_t synset_cnt = 0;
        std::size_t p_cnt = 0;
        if (f.size() < 4 || !parse_number(f[2], synset_cnt) || !parse_number(f[3], p_cnt)) {
          throw DataError(where + ": malformed index line");
        }
        const auto entry_pos = try_parse_pos(f[1]);
        if (!entry_pos) throw DataError(where + ": unknown pos code '" + std::string(f[1]) + "'");
        const std::size_t first_offset = 4 + p_cnt + 2;
        if (f.size() != first_offset + synset_cnt) {
          throw DataError(where + ": expected " + std::to_string(synset_cnt) + " synset offsets");
        }
        const std::string lemma = normalize_lemma(f[0]);
        for (std::size_t i = 0; i < synset_cnt; ++i) {
          std::uint64_t off = 0;
          if (!parse_number(f[first_offset + i], off)) throw DataError(where + ": bad offset");
          const auto it = by_offset.find(off);
          if (it == by_offset.end()) {
            throw DataError(where + ": offset " + std::string(f[first_offset + i]) + " not in " +
                            data_path.string());
          }
          lex.add_entry(lemma, pos, it->second);
        }
      }
    }

    // Optional exception list: inflected base1 [base2 ...]
    const fs::path exc_path = fs::path(dir) / (std::string(file_suffix(pos)) + ".exc");
    if (fs::exists(exc_path)) {
      for (const auto& raw : split(read_file(exc_path.string()), '\n')) {
        const auto f = fields(trim(raw));
        if (f.size() < 2) continue;
        auto& bases = lex.exceptions_[key(normalize_lemma(f[0]), pos)];
        for (std::size_t i = 1; i < f.size(); ++i) push_unique(bases, normalize_lemma(f[i]));
      }
    }
  }
  if (!any) throw DataError("no WordNet index.* files in " + dir);
  return lex;
}

std::vector<std::string> synonyms(const Lexicon& lex, std::string_view lemma, Pos pos) {
  std::vector<std::string> forms;
  const auto sets = synsets_for(lex, lemma, pos, forms);
  const std::string query = normalize_lemma(lemma);
  std::vector<std::string> out;
  for (const Synset* s : sets) {
    for (const auto& l : s->lemmas) {
      if (l == query || std::find(forms.begin(), forms.end(), l) != forms.end()) continue;
      push_unique(out, l);
    }
  }
  return out;
}

std::vector<std::string> lemma_forms(const Lexicon& lex, std::string_view word, Pos pos) {
  std::vector<std::string> forms;
  const auto sets = synsets_for(lex, word, pos, forms);
  const std::string surface = normalize_lemma(word);
  std::vector<std::string> out;
  for (const Synset* s : sets) {
    for (const auto& l : s->lemmas) {
      if (l == surface) continue;
      push_unique(out, replace_all(l, "_", " "));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings

bool EmbeddingTable::add(std::string word, std::vector<float> vec) {
  if (vec.size() != dim_) {
    throw DataError("vector for '" + word + "' has length " + std::to_string(vec.size()) +
                    ", expected " + std::to_string(dim_));
  }
  if (vocab_.contains(word)) return false;
  double sq = 0.0;
  for (float x : vec) sq += static_cast<double>(x) * x;
  vocab_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vec.begin(), vec.end());
  norms_.push_back(std::sqrt(sq));
  return true;
}

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view word) const {
  const auto it = vocab_.find(std::string(word));
  if (it == vocab_.end()) return std::nullopt;
  return it->second;
}

std::vector<float> EmbeddingTable::vector(std::size_t r) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(r * dim_),
          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * dim_)};
}

double EmbeddingTable::cosine(std::size_t a, std::size_t b) const {
  if (norms_[a] == 0.0 || norms_[b] == 0.0) return 0.0;
  const float* x = row(a);
  const float* y = row(b);
  double dot = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) dot += static_cast<double>(x[i]) * y[i];
  return dot / (norms_[a] * norms_[b]);
}

EmbeddingFormat parse_embedding_format(std::string_view text) {
  const auto t = to_lower(text);
  if (t == "text" || t == "txt" || t == "word2vec-text") return EmbeddingFormat::text;
  if (t == "binary" || t == "bin" || t == "word2vec-binary") return EmbeddingFormat::binary;
  throw ConfigError("unknown embedding format '" + std::string(text) + "'");
}

EmbeddingTable parse_embeddings(std::string_view content, EmbeddingFormat format) {
  std::size_t pos = 0;
  const auto header_end = content.find('\n');
  if (header_end == std::string_view::npos) throw DataError("embeddings: missing header line");
  const auto header = fields(trim(content.substr(0, header_end)));
  std::size_t vocab = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !parse_number(header[0], vocab) || !parse_number(header[1], dim) ||
      dim == 0) {
    throw DataError("embeddings: header must be '<vocab size> <dim>'");
  }
  pos = header_end + 1;

  EmbeddingTable table(dim);
  auto store = [&](std::string word, std::vector<float> vec) {
    if (!table.add(word, std::move(vec))) {
      table.add_warning("duplicate word '" + word + "' ignored; first occurrence kept");
    }
  };

  if (format == EmbeddingFormat::text) {
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (pos < content.size()) {
      auto eol = content.find('\n', pos);
      if (eol == std::string_view::npos) eol = content.size();
      const auto line = trim(content.substr(pos, eol - pos));
      pos = eol + 1;
      ++line_no;
      if (line.empty()) continue;
      if (rows == vocab) {
        throw DataError("embeddings line " + std::to_string(line_no) + ": more rows than the " +
                        std::to_string(vocab) + " declared");
      }
      const auto f = fields(line);
      if (f.size() != dim + 1) {
        throw DataError("embeddings line " + std::to_string(line_no) + ": dim mismatch, expected " +
                        std::to_string(dim) + " values, got " + std::to_string(f.size() - 1));
      }
      std::vector<float> vec(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (!parse_number(f[i + 1], vec[i])) {
          throw DataError("embeddings line " + std::to_string(line_no) + ": bad number '" +
                          std::string(f[i + 1]) + "'");
        }
      }
      store(std::string(f[0]), std::move(vec));
      ++rows;
    }
    if (rows != vocab) {
      throw DataError("embeddings truncated: header declares " + std::to_string(vocab) +
                      " words, body has " + std::to_string(rows));
    }
    return table;
  }

  // Binary: "<word> " followed by dim little-endian float32 values, optional '\n'.
  for (std::size_t r = 0; r < vocab; ++r) {
    while (pos < content.size() && (content[pos] == '\n' || content[pos] == ' ')) ++pos;
    const auto space = content.find(' ', pos);
    if (pos >= content.size() || space == std::string_view::npos) {
      throw DataError("embeddings truncated: header declares " + std::to_string(vocab) +
                      " words, body has " + std::to_string(r));
    }
    std::string word(content.substr(pos, space - pos));
    pos = space + 1;
    if (content.size() - pos < dim * 4) {
      throw DataError("embeddings truncated inside vector " + std::to_string(r) + " ('" + word + "')");
    }
    std::vector<float> vec(dim);
    for (std::size_t i = 0; i < dim; ++i, pos += 4) {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(content[pos + b]);
      vec[i] = std::bit_cast<float>(bits);
    }
    store(std::move(word), std::move(vec));
  }
  if (!trim(content.substr(std::min(pos, content.size()))).empty()) {
    throw DataError("embeddings: trailing data after " + std::to_string(vocab) + " declared words");
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string& path, EmbeddingFormat format) {
  try {
    return parse_embeddings(read_file(path), format);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string serialize_embeddings(const EmbeddingTable& t, EmbeddingFormat format) {
  std::string out = std::to_string(t.size()) + " " + std::to_string(t.dim()) + "\n";
  char buf[32];
  for (std::size_t r = 0; r < t.size(); ++r) {
    out += t.words()[r];
    const float* v = t.row(r);
    if (format == EmbeddingFormat::text) {
      for (std::size_t i = 0; i < t.dim(); ++i) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v[i]);
        out += ' ';
        out.append(buf, res.ptr);
      }
    } else {
      out += ' ';
      for (std::size_t i = 0; i < t.dim(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(v[i]);
        for (int b = 0; b < 4; ++b) out += static_cast<char>((bits >> (8 * b)) & 0xff);
      }
    }
    out += '\n';
  }
  return out;
}

void save_embeddings(const EmbeddingTable& t, const std::string& path, EmbeddingFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embeddings: " + path);
  out << serialize_embeddings(t, format);
}

std::vector<Neighbor> nearest(const EmbeddingTable& t, std::string_view word, std::size_t k,
                              double min_sim) {
  if (k == 0) throw ConfigError("nearest: k must be at least 1");
  const auto query = t.index_of(word);
  if (!query || t.norm(*query) == 0.0) return {};
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (r == *query || t.norm(r) == 0.0) continue;
    const double c = t.cosine(*query, r);
    if (c >= min_sim) scored.emplace_back(c, r);
  }
  const auto by_rank = [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), by_rank);
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({t.words()[scored[i].second], scored[i].first});
  return out;
}

}  // namespace pairforge

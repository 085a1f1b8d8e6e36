#include "pairforge/annotate.hpp"

#include <algorithm>
#include <cctype>

#include "pairforge/error.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }
bool is_alnum_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
bool is_digit_byte(unsigned char c) { return std::isdigit(c) != 0; }

const std::vector<std::string_view> kDeterminers{"the", "a",     "an",   "this",  "that", "these",
                                                 "those", "each", "every", "any",  "all",  "some",
                                                 "its",   "their", "his",  "her",  "our",  "your"};

const std::vector<std::string_view> kNumberWords{
    "zero", "one", "two",  "three", "four",    "five",     "six",     "seven", "eight",
    "nine", "ten", "eleven", "twelve", "twenty", "hundred", "thousand", "million"};

const std::vector<std::string_view> kAuxiliaries{"be",   "is",  "are",  "was",  "were", "been",
                                                 "being", "am", "have", "has",  "had",  "having",
                                                 "do",   "does", "did", "not",  "also"};

bool contains(const std::vector<std::string_view>& list, std::string_view w) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

bool is_identifier_like(std::string_view w) {
  if (w.find('_') != std::string_view::npos) return true;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (std::isupper(static_cast<unsigned char>(w[i])) &&
        std::islower(static_cast<unsigned char>(w[i - 1]))) {
      return true;
    }
  }
  return false;
}

bool is_acronym(std::string_view w) {
  std::size_t upper = 0;
  for (unsigned char c : w) {
    if (std::islower(c)) return false;
    if (std::isupper(c)) ++upper;
  }
  return upper >= 2;
}

bool ends_with_any(std::string_view w, std::initializer_list<std::string_view> suffixes,
                   std::size_t min_len) {
  if (w.size() < min_len) return false;
  return std::any_of(suffixes.begin(), suffixes.end(), [&](std::string_view s) { return w.ends_with(s); });
}

Tag shape_tag(std::string_view surface) {
  const std::string w = to_lower(surface);
  if (is_identifier_like(surface) || is_acronym(surface)) return Tag::noun;
  if (w.ends_with("'s") || w.ends_with("\xE2\x80\x99s")) return Tag::noun;
  if (ends_with_any(w, {"tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship"}, 5)) {
    return Tag::noun;
  }
  if (ends_with_any(w, {"ize", "ise", "ify"}, 5)) return Tag::verb;
  if (ends_with_any(w, {"ly"}, 4)) return Tag::adv;
  if (ends_with_any(w, {"ing"}, 5)) return Tag::verb;
  if (ends_with_any(w, {"ed"}, 5) && !w.ends_with("eed")) return Tag::verb;
  if (ends_with_any(w, {"able", "ible", "ous", "ful", "ive", "less", "al", "ic"}, 5)) return Tag::adj;
  return Tag::noun;
}

EntitySpan make_span(const std::vector<TaggedToken>& toks, std::string_view text, std::size_t first,
                     std::size_t last) {
  EntitySpan s;
  s.first_token = first;
  s.last_token = last;
  s.begin = toks[first].token.begin;
  s.end = toks[last - 1].token.end;
  s.text = std::string(text.substr(s.begin, s.end - s.begin));
  return s;
}

bool overlaps(const EntitySpan& a, const EntitySpan& b) {
  return a.first_token < b.last_token && b.first_token < a.last_token;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tokenization

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  const auto at = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  while (i < n) {
    const unsigned char c = at(i);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (!is_word_byte(c)) {
      ++i;
      out.push_back({std::string(text.substr(start, 1)), start, i});
      continue;
    }
    while (i < n) {
      const unsigned char d = at(i);
      if (is_word_byte(d)) {
        ++i;
        continue;
      }
      const bool next_alnum = i + 1 < n && is_alnum_byte(at(i + 1));
      const bool prev_alnum = is_alnum_byte(at(i - 1));
      if ((d == '\'' || d == '-') && prev_alnum && next_alnum) {
        i += 2;
        continue;
      }
      if ((d == '.' || d == ',') && is_digit_byte(at(i - 1)) && i + 1 < n && is_digit_byte(at(i + 1))) {
        i += 2;
        continue;
      }
      break;
    }
    out.push_back({std::string(text.substr(start, i - start)), start, i});
  }
  return out;
}

bool is_word_token(std::string_view token) {
  return std::any_of(token.begin(), token.end(),
                     [](char c) { return is_alnum_byte(static_cast<unsigned char>(c)); });
}

bool is_number_token(std::string_view token) {
  if (token.empty() || !is_digit_byte(static_cast<unsigned char>(token.front()))) {
    return contains(kNumberWords, to_lower(token));
  }
  return std::all_of(token.begin(), token.end(), [](char c) {
    return is_digit_byte(static_cast<unsigned char>(c)) || c == '.' || c == ',';
  });
}

// ---------------------------------------------------------------------------
// Tagging

std::string_view tag_name(Tag tag) {
  switch (tag) {
    case Tag::noun:
      return "NOUN";
    case Tag::verb:
      return "VERB";
    case Tag::adj:
      return "ADJ";
    case Tag::adv:
      return "ADV";
    case Tag::other:
      return "OTHER";
  }
  return "OTHER";
}

std::optional<Tag> try_parse_tag(std::string_view text) {
  const auto t = to_lower(trim(text));
  if (t == "noun" || t == "n" || t == "nn" || t == "nns" || t == "nnp") return Tag::noun;
  if (t == "verb" || t == "v" || t == "vb") return Tag::verb;
  if (t == "adj" || t == "a" || t == "jj") return Tag::adj;
  if (t == "adv" || t == "r" || t == "rb") return Tag::adv;
  if (t == "other" || t == "x") return Tag::other;
  return std::nullopt;
}

bool is_modal(std::string_view word) {
  const auto w = to_lower(word);
  return w == "shall" || w == "must" || w == "will" || w == "should";
}

PosTagger::PosTagger() {
  for (auto w : kDeterminers) lexicon_.emplace(w, Tag::other);
  for (auto w : kNumberWords) lexicon_.emplace(w, Tag::other);
  for (auto w : kAuxiliaries) lexicon_.emplace(w, Tag::other);
  for (std::string_view w :
       {"shall", "must", "will", "should", "may", "can", "could", "would", "might", "in", "on",
        "at", "of", "with", "to", "for", "from", "by", "up", "down", "into", "onto", "over",
        "under", "within", "without", "about", "between", "through", "during", "before", "after",
        "above", "below", "per", "via", "upon", "than", "as", "and", "or", "but", "nor", "so",
        "if", "when", "while", "where", "whether", "unless", "until", "because", "it", "they",
        "them", "he", "she", "him", "we", "us", "you", "i", "me", "my", "which", "who", "whom",
        "whose", "what", "there", "then", "no", "how", "why"}) {
    lexicon_.emplace(w, Tag::other);
  }
  for (std::string_view w : {"very", "not", "only", "always", "never", "often", "least", "most",
                             "again", "already", "soon", "here", "now"}) {
    lexicon_.emplace(w, Tag::adv);
  }
  for (std::string_view w : {"less", "more", "able", "unable", "available", "exact", "new", "same",
                             "other", "such", "current", "many", "few", "several", "maximum",
                             "minimum", "fast", "slow", "high", "low"}) {
    lexicon_.emplace(w, Tag::adj);
  }
  for (std::string_view w : {"provide", "allow", "enable", "ensure", "display", "include",
                             "contain", "receive", "send", "use", "require", "maintain",
                             "generate", "notify", "permit", "prevent", "accept", "perform",
                             "return", "access", "create", "delete"}) {
    lexicon_.emplace(w, Tag::verb);
  }
  for (std::string_view w : {"thing", "string", "something", "nothing", "anything", "everything",
                             "building", "speed", "need"}) {
    lexicon_.emplace(w, Tag::noun);
  }
}

void PosTagger::set(std::string_view word, Tag tag) { lexicon_[to_lower(word)] = tag; }

void PosTagger::load_lexicon(const std::string& path) { parse_lexicon(read_file(path), path); }

void PosTagger::parse_lexicon(std::string_view content, const std::string& origin) {
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    const auto tag = cols.size() == 2 ? try_parse_tag(cols[1]) : std::nullopt;
    if (!tag) throw DataError(origin + ":" + std::to_string(line_no) + ": expected word<TAB>tag");
    set(trim(cols[0]), *tag);
  }
}

std::optional<Tag> PosTagger::known(std::string_view word) const {
  const auto it = lexicon_.find(to_lower(word));
  if (it == lexicon_.end()) return std::nullopt;
  return it->second;
}

Tag PosTagger::lookup(std::string_view word) const {
  if (!is_word_token(word)) return Tag::other;
  if (is_digit_byte(static_cast<unsigned char>(word.front()))) return Tag::other;
  if (auto t = known(word)) return *t;
  if (word.size() == 1) return Tag::other;
  return shape_tag(word);
}

std::vector<TaggedToken> PosTagger::tag(const std::vector<Token>& tokens) const {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Tag t = lookup(tokens[i].text);
    if (t == Tag::noun || t == Tag::verb) {
      // The word after a modal (adverbs and negation skipped) is a verb.
      std::size_t j = i;
      while (j > 0 && (out[j - 1].tag == Tag::adv || iequals(out[j - 1].token.text, "not"))) --j;
      if (j > 0 && is_modal(out[j - 1].token.text)) {
        t = Tag::verb;
      } else if (t == Tag::noun && !known(tokens[i].text) && i >= 2 &&
                 iequals(tokens[i - 1].text, "to") && out[i - 2].tag == Tag::adj) {
        t = Tag::verb;  // "able to <verb>"
      }
    }
    out.push_back({tokens[i], t});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entity extraction

std::string_view role_name(EntityRole role) {
  switch (role) {
    case EntityRole::actor:
      return "actor";
    case EntityRole::action:
      return "action";
    case EntityRole::object:
      return "object";
    case EntityRole::property:
      return "property";
    case EntityRole::metric:
      return "metric";
    case EntityRole::op:
      return "operator";
  }
  return "actor";
}

const std::optional<EntitySpan>& RequirementEntities::get(EntityRole role) const {
  switch (role) {
    case EntityRole::actor:
      return actor;
    case EntityRole::action:
      return action;
    case EntityRole::object:
      return object;
    case EntityRole::property:
      return property;
    case EntityRole::metric:
      return metric;
    case EntityRole::op:
      return op;
  }
  return actor;
}

bool RequirementEntities::empty() const {
  return !actor && !action && !object && !property && !op && !metric;
}

std::vector<std::string> default_comparators() {
  return {"less than", "greater than", "more than", "at least",
          "at most",   "up to",        "within",    "no more than"};
}

RuleEntityExtractor::RuleEntityExtractor(std::shared_ptr<const PosTagger> tagger,
                                         std::vector<std::string> comparators)
    : tagger_(tagger ? std::move(tagger) : std::make_shared<const PosTagger>()) {
  for (const auto& phrase : comparators) {
    std::vector<std::string> words;
    for (const auto& tok : tokenize(phrase)) words.push_back(to_lower(tok.text));
    if (!words.empty()) comparators_.push_back(std::move(words));
  }
  std::stable_sort(comparators_.begin(), comparators_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

std::vector<std::string> RuleEntityExtractor::load_comparators(const std::string& path) {
  std::vector<std::string> out;
  for (const auto& raw : split(read_file(path), '\n')) {
    const auto line = trim(raw);
    if (!line.empty() && line.front() != '#') out.emplace_back(line);
  }
  if (out.empty()) throw ConfigError("comparator file lists no phrases: " + path);
  return out;
}

RequirementEntities RuleEntityExtractor::extract(std::string_view text) const {
  RequirementEntities ents;
  const auto toks = tagger_->tag(tokenize(text));
  const std::size_t n = toks.size();
  const auto lower = [&](std::size_t i) { return to_lower(toks[i].token.text); };

  std::size_t modal = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_modal(toks[i].token.text)) {
      modal = i;
      break;
    }
  }
  if (modal == n) return ents;

  std::vector<EntitySpan> taken;
  auto accept = [&](std::optional<EntitySpan>& slot, EntitySpan span) {
    for (const auto& t : taken) {
      if (overlaps(t, span)) return;
    }
    taken.push_back(span);
    slot = std::move(span);
  };

  // Actor: head noun between a leading determiner and the modal.
  {
    std::size_t start = 0;
    for (std::size_t i = 0; i < modal; ++i) {
      if (toks[i].token.text == ",") start = i + 1;
    }
    if (start < modal && contains(kDeterminers, lower(start))) ++start;
    std::optional<std::size_t> head;
    for (std::size_t i = start; i < modal; ++i) {
      if (toks[i].tag == Tag::noun) head = i;
    }
    if (!head) {
      for (std::size_t i = start; i < modal; ++i) {
        if (is_word_token(toks[i].token.text)) head = i;
      }
    }
    if (head) accept(ents.actor, make_span(toks, text, *head, *head + 1));
  }

  // Action: first non-auxiliary verb after the modal, within the clause.
  std::optional<std::size_t> action;
  for (std::size_t i = modal + 1; i < n; ++i) {
    const auto& w = toks[i].token.text;
    if (w == "." || w == ";" || is_modal(w)) break;
    if (toks[i].tag == Tag::verb && !contains(kAuxiliaries, lower(i))) {
      action = i;
      break;
    }
  }
  if (action) accept(ents.action, make_span(toks, text, *action, *action + 1));

  // Operator: earliest, then longest, comparator phrase after the modal.
  std::optional<std::pair<std::size_t, std::size_t>> op;
  for (std::size_t i = modal + 1; i < n && !op; ++i) {
    for (const auto& phrase : comparators_) {
      if (i + phrase.size() > n) continue;
      bool match = true;
      for (std::size_t k = 0; k < phrase.size() && match; ++k) match = lower(i + k) == phrase[k];
      if (match) {
        op = std::make_pair(i, i + phrase.size());
        break;
      }
    }
  }
  if (op) accept(ents.op, make_span(toks, text, op->first, op->second));

  // Metric: a number (plus unit) right after the operator, or a glued
  // "<num><unit>" token such as "20m/s^2".
  const auto glued_run_end = [&](std::size_t i) {
    std::size_t j = i + 1;
    while (j < n && toks[j].token.begin == toks[j - 1].token.end && toks[j].token.text != "." &&
           toks[j].token.text != "," && toks[j].token.text != ";") {
      ++j;
    }
    return j;
  };
  const auto is_num_unit = [&](std::size_t i) {
    const auto& w = toks[i].token.text;
    return is_digit_byte(static_cast<unsigned char>(w.front())) &&
           std::any_of(w.begin(), w.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
  };
  if (op && op->second < n && (is_number_token(toks[op->second].token.text) || is_num_unit(op->second))) {
    const std::size_t first = op->second;
    std::size_t last = glued_run_end(first);
    if (last == first + 1 && last < n && toks[last].tag == Tag::noun) ++last;
    accept(ents.metric, make_span(toks, text, first, last));
  } else {
    for (std::size_t i = modal + 1; i < n; ++i) {
      if (is_num_unit(i)) {
        accept(ents.metric, make_span(toks, text, i, glued_run_end(i)));
        break;
      }
    }
  }

  // Object: head of the noun phrase directly after the action.
  std::optional<std::size_t> object_end;
  if (action) {
    std::size_t i = *action + 1;
    while (i < n && (toks[i].tag == Tag::adj || toks[i].tag == Tag::adv ||
                     contains(kDeterminers, lower(i)))) {
      ++i;
    }
    std::size_t j = i;
    while (j < n && toks[j].tag == Tag::noun) ++j;
    if (j > i) {
      accept(ents.object, make_span(toks, text, j - 1, j));
      if (ents.object) object_end = j;
    }
  }

  // Property: "of/with [the] <noun>" attached to the object.
  if (object_end && *object_end < n && (lower(*object_end) == "of" || lower(*object_end) == "with")) {
    std::size_t i = *object_end + 1;
    while (i < n && (toks[i].tag == Tag::adj || contains(kDeterminers, lower(i)))) ++i;
    std::size_t j = i;
    while (j < n && toks[j].tag == Tag::noun) ++j;
    if (j > i) accept(ents.property, make_span(toks, text, j - 1, j));
  }

  return ents;
}

}  // namespace pairforge

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pairforge {

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source, [begin, end)
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// Splits on whitespace and punctuation. Word tokens keep underscores, inner
// apostrophes ("UAV's"), inner hyphens, and digit separators ("3.5"), so
// identifiers such as `_VehicleCore_` stay whole.
std::vector<Token> tokenize(std::string_view text);

bool is_word_token(std::string_view token);
bool is_number_token(std::string_view token);

enum class Tag { noun, verb, adj, adv, other };

std::string_view tag_name(Tag tag);
std::optional<Tag> try_parse_tag(std::string_view text);

struct TaggedToken {
  Token token;
  Tag tag = Tag::other;
};

// Most-frequent-tag lookup with suffix fallbacks and a modal-context rule.
class PosTagger {
 public:
  // Built-in closed-class and common-word table.
  PosTagger();

  // Adds or overrides entries from a `word<TAB>tag` file.
  void load_lexicon(const std::string& path);
  void parse_lexicon(std::string_view content, const std::string& origin = "<tagger>");
  void set(std::string_view word, Tag tag);

  std::vector<TaggedToken> tag(const std::vector<Token>& tokens) const;
  std::vector<TaggedToken> tag(std::string_view text) const { return tag(tokenize(text)); }

  // Context-free guess for a single word.
  Tag lookup(std::string_view word) const;

 private:
  std::optional<Tag> known(std::string_view word) const;
  std::unordered_map<std::string, Tag> lexicon_;
};

bool is_modal(std::string_view word);

// Half-open token range within a tokenized text plus its byte span.
struct EntitySpan {
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // exclusive
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

enum class EntityRole { actor, action, object, property, metric, op };

inline constexpr EntityRole kAllRoles[] = {EntityRole::actor,    EntityRole::action,
                                           EntityRole::object,   EntityRole::property,
                                           EntityRole::metric,   EntityRole::op};

std::string_view role_name(EntityRole role);

struct RequirementEntities {
  std::optional<EntitySpan> actor;
  std::optional<EntitySpan> action;
  std::optional<EntitySpan> object;
  std::optional<EntitySpan> property;
  std::optional<EntitySpan> op;  // comparator such as "less than"
  std::optional<EntitySpan> metric;

  const std::optional<EntitySpan>& get(EntityRole role) const;
  bool empty() const;
};

class EntityExtractor {
 public:
  virtual ~EntityExtractor() = default;
  virtual RequirementEntities extract(std::string_view text) const = 0;
  virtual const PosTagger& tagger() const = 0;
};

std::vector<std::string> default_comparators();

// Pattern rules over EARS-style requirements ("The <actor> shall <action> ...").
class RuleEntityExtractor final : public EntityExtractor {
 public:
  explicit RuleEntityExtractor(std::shared_ptr<const PosTagger> tagger = nullptr,
                               std::vector<std::string> comparators = default_comparators());

  // One comparator phrase per line; '#' starts a comment.
  static std::vector<std::string> load_comparators(const std::string& path);

  RequirementEntities extract(std::string_view text) const override;
  const PosTagger& tagger() const override { return *tagger_; }

 private:
  std::shared_ptr<const PosTagger> tagger_;
  std::vector<std::vector<std::string>> comparators_;  // tokenized, lowercase, longest first
};

}  // namespace pairforge

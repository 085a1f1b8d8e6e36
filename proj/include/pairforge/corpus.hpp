#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pairforge {

// Relationship between the two texts of a pair. The enumerator order is the
// fixed label order used for tie-breaking everywhere.
enum class Label { neutral, conflict, duplicate };

inline constexpr std::array<Label, 3> kAllLabels{Label::neutral, Label::conflict,
                                                 Label::duplicate};

std::string_view label_name(Label label);
// Case-insensitive. Throws DataError on unknown text.
Label parse_label(std::string_view text);
std::optional<Label> try_parse_label(std::string_view text);

struct PairRecord {
  std::string id;
  std::string text_a;
  std::string text_b;
  Label label = Label::neutral;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

struct Dataset {
  std::string name;
  std::vector<PairRecord> records;

  std::size_t size() const { return records.size(); }
  // Returns nullptr when absent. Linear scan; use an index for hot paths.
  const PairRecord* find(std::string_view id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class DataFormat { delimited, json_lines };

DataFormat parse_data_format(std::string_view text);
// Picks json_lines for .jsonl/.json/.ndjson, delimited otherwise.
DataFormat guess_data_format(std::string_view path);

// Reads `id,text_a,text_b,label` rows. Errors name the offending row.
Dataset load_dataset(const std::string& path, DataFormat format);
Dataset parse_dataset(std::string_view content, DataFormat format, std::string name = {});

std::string serialize_dataset(const Dataset& d, DataFormat format);
void save_dataset(const Dataset& d, const std::string& path, DataFormat format);

// Throws DataError on duplicate ids, empty texts, or more than one minority label.
void validate_dataset(const Dataset& d);

std::map<Label, std::size_t> class_distribution(const Dataset& d);

// The non-neutral label the dataset uses, if any.
std::optional<Label> minority_label(const Dataset& d);

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::string> train_ids;  // dataset order
  std::vector<std::string> test_ids;   // dataset order
};

// Seeded shuffle per class, then round-robin assignment to folds. Each class
// must have at least k members.
std::vector<FoldSplit> stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed);

Dataset filter_by_label(const Dataset& d, const std::set<Label>& labels);

// Records whose ids are listed, in dataset order. Throws on unknown ids.
Dataset subset(const Dataset& d, const std::vector<std::string>& ids, std::string name = {});

}  // namespace pairforge

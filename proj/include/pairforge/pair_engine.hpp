#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pairforge/augment.hpp"
#include "pairforge/corpus.hpp"

namespace pairforge {

enum class Case { I = 1, II = 2, III = 4 };

std::string_view case_name(Case c);

// Non-empty subset of {I, II, III}: one of the seven pair configurations.
class CaseSpec {
 public:
  CaseSpec(std::initializer_list<Case> cases);
  // "I", "II+III", "I+II+III", ... Throws ConfigError otherwise.
  static CaseSpec parse(std::string_view text);
  // I, II, III, I+II, I+III, II+III, I+II+III.
  static std::vector<CaseSpec> all();

  bool contains(Case c) const { return (bits_ & static_cast<unsigned>(c)) != 0; }
  std::vector<Case> cases() const;  // I < II < III
  std::string to_string() const;

  friend bool operator==(const CaseSpec&, const CaseSpec&) = default;

 private:
  explicit CaseSpec(unsigned bits) : bits_(bits) {}
  unsigned bits_ = 0;
};

struct AugmentedInstance {
  PairRecord pair;  // fresh id, source label
  std::string source_id;
  std::string technique;
  Case case_id = Case::I;
  std::size_t variant_index = 0;
};

enum class FailurePolicy { abort, skip };

FailurePolicy parse_failure_policy(std::string_view text);

struct PairAugmentOptions {
  std::set<Label> target_labels{Label::conflict, Label::duplicate};
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  FailurePolicy policy = FailurePolicy::abort;
  bool deduplicate = true;
  // Called for each record skipped under FailurePolicy::skip.
  std::function<void(const std::string& id, const std::string& reason)> on_skip;
};

// Applies the augmenter to each targeted record under every case of `spec`.
// Output order: source record order, then case I < II < III, then variant index.
std::vector<AugmentedInstance> augment_case(const Dataset& d, const Augmenter& aug,
                                            const CaseSpec& spec, const PairAugmentOptions& opts);

// Seeded uniform sample of `count` items without replacement, in pool order.
std::vector<std::size_t> sample_indices(std::size_t pool_size, std::size_t count, std::uint64_t seed);

// Pools augment_case over every augmenter (deduplicated on the text pair)
// and samples min(|pool|, neutral count of d).
std::vector<AugmentedInstance> combined_da(const Dataset& d,
                                           const std::vector<std::shared_ptr<const Augmenter>>& augs,
                                           const CaseSpec& spec, const PairAugmentOptions& opts);

// Same sampling rule applied to a pool that is already built.
std::vector<AugmentedInstance> sample_pool(std::vector<AugmentedInstance> pool,
                                           std::size_t neutral_count, std::uint64_t seed);

// Originals followed by augmented pairs with fresh unique ids.
Dataset build_training_set(const Dataset& original, const std::vector<AugmentedInstance>& augmented);

// JSON-lines export; an optional first line carries {"provenance": ...}.
std::string serialize_augmented(const std::vector<AugmentedInstance>& instances,
                                const std::string& provenance_json = {});
std::vector<AugmentedInstance> parse_augmented(std::string_view content);

}  // namespace pairforge

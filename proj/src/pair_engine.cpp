#include "pairforge/pair_engine.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "pairforge/error.hpp"
#include "pairforge/parallel.hpp"
#include "pairforge/random.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace {

struct PairKey {
  std::string a;
  std::string b;
  friend bool operator==(const PairKey&, const PairKey&) = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    return static_cast<std::size_t>(fnv1a(k.b, fnv1a(k.a) ^ 0x1f));
  }
};

using PairSet = std::unordered_set<PairKey, PairKeyHash>;

PairSet original_pairs(const Dataset& d) {
  PairSet s;
  for (const auto& r : d.records) s.insert({r.text_a, r.text_b});
  return s;
}

std::vector<std::string> texts_of(const std::vector<Variant>& vs) {
  std::vector<std::string> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(v.text);
  return out;
}

AugmentedInstance make_instance(const PairRecord& src, const std::string& technique, Case c,
                                std::size_t idx, std::string a, std::string b) {
  AugmentedInstance inst;
  inst.source_id = src.id;
  inst.technique = technique;
  inst.case_id = c;
  inst.variant_index = idx;
  inst.pair.id = src.id + "#" + technique + "-" + std::string(case_name(c)) + "-" + std::to_string(idx);
  inst.pair.text_a = std::move(a);
  inst.pair.text_b = std::move(b);
  inst.pair.label = src.label;
  return inst;
}

}  // namespace

std::string_view case_name(Case c) {
  switch (c) {
    case Case::I:
      return "I";
    case Case::II:
      return "II";
    case Case::III:
      return "III";
  }
  return "I";
}

CaseSpec::CaseSpec(std::initializer_list<Case> cases) {
  for (Case c : cases) bits_ |= static_cast<unsigned>(c);
  if (bits_ == 0) throw ConfigError("case spec must not be empty");
}

CaseSpec CaseSpec::parse(std::string_view text) {
  unsigned bits = 0;
  const auto parts = split(trim(text), '+');
  for (const auto& raw : parts) {
    const auto p = trim(raw);
    unsigned bit = 0;
    if (p == "I" || p == "i" || p == "1") bit = static_cast<unsigned>(Case::I);
    if (p == "II" || p == "ii" || p == "2") bit = static_cast<unsigned>(Case::II);
    if (p == "III" || p == "iii" || p == "3") bit = static_cast<unsigned>(Case::III);
    if (bit == 0 || (bits & bit)) {
      throw ConfigError("invalid case spec '" + std::string(text) +
                        "'; expected one of I, II, III, I+II, I+III, II+III, I+II+III");
    }
    bits |= bit;
  }
  return CaseSpec(bits);
}

std::vector<CaseSpec> CaseSpec::all() {
  return {CaseSpec({Case::I}),           CaseSpec({Case::II}),           CaseSpec({Case::III}),
          CaseSpec({Case::I, Case::II}), CaseSpec({Case::I, Case::III}), CaseSpec({Case::II, Case::III}),
          CaseSpec({Case::I, Case::II, Case::III})};
}

std::vector<Case> CaseSpec::cases() const {
  std::vector<Case> out;
  for (Case c : {Case::I, Case::II, Case::III}) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

std::string CaseSpec::to_string() const {
  std::string out;
  for (Case c : cases()) {
    if (!out.empty()) out += '+';
    out += case_name(c);
  }
  return out;
}

FailurePolicy parse_failure_policy(std::string_view text) {
  const auto t = to_lower(trim(text));
  if (t == "abort") return FailurePolicy::abort;
  if (t == "skip" || t == "skip-and-log") return FailurePolicy::skip;
  throw ConfigError("failure policy must be 'abort' or 'skip', got '" + std::string(text) + "'");
}

std::vector<AugmentedInstance> augment_case(const Dataset& d, const Augmenter& aug,
                                            const CaseSpec& spec, const PairAugmentOptions& opts) {
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (opts.target_labels.contains(d.records[i].label)) targets.push_back(i);
  }
  const bool need_a = spec.contains(Case::I) || spec.contains(Case::III);
  const bool need_b = spec.contains(Case::II) || spec.contains(Case::III);
  const std::string technique = aug.name();

  struct Expansion {
    std::vector<AugmentedInstance> instances;
    std::optional<std::string> failure;
  };
  std::vector<Expansion> per_record(targets.size());
  const std::size_t jobs = std::min(std::max<std::size_t>(opts.jobs, 1), aug.max_concurrency());

  parallel_for(targets.size(), jobs, [&](std::size_t t) {
    const PairRecord& r = d.records[targets[t]];
    // Per-text seeds depend on (seed, id, side) only, never on scheduling.
    const std::uint64_t rec_seed = mix_seed(opts.seed, fnv1a(r.id));
    std::vector<std::string> va;
    std::vector<std::string> vb;
    try {
      if (need_a) va = texts_of(aug.augment(r.text_a, mix_seed(rec_seed, 1)));
      if (need_b) vb = texts_of(aug.augment(r.text_b, mix_seed(rec_seed, 2)));
    } catch (const Error& e) {
      if (opts.policy == FailurePolicy::abort) {
        throw ProviderError("augmenting record '" + r.id + "' failed: " + e.what(), r.id);
      }
      per_record[t].failure = e.what();
      return;
    }
    auto& out = per_record[t].instances;
    if (spec.contains(Case::I)) {
      for (std::size_t i = 0; i < va.size(); ++i) {
        out.push_back(make_instance(r, technique, Case::I, i, va[i], r.text_b));
      }
    }
    if (spec.contains(Case::II)) {
      for (std::size_t i = 0; i < vb.size(); ++i) {
        out.push_back(make_instance(r, technique, Case::II, i, r.text_a, vb[i]));
      }
    }
    if (spec.contains(Case::III)) {
      const std::size_t m = std::min(va.size(), vb.size());
      for (std::size_t i = 0; i < m; ++i) {
        out.push_back(make_instance(r, technique, Case::III, i, va[i], vb[i]));
      }
    }
  });

  const PairSet originals = original_pairs(d);
  PairSet seen;
  std::vector<AugmentedInstance> result;
  for (std::size_t t = 0; t < per_record.size(); ++t) {
    if (per_record[t].failure) {
      if (opts.on_skip) opts.on_skip(d.records[targets[t]].id, *per_record[t].failure);
      continue;
    }
    for (auto& inst : per_record[t].instances) {
      if (opts.deduplicate) {
        PairKey key{inst.pair.text_a, inst.pair.text_b};
        if (originals.contains(key) || !seen.insert(std::move(key)).second) continue;
      }
      result.push_back(std::move(inst));
    }
  }
  return result;
}

std::vector<std::size_t> sample_indices(std::size_t pool_size, std::size_t count, std::uint64_t seed) {
  count = std::min(count, pool_size);
  std::vector<std::size_t> idx(pool_size);
  for (std::size_t i = 0; i < pool_size; ++i) idx[i] = i;
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` slots become the sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + rng.uniform(pool_size - i)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<AugmentedInstance> sample_pool(std::vector<AugmentedInstance> pool,
                                           std::size_t neutral_count, std::uint64_t seed) {
  if (pool.empty()) throw DataError("combined augmentation: no augmentable content");
  std::vector<AugmentedInstance> out;
  for (std::size_t i : sample_indices(pool.size(), neutral_count, seed)) out.push_back(std::move(pool[i]));
  return out;
}

std::vector<AugmentedInstance> combined_da(const Dataset& d,
                                           const std::vector<std::shared_ptr<const Augmenter>>& augs,
                                           const CaseSpec& spec, const PairAugmentOptions& opts) {
  if (augs.empty()) throw ConfigError("combined augmentation needs at least one technique");
  std::vector<AugmentedInstance> pool;
  PairSet seen;
  for (const auto& aug : augs) {
    for (auto& inst : augment_case(d, *aug, spec, opts)) {
      if (seen.insert({inst.pair.text_a, inst.pair.text_b}).second) pool.push_back(std::move(inst));
    }
  }
  const auto dist = class_distribution(d);
  const auto it = dist.find(Label::neutral);
  const std::size_t neutral = it == dist.end() ? 0 : it->second;
  return sample_pool(std::move(pool), neutral, mix_seed(opts.seed, 0xC0B1));
}

Dataset build_training_set(const Dataset& original, const std::vector<AugmentedInstance>& augmented) {
  Dataset out{original.name, original.records};
  std::unordered_set<std::string> ids;
  for (const auto& r : original.records) ids.insert(r.id);
  const std::unordered_set<std::string> source_ids(ids);
  for (const auto& inst : augmented) {
    if (!source_ids.contains(inst.source_id)) {
      throw DataError("augmented instance '" + inst.pair.id + "' references unknown source '" +
                      inst.source_id + "'");
    }
    PairRecord r = inst.pair;
    if (r.id.empty()) r.id = inst.source_id + "#aug";
    std::string base = r.id;
    for (std::size_t k = 2; ids.contains(r.id); ++k) r.id = base + "~" + std::to_string(k);
    ids.insert(r.id);
    out.records.push_back(std::move(r));
  }
  return out;
}

std::string serialize_augmented(const std::vector<AugmentedInstance>& instances,
                                const std::string& provenance_json) {
  std::string out;
  if (!provenance_json.empty()) {
    nlohmann::ordered_json head{{"provenance", nlohmann::ordered_json::parse(provenance_json)}};
    out += head.dump() + '\n';
  }
  for (const auto& inst : instances) {
    nlohmann::ordered_json obj{{"id", inst.pair.id},
                               {"text_a", inst.pair.text_a},
                               {"text_b", inst.pair.text_b},
                               {"label", label_name(inst.pair.label)},
                               {"source_id", inst.source_id},
                               {"technique", inst.technique},
                               {"case", case_name(inst.case_id)},
                               {"variant_index", inst.variant_index}};
    out += obj.dump() + '\n';
  }
  return out;
}

std::vector<AugmentedInstance> parse_augmented(std::string_view content) {
  std::vector<AugmentedInstance> out;
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (obj.contains("provenance") && !obj.contains("id")) continue;
      AugmentedInstance inst;
      inst.pair.id = obj.at("id").get<std::string>();
      inst.pair.text_a = obj.at("text_a").get<std::string>();
      inst.pair.text_b = obj.at("text_b").get<std::string>();
      inst.pair.label = parse_label(obj.at("label").get<std::string>());
      inst.source_id = obj.at("source_id").get<std::string>();
      inst.technique = obj.at("technique").get<std::string>();
      const auto spec = CaseSpec::parse(obj.at("case").get<std::string>()).cases();
      if (spec.size() != 1) throw DataError("case must be I, II or III");
      inst.case_id = spec.front();
      inst.variant_index = obj.at("variant_index").get<std::size_t>();
      out.push_back(std::move(inst));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("augmented set row " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace pairforge

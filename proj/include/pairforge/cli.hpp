#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pairforge/corpus.hpp"
#include "pairforge/evaluate.hpp"
#include "pairforge/lexicons.hpp"
#include "pairforge/pair_engine.hpp"

namespace pairforge {

// Raw settings keyed by long flag name without dashes ("max-variants").
using Settings = std::map<std::string, std::string>;

// Flat key/value config: a JSON object or `key = value` TOML lines. Arrays
// become comma-joined strings. Keys accept '_' or '-'.
Settings parse_config_text(std::string_view content, const std::string& origin = "<config>");

struct RunConfig {
  std::string command;
  std::string dataset;
  std::optional<DataFormat> format;
  std::string name;  // dataset name; defaults to the file stem
  std::string lexicon;
  std::string embeddings;
  EmbeddingFormat embedding_format = EmbeddingFormat::text;
  std::string tagger_lexicon;
  std::string comparators;
  std::vector<std::string> techniques{"nv_wns"};  // technique names or "combined"
  std::vector<CaseSpec> cases{CaseSpec({Case::I})};
  std::set<Label> target_labels;  // empty: the dataset's minority label
  std::uint64_t seed = 0;
  std::string provider;
  std::string classifier = "baseline";
  std::size_t folds = 3;
  std::string out = "pairforge-out";
  FailurePolicy policy = FailurePolicy::abort;
  std::size_t jobs = 1;
  std::vector<std::size_t> sizes;
  std::size_t max_variants = 10;
  MacroMode macro_mode = MacroMode::mean_of_f1;
  std::string metric;  // empty: minority-class F1
  std::vector<std::string> inputs;

  // Precedence: config file < PAIRFORGE_PROVIDER_URL < flags. Relative paths
  // from the config file resolve against its directory. Throws ConfigError.
  static RunConfig resolve(const std::string& command, const Settings& flags,
                           const std::optional<std::string>& config_path,
                           const std::optional<std::string>& provider_env);

  // Checks required fields and that referenced files exist.
  void validate() const;

  // Resolved settings that affect artifacts (excludes jobs and out).
  std::string provenance_json() const;
};

// Exit status: 0 success, 2 usage or configuration error, 1 runtime failure.
// Diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pairforge

#include "pairforge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "pairforge/error.hpp"
#include "pairforge/random.hpp"
#include "pairforge/text_util.hpp"

namespace pairforge {

namespace {

using Row = std::vector<std::string>;

// RFC-4180 reader. Returns rows with the 1-based line number each starts on.
std::vector<std::pair<std::size_t, Row>> read_delimited(std::string_view content) {
  std::vector<std::pair<std::size_t, Row>> rows;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = content.size();

  // Leading '#' lines carry provenance and are skipped.
  while (i < n && content[i] == '#') {
    const auto eol = content.find('\n', i);
    i = eol == std::string_view::npos ? n : eol + 1;
    ++line;
  }

  while (i < n) {
    const std::size_t row_line = line;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool row_done = false;
    while (i < n && !row_done) {
      const char c = content[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < n && content[i + 1] == '"') {
            field += '"';
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
          ++i;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (field_started && !field.empty()) {
            throw DataError("line " + std::to_string(line) + ": stray quote inside unquoted field");
          }
          in_quotes = true;
          field_started = true;
          ++i;
          break;
        case ',':
          row.push_back(std::move(field));
          field.clear();
          field_started = false;
          ++i;
          break;
        case '\r':
          ++i;
          break;
        case '\n':
          row_done = true;
          ++line;
          ++i;
          break;
        default:
          field += c;
          field_started = true;
          ++i;
      }
    }
    if (in_quotes) {
      throw DataError("line " + std::to_string(row_line) + ": unterminated quoted field");
    }
    row.push_back(std::move(field));
    if (row.size() == 1 && trim(row[0]).empty()) continue;  // blank line
    rows.emplace_back(row_line, std::move(row));
  }
  return rows;
}

std::string quote_field(std::string_view s) {
  const bool needs = s.find_first_of(",\"\r\n") != std::string_view::npos ||
                     (!s.empty() && (s.front() == ' ' || s.back() == ' ' || s.front() == '#'));
  if (!needs) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

PairRecord make_record(std::string id, std::string a, std::string b, std::string_view label,
                       const std::string& where) {
  if (trim(id).empty()) throw DataError(where + ": empty id");
  if (trim(a).empty()) throw DataError(where + ": empty text_a");
  if (trim(b).empty()) throw DataError(where + ": empty text_b");
  const auto parsed = try_parse_label(label);
  if (!parsed) throw DataError(where + ": unknown label '" + std::string(label) + "'");
  return PairRecord{std::move(id), std::move(a), std::move(b), *parsed};
}

Dataset parse_delimited(std::string_view content, std::string name) {
  Dataset d{std::move(name), {}};
  const auto rows = read_delimited(content);
  if (rows.empty()) return d;

  const Row& header = rows.front().second;
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < header.size(); ++c) column[to_lower(trim(header[c]))] = c;
  std::array<std::size_t, 4> idx{};
  const std::array<const char*, 4> required{"id", "text_a", "text_b", "label"};
  for (std::size_t k = 0; k < required.size(); ++k) {
    const auto it = column.find(required[k]);
    if (it == column.end()) {
      throw DataError(std::string("header is missing column '") + required[k] + "'");
    }
    idx[k] = it->second;
  }
  const std::size_t width = *std::max_element(idx.begin(), idx.end()) + 1;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, row] = rows[r];
    const std::string where = "row " + std::to_string(r) + " (line " + std::to_string(line) + ")";
    if (row.size() < width) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    d.records.push_back(make_record(row[idx[0]], row[idx[1]], row[idx[2]], trim(row[idx[3]]), where));
  }
  return d;
}

std::string json_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw DataError(where + ": missing field '" + key + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw DataError(where + ": field '" + key + "' must be a string");
}

Dataset parse_json_lines(std::string_view content, std::string name) {
  Dataset d{std::move(name), {}};
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const auto line = trim(content.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "row " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw DataError(where + ": expected a JSON object");
    if (obj.contains("provenance") && !obj.contains("id")) continue;
    d.records.push_back(make_record(json_field(obj, "id", where), json_field(obj, "text_a", where),
                                    json_field(obj, "text_b", where),
                                    json_field(obj, "label", where), where));
  }
  return d;
}

std::string stem_of(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

}  // namespace

std::string_view label_name(Label label) {
  switch (label) {
    case Label::neutral:
      return "neutral";
    case Label::conflict:
      return "conflict";
    case Label::duplicate:
      return "duplicate";
  }
  return "neutral";
}

std::optional<Label> try_parse_label(std::string_view text) {
  const auto t = to_lower(trim(text));
  for (Label l : kAllLabels) {
    if (t == label_name(l)) return l;
  }
  return std::nullopt;
}

Label parse_label(std::string_view text) {
  if (auto l = try_parse_label(text)) return *l;
  throw DataError("unknown label '" + std::string(text) + "'");
}

const PairRecord* Dataset::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

DataFormat parse_data_format(std::string_view text) {
  const auto t = to_lower(text);
  if (t == "csv" || t == "delimited" || t == "delimited-table") return DataFormat::delimited;
  if (t == "jsonl" || t == "json-lines" || t == "json_lines" || t == "ndjson") {
    return DataFormat::json_lines;
  }
  throw ConfigError("unknown dataset format '" + std::string(text) + "'");
}

DataFormat guess_data_format(std::string_view path) {
  for (std::string_view ext : {".jsonl", ".ndjson", ".json"}) {
    if (path.size() >= ext.size() && path.substr(path.size() - ext.size()) == ext) {
      return DataFormat::json_lines;
    }
  }
  return DataFormat::delimited;
}

Dataset parse_dataset(std::string_view content, DataFormat format, std::string name) {
  Dataset d = format == DataFormat::delimited ? parse_delimited(content, std::move(name))
                                              : parse_json_lines(content, std::move(name));
  validate_dataset(d);
  return d;
}

Dataset load_dataset(const std::string& path, DataFormat format) {
  std::ifstream probe(path);
  if (!probe) throw DataError("dataset file not found: " + path);
  try {
    return parse_dataset(read_file(path), format, stem_of(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void validate_dataset(const Dataset& d) {
  std::unordered_set<std::string_view> ids;
  std::optional<Label> minority;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    if (!ids.insert(r.id).second) {
      throw DataError("row " + std::to_string(i + 1) + ": duplicate id '" + r.id + "'");
    }
    if (trim(r.text_a).empty() || trim(r.text_b).empty()) {
      throw DataError("row " + std::to_string(i + 1) + ": empty text");
    }
    if (r.label != Label::neutral) {
      if (minority && *minority != r.label) {
        throw DataError("row " + std::to_string(i + 1) + ": dataset mixes labels '" +
                        std::string(label_name(*minority)) + "' and '" +
                        std::string(label_name(r.label)) + "'; expected neutral plus one");
      }
      minority = r.label;
    }
  }
}

std::string serialize_dataset(const Dataset& d, DataFormat format) {
  std::string out;
  if (format == DataFormat::delimited) {
    out += "id,text_a,text_b,label\n";
    for (const auto& r : d.records) {
      out += quote_field(r.id) + ',' + quote_field(r.text_a) + ',' + quote_field(r.text_b) + ',' +
             std::string(label_name(r.label)) + '\n';
    }
  } else {
    for (const auto& r : d.records) {
      nlohmann::ordered_json obj{{"id", r.id},
                                 {"text_a", r.text_a},
                                 {"text_b", r.text_b},
                                 {"label", label_name(r.label)}};
      out += obj.dump() + '\n';
    }
  }
  return out;
}

void save_dataset(const Dataset& d, const std::string& path, DataFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset: " + path);
  out << serialize_dataset(d, format);
}

std::map<Label, std::size_t> class_distribution(const Dataset& d) {
  std::map<Label, std::size_t> counts;
  for (const auto& r : d.records) ++counts[r.label];
  return counts;
}

std::optional<Label> minority_label(const Dataset& d) {
  for (const auto& r : d.records) {
    if (r.label != Label::neutral) return r.label;
  }
  return std::nullopt;
}

std::vector<FoldSplit> stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");

  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < d.records.size(); ++i) by_class[d.records[i].label].push_back(i);

  std::vector<std::size_t> fold_of(d.records.size(), 0);
  std::size_t cursor = 0;  // round-robin continues across classes to balance fold sizes
  for (auto& [label, members] : by_class) {
    if (members.size() < k) {
      throw DataError("class '" + std::string(label_name(label)) + "' has " +
                      std::to_string(members.size()) + " members, fewer than " +
                      std::to_string(k) + " folds");
    }
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t idx : members) fold_of[idx] = cursor++ % k;
  }

  std::vector<FoldSplit> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].fold_index = f;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
      (fold_of[i] == f ? folds[f].test_ids : folds[f].train_ids).push_back(d.records[i].id);
    }
  }
  return folds;
}

Dataset filter_by_label(const Dataset& d, const std::set<Label>& labels) {
  Dataset out{d.name, {}};
  std::copy_if(d.records.begin(), d.records.end(), std::back_inserter(out.records),
               [&](const PairRecord& r) { return labels.contains(r.label); });
  return out;
}

Dataset subset(const Dataset& d, const std::vector<std::string>& ids, std::string name) {
  std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
  Dataset out{name.empty() ? d.name : std::move(name), {}};
  for (const auto& r : d.records) {
    if (wanted.erase(r.id)) out.records.push_back(r);
  }
  if (!wanted.empty()) throw DataError("subset references unknown id '" + std::string(*wanted.begin()) + "'");
  return out;
}

}  // namespace pairforge

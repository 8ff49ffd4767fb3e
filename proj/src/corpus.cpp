#include "spvr/corpus.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spvr/errors.hpp"
#include "spvr/prompt.hpp"
#include "spvr/syntax.hpp"

namespace spvr {

namespace {

bool is_valid_cwe_id(const std::string& id) {
  if (id.rfind("CWE-", 0) != 0 || id.size() == 4) return false;
  for (std::size_t i = 4; i < id.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
  }
  return true;
}

Language language_from_name(const std::string& name, int line) {
  if (name == "c") return Language::kC;
  if (name == "cpp" || name == "c++") return Language::kCpp;
  throw MalformedRecord("unknown language '" + name + "' (want c or cpp)",
                        line);
}

std::string language_name(Language language) {
  return language == Language::kCpp ? "cpp" : "c";
}

std::string require_string(const nlohmann::json& record, const char* field,
                           int line) {
  if (!record.contains(field) || !record[field].is_string()) {
    throw MalformedRecord(std::string("missing or non-string field '") +
                              field + "'",
                          line);
  }
  std::string value = record[field].get<std::string>();
  if (value.empty()) {
    throw MalformedRecord(std::string("field '") + field + "' is empty", line);
  }
  return value;
}

// Strip comments, tolerating text the grammar cannot handle: the raw text is
// kept and the sample flagged degraded instead of being rejected.
SourceUnit strip_or_keep(const SourceUnit& unit, bool& degraded) {
  try {
    SourceUnit stripped = strip_comments(unit);
    degraded = parse(stripped).degraded();
    return stripped;
  } catch (const ParseFailure&) {
    degraded = true;
    return unit;
  }
}

}  // namespace

std::string to_string(MetFailure failure) {
  switch (failure) {
    case MetFailure::kOk: return "ok";
    case MetFailure::kEmptyEdits: return "no_edits";
    case MetFailure::kNoQualifyingNode: return "no_qualifying_node";
    case MetFailure::kKindMismatch: return "kind_mismatch";
  }
  return "unknown";
}

Corpus ingest(std::istream& jsonl) {
  Corpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(jsonl, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedRecord(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!record.is_object()) {
      throw MalformedRecord("record is not a JSON object", line_no);
    }

    RepairSample sample;
    sample.id = require_string(record, "id", line_no);
    sample.cwe_id = require_string(record, "cwe_id", line_no);
    if (!is_valid_cwe_id(sample.cwe_id)) {
      throw MalformedRecord("cwe_id '" + sample.cwe_id +
                                "' does not match CWE-<digits>",
                            line_no);
    }

    Language language = Language::kC;
    if (record.contains("language")) {
      if (!record["language"].is_string()) {
        throw MalformedRecord("field 'language' is not a string", line_no);
      }
      language =
          language_from_name(record["language"].get<std::string>(), line_no);
    }

    std::string vuln_code = require_string(record, "vuln_code", line_no);
    sample.vulnerable =
        strip_or_keep({vuln_code, language}, sample.parse_degraded);

    if (record.contains("fixed_code") && !record["fixed_code"].is_null()) {
      if (!record["fixed_code"].is_string()) {
        throw MalformedRecord("field 'fixed_code' is not a string", line_no);
      }
      std::string fixed_code = record["fixed_code"].get<std::string>();
      if (!fixed_code.empty()) {
        bool fixed_degraded = false;
        sample.fixed = strip_or_keep({fixed_code, language}, fixed_degraded);
      }
    }

    if (record.contains("vuln_lines") && !record["vuln_lines"].is_null()) {
      const auto& lines = record["vuln_lines"];
      if (!lines.is_array() || lines.size() != 2 ||
          !lines[0].is_number_integer() || !lines[1].is_number_integer()) {
        throw MalformedRecord("field 'vuln_lines' is not [start, end]",
                              line_no);
      }
      int first = lines[0].get<int>();
      int last = lines[1].get<int>();
      if (first < 1 || last < first) {
        throw MalformedRecord("field 'vuln_lines' range is not 1-based "
                              "ascending",
                              line_no);
      }
      sample.vulnerable_lines = {first, last};
    }

    if (sample.fixed.has_value() &&
        sample.fixed->text == sample.vulnerable.text) {
      ++corpus.dropped_identical;
      continue;
    }
    corpus.samples.push_back(std::move(sample));
  }
  return corpus;
}

Corpus ingest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open corpus file: " + path);
  }
  return ingest(in);
}

void emit(const Corpus& corpus, std::ostream& out) {
  for (const RepairSample& sample : corpus.samples) {
    nlohmann::json record = {
        {"id", sample.id},
        {"cwe_id", sample.cwe_id},
        {"language", language_name(sample.vulnerable.language)},
        {"vuln_code", sample.vulnerable.text},
    };
    if (sample.fixed.has_value()) record["fixed_code"] = sample.fixed->text;
    if (sample.vulnerable_lines.has_value()) {
      record["vuln_lines"] = {sample.vulnerable_lines->first,
                              sample.vulnerable_lines->second};
    }
    out << record.dump() << '\n';
  }
}

const MetSummary& compute_met_summary(RepairSample& sample,
                                      const KindTaxonomy& taxonomy) {
  if (sample.met_cache.has_value()) return *sample.met_cache;

  MetSummary summary;
  try {
    if (sample.fixed.has_value()) {
      auto [v_edits, f_edits] =
          compute_edit_spans(sample.vulnerable, *sample.fixed);
      if (v_edits.empty()) {
        summary.failure = MetFailure::kEmptyEdits;
      } else {
        SyntaxTree v_tree = parse(sample.vulnerable);
        SyntaxTree f_tree = parse(*sample.fixed);
        MetOutcome outcome =
            build_met_outcome(v_tree, f_tree, v_edits, f_edits, taxonomy);
        summary.failure = outcome.failure;
        if (outcome.met.has_value()) {
          summary.type = outcome.met->type;
          summary.vulnerable_span = outcome.met->vulnerable_root->span;
          summary.fixed_span = outcome.met->fixed_root->span;
          summary.merged_outline = render_merged_outline(outcome.met->merged);
        }
      }
    } else if (sample.vulnerable_lines.has_value()) {
      SyntaxTree tree = parse(sample.vulnerable);
      EditSpan span = span_for_line_range(sample.vulnerable,
                                          sample.vulnerable_lines->first,
                                          sample.vulnerable_lines->second);
      if (auto met = locate_met_online(tree, span, taxonomy)) {
        summary.failure = MetFailure::kOk;
        summary.type = met->type;
        summary.vulnerable_span = met->vulnerable_root->span;
        summary.merged_outline = render_merged_outline(met->merged);
      } else {
        summary.failure = MetFailure::kNoQualifyingNode;
      }
    } else {
      // Nothing marks the edit: no tree can be located.
      summary.failure = MetFailure::kEmptyEdits;
    }
  } catch (const ParseFailure&) {
    summary.failure = MetFailure::kNoQualifyingNode;
  } catch (const SpanOutOfRange&) {
    summary.failure = MetFailure::kNoQualifyingNode;
  }

  sample.met_cache = std::move(summary);
  return *sample.met_cache;
}

MetStats MetStats::from_counts(const std::map<std::string, long>& modeled,
                               long other_count, long different_count,
                               long degraded_count) {
  MetStats stats;
  stats.modeled_counts = modeled;
  stats.other_type_count = other_count;
  stats.different_type_count = different_count;
  stats.degraded = degraded_count;

  long modeled_total = 0;
  for (const auto& [type, count] : modeled) modeled_total += count;
  stats.total = modeled_total + other_count + different_count + degraded_count;

  long usable = stats.total - degraded_count;
  auto percent = [usable](long count) {
    if (usable <= 0) return 0.0;
    return 100.0 * static_cast<double>(count) / static_cast<double>(usable);
  };
  for (const auto& [type, count] : modeled) {
    stats.modeled_percent[type] = percent(count);
  }
  stats.other_percent = percent(other_count);
  stats.different_percent = percent(different_count);
  stats.six_type_coverage_percent = percent(modeled_total);
  stats.same_type_percent = percent(modeled_total + other_count);
  return stats;
}

MetStats met_type_stats(Corpus& corpus, const KindTaxonomy& taxonomy) {
  std::map<std::string, long> modeled;
  for (const std::string& type : modeled_met_types()) modeled[type] = 0;
  long other = 0;
  long different = 0;
  long degraded = 0;

  for (RepairSample& sample : corpus.samples) {
    if (sample.parse_degraded) {
      ++degraded;
      continue;
    }
    const MetSummary& summary = compute_met_summary(sample, taxonomy);
    if (summary.failure == MetFailure::kOk && summary.type.has_value()) {
      if (is_modeled_met_type(*summary.type)) {
        ++modeled[*summary.type];
      } else {
        ++other;
      }
    } else {
      ++different;
    }
  }
  return MetStats::from_counts(modeled, other, different, degraded);
}

Corpus filter_top25(const Corpus& corpus) {
  Corpus out;
  out.dropped_identical = corpus.dropped_identical;
  for (const RepairSample& sample : corpus.samples) {
    if (is_top25_cwe(sample.cwe_id)) out.samples.push_back(sample);
  }
  return out;
}

}  // namespace spvr

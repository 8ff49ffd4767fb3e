#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spvr/met.hpp"
#include "spvr/source.hpp"

namespace spvr {

// Cached result of minimum-edit-tree construction for one sample, kept as
// plain data so it outlives the transient syntax trees.
struct MetSummary {
  MetFailure failure = MetFailure::kOk;
  std::optional<std::string> type;           // set when failure == kOk
  std::optional<ByteSpan> vulnerable_span;   // tree root span, vulnerable side
  std::optional<ByteSpan> fixed_span;        // tree root span, fixed side
  std::string merged_outline;                // rendered merged view
};

// One vulnerable function, optionally paired with its fixed version.
struct RepairSample {
  std::string id;
  std::string cwe_id;
  SourceUnit vulnerable;                    // comments already stripped
  std::optional<SourceUnit> fixed;          // comments already stripped
  std::optional<std::pair<int, int>> vulnerable_lines;  // 1-based, inclusive
  bool parse_degraded = false;  // vulnerable side didn't parse cleanly
  std::optional<MetSummary> met_cache;
};

struct Corpus {
  std::vector<RepairSample> samples;
  // Pairs whose sides were byte-identical after comment stripping, dropped
  // at ingestion.
  long dropped_identical = 0;
};

// Reads a JSONL corpus: one object per line with fields id, cwe_id,
// vuln_code, and optionally fixed_code, language ("c"/"cpp"), vuln_lines
// ([start, end], 1-based). Blank lines are skipped. Strips comments from
// both sides, drops pairs identical afterwards, and flags samples whose
// vulnerable side does not parse cleanly. Throws MalformedRecord (with the
// line number) on invalid JSON, missing/empty required fields, or a cwe_id
// that is not "CWE-" + digits.
Corpus ingest(std::istream& jsonl);
Corpus ingest_file(const std::string& path);

// Serializes a corpus back to JSONL in ingestion order (stripped text).
void emit(const Corpus& corpus, std::ostream& out);

// Computes (and caches) the MET summary of one sample: from the line diff
// when fixed code is present, else from vulnerable_lines. Samples with
// neither, or flagged parse_degraded, get a summary only when possible.
const MetSummary& compute_met_summary(RepairSample& sample,
                                      const KindTaxonomy& taxonomy);

// Table-style MET statistics over a corpus.
struct MetStats {
  long total = 0;     // all (kept) samples
  long degraded = 0;  // vulnerable side unparseable
  std::map<std::string, long> modeled_counts;  // six modeled types
  long other_type_count = 0;       // METs of other (unmodeled) kinds
  long different_type_count = 0;   // no MET: kind mismatch / no node / no edits

  // Derived percentages (over total - degraded).
  std::map<std::string, double> modeled_percent;
  double other_percent = 0.0;
  double different_percent = 0.0;
  // Share of samples covered by the six modeled types, and by any MET.
  double six_type_coverage_percent = 0.0;
  double same_type_percent = 0.0;

  // Builds a stats block from raw counts (used both by met_type_stats and
  // for fixture checks). modeled maps type -> count.
  static MetStats from_counts(const std::map<std::string, long>& modeled,
                              long other_count, long different_count,
                              long degraded_count);
};

// Computes MET summaries for every sample that lacks one, then aggregates.
MetStats met_type_stats(Corpus& corpus, const KindTaxonomy& taxonomy);

// Keeps only samples whose cwe_id is in the shipped top-25 table; preserves
// order and the dropped-identical counter.
Corpus filter_top25(const Corpus& corpus);

std::string to_string(MetFailure failure);

}  // namespace spvr

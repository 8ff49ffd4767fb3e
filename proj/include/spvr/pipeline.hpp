#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spvr/corpus.hpp"
#include "spvr/extract.hpp"
#include "spvr/gateway.hpp"
#include "spvr/prompt.hpp"
#include "spvr/rules.hpp"

namespace spvr {

// Everything a repair or evaluation run needs. Loadable from a JSON config
// file; see RunConfig::from_json_file.
struct RunConfig {
  std::string corpus_path;
  std::filesystem::path output_dir = "out";
  std::filesystem::path cache_dir;  // empty disables completion caching
  ModelConfig model;
  std::optional<std::string> mock_script_path;  // replies for endpoint "mock"
  RuleConfig rules;
  PromptOptions prompt;
  bool restrict_to_top25 = true;
  int k = 3;                        // attempts scored by pass@k
  int edit_distance_threshold = 5;  // "< threshold" counts as close
  int jobs = 0;                     // worker threads; 0 = hardware default

  // Throws ConfigError on unreadable file, invalid JSON, or bad values.
  static RunConfig from_json_file(const std::string& path);
  void validate() const;
};

// Why a sample produced no candidates.
enum class SkipReason {
  kParseDegraded,
  kCweOutsideTop25,
  kMissingLocation,  // no fixed code and no vulnerable_lines
  kNoMinimumTree,    // build_met returned none
  kUnmodeledType,    // MET type outside the six modeled ones
  kUnknownCwe,       // cwe outside the prompt table (top-25 filter off)
};

std::string to_string(SkipReason reason);

struct SkippedSample {
  std::string id;
  SkipReason reason = SkipReason::kNoMinimumTree;
  std::string detail;
};

// Outcome of run_repair: every corpus sample lands either in `candidates`
// (at least one row) or in `skipped` (exactly one row).
struct RepairRun {
  std::vector<PromptBundle> prompts;
  std::vector<CompletionRecord> completions;
  std::vector<RepairCandidate> candidates;
  std::vector<SkippedSample> skipped;
  // Ground truth per sample id (the fixed-side tree text), when available.
  std::map<std::string, std::string> truths;
  long corpus_total = 0;
  long dropped_identical = 0;
};

// Runs the front half of the pipeline over a corpus: trees, rules, prompts,
// model completions, patch extraction. Writes prompts.jsonl,
// completions.jsonl, candidates.jsonl, truths.jsonl, and skipped.jsonl under
// config.output_dir (creating it) and returns the same data.
RepairRun run_repair(const RunConfig& config);

// Scores for one evaluated sample.
struct EvalRow {
  std::string sample_id;
  int candidate_count = 0;
  bool any_perfect = false;
  double best_codebleu = 0.0;
  int min_tree_distance = -1;  // -1 when no candidate parsed
  std::vector<bool> attempt_success;  // indexed by attempt - 1
};

struct EvalReport {
  std::vector<EvalRow> rows;
  int k = 1;
  double pass_at_k_percent = 0.0;
  double mean_best_codebleu_percent = 0.0;   // best_codebleu is 0..1, this 0..100
  double close_distance_rate_percent = 0.0;  // share with min distance < threshold
  long evaluated = 0;
};

// Scores candidates against per-sample ground truth: pass@k over perfect
// patches, best composite similarity, and minimum tree distance. Samples in
// `truths` with no candidates count as all-failed rows. Throws MissingTruth
// when `truths` is empty.
EvalReport run_eval(const std::vector<RepairCandidate>& candidates,
                    const std::map<std::string, std::string>& truths,
                    const RunConfig& config);

// Serialization helpers used by the CLI (stable field order).
std::string eval_report_json(const EvalReport& report);
std::string eval_report_csv(const EvalReport& report);

}  // namespace spvr

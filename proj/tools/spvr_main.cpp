#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spvr/corpus.hpp"
#include "spvr/errors.hpp"
#include "spvr/met.hpp"
#include "spvr/metrics.hpp"
#include "spvr/pipeline.hpp"
#include "spvr/prompt.hpp"
#include "spvr/rules.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitEmpty = 2;

struct GlobalOptions {
  std::string config_path;
  int jobs = -1;              // -1 = not set on the command line
  std::string cache_dir;
  bool cache_dir_set = false;
};

spvr::RunConfig load_config(const GlobalOptions& global) {
  spvr::RunConfig config;
  if (!global.config_path.empty()) {
    config = spvr::RunConfig::from_json_file(global.config_path);
  }
  if (global.jobs >= 0) config.jobs = global.jobs;
  if (global.cache_dir_set) config.cache_dir = global.cache_dir;
  return config;
}

// Loads the single-sample JSON file the tree-level subcommands take. Reuses
// the corpus reader so field validation matches ingestion exactly.
spvr::Corpus load_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spvr::ConfigError("cannot open sample file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw spvr::ConfigError("sample file " + path +
                            " is not valid JSON: " + e.what());
  }
  std::istringstream one_line(doc.dump() + "\n");
  return spvr::ingest(one_line);
}

// The live minimum edit tree of one sample, plus the trees it points into.
struct LiveMet {
  spvr::SyntaxTree vulnerable_tree;
  std::optional<spvr::SyntaxTree> fixed_tree;
  std::optional<spvr::MinimumEditTree> met;
  spvr::MetFailure failure = spvr::MetFailure::kOk;
};

LiveMet build_live_met(const spvr::RepairSample& sample) {
  LiveMet live{spvr::parse(sample.vulnerable), std::nullopt, std::nullopt,
               spvr::MetFailure::kOk};
  const spvr::KindTaxonomy& taxonomy = spvr::KindTaxonomy::builtin();
  if (sample.fixed.has_value()) {
    auto [v_edits, f_edits] =
        spvr::compute_edit_spans(sample.vulnerable, *sample.fixed);
    if (v_edits.empty()) {
      live.failure = spvr::MetFailure::kEmptyEdits;
      return live;
    }
    live.fixed_tree.emplace(spvr::parse(*sample.fixed));
    spvr::MetOutcome outcome = spvr::build_met_outcome(
        live.vulnerable_tree, *live.fixed_tree, v_edits, f_edits, taxonomy);
    live.met = std::move(outcome.met);
    live.failure = outcome.failure;
    return live;
  }
  if (sample.vulnerable_lines.has_value()) {
    spvr::EditSpan span = spvr::span_for_line_range(
        sample.vulnerable, sample.vulnerable_lines->first,
        sample.vulnerable_lines->second);
    live.met = spvr::locate_met_online(live.vulnerable_tree, span, taxonomy);
    if (!live.met.has_value()) live.failure = spvr::MetFailure::kNoQualifyingNode;
    return live;
  }
  live.failure = spvr::MetFailure::kEmptyEdits;
  return live;
}

int cmd_met(const std::string& sample_path) {
  spvr::Corpus corpus = load_sample_file(sample_path);
  if (corpus.samples.empty()) {
    std::cerr << "sample is empty (identical before/after pair?)\n";
    return kExitEmpty;
  }
  spvr::RepairSample& sample = corpus.samples.front();
  LiveMet live = build_live_met(sample);
  std::cout << "id: " << sample.id << "\n";
  if (!live.met.has_value()) {
    std::cout << "type: none (" << spvr::to_string(live.failure) << ")\n";
    return kExitEmpty;
  }
  const spvr::MinimumEditTree& met = *live.met;
  const spvr::SyntaxNode& v = *met.vulnerable_root;
  std::cout << "type: " << met.type << "\n";
  std::cout << "vulnerable span: bytes [" << v.span.start << ", " << v.span.end
            << ") lines " << v.start_line << ".." << v.end_line << "\n";
  if (met.fixed_root != nullptr) {
    const spvr::SyntaxNode& f = *met.fixed_root;
    std::cout << "fixed span: bytes [" << f.span.start << ", " << f.span.end
              << ") lines " << f.start_line << ".." << f.end_line << "\n";
  }
  std::cout << "code:\n"
            << spvr::to_plain_code(v, live.vulnerable_tree.unit()) << "\n";
  std::cout << "merged:\n" << spvr::render_merged_outline(met.merged);
  return kExitOk;
}

int cmd_rules(const std::string& sample_path, const spvr::RunConfig& config) {
  spvr::Corpus corpus = load_sample_file(sample_path);
  if (corpus.samples.empty()) {
    std::cerr << "sample is empty (identical before/after pair?)\n";
    return kExitEmpty;
  }
  LiveMet live = build_live_met(corpus.samples.front());
  if (!live.met.has_value()) {
    std::cout << "type: none (" << spvr::to_string(live.failure) << ")\n";
    return kExitEmpty;
  }
  if (!spvr::is_modeled_met_type(live.met->type)) {
    std::cout << "type: " << live.met->type << " (no rules modeled)\n";
    return kExitEmpty;
  }
  std::vector<spvr::RuleFinding> findings =
      spvr::run_rules(*live.met, live.vulnerable_tree, config.rules);
  std::cout << "type: " << live.met->type << "\n";
  if (findings.empty()) {
    std::cout << "no findings (fallback instruction applies)\n";
    return kExitOk;
  }
  for (const spvr::RuleFinding& f : findings) {
    std::cout << f.priority << ". " << spvr::to_string(f.check) << ": "
              << f.instruction << "\n";
    if (!f.referenced_symbols.empty()) {
      std::cout << "   symbols:";
      for (const std::string& s : f.referenced_symbols) std::cout << " " << s;
      std::cout << "\n";
    }
  }
  return kExitOk;
}

int cmd_prompt(const std::string& sample_path, const spvr::RunConfig& config) {
  spvr::Corpus corpus = load_sample_file(sample_path);
  if (corpus.samples.empty()) {
    std::cerr << "sample is empty (identical before/after pair?)\n";
    return kExitEmpty;
  }
  spvr::RepairSample& sample = corpus.samples.front();
  LiveMet live = build_live_met(sample);
  if (!live.met.has_value()) {
    std::cout << "type: none (" << spvr::to_string(live.failure) << ")\n";
    return kExitEmpty;
  }
  if (!spvr::is_modeled_met_type(live.met->type)) {
    std::cout << "type: " << live.met->type << " (no prompts modeled)\n";
    return kExitEmpty;
  }
  std::vector<spvr::RuleFinding> findings =
      spvr::run_rules(*live.met, live.vulnerable_tree, config.rules);
  std::vector<spvr::PromptBundle> bundles = spvr::assemble_prompts(
      sample.id, sample.cwe_id, *live.met, live.vulnerable_tree, findings,
      config.prompt);
  for (const spvr::PromptBundle& b : bundles) {
    std::cout << "--- prompt " << b.ordinal << " of " << bundles.size()
              << " ---\n"
              << b.assembled << "\n";
  }
  return kExitOk;
}

int cmd_repair(const spvr::RunConfig& config) {
  spvr::RepairRun run = spvr::run_repair(config);
  if (run.corpus_total == 0) {
    std::cerr << "corpus has no usable samples\n";
    return kExitEmpty;
  }
  std::cout << "samples: " << run.corpus_total << "\n";
  std::cout << "dropped identical pairs: " << run.dropped_identical << "\n";
  std::cout << "prompts: " << run.prompts.size() << "\n";
  std::cout << "completions: " << run.completions.size() << "\n";
  std::cout << "candidates: " << run.candidates.size() << "\n";
  std::cout << "skipped: " << run.skipped.size() << "\n";
  std::map<std::string, long> by_reason;
  for (const spvr::SkippedSample& s : run.skipped) {
    ++by_reason[spvr::to_string(s.reason)];
  }
  for (const auto& [reason, count] : by_reason) {
    std::cout << "  " << reason << ": " << count << "\n";
  }
  std::cout << "outputs written to " << config.output_dir.string() << "\n";
  if (run.prompts.empty()) {
    std::cerr << "no sample produced a prompt\n";
    return kExitEmpty;
  }
  return kExitOk;
}

spvr::ExtractionStatus status_from_string(const std::string& name) {
  if (name == "exact") return spvr::ExtractionStatus::kExact;
  if (name == "fence_stripped") return spvr::ExtractionStatus::kFenceStripped;
  return spvr::ExtractionStatus::kFailed;
}

int cmd_eval(const spvr::RunConfig& config, std::string candidates_path,
             std::string truths_path) {
  if (candidates_path.empty()) {
    candidates_path = (config.output_dir / "candidates.jsonl").string();
  }
  if (truths_path.empty()) {
    truths_path = (config.output_dir / "truths.jsonl").string();
  }

  auto read_rows = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spvr::ConfigError("cannot open input file: " + path);
    std::vector<nlohmann::json> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        rows.push_back(nlohmann::json::parse(line));
      } catch (const nlohmann::json::parse_error& e) {
        throw spvr::MalformedRecord(std::string("invalid JSON: ") + e.what(),
                                    line_no);
      }
    }
    return rows;
  };

  std::vector<spvr::RepairCandidate> candidates;
  for (const nlohmann::json& row : read_rows(candidates_path)) {
    spvr::RepairCandidate c;
    c.sample_id = row.value("sample_id", "");
    c.ordinal = row.value("ordinal", 1);
    c.attempt = row.value("attempt", 1);
    c.status = status_from_string(row.value("status", "failed"));
    c.code = row.value("code", "");
    candidates.push_back(std::move(c));
  }
  std::map<std::string, std::string> truths;
  for (const nlohmann::json& row : read_rows(truths_path)) {
    truths[row.value("sample_id", "")] = row.value("truth", "");
  }
  if (truths.empty()) {
    std::cerr << "no ground truth to evaluate against\n";
    return kExitEmpty;
  }

  spvr::EvalReport report = spvr::run_eval(candidates, truths, config);
  std::string json_text = spvr::eval_report_json(report);
  std::cout << json_text << "\n";

  std::filesystem::create_directories(config.output_dir);
  std::ofstream json_out(config.output_dir / "eval.json", std::ios::trunc);
  json_out << json_text << "\n";
  std::ofstream csv_out(config.output_dir / "eval.csv", std::ios::trunc);
  csv_out << spvr::eval_report_csv(report);
  return kExitOk;
}

int cmd_stats(const spvr::RunConfig& config, const std::string& corpus_override) {
  std::string corpus_path =
      corpus_override.empty() ? config.corpus_path : corpus_override;
  if (corpus_path.empty()) {
    throw spvr::ConfigError("stats needs a corpus (config corpus_path or "
                            "--corpus)");
  }
  spvr::Corpus corpus = spvr::ingest_file(corpus_path);
  if (corpus.samples.empty()) {
    std::cerr << "corpus has no usable samples\n";
    return kExitEmpty;
  }
  spvr::MetStats stats =
      spvr::met_type_stats(corpus, spvr::KindTaxonomy::builtin());

  std::cout << "samples: " << stats.total << "\n";
  std::cout << "dropped identical pairs: " << corpus.dropped_identical << "\n";
  std::cout << "parse degraded: " << stats.degraded << "\n";
  std::cout.setf(std::ios::fixed);
  std::cout.precision(2);
  for (const auto& [type, count] : stats.modeled_counts) {
    std::cout << "  " << type << ": " << count << " ("
              << stats.modeled_percent.at(type) << "%)\n";
  }
  std::cout << "  other tree types: " << stats.other_type_count << " ("
            << stats.other_percent << "%)\n";
  std::cout << "  no shared tree: " << stats.different_type_count << " ("
            << stats.different_percent << "%)\n";
  std::cout << "modeled coverage: " << stats.six_type_coverage_percent
            << "%\n";
  std::cout << "same-type share: " << stats.same_type_percent << "%\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Targeted vulnerability repair over minimum edit trees"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "JSON run configuration file");
  app.add_option("--jobs", global.jobs, "worker threads (0 = hardware)");
  auto* cache_opt = app.add_option("--cache-dir", global.cache_dir,
                                   "completion cache directory");

  std::string sample_path;
  std::string candidates_path;
  std::string truths_path;
  std::string corpus_override;

  CLI::App* met_cmd =
      app.add_subcommand("met", "Locate the minimum edit tree of one sample");
  met_cmd->add_option("--sample", sample_path, "sample JSON file")->required();

  CLI::App* rules_cmd =
      app.add_subcommand("rules", "Run the inspection rules on one sample");
  rules_cmd->add_option("--sample", sample_path, "sample JSON file")
      ->required();

  CLI::App* prompt_cmd =
      app.add_subcommand("prompt", "Assemble the repair prompts of one sample");
  prompt_cmd->add_option("--sample", sample_path, "sample JSON file")
      ->required();

  CLI::App* repair_cmd = app.add_subcommand(
      "repair", "Run the full corpus pipeline: trees, prompts, model, patches");

  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Score extracted candidates against ground-truth patches");
  eval_cmd->add_option("--candidates", candidates_path,
                       "candidates JSONL (default: <output_dir>/candidates.jsonl)");
  eval_cmd->add_option("--truths", truths_path,
                       "truths JSONL (default: <output_dir>/truths.jsonl)");

  CLI::App* stats_cmd = app.add_subcommand(
      "stats", "Minimum-edit-tree type distribution over a corpus");
  stats_cmd->add_option("--corpus", corpus_override,
                        "corpus JSONL (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    global.cache_dir_set = cache_opt->count() > 0;
    spvr::RunConfig config = load_config(global);

    if (met_cmd->parsed()) return cmd_met(sample_path);
    if (rules_cmd->parsed()) return cmd_rules(sample_path, config);
    if (prompt_cmd->parsed()) return cmd_prompt(sample_path, config);
    if (repair_cmd->parsed()) {
      if (config.corpus_path.empty()) {
        throw spvr::ConfigError("repair needs a config with corpus_path");
      }
      return cmd_repair(config);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(config, candidates_path, truths_path);
    }
    if (stats_cmd->parsed()) return cmd_stats(config, corpus_override);
  } catch (const spvr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const spvr::MalformedRecord& e) {
    std::cerr << "corpus error at line " << e.line() << ": " << e.what()
              << "\n";
    return kExitConfigError;
  } catch (const spvr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}

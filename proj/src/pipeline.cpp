#include "spvr/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spvr/errors.hpp"
#include "spvr/metrics.hpp"

namespace spvr {

namespace {

nlohmann::json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(std::string("cannot open ") + what + ": " + path);
  }
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string(what) + " " + path +
                      " is not valid JSON: " + e.what());
  }
}

void reject_unknown_keys(const nlohmann::json& object,
                         const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (known.count(key) == 0) {
      throw ConfigError("unknown config key '" + key + "' in " + where);
    }
  }
}

std::string read_text_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(std::string("cannot open ") + what + ": " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::ordered_json>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write output file: " + path.string());
  }
  for (const auto& row : rows) out << row.dump() << '\n';
}

}  // namespace

std::string to_string(SkipReason reason) {
  switch (reason) {
    case SkipReason::kParseDegraded: return "parse_degraded";
    case SkipReason::kCweOutsideTop25: return "cwe_outside_top25";
    case SkipReason::kMissingLocation: return "missing_location";
    case SkipReason::kNoMinimumTree: return "no_minimum_tree";
    case SkipReason::kUnmodeledType: return "unmodeled_type";
    case SkipReason::kUnknownCwe: return "unknown_cwe";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (corpus_path.empty()) throw ConfigError("corpus_path must be set");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  model.validate();
  if (rules.similarity_threshold < 0.0 || rules.similarity_threshold > 1.0) {
    throw ConfigError("rules.similarity_threshold must be in [0, 1]");
  }
  if (rules.min_context_occurrences < 1) {
    throw ConfigError("rules.min_context_occurrences must be at least 1");
  }
  if (rules.max_findings < 1) {
    throw ConfigError("rules.max_findings must be at least 1");
  }
  if (prompt.regen_char_budget < 1) {
    throw ConfigError("prompt.regen_char_budget must be at least 1");
  }
  if (k < 1) throw ConfigError("k must be at least 1");
  if (k > model.samples_per_prompt) {
    throw ConfigError("k must not exceed model.samples_per_prompt");
  }
  if (edit_distance_threshold < 1) {
    throw ConfigError("edit_distance_threshold must be at least 1");
  }
  if (jobs < 0) throw ConfigError("jobs must not be negative");
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  nlohmann::json doc = read_json_file(path, "config file");
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

  reject_unknown_keys(doc,
                      {"corpus_path", "output_dir", "cache_dir", "model",
                       "mock_script_path", "rules", "prompt",
                       "restrict_to_top25", "k", "edit_distance_threshold",
                       "jobs"},
                      "config root");

  RunConfig config;
  try {
    config.corpus_path = doc.value("corpus_path", config.corpus_path);
    config.output_dir = doc.value("output_dir", config.output_dir.string());
    config.cache_dir = doc.value("cache_dir", config.cache_dir.string());
    if (doc.contains("mock_script_path")) {
      config.mock_script_path = doc["mock_script_path"].get<std::string>();
    }
    config.restrict_to_top25 =
        doc.value("restrict_to_top25", config.restrict_to_top25);
    config.k = doc.value("k", config.k);
    config.edit_distance_threshold =
        doc.value("edit_distance_threshold", config.edit_distance_threshold);
    config.jobs = doc.value("jobs", config.jobs);

    if (doc.contains("model")) {
      const auto& m = doc["model"];
      reject_unknown_keys(m,
                          {"endpoint_url", "model_name", "samples_per_prompt",
                           "temperature", "top_k", "top_p", "max_retries",
                           "timeout_seconds", "api_key_env", "backoff_base_ms"},
                          "model");
      config.model.endpoint_url =
          m.value("endpoint_url", config.model.endpoint_url);
      config.model.model_name = m.value("model_name", config.model.model_name);
      config.model.samples_per_prompt =
          m.value("samples_per_prompt", config.model.samples_per_prompt);
      config.model.temperature =
          m.value("temperature", config.model.temperature);
      if (m.contains("top_k")) {
        if (m["top_k"].is_null()) {
          config.model.top_k.reset();
        } else {
          config.model.top_k = m["top_k"].get<int>();
        }
      }
      if (m.contains("top_p")) {
        if (m["top_p"].is_null()) {
          config.model.top_p.reset();
        } else {
          config.model.top_p = m["top_p"].get<double>();
        }
      }
      config.model.max_retries =
          m.value("max_retries", config.model.max_retries);
      config.model.timeout_seconds =
          m.value("timeout_seconds", config.model.timeout_seconds);
      config.model.api_key_env =
          m.value("api_key_env", config.model.api_key_env);
      config.model.backoff_base_ms =
          m.value("backoff_base_ms", config.model.backoff_base_ms);
    }
    if (doc.contains("rules")) {
      const auto& r = doc["rules"];
      reject_unknown_keys(r,
                          {"similarity_threshold", "min_context_occurrences",
                           "max_findings"},
                          "rules");
      config.rules.similarity_threshold =
          r.value("similarity_threshold", config.rules.similarity_threshold);
      config.rules.min_context_occurrences = r.value(
          "min_context_occurrences", config.rules.min_context_occurrences);
      config.rules.max_findings =
          r.value("max_findings", config.rules.max_findings);
    }
    if (doc.contains("prompt")) {
      const auto& p = doc["prompt"];
      reject_unknown_keys(p, {"regen_char_budget"}, "prompt");
      config.prompt.regen_char_budget = p.value(
          "regen_char_budget", config.prompt.regen_char_budget);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") +
                      e.what());
  }

  config.validate();
  return config;
}

RepairRun run_repair(const RunConfig& config) {
  config.validate();
  const KindTaxonomy& taxonomy = KindTaxonomy::builtin();

  Corpus corpus = ingest_file(config.corpus_path);

  RepairRun run;
  run.corpus_total = static_cast<long>(corpus.samples.size());
  run.dropped_identical = corpus.dropped_identical;

  std::map<std::string, std::string> met_type_by_id;
  std::vector<PromptJob> jobs;

  for (RepairSample& sample : corpus.samples) {
    auto skip = [&](SkipReason reason, std::string detail) {
      run.skipped.push_back({sample.id, reason, std::move(detail)});
    };

    if (sample.parse_degraded) {
      skip(SkipReason::kParseDegraded, "code did not parse cleanly");
      continue;
    }
    if (!is_top25_cwe(sample.cwe_id)) {
      if (config.restrict_to_top25) {
        skip(SkipReason::kCweOutsideTop25, sample.cwe_id);
      } else {
        skip(SkipReason::kUnknownCwe, sample.cwe_id);
      }
      continue;
    }
    if (!sample.fixed.has_value() && !sample.vulnerable_lines.has_value()) {
      skip(SkipReason::kMissingLocation,
           "sample has neither fixed code nor suspected lines");
      continue;
    }

    // Rebuild the live trees (the cached summary has no node pointers).
    SyntaxTree vulnerable_tree = parse(sample.vulnerable);
    std::optional<SyntaxTree> fixed_tree;
    std::optional<MinimumEditTree> met;
    if (sample.fixed.has_value()) {
      auto [v_edits, f_edits] =
          compute_edit_spans(sample.vulnerable, *sample.fixed);
      if (v_edits.empty()) {
        skip(SkipReason::kNoMinimumTree, to_string(MetFailure::kEmptyEdits));
        continue;
      }
      fixed_tree.emplace(parse(*sample.fixed));
      MetOutcome outcome = build_met_outcome(vulnerable_tree, *fixed_tree,
                                             v_edits, f_edits, taxonomy);
      if (!outcome.met.has_value()) {
        skip(SkipReason::kNoMinimumTree, to_string(outcome.failure));
        continue;
      }
      met = std::move(outcome.met);
    } else {
      EditSpan span =
          span_for_line_range(sample.vulnerable, sample.vulnerable_lines->first,
                              sample.vulnerable_lines->second);
      met = locate_met_online(vulnerable_tree, span, taxonomy);
      if (!met.has_value()) {
        skip(SkipReason::kNoMinimumTree,
             to_string(MetFailure::kNoQualifyingNode));
        continue;
      }
    }
    if (!is_modeled_met_type(met->type)) {
      skip(SkipReason::kUnmodeledType, met->type);
      continue;
    }

    std::vector<RuleFinding> findings =
        run_rules(*met, vulnerable_tree, config.rules);
    std::vector<PromptBundle> bundles = assemble_prompts(
        sample.id, sample.cwe_id, *met, vulnerable_tree, findings,
        config.prompt);

    met_type_by_id[sample.id] = met->type;
    if (met->fixed_root != nullptr && fixed_tree.has_value()) {
      run.truths[sample.id] = to_plain_code(*met->fixed_root, *sample.fixed);
    }
    for (PromptBundle& bundle : bundles) {
      jobs.push_back({bundle.sample_id, bundle.ordinal, bundle.assembled});
      run.prompts.push_back(std::move(bundle));
    }
  }

  // Fire the prompts at the model.
  std::optional<std::string> mock_script;
  if (config.mock_script_path.has_value()) {
    mock_script = read_text_file(*config.mock_script_path, "mock script");
  }
  std::shared_ptr<ChatEndpoint> endpoint =
      make_endpoint(config.model, mock_script);
  Gateway gateway(config.model, endpoint, config.cache_dir);
  std::vector<std::vector<CompletionRecord>> batches =
      gateway.run_batch(jobs, config.jobs);

  for (const auto& batch : batches) {
    for (const CompletionRecord& record : batch) {
      RepairCandidate candidate =
          extract_patch(record.raw_text, met_type_by_id.at(record.sample_id));
      candidate.sample_id = record.sample_id;
      candidate.ordinal = record.ordinal;
      candidate.attempt = record.attempt;
      run.candidates.push_back(std::move(candidate));
      run.completions.push_back(record);
    }
  }

  // Persist the run.
  std::filesystem::create_directories(config.output_dir);
  std::vector<nlohmann::ordered_json> rows;

  rows.clear();
  for (const PromptBundle& p : run.prompts) {
    rows.push_back({{"sample_id", p.sample_id},
                    {"ordinal", p.ordinal},
                    {"cwe_part", p.cwe_part},
                    {"met_part", p.met_part},
                    {"regen_code", p.regen_code},
                    {"assembled", p.assembled}});
  }
  write_jsonl(config.output_dir / "prompts.jsonl", rows);

  rows.clear();
  for (const CompletionRecord& c : run.completions) {
    rows.push_back({{"sample_id", c.sample_id},
                    {"ordinal", c.ordinal},
                    {"attempt", c.attempt},
                    {"raw_text", c.raw_text},
                    {"latency_ms", c.latency_ms},
                    {"cached", c.cached}});
  }
  write_jsonl(config.output_dir / "completions.jsonl", rows);

  rows.clear();
  for (const RepairCandidate& c : run.candidates) {
    rows.push_back({{"sample_id", c.sample_id},
                    {"ordinal", c.ordinal},
                    {"attempt", c.attempt},
                    {"status", to_string(c.status)},
                    {"code", c.code}});
  }
  write_jsonl(config.output_dir / "candidates.jsonl", rows);

  rows.clear();
  for (const auto& [id, truth] : run.truths) {
    rows.push_back({{"sample_id", id}, {"truth", truth}});
  }
  write_jsonl(config.output_dir / "truths.jsonl", rows);

  rows.clear();
  for (const SkippedSample& s : run.skipped) {
    rows.push_back({{"sample_id", s.id},
                    {"reason", to_string(s.reason)},
                    {"detail", s.detail}});
  }
  write_jsonl(config.output_dir / "skipped.jsonl", rows);

  return run;
}

EvalReport run_eval(const std::vector<RepairCandidate>& candidates,
                    const std::map<std::string, std::string>& truths,
                    const RunConfig& config) {
  if (truths.empty()) {
    throw MissingTruth("evaluation needs at least one ground-truth patch");
  }

  std::map<std::string, std::vector<const RepairCandidate*>> by_sample;
  int max_attempt = config.k;
  for (const RepairCandidate& c : candidates) {
    if (truths.count(c.sample_id) == 0) continue;  // nothing to score against
    by_sample[c.sample_id].push_back(&c);
    max_attempt = std::max(max_attempt, c.attempt);
  }

  EvalReport report;
  report.k = config.k;

  std::vector<std::vector<bool>> outcome_matrix;
  std::vector<int> min_distances;
  double best_sum = 0.0;

  for (const auto& [sample_id, truth] : truths) {
    EvalRow row;
    row.sample_id = sample_id;
    row.attempt_success.assign(static_cast<std::size_t>(max_attempt), false);

    auto it = by_sample.find(sample_id);
    if (it != by_sample.end()) {
      for (const RepairCandidate* c : it->second) {
        if (c->status == ExtractionStatus::kFailed) continue;
        ++row.candidate_count;

        bool perfect = perfect_patch(c->code, truth);
        if (perfect && c->attempt >= 1 && c->attempt <= max_attempt) {
          row.attempt_success[static_cast<std::size_t>(c->attempt - 1)] = true;
        }
        row.any_perfect = row.any_perfect || perfect;

        CodeBleuScore score =
            codebleu(c->code, truth, Language::kC);
        row.best_codebleu = std::max(row.best_codebleu, score.total);

        try {
          int distance = tree_edit_distance(c->code, truth, Language::kC);
          if (row.min_tree_distance < 0 || distance < row.min_tree_distance) {
            row.min_tree_distance = distance;
          }
        } catch (const ParseFailure&) {
          // No tree on one side: this candidate yields no distance.
        }
      }
    }

    outcome_matrix.push_back(row.attempt_success);
    min_distances.push_back(row.min_tree_distance);
    best_sum += row.best_codebleu;
    report.rows.push_back(std::move(row));
  }

  report.evaluated = static_cast<long>(report.rows.size());
  report.pass_at_k_percent = 100.0 * pass_at_k(outcome_matrix, config.k);
  report.mean_best_codebleu_percent =
      report.evaluated > 0
          ? 100.0 * best_sum / static_cast<double>(report.evaluated)
          : 0.0;
  report.close_distance_rate_percent =
      100.0 * edit_distance_rate(min_distances, config.edit_distance_threshold);
  return report;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const EvalRow& row : report.rows) {
    rows.push_back({{"sample_id", row.sample_id},
                    {"candidate_count", row.candidate_count},
                    {"any_perfect", row.any_perfect},
                    {"best_codebleu", row.best_codebleu},
                    {"min_tree_distance", row.min_tree_distance}});
  }
  nlohmann::ordered_json doc = {
      {"evaluated", report.evaluated},
      {"k", report.k},
      {"pass_at_k_percent", report.pass_at_k_percent},
      {"mean_best_codebleu_percent", report.mean_best_codebleu_percent},
      {"close_distance_rate_percent", report.close_distance_rate_percent},
      {"rows", rows},
  };
  return doc.dump(2);
}

std::string eval_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "sample_id,candidate_count,any_perfect,best_codebleu,"
         "min_tree_distance\n";
  for (const EvalRow& row : report.rows) {
    out << row.sample_id << ',' << row.candidate_count << ','
        << (row.any_perfect ? 1 : 0) << ',' << row.best_codebleu << ','
        << row.min_tree_distance << '\n';
  }
  return out.str();
}

}  // namespace spvr

#pragma once

#include <string>

namespace spvr {

// How a candidate patch was recovered from a raw model reply.
enum class ExtractionStatus { kExact, kFenceStripped, kFailed };

std::string to_string(ExtractionStatus status);

// A candidate patch cut out of a model reply.
struct RepairCandidate {
  std::string sample_id;
  int ordinal = 1;
  int attempt = 1;
  ExtractionStatus status = ExtractionStatus::kFailed;
  std::string code;  // empty when status == kFailed
};

// Pulls the first node of kind `met_type` out of `raw_reply`: first by
// parsing the reply text directly (kExact), then by re-parsing each fenced
// code block in order (kFenceStripped). Nothing found means kFailed with
// empty code. Identification fields are left for the caller to fill in.
RepairCandidate extract_patch(const std::string& raw_reply,
                              const std::string& met_type);

}  // namespace spvr

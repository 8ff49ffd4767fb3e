#pragma once

#include <string>

namespace spvr::data {

// JSON texts of the versioned data files under data/, embedded at build time
// so binaries are self-contained. The files on disk stay the source of truth.
const std::string& kind_taxonomy_json();
const std::string& cwe_top25_json();
const std::string& instruction_templates_json();
const std::string& cpp_keywords_json();

}  // namespace spvr::data

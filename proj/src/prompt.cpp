#include "spvr/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "spvr/data.hpp"
#include "spvr/errors.hpp"
#include "spvr/source.hpp"
#include "templates.hpp"

namespace spvr {

namespace {

const std::map<std::string, std::string>& top25_by_id() {
  static const std::map<std::string, std::string> table = [] {
    std::map<std::string, std::string> out;
    nlohmann::json doc = nlohmann::json::parse(data::cwe_top25_json());
    for (const auto& entry : doc.at("entries")) {
      out[entry.at("id").get<std::string>()] =
          entry.at("name").get<std::string>();
    }
    return out;
  }();
  return table;
}

std::string strip_ws(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

// Does this statement mention any of the variables worth keeping?
bool mentions_keep_var(const SyntaxNode& node, const SourceUnit& unit,
                       const std::set<std::string>& keep) {
  if (keep.empty()) return false;
  bool hit = false;
  walk(node, [&](const SyntaxNode& n) {
    if (hit) return;
    if (n.kind == "identifier" || n.kind == "field_identifier") {
      hit = keep.count(to_plain_code(n, unit)) > 0;
    } else if (n.kind == "field_expression") {
      hit = keep.count(strip_ws(to_plain_code(n, unit))) > 0;
    }
  });
  return hit;
}

bool contains_string_literal(const SyntaxNode& node) {
  return find_first(node, [](const SyntaxNode& n) {
           return n.kind == "string_literal" ||
                  n.kind == "concatenated_string";
         }) != nullptr;
}

// Body of an if/for: the statement child after the header.
const SyntaxNode* loop_or_branch_body(const SyntaxNode& node) {
  if (node.kind == "if_statement") {
    bool saw_condition = false;
    for (const SyntaxNode& c : node.children) {
      if (c.kind == "parenthesized_expression") {
        saw_condition = true;
        continue;
      }
      if (saw_condition && c.named && c.kind != "else_clause") return &c;
    }
    return nullptr;
  }
  // for_statement: the body is the trailing statement after ")".
  for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
    if (it->named) return &*it;
  }
  return nullptr;
}

const SyntaxNode* enclosing_function(const SyntaxTree& tree,
                                     const SyntaxNode& target) {
  const SyntaxNode* found = nullptr;
  for (const SyntaxNode* n : path_to(tree.root(), target)) {
    if (n->kind == "function_definition") found = n;
  }
  return found;
}

}  // namespace

bool is_top25_cwe(const std::string& cwe_id) {
  return top25_by_id().count(cwe_id) > 0;
}

std::string cwe_name(const std::string& cwe_id) {
  auto it = top25_by_id().find(cwe_id);
  if (it == top25_by_id().end()) {
    throw UnknownCwe("weakness id not in the supported top-25 table: " +
                     cwe_id);
  }
  return it->second;
}

std::string cwe_info(const std::string& cwe_id, const std::string& met_type) {
  if (!is_modeled_met_type(met_type)) {
    throw UnsupportedMetType("no prompt support for tree type " + met_type);
  }
  return internal::fill_template(
      internal::cwe_sentence_template(),
      {{"met_type", met_type}, {"description", cwe_name(cwe_id)}});
}

std::string regenerate_code(const MinimumEditTree& met, const SyntaxTree& tree,
                            const std::vector<std::string>& keep_vars,
                            const PromptOptions& options) {
  const SourceUnit& unit = tree.unit();
  const SyntaxNode& v = *met.vulnerable_root;
  std::vector<std::string> lines = split_lines(unit.text);
  auto line_at = [&](int number) -> const std::string& {
    return lines[static_cast<std::size_t>(number - 1)];
  };

  std::vector<int> selected;
  auto select_range = [&](int from, int to) {
    from = std::max(from, 1);
    to = std::min(to, static_cast<int>(lines.size()));
    for (int n = from; n <= to; ++n) {
      if (selected.empty() || selected.back() < n) selected.push_back(n);
    }
  };

  if (met.type == "if_statement" || met.type == "for_statement") {
    const SyntaxNode* body = loop_or_branch_body(v);
    std::set<std::string> keep(keep_vars.begin(), keep_vars.end());
    auto keeps = [&](const SyntaxNode& stmt) {
      return mentions_keep_var(stmt, unit, keep) ||
             contains_string_literal(stmt) || stmt.kind == "return_statement";
    };
    if (body != nullptr && body->kind == "compound_statement") {
      select_range(v.start_line, body->start_line);  // header through "{"
      for (const SyntaxNode& stmt : body->children) {
        if (!stmt.named) continue;
        if (keeps(stmt)) select_range(stmt.start_line, stmt.end_line);
      }
      select_range(body->end_line, body->end_line);  // closing "}"
    } else {
      int header_end = v.start_line;
      for (const SyntaxNode& c : v.children) {
        if (c.kind == "parenthesized_expression") header_end = c.end_line;
      }
      select_range(v.start_line, header_end);
      if (body != nullptr && keeps(*body)) {
        select_range(body->start_line, body->end_line);
      }
    }
  } else if (met.type == "function_definition") {
    select_range(v.start_line, v.end_line);
  } else {
    // assignment/call/declaration: the tree's line through the end of the
    // function it sits in (whole file when it is not inside one).
    const SyntaxNode* fn = enclosing_function(tree, v);
    int last = fn != nullptr ? fn->end_line : static_cast<int>(lines.size());
    select_range(v.start_line, std::max(last, static_cast<int>(v.end_line)));
  }

  if (selected.empty()) select_range(v.start_line, v.start_line);

  // Emit in order, trimming from the end to stay inside the budget; the
  // first selected line always survives.
  std::string out;
  std::size_t used = 0;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const std::string& line = line_at(selected[i]);
    std::size_t cost = line.size() + (i > 0 ? 1 : 0);
    if (i > 0 && used + cost > options.regen_char_budget) break;
    if (i > 0) out += '\n';
    out += line;
    used += cost;
  }
  return out;
}

std::vector<PromptBundle> assemble_prompts(const std::string& sample_id,
                                           const std::string& cwe_id,
                                           const MinimumEditTree& met,
                                           const SyntaxTree& tree,
                                           const std::vector<RuleFinding>& findings,
                                           const PromptOptions& options) {
  std::string cwe_part = cwe_info(cwe_id, met.type);
  std::vector<std::string> keep = keep_variables(met, tree, findings);
  std::string regen = regenerate_code(met, tree, keep, options);

  std::vector<std::string> met_parts;
  for (const RuleFinding& f : findings) met_parts.push_back(f.instruction);
  if (met_parts.empty()) {
    met_parts.push_back(internal::fill_template(internal::fallback_template(),
                                                {{"met_type", met.type}}));
  }

  std::vector<PromptBundle> bundles;
  for (std::size_t i = 0; i < met_parts.size(); ++i) {
    PromptBundle b;
    b.sample_id = sample_id;
    b.ordinal = static_cast<int>(i) + 1;
    b.cwe_part = cwe_part;
    b.met_part = met_parts[i];
    b.regen_code = regen;
    b.assembled = internal::fill_template(internal::prompt_layout_template(),
                                          {{"cwe_part", b.cwe_part},
                                           {"met_part", b.met_part},
                                           {"regen_code", b.regen_code},
                                           {"met_type", met.type}});
    bundles.push_back(std::move(b));
  }
  return bundles;
}

}  // namespace spvr

#include "spvr/rules.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <set>

#include "spvr/errors.hpp"
#include "templates.hpp"

namespace spvr {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  return out;
}

RuleFinding make_finding(CheckId check, const std::string& met_type,
                         std::vector<std::string> symbols) {
  RuleFinding f;
  f.check = check;
  f.referenced_symbols = std::move(symbols);
  f.instruction = internal::fill_template(
      internal::check_template(to_string(check), !f.referenced_symbols.empty()),
      {{"symbols", join(f.referenced_symbols)}, {"met_type", met_type}});
  return f;
}

void push_unique(std::vector<std::string>& list, const std::string& value) {
  if (std::find(list.begin(), list.end(), value) == list.end()) {
    list.push_back(value);
  }
}

// --- tree queries -------------------------------------------------------------

// Pre-order walk that skips one subtree and reports each node's parent.
void walk_with_parent(const SyntaxNode& node, const SyntaxNode* parent,
                      const SyntaxNode* skip,
                      const std::function<void(const SyntaxNode&,
                                               const SyntaxNode*)>& fn) {
  if (&node == skip) return;
  fn(node, parent);
  for (const SyntaxNode& c : node.children) {
    walk_with_parent(c, &node, skip, fn);
  }
}

bool is_callee_position(const SyntaxNode& node, const SyntaxNode* parent) {
  return parent != nullptr && parent->kind == "call_expression" &&
         !parent->children.empty() && &parent->children[0] == &node;
}

// An `a->b.c` style access chain rooted at a plain identifier.
struct MemberPath {
  std::string verbatim;
  std::string norm;  // verbatim without whitespace
  std::string base;
  std::vector<std::string> fields;
};

std::string strip_spaces(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

std::optional<MemberPath> resolve_member_path(const SyntaxNode& node,
                                              const SourceUnit& unit) {
  if (node.kind != "field_expression" || node.children.size() < 3) {
    return std::nullopt;
  }
  const SyntaxNode& object = node.children[0];
  MemberPath path;
  if (object.kind == "identifier") {
    path.base = to_plain_code(object, unit);
  } else if (auto inner = resolve_member_path(object, unit)) {
    path = *std::move(inner);
  } else {
    return std::nullopt;
  }
  path.fields.push_back(to_plain_code(node.children.back(), unit));
  path.verbatim = to_plain_code(node, unit);
  path.norm = strip_spaces(path.verbatim);
  return path;
}

// Maximal member paths in a subtree (skipping one nested subtree).
void collect_member_paths(const SyntaxNode& node, const SyntaxNode* skip,
                          const SourceUnit& unit,
                          std::vector<MemberPath>& out) {
  if (&node == skip) return;
  if (node.kind == "field_expression") {
    if (auto path = resolve_member_path(node, unit)) {
      out.push_back(*std::move(path));
      return;  // sub-paths of a maximal path are not separate entries
    }
  }
  for (const SyntaxNode& c : node.children) {
    collect_member_paths(c, skip, unit, out);
  }
}

// Plain variable-like identifier occurrences: kind "identifier", not in
// callee position. Declarator names count; type and field names have other
// kinds and are naturally excluded.
std::vector<std::string> collect_plain_identifiers(const SyntaxNode& root,
                                                   const SyntaxNode* skip,
                                                   const SourceUnit& unit) {
  std::vector<std::string> out;
  walk_with_parent(root, nullptr, skip,
                   [&](const SyntaxNode& n, const SyntaxNode* parent) {
                     if (n.kind == "identifier" &&
                         !is_callee_position(n, parent)) {
                       out.push_back(to_plain_code(n, unit));
                     }
                   });
  return out;
}

// The function body the tree sits in (for context analysis), or the whole
// tree when the tree is not inside a function.
const SyntaxNode* enclosing_context(const SyntaxTree& tree,
                                    const MinimumEditTree& met) {
  std::vector<const SyntaxNode*> path =
      path_to(tree.root(), *met.vulnerable_root);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (*it == met.vulnerable_root) continue;
    if ((*it)->kind == "function_definition") {
      for (const SyntaxNode& c : (*it)->children) {
        if (c.kind == "compound_statement") return &c;
      }
    }
  }
  return &tree.root();
}

const SyntaxNode* if_condition(const SyntaxNode& if_node) {
  for (const SyntaxNode& c : if_node.children) {
    if (c.kind == "parenthesized_expression") return &c;
  }
  return nullptr;
}

// The middle clause of a for header: the named node between the two `;`
// tokens (or between an init declaration and the single remaining `;`).
const SyntaxNode* for_condition(const SyntaxNode& for_node) {
  std::vector<std::size_t> semis;
  std::size_t decl = 0;
  bool has_decl = false;
  const auto& kids = for_node.children;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (!kids[i].named && kids[i].kind == ";") semis.push_back(i);
    if (kids[i].kind == "declaration") {
      decl = i;
      has_decl = true;
    }
  }
  std::size_t lo, hi;
  if (semis.size() >= 2) {
    lo = semis[0];
    hi = semis[1];
  } else if (semis.size() == 1 && has_decl) {
    lo = decl;
    hi = semis[0];
  } else {
    return nullptr;
  }
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (kids[i].named) return &kids[i];
  }
  return nullptr;
}

const SyntaxNode* condition_of(const MinimumEditTree& met) {
  if (met.type == "if_statement") return if_condition(*met.vulnerable_root);
  if (met.type == "for_statement") return for_condition(*met.vulnerable_root);
  throw UnsupportedMetType("check_condition applies to if/for trees, not " +
                           met.type);
}

// Rightmost name component of a callee expression: f, ns::f, obj->f.
std::string callee_last_component(const SyntaxNode& callee,
                                  const SourceUnit& unit) {
  if (callee.kind == "identifier" || callee.kind == "field_identifier") {
    return to_plain_code(callee, unit);
  }
  if (callee.kind == "qualified_identifier" || callee.kind == "field_expression") {
    return callee.children.empty()
               ? std::string()
               : callee_last_component(callee.children.back(), unit);
  }
  return std::string();
}

struct CallSite {
  std::string verbatim;   // callee text as written
  std::string last_name;  // rightmost component
};

std::vector<CallSite> collect_calls(const SyntaxNode& root,
                                    const SourceUnit& unit) {
  std::vector<CallSite> out;
  walk(root, [&](const SyntaxNode& n) {
    if (n.kind == "call_expression" && !n.children.empty()) {
      out.push_back({to_plain_code(n.children[0], unit),
                     callee_last_component(n.children[0], unit)});
    }
  });
  return out;
}

bool contains_kind(const SyntaxNode& root, const std::string& kind) {
  return find_first(root, [&](const SyntaxNode& n) { return n.kind == kind; }) !=
         nullptr;
}

std::string declarator_name(const SyntaxNode& declarator,
                            const SourceUnit& unit) {
  const SyntaxNode* ident = find_first(declarator, [](const SyntaxNode& n) {
    return n.kind == "identifier" || n.kind == "field_identifier";
  });
  return ident != nullptr ? to_plain_code(*ident, unit) : std::string();
}

bool is_declarator_kind(const std::string& kind) {
  return kind == "identifier" || kind == "pointer_declarator" ||
         kind == "array_declarator" || kind == "function_declarator" ||
         kind == "reference_declarator" || kind == "parenthesized_declarator" ||
         kind == "init_declarator";
}

bool parses_to_zero_or_one(const std::string& spelling) {
  std::string body = spelling;
  while (!body.empty() && std::strchr("uUlLfF", body.back()) != nullptr) {
    body.pop_back();
  }
  if (body.empty()) return false;
  errno = 0;
  char* end = nullptr;
  double value;
  if (body.size() > 1 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    value = static_cast<double>(std::strtoull(body.c_str() + 2, &end, 16));
  } else if (body.find('.') != std::string::npos ||
             body.find('e') != std::string::npos ||
             body.find('E') != std::string::npos) {
    value = std::strtod(body.c_str(), &end);
  } else if (body.size() > 1 && body[0] == '0') {
    value = static_cast<double>(std::strtoull(body.c_str() + 1, &end, 8));
  } else {
    value = static_cast<double>(std::strtoull(body.c_str(), &end, 10));
  }
  if (end == nullptr || *end != '\0') return false;
  return value == 0.0 || value == 1.0;
}

// PossibleVariableUse symbols, reused by the extra checks that suggest
// incorporating context variables.
std::vector<std::string> pvu_symbols(const MinimumEditTree& met,
                                     const SyntaxTree& tree,
                                     const RuleConfig& config);

}  // namespace

std::string to_string(CheckId id) {
  switch (id) {
    case CheckId::kPossibleVariableUse: return "PossibleVariableUse";
    case CheckId::kNumberLiteral: return "NumberLiteral";
    case CheckId::kFunctionCall: return "FunctionCall";
    case CheckId::kTypeCast: return "TypeCast";
    case CheckId::kTypeCheck: return "TypeCheck";
    case CheckId::kCondition: return "Condition";
    case CheckId::kMinMax: return "MinMax";
    case CheckId::kTernary: return "Ternary";
    case CheckId::kBufferWords: return "BufferWords";
    case CheckId::kScopeResolution: return "ScopeResolution";
    case CheckId::kInitialization: return "Initialization";
    case CheckId::kPointer: return "Pointer";
    case CheckId::kStaticMethod: return "StaticMethod";
  }
  return "Unknown";
}

std::vector<CheckId> applicable_checks(const std::string& met_type) {
  using C = CheckId;
  if (met_type == "if_statement") {
    return {C::kPossibleVariableUse, C::kNumberLiteral, C::kFunctionCall,
            C::kCondition};
  }
  if (met_type == "assignment_expression") {
    return {C::kPossibleVariableUse, C::kNumberLiteral, C::kFunctionCall,
            C::kTypeCast, C::kMinMax, C::kTernary};
  }
  if (met_type == "call_expression") {
    return {C::kBufferWords, C::kScopeResolution};
  }
  if (met_type == "declaration") {
    return {C::kNumberLiteral, C::kFunctionCall, C::kTypeCast, C::kTypeCheck,
            C::kInitialization, C::kPointer};
  }
  if (met_type == "for_statement") {
    return {C::kPossibleVariableUse, C::kNumberLiteral, C::kCondition};
  }
  if (met_type == "function_definition") {
    return {C::kTypeCheck, C::kStaticMethod};
  }
  throw UnsupportedMetType("no inspection rules for tree type " + met_type);
}

double normalized_similarity(const std::string& a, const std::string& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 && m == 0) return 1.0;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double distance = static_cast<double>(prev[m]);
  return 1.0 - distance / static_cast<double>(std::max(n, m));
}

std::optional<RuleFinding> possible_variable_use(const MinimumEditTree& met,
                                                 const SyntaxTree& tree,
                                                 const RuleConfig& config) {
  std::vector<std::string> symbols = pvu_symbols(met, tree, config);
  if (symbols.empty()) return std::nullopt;
  return make_finding(CheckId::kPossibleVariableUse, met.type,
                      std::move(symbols));
}

namespace {

std::vector<std::string> pvu_symbols(const MinimumEditTree& met,
                                     const SyntaxTree& tree,
                                     const RuleConfig& config) {
  const SourceUnit& unit = tree.unit();
  const SyntaxNode& v = *met.vulnerable_root;
  const SyntaxNode* context = enclosing_context(tree, met);

  // What the tree itself mentions.
  std::set<std::string> met_idents;
  for (const std::string& id : collect_plain_identifiers(v, nullptr, unit)) {
    met_idents.insert(id);
  }
  std::vector<MemberPath> met_paths;
  collect_member_paths(v, nullptr, unit, met_paths);
  std::set<std::string> met_path_norms;
  for (const MemberPath& p : met_paths) met_path_norms.insert(p.norm);

  // What the surrounding code mentions (tree subtree excluded).
  std::vector<std::string> ctx_idents =
      collect_plain_identifiers(*context, &v, unit);
  std::map<std::string, int> ctx_counts;
  std::vector<std::string> ctx_order;
  for (const std::string& id : ctx_idents) {
    if (ctx_counts[id]++ == 0) ctx_order.push_back(id);
  }
  std::vector<MemberPath> ctx_paths;
  collect_member_paths(*context, &v, unit, ctx_paths);

  std::vector<std::string> symbols;

  // (a) member paths missing from the tree whose parent recurs around it.
  struct PathStat {
    std::string verbatim;
    std::string base;
    int count = 0;
    std::size_t first = 0;
  };
  std::map<std::string, PathStat> by_norm;
  for (std::size_t i = 0; i < ctx_paths.size(); ++i) {
    const MemberPath& p = ctx_paths[i];
    auto [it, fresh] = by_norm.try_emplace(p.norm);
    if (fresh) {
      it->second.verbatim = p.verbatim;
      it->second.base = p.base;
      it->second.first = i;
    }
    ++it->second.count;
  }
  std::vector<const PathStat*> path_candidates;
  for (const auto& [norm, stat] : by_norm) {
    if (met_path_norms.count(norm) > 0) continue;
    auto base_count = ctx_counts.find(stat.base);
    if (base_count == ctx_counts.end() ||
        base_count->second < config.min_context_occurrences) {
      continue;
    }
    path_candidates.push_back(&stat);
  }
  std::sort(path_candidates.begin(), path_candidates.end(),
            [](const PathStat* a, const PathStat* b) {
              if (a->count != b->count) return a->count > b->count;
              return a->first < b->first;
            });
  for (const PathStat* stat : path_candidates) {
    push_unique(symbols, stat->verbatim);
  }

  // (b) recurring context identifiers that look like near-misses of a tree
  // identifier.
  for (const std::string& id : ctx_order) {
    if (ctx_counts[id] < config.min_context_occurrences) continue;
    if (met_idents.count(id) > 0) continue;
    bool similar = std::any_of(
        met_idents.begin(), met_idents.end(), [&](const std::string& m) {
          return normalized_similarity(id, m) > config.similarity_threshold;
        });
    if (similar) push_unique(symbols, id);
  }
  return symbols;
}

}  // namespace

std::optional<RuleFinding> check_number_literal(const MinimumEditTree& met,
                                                const SyntaxTree& tree) {
  std::vector<std::string> symbols;
  walk(*met.vulnerable_root, [&](const SyntaxNode& n) {
    if (n.kind != "number_literal") return;
    std::string spelling = to_plain_code(n, tree.unit());
    if (!parses_to_zero_or_one(spelling)) push_unique(symbols, spelling);
  });
  if (symbols.empty()) return std::nullopt;
  return make_finding(CheckId::kNumberLiteral, met.type, std::move(symbols));
}

std::optional<RuleFinding> check_function_call(const MinimumEditTree& met,
                                               const SyntaxTree& tree) {
  std::vector<std::string> symbols;
  for (const CallSite& call : collect_calls(*met.vulnerable_root, tree.unit())) {
    push_unique(symbols, call.verbatim);
  }
  if (symbols.empty()) return std::nullopt;
  return make_finding(CheckId::kFunctionCall, met.type, std::move(symbols));
}

std::optional<RuleFinding> check_type_cast(const MinimumEditTree& met,
                                           const SyntaxTree& tree) {
  std::vector<std::string> symbols;
  walk(*met.vulnerable_root, [&](const SyntaxNode& n) {
    if (n.kind != "cast_expression") return;
    for (const SyntaxNode& c : n.children) {
      if (c.kind == "type_descriptor") {
        push_unique(symbols, to_plain_code(c, tree.unit()));
      }
    }
  });
  if (symbols.empty()) return std::nullopt;
  return make_finding(CheckId::kTypeCast, met.type, std::move(symbols));
}

namespace {

const std::set<std::string>& signed_trigger_types() {
  static const std::set<std::string> types = {"int", "long", "double"};
  return types;
}

void scan_signed_types(const SyntaxNode& node, const SourceUnit& unit,
                       std::vector<std::string>& out) {
  if (node.kind == "sized_type_specifier") {
    bool is_unsigned = false;
    bool triggered = false;
    for (const SyntaxNode& c : node.children) {
      std::string word = to_plain_code(c, unit);
      if (word == "unsigned") is_unsigned = true;
      if (signed_trigger_types().count(word) > 0) triggered = true;
    }
    if (!is_unsigned && triggered) push_unique(out, to_plain_code(node, unit));
    return;
  }
  if (node.kind == "primitive_type") {
    std::string word = to_plain_code(node, unit);
    if (signed_trigger_types().count(word) > 0) push_unique(out, word);
    return;
  }
  for (const SyntaxNode& c : node.children) scan_signed_types(c, unit, out);
}

}  // namespace

std::optional<RuleFinding> check_type(const MinimumEditTree& met,
                                      const SyntaxTree& tree) {
  std::vector<std::string> symbols;
  scan_signed_types(*met.vulnerable_root, tree.unit(), symbols);
  if (symbols.empty()) return std::nullopt;
  return make_finding(CheckId::kTypeCheck, met.type, std::move(symbols));
}

std::optional<RuleFinding> check_condition(const MinimumEditTree& met,
                                           const SyntaxTree& tree) {
  const SyntaxNode* condition = condition_of(met);
  if (condition == nullptr) return std::nullopt;
  static const std::set<std::string> relational = {"<", "<=", ">", ">="};
  std::vector<std::string> symbols;
  walk(*condition, [&](const SyntaxNode& n) {
    if (n.kind != "binary_expression" || n.children.size() < 3) return;
    const SyntaxNode& op = n.children[1];
    if (!op.named && relational.count(op.kind) > 0) {
      push_unique(symbols, op.kind);
    }
  });
  if (symbols.empty()) return std::nullopt;
  return make_finding(CheckId::kCondition, met.type, std::move(symbols));
}

namespace {

std::optional<RuleFinding> run_check(CheckId id, const MinimumEditTree& met,
                                     const SyntaxTree& tree,
                                     const RuleConfig& config) {
  const SourceUnit& unit = tree.unit();
  const SyntaxNode& v = *met.vulnerable_root;
  switch (id) {
    case CheckId::kPossibleVariableUse:
      return possible_variable_use(met, tree, config);
    case CheckId::kNumberLiteral:
      return check_number_literal(met, tree);
    case CheckId::kFunctionCall:
      return check_function_call(met, tree);
    case CheckId::kTypeCast:
      return check_type_cast(met, tree);
    case CheckId::kTypeCheck:
      return check_type(met, tree);
    case CheckId::kCondition:
      return check_condition(met, tree);
    case CheckId::kMinMax: {
      static const std::set<std::string> names = {"min", "max", "MIN", "MAX"};
      for (const CallSite& call : collect_calls(v, unit)) {
        if (names.count(call.last_name) > 0) return std::nullopt;
      }
      return make_finding(CheckId::kMinMax, met.type,
                          pvu_symbols(met, tree, config));
    }
    case CheckId::kTernary: {
      if (contains_kind(v, "conditional_expression")) return std::nullopt;
      return make_finding(CheckId::kTernary, met.type,
                          pvu_symbols(met, tree, config));
    }
    case CheckId::kBufferWords: {
      static const std::vector<std::string> words = {"mem", "str", "cpy", "buf"};
      std::vector<std::string> symbols;
      for (const CallSite& call : collect_calls(v, unit)) {
        std::string lower = call.last_name;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        bool hit = std::any_of(words.begin(), words.end(),
                               [&](const std::string& w) {
                                 return lower.find(w) != std::string::npos;
                               });
        if (hit) push_unique(symbols, call.verbatim);
      }
      if (symbols.empty()) return std::nullopt;
      return make_finding(CheckId::kBufferWords, met.type, std::move(symbols));
    }
    case CheckId::kScopeResolution: {
      bool qualified =
          contains_kind(v, "qualified_identifier") ||
          find_first(v, [](const SyntaxNode& n) {
            return !n.named && n.kind == "::";
          }) != nullptr;
      if (qualified) return std::nullopt;
      return make_finding(CheckId::kScopeResolution, met.type,
                          pvu_symbols(met, tree, config));
    }
    case CheckId::kInitialization: {
      std::vector<std::string> symbols;
      for (const SyntaxNode& c : v.children) {
        if (!is_declarator_kind(c.kind) || c.kind == "init_declarator") continue;
        std::string name = declarator_name(c, unit);
        if (!name.empty()) push_unique(symbols, name);
      }
      if (symbols.empty()) return std::nullopt;
      return make_finding(CheckId::kInitialization, met.type,
                          std::move(symbols));
    }
    case CheckId::kPointer: {
      if (contains_kind(v, "pointer_declarator") ||
          contains_kind(v, "abstract_pointer_declarator")) {
        return std::nullopt;
      }
      std::vector<std::string> symbols;
      for (const SyntaxNode& c : v.children) {
        if (!is_declarator_kind(c.kind)) continue;
        std::string name = declarator_name(c, unit);
        if (!name.empty()) push_unique(symbols, name);
      }
      return make_finding(CheckId::kPointer, met.type, std::move(symbols));
    }
    case CheckId::kStaticMethod: {
      for (const SyntaxNode& c : v.children) {
        if (c.kind == "storage_class_specifier" && !c.children.empty() &&
            c.children[0].kind == "static") {
          return std::nullopt;
        }
      }
      std::vector<std::string> symbols;
      const SyntaxNode* declarator =
          find_first(v, [](const SyntaxNode& n) {
            return n.kind == "function_declarator";
          });
      if (declarator != nullptr) {
        std::string name = declarator_name(*declarator, unit);
        if (!name.empty()) symbols.push_back(name);
      }
      return make_finding(CheckId::kStaticMethod, met.type, std::move(symbols));
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<RuleFinding> run_extra_checks(const MinimumEditTree& met,
                                          const SyntaxTree& tree,
                                          const RuleConfig& config) {
  static const std::set<CheckId> extras = {
      CheckId::kMinMax,       CheckId::kTernary, CheckId::kBufferWords,
      CheckId::kScopeResolution, CheckId::kInitialization, CheckId::kPointer,
      CheckId::kStaticMethod};
  std::vector<RuleFinding> out;
  for (CheckId id : applicable_checks(met.type)) {
    if (extras.count(id) == 0) continue;
    if (auto finding = run_check(id, met, tree, config)) {
      out.push_back(*std::move(finding));
    }
  }
  return out;
}

std::vector<RuleFinding> run_rules(const MinimumEditTree& met,
                                   const SyntaxTree& tree,
                                   const RuleConfig& config) {
  std::vector<RuleFinding> out;
  for (CheckId id : applicable_checks(met.type)) {
    if (static_cast<int>(out.size()) >= config.max_findings) break;
    if (auto finding = run_check(id, met, tree, config)) {
      finding->priority = static_cast<int>(out.size()) + 1;
      out.push_back(*std::move(finding));
    }
  }
  return out;
}

std::vector<std::string> keep_variables(const MinimumEditTree& met,
                                        const SyntaxTree& tree,
                                        const std::vector<RuleFinding>& findings) {
  std::vector<std::string> out;
  const SourceUnit& unit = tree.unit();
  const SyntaxNode* condition = nullptr;
  if (met.type == "if_statement") {
    condition = if_condition(*met.vulnerable_root);
  } else if (met.type == "for_statement") {
    condition = for_condition(*met.vulnerable_root);
  }
  if (condition != nullptr) {
    for (const std::string& id :
         collect_plain_identifiers(*condition, nullptr, unit)) {
      push_unique(out, id);
    }
    std::vector<MemberPath> paths;
    collect_member_paths(*condition, nullptr, unit, paths);
    for (const MemberPath& p : paths) {
      push_unique(out, p.norm);
      push_unique(out, p.base);
      for (const std::string& f : p.fields) push_unique(out, f);
    }
  }
  for (const RuleFinding& f : findings) {
    if (f.check != CheckId::kPossibleVariableUse) continue;
    for (const std::string& symbol : f.referenced_symbols) {
      push_unique(out, strip_spaces(symbol));
      std::string part;
      for (std::size_t i = 0; i < symbol.size(); ++i) {
        char c = symbol[i];
        if (c == '.' || (c == '-' && i + 1 < symbol.size() &&
                         symbol[i + 1] == '>')) {
          if (!part.empty()) push_unique(out, strip_spaces(part));
          part.clear();
          if (c == '-') ++i;
        } else {
          part += c;
        }
      }
      if (!part.empty()) push_unique(out, strip_spaces(part));
    }
  }
  return out;
}

}  // namespace spvr

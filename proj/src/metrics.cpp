#include "spvr/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>

#include "spvr/errors.hpp"
#include "spvr/lexer.hpp"

namespace spvr {

namespace {

std::vector<std::string> token_texts(const std::string& text) {
  return code_tokens(text);
}

using Gram = std::vector<std::string>;

std::map<Gram, int> count_grams(const std::vector<std::string>& tokens, int n) {
  std::map<Gram, int> out;
  if (static_cast<int>(tokens.size()) < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    Gram g(tokens.begin() + i, tokens.begin() + i + n);
    ++out[g];
  }
  return out;
}

double brevity_penalty(std::size_t candidate_len, std::size_t reference_len) {
  if (candidate_len == 0) return 0.0;
  if (candidate_len > reference_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(reference_len) /
                            static_cast<double>(candidate_len));
}

// Smoothed modified n-gram precision product for n = 1..4. The weight
// function scales each gram's contribution (plain BLEU uses 1 for all).
double bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::string>& reference,
             const std::function<double(const Gram&)>& gram_weight) {
  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    std::map<Gram, int> cand = count_grams(candidate, n);
    std::map<Gram, int> ref = count_grams(reference, n);
    double matched = 0.0;
    double total = 0.0;
    for (const auto& [gram, count] : cand) {
      double w = gram_weight(gram);
      auto it = ref.find(gram);
      int clip = it == ref.end() ? 0 : std::min(count, it->second);
      matched += w * clip;
      total += w * count;
    }
    log_sum += 0.25 * std::log((matched + 1.0) / (total + 1.0));
  }
  return brevity_penalty(candidate.size(), reference.size()) *
         std::exp(log_sum);
}

// --- syntax component ---------------------------------------------------------

// Canonical signature of a subtree; leaves carry their token text so that
// disjoint programs share no signature.
void subtree_signatures(const SyntaxNode& node, const SourceUnit& unit,
                        std::map<std::string, int>& out, std::string& sig) {
  if (node.is_leaf()) {
    sig = node.kind + ":" + to_plain_code(node, unit);
    ++out[sig];
    return;
  }
  sig = "(" + node.kind;
  for (const SyntaxNode& c : node.children) {
    std::string child_sig;
    subtree_signatures(c, unit, out, child_sig);
    sig += " " + child_sig;
  }
  sig += ")";
  ++out[sig];
}

std::map<std::string, int> signature_counts(const SyntaxNode& root,
                                            const SourceUnit& unit) {
  std::map<std::string, int> out;
  std::string sig;
  subtree_signatures(root, unit, out, sig);
  return out;
}

double syntax_match(const SyntaxTree& candidate, const SyntaxTree& reference) {
  std::map<std::string, int> cand =
      signature_counts(candidate.root(), candidate.unit());
  std::map<std::string, int> ref =
      signature_counts(reference.root(), reference.unit());
  long long total = 0;
  long long matched = 0;
  for (const auto& [sig, count] : ref) {
    total += count;
    auto it = cand.find(sig);
    if (it != cand.end()) matched += std::min(count, it->second);
  }
  if (total == 0) return 1.0;
  return static_cast<double>(matched) / static_cast<double>(total);
}

// --- dataflow component -------------------------------------------------------

struct DataflowState {
  const SourceUnit* unit = nullptr;
  std::map<std::string, int> defs;  // definitions seen so far, per name
  std::map<std::string, int> uses;  // uses seen so far, per name
  std::vector<DataflowEdge> edges;

  void define(const std::string& name) { ++defs[name]; }

  void use(const std::string& name) {
    int use_ordinal = uses[name]++;
    auto it = defs.find(name);
    if (it == defs.end() || it->second == 0) return;  // unbound read
    edges.push_back({name, it->second - 1, use_ordinal});
  }
};

bool is_plain_identifier(const SyntaxNode& node) {
  return node.kind == "identifier";
}

void dataflow_visit(const SyntaxNode& node, DataflowState& state);

void visit_children(const SyntaxNode& node, DataflowState& state) {
  for (const SyntaxNode& c : node.children) dataflow_visit(c, state);
}

// Name defined by a declarator, if any (descends through pointers/arrays).
const SyntaxNode* declared_identifier(const SyntaxNode& declarator) {
  return find_first(declarator, is_plain_identifier);
}

void dataflow_visit(const SyntaxNode& node, DataflowState& state) {
  const std::string& kind = node.kind;
  if (kind == "identifier") {
    state.use(to_plain_code(node, *state.unit));
    return;
  }
  if (kind == "field_expression") {
    // Only the object flows; the member name is not a variable.
    if (!node.children.empty()) dataflow_visit(node.children[0], state);
    return;
  }
  if (kind == "call_expression") {
    // A plain-identifier callee is a function name, not a data value.
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      if (i == 0 && is_plain_identifier(node.children[i])) continue;
      dataflow_visit(node.children[i], state);
    }
    return;
  }
  if (kind == "declaration" || kind == "parameter_declaration" ||
      kind == "field_declaration") {
    for (const SyntaxNode& c : node.children) {
      if (c.kind == "init_declarator") {
        // Initializer reads happen before the name is bound.
        const SyntaxNode* name = nullptr;
        for (const SyntaxNode& part : c.children) {
          if (name == nullptr &&
              (part.kind == "identifier" || part.kind == "pointer_declarator" ||
               part.kind == "array_declarator" ||
               part.kind == "reference_declarator" ||
               part.kind == "parenthesized_declarator" ||
               part.kind == "function_declarator")) {
            name = declared_identifier(part);
            continue;
          }
          dataflow_visit(part, state);
        }
        if (name != nullptr) {
          state.define(to_plain_code(*name, *state.unit));
        }
      } else if (c.kind == "identifier" || c.kind == "pointer_declarator" ||
                 c.kind == "array_declarator" ||
                 c.kind == "reference_declarator" ||
                 c.kind == "parenthesized_declarator" ||
                 c.kind == "function_declarator") {
        if (const SyntaxNode* name = declared_identifier(c)) {
          state.define(to_plain_code(*name, *state.unit));
        }
      } else {
        dataflow_visit(c, state);
      }
    }
    return;
  }
  if (kind == "assignment_expression" && node.children.size() >= 3) {
    const SyntaxNode& lhs = node.children[0];
    const SyntaxNode& op = node.children[1];
    if (is_plain_identifier(lhs)) {
      if (op.kind != "=") {
        // Compound assignment reads the target first.
        state.use(to_plain_code(lhs, *state.unit));
      }
      for (std::size_t i = 2; i < node.children.size(); ++i) {
        dataflow_visit(node.children[i], state);
      }
      state.define(to_plain_code(lhs, *state.unit));
      return;
    }
    visit_children(node, state);
    return;
  }
  if (kind == "update_expression") {
    for (const SyntaxNode& c : node.children) {
      if (is_plain_identifier(c)) {
        std::string name = to_plain_code(c, *state.unit);
        state.use(name);
        state.define(name);
      } else {
        dataflow_visit(c, state);
      }
    }
    return;
  }
  visit_children(node, state);
}

double dataflow_match(const SyntaxTree& candidate, const SyntaxTree& reference) {
  std::vector<DataflowEdge> cand =
      dataflow_edges(candidate.root(), candidate.unit());
  std::vector<DataflowEdge> ref =
      dataflow_edges(reference.root(), reference.unit());
  if (ref.empty()) return 1.0;
  std::multiset<std::tuple<std::string, int, int>> pool;
  for (const DataflowEdge& e : cand) {
    pool.insert({e.name, e.def_ordinal, e.use_ordinal});
  }
  int matched = 0;
  for (const DataflowEdge& e : ref) {
    auto it = pool.find({e.name, e.def_ordinal, e.use_ordinal});
    if (it != pool.end()) {
      ++matched;
      pool.erase(it);
    }
  }
  return static_cast<double>(matched) / static_cast<double>(ref.size());
}

std::optional<SyntaxTree> try_parse(const std::string& text, Language language) {
  try {
    return parse(SourceUnit{text, language});
  } catch (const ParseFailure&) {
    return std::nullopt;
  }
}

// --- tree edit distance -------------------------------------------------------

struct FlatTree {
  std::vector<std::string> labels;  // post-order
  std::vector<int> leftmost;        // leftmost leaf descendant, post-order ids
  std::vector<int> keyroots;
};

void flatten(const SyntaxNode& node, const SourceUnit& unit,
             const TreeDistanceOptions& options, FlatTree& out, int& my_id) {
  int first_leaf = -1;
  for (const SyntaxNode& c : node.children) {
    int child_id = -1;
    flatten(c, unit, options, out, child_id);
    if (first_leaf == -1) first_leaf = out.leftmost[child_id];
  }
  std::string label = node.kind;
  if (node.is_leaf() && options.leaf_text_in_label) {
    label += ":" + to_plain_code(node, unit);
  }
  out.labels.push_back(label);
  my_id = static_cast<int>(out.labels.size()) - 1;
  out.leftmost.push_back(first_leaf == -1 ? my_id : first_leaf);
}

FlatTree flatten_tree(const SyntaxNode& root, const SourceUnit& unit,
                      const TreeDistanceOptions& options) {
  FlatTree out;
  int id = -1;
  flatten(root, unit, options, out, id);
  int n = static_cast<int>(out.labels.size());
  std::vector<bool> seen(n, false);
  for (int i = n - 1; i >= 0; --i) {
    if (!seen[out.leftmost[i]]) {
      out.keyroots.push_back(i);
      seen[out.leftmost[i]] = true;
    }
  }
  std::sort(out.keyroots.begin(), out.keyroots.end());
  return out;
}

// Classic ordered-tree edit distance over post-order arrays and keyroots.
int ordered_tree_distance(const FlatTree& a, const FlatTree& b) {
  int n = static_cast<int>(a.labels.size());
  int m = static_cast<int>(b.labels.size());
  std::vector<std::vector<int>> tree_dist(n, std::vector<int>(m, 0));
  std::vector<std::vector<int>> forest(n + 1, std::vector<int>(m + 1, 0));

  for (int i : a.keyroots) {
    for (int j : b.keyroots) {
      int li = a.leftmost[i];
      int lj = b.leftmost[j];
      int width_a = i - li + 2;
      int width_b = j - lj + 2;
      forest[0][0] = 0;
      for (int x = 1; x < width_a; ++x) forest[x][0] = forest[x - 1][0] + 1;
      for (int y = 1; y < width_b; ++y) forest[0][y] = forest[0][y - 1] + 1;
      for (int x = 1; x < width_a; ++x) {
        for (int y = 1; y < width_b; ++y) {
          int node_a = li + x - 1;
          int node_b = lj + y - 1;
          if (a.leftmost[node_a] == li && b.leftmost[node_b] == lj) {
            int relabel = a.labels[node_a] == b.labels[node_b] ? 0 : 1;
            forest[x][y] = std::min({forest[x - 1][y] + 1,
                                     forest[x][y - 1] + 1,
                                     forest[x - 1][y - 1] + relabel});
            tree_dist[node_a][node_b] = forest[x][y];
          } else {
            int xa = a.leftmost[node_a] - li;
            int yb = b.leftmost[node_b] - lj;
            forest[x][y] = std::min({forest[x - 1][y] + 1,
                                     forest[x][y - 1] + 1,
                                     forest[xa][yb] +
                                         tree_dist[node_a][node_b]});
          }
        }
      }
    }
  }
  return tree_dist[n - 1][m - 1];
}

}  // namespace

std::vector<DataflowEdge> dataflow_edges(const SyntaxNode& root,
                                         const SourceUnit& unit) {
  DataflowState state;
  state.unit = &unit;
  dataflow_visit(root, state);
  return state.edges;
}

CodeBleuScore codebleu(const std::string& candidate, const std::string& reference,
                       Language language, const std::array<double, 4>& weights) {
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("codebleu weights must sum to 1");
  }

  std::vector<std::string> ref_tokens = token_texts(reference);
  if (ref_tokens.empty()) {
    throw EmptyReference("reference code has no tokens to compare against");
  }
  std::vector<std::string> cand_tokens = token_texts(candidate);

  CodeBleuScore score;
  score.weights = weights;
  score.ngram = bleu4(cand_tokens, ref_tokens, [](const Gram&) { return 1.0; });
  score.weighted_ngram =
      bleu4(cand_tokens, ref_tokens, [](const Gram& g) {
        for (const std::string& t : g) {
          if (is_cpp_keyword(t)) return 5.0;
        }
        return 1.0;
      });

  std::optional<SyntaxTree> ref_tree = try_parse(reference, language);
  std::optional<SyntaxTree> cand_tree = try_parse(candidate, language);
  if (!ref_tree.has_value()) {
    // An unparseable reference offers no structure to compare against.
    score.syntax = 0.0;
    score.dataflow = 0.0;
  } else if (!cand_tree.has_value()) {
    score.candidate_parse_failed = true;
    score.syntax = 0.0;
    score.dataflow = 0.0;
  } else {
    score.syntax = syntax_match(*cand_tree, *ref_tree);
    score.dataflow = dataflow_match(*cand_tree, *ref_tree);
  }

  score.total = weights[0] * score.ngram + weights[1] * score.weighted_ngram +
                weights[2] * score.syntax + weights[3] * score.dataflow;
  return score;
}

int tree_edit_distance(const SyntaxNode* a, const SyntaxNode* b,
                       const SourceUnit& unit_a, const SourceUnit& unit_b,
                       const TreeDistanceOptions& options) {
  if (a == nullptr || b == nullptr) {
    throw EmptyTree("tree edit distance needs two non-null trees");
  }
  FlatTree fa = flatten_tree(*a, unit_a, options);
  FlatTree fb = flatten_tree(*b, unit_b, options);
  return ordered_tree_distance(fa, fb);
}

int tree_edit_distance(const std::string& code_a, const std::string& code_b,
                       Language language, const TreeDistanceOptions& options) {
  SyntaxTree ta = parse(SourceUnit{code_a, language});
  SyntaxTree tb = parse(SourceUnit{code_b, language});
  return tree_edit_distance(&ta.root(), &tb.root(), ta.unit(), tb.unit(),
                            options);
}

std::string normalize_whitespace(const std::string& text) {
  std::string out;
  bool in_ws = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out += ' ';
    in_ws = false;
    out += c;
  }
  return out;
}

bool perfect_patch(const std::string& candidate, const std::string& reference) {
  return normalize_whitespace(candidate) == normalize_whitespace(reference);
}

double pass_at_k(const std::vector<std::vector<bool>>& outcomes, int k) {
  if (k < 1) throw ShapeMismatch("k must be at least 1");
  if (outcomes.empty()) return 0.0;
  std::size_t width = outcomes.front().size();
  for (const auto& row : outcomes) {
    if (row.size() != width) {
      throw ShapeMismatch("attempt matrix rows differ in width");
    }
  }
  if (width < static_cast<std::size_t>(k)) {
    throw ShapeMismatch("attempt matrix narrower than k");
  }
  int hits = 0;
  for (const auto& row : outcomes) {
    for (int i = 0; i < k; ++i) {
      if (row[static_cast<std::size_t>(i)]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

double edit_distance_rate(const std::vector<int>& min_distances, int threshold) {
  if (min_distances.empty()) return 0.0;
  int close = 0;
  for (int d : min_distances) {
    if (d >= 0 && d < threshold) ++close;
  }
  return static_cast<double>(close) / static_cast<double>(min_distances.size());
}

}  // namespace spvr

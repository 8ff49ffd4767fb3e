#include "parser.hpp"

#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spvr/lexer.hpp"

namespace spvr::internal {

namespace {

// Internal control-flow exception for backtracking and error recovery; never
// escapes parse_translation_unit.
struct ParseErr {
  std::size_t at;
};

const std::unordered_set<std::string_view> kPrimitiveTypes = {
    "void",      "bool",     "char",      "int",      "float",    "double",
    "_Bool",     "wchar_t",  "size_t",    "ssize_t",  "ptrdiff_t",
    "intptr_t",  "uintptr_t", "int8_t",   "int16_t",  "int32_t",  "int64_t",
    "uint8_t",   "uint16_t", "uint32_t",  "uint64_t",
};

const std::unordered_set<std::string_view> kSizeModifiers = {
    "signed", "unsigned", "long", "short"};

const std::unordered_set<std::string_view> kStorageClasses = {
    "typedef", "extern", "static", "register", "inline", "constexpr"};

const std::unordered_set<std::string_view> kTypeQualifiers = {
    "const", "volatile", "restrict", "_Atomic"};

const std::unordered_set<std::string_view> kStatementKeywords = {
    "if",     "else",   "for",     "while", "do",     "return", "break",
    "continue", "switch", "case",  "default", "goto", "struct", "union",
    "enum",   "typedef", "extern", "static", "register", "inline", "const",
    "volatile", "restrict"};

const std::unordered_set<std::string_view> kAssignOps = {
    "=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="};

int binary_precedence(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=") return 6;
  if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
  if (op == "<<" || op == ">>") return 8;
  if (op == "+" || op == "-") return 9;
  if (op == "*" || op == "/" || op == "%") return 10;
  return 0;
}

class Parser {
 public:
  explicit Parser(const std::string& text)
      : text_(text), tokens_(lex(text).tokens) {}

  ParseAttempt run() {
    auto root = std::make_unique<SyntaxNode>();
    root->kind = "translation_unit";
    root->named = true;
    while (!eof()) {
      std::size_t start = pos_;
      try {
        root->children.push_back(parse_external_item());
      } catch (const ParseErr&) {
        root->children.push_back(recover(start));
      }
    }
    if (!root->children.empty()) {
      root->span = {root->children.front().span.start,
                    root->children.back().span.end};
    }
    ParseAttempt out;
    out.root = std::move(root);
    out.error_nodes = error_nodes_;
    return out;
  }

 private:
  // --- token access ---------------------------------------------------------

  bool eof() const { return pos_ >= tokens_.size(); }

  const Token& tok(std::size_t ahead = 0) const {
    static const Token kEnd{TokenKind::kPunct, 0, 0};
    std::size_t at = pos_ + ahead;
    return at < tokens_.size() ? tokens_[at] : kEnd;
  }

  std::string_view text_of(const Token& t) const {
    return std::string_view(text_).substr(t.start, t.end - t.start);
  }

  std::string_view ahead_text(std::size_t ahead = 0) const {
    std::size_t at = pos_ + ahead;
    if (at >= tokens_.size()) return {};
    return text_of(tokens_[at]);
  }

  bool at(std::string_view text) const { return !eof() && ahead_text() == text; }

  bool at_kind(TokenKind kind) const { return !eof() && tok().kind == kind; }

  [[noreturn]] void fail() const { throw ParseErr{pos_}; }

  SyntaxNode take_anon() {
    if (eof()) fail();
    const Token& t = tokens_[pos_++];
    SyntaxNode n;
    n.kind = std::string(text_of(t));
    n.span = t.span();
    n.named = false;
    return n;
  }

  SyntaxNode take_leaf(std::string kind) {
    if (eof()) fail();
    const Token& t = tokens_[pos_++];
    SyntaxNode n;
    n.kind = std::move(kind);
    n.span = t.span();
    n.named = true;
    return n;
  }

  SyntaxNode expect_anon(std::string_view text) {
    if (!at(text)) fail();
    return take_anon();
  }

  static SyntaxNode make(std::string kind, std::vector<SyntaxNode> children) {
    SyntaxNode n;
    n.kind = std::move(kind);
    n.named = true;
    n.children = std::move(children);
    if (!n.children.empty()) {
      n.span = {n.children.front().span.start, n.children.back().span.end};
    }
    return n;
  }

  // --- error recovery -------------------------------------------------------

  // Turns the tokens from `start` up to a statement boundary into an ERROR
  // node. Consumes at least one token so the parse always advances.
  SyntaxNode recover(std::size_t start) {
    pos_ = start;
    std::vector<SyntaxNode> eaten;
    int depth = 0;
    do {
      if (eof()) break;
      std::string_view t = ahead_text();
      if (t == "}" && depth == 0 && !eaten.empty()) break;
      if (t == "{") ++depth;
      if (t == "}") --depth;
      eaten.push_back(take_anon());
      if (eaten.back().kind == ";" && depth <= 0) break;
    } while (true);
    if (eaten.empty()) eaten.push_back(take_anon());
    ++error_nodes_;
    return make("ERROR", std::move(eaten));
  }

  // --- type heuristics ------------------------------------------------------

  bool word_is_type_like(std::string_view w) const {
    return kPrimitiveTypes.count(w) > 0 || kSizeModifiers.count(w) > 0 ||
           w == "struct" || w == "union" || w == "enum" ||
           (w.size() > 2 && w.substr(w.size() - 2) == "_t");
  }

  // Does a declaration (or function definition) start at the current token?
  bool at_declaration_start() const {
    if (eof() || tok().kind != TokenKind::kIdentifier) return false;
    std::string_view w = ahead_text();
    if (kStorageClasses.count(w) || kTypeQualifiers.count(w)) return true;
    if (kPrimitiveTypes.count(w) || kSizeModifiers.count(w)) return true;
    if (w == "struct" || w == "union" || w == "enum") return true;
    if (kStatementKeywords.count(w)) return false;
    if (w.size() > 2 && w.substr(w.size() - 2) == "_t") return true;
    // `Name ident ...` reads as a declaration with a typedef'd type.
    if (tok(1).kind == TokenKind::kIdentifier &&
        !kStatementKeywords.count(ahead_text(1))) {
      return true;
    }
    // `Name * ident ;|,|=|[` is virtually always a declaration, not a
    // multiplication whose result is discarded.
    std::size_t i = 1;
    bool saw_star = false;
    while (ahead_text(i) == "*") {
      saw_star = true;
      ++i;
    }
    if (saw_star && tok(i).kind == TokenKind::kIdentifier &&
        !kStatementKeywords.count(ahead_text(i))) {
      std::string_view after = ahead_text(i + 1);
      if (after == ";" || after == "," || after == "=" || after == "[") {
        return true;
      }
    }
    return false;
  }

  // --- specifiers and declarators --------------------------------------------

  // Parses declaration specifiers: storage classes, qualifiers, and exactly
  // one type. Fails if no type can be formed.
  std::vector<SyntaxNode> parse_specifiers() {
    std::vector<SyntaxNode> out;
    bool have_type = false;
    while (!eof() && tok().kind == TokenKind::kIdentifier) {
      std::string_view w = ahead_text();
      if (kStorageClasses.count(w)) {
        out.push_back(make("storage_class_specifier", {take_anon()}));
        continue;
      }
      if (kTypeQualifiers.count(w)) {
        out.push_back(make("type_qualifier", {take_anon()}));
        continue;
      }
      if (have_type) break;
      if (kSizeModifiers.count(w)) {
        out.push_back(parse_sized_type());
        have_type = true;
        continue;
      }
      if (kPrimitiveTypes.count(w)) {
        out.push_back(take_leaf("primitive_type"));
        have_type = true;
        continue;
      }
      if (w == "struct" || w == "union" || w == "enum") {
        out.push_back(parse_tagged_type(w));
        have_type = true;
        continue;
      }
      if (kStatementKeywords.count(w)) break;
      // A plain identifier can only be the type here.
      out.push_back(take_leaf("type_identifier"));
      have_type = true;
    }
    if (!have_type) fail();
    return out;
  }

  SyntaxNode parse_sized_type() {
    std::vector<SyntaxNode> children;
    while (!eof() && kSizeModifiers.count(ahead_text())) {
      children.push_back(take_anon());
    }
    if (!eof() && tok().kind == TokenKind::kIdentifier &&
        kPrimitiveTypes.count(ahead_text())) {
      children.push_back(take_leaf("primitive_type"));
    }
    return make("sized_type_specifier", std::move(children));
  }

  SyntaxNode parse_tagged_type(std::string_view tag) {
    std::vector<SyntaxNode> children;
    children.push_back(take_anon());  // struct / union / enum
    if (!eof() && tok().kind == TokenKind::kIdentifier &&
        !kStatementKeywords.count(ahead_text())) {
      children.push_back(take_leaf("type_identifier"));
    }
    if (at("{")) {
      children.push_back(tag == "enum" ? parse_enumerator_list()
                                       : parse_field_declaration_list());
    }
    std::string kind = tag == "struct"  ? "struct_specifier"
                       : tag == "union" ? "union_specifier"
                                        : "enum_specifier";
    return make(std::move(kind), std::move(children));
  }

  SyntaxNode parse_field_declaration_list() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_anon("{"));
    while (!eof() && !at("}")) {
      std::size_t start = pos_;
      try {
        children.push_back(parse_field_declaration());
      } catch (const ParseErr&) {
        children.push_back(recover(start));
      }
    }
    children.push_back(expect_anon("}"));
    return make("field_declaration_list", std::move(children));
  }

  SyntaxNode parse_field_declaration() {
    std::vector<SyntaxNode> children = parse_specifiers();
    if (!at(";")) {
      while (true) {
        SyntaxNode decl = parse_declarator();
        if (at(":")) {  // bitfield
          std::vector<SyntaxNode> bits;
          bits.push_back(std::move(decl));
          bits.push_back(take_anon());
          bits.push_back(parse_assignment_expression());
          decl = make("bitfield_clause", std::move(bits));
        }
        children.push_back(std::move(decl));
        if (!at(",")) break;
        children.push_back(take_anon());
      }
    }
    children.push_back(expect_anon(";"));
    return make("field_declaration", std::move(children));
  }

  SyntaxNode parse_enumerator_list() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_anon("{"));
    while (!eof() && !at("}")) {
      std::vector<SyntaxNode> e;
      if (tok().kind != TokenKind::kIdentifier) fail();
      e.push_back(take_leaf("identifier"));
      if (at("=")) {
        e.push_back(take_anon());
        e.push_back(parse_assignment_expression());
      }
      children.push_back(make("enumerator", std::move(e)));
      if (at(",")) children.push_back(take_anon());
    }
    children.push_back(expect_anon("}"));
    return make("enumerator_list", std::move(children));
  }

  // A declarator; `field_name` switches the identifier kind so struct fields
  // read as field_identifier.
  SyntaxNode parse_declarator(bool field_name = false) {
    if (at("*")) {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      while (!eof() && kTypeQualifiers.count(ahead_text())) {
        children.push_back(make("type_qualifier", {take_anon()}));
      }
      children.push_back(parse_declarator(field_name));
      return make("pointer_declarator", std::move(children));
    }
    if (at("&")) {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      children.push_back(parse_declarator(field_name));
      return make("reference_declarator", std::move(children));
    }
    SyntaxNode base;
    if (at("(")) {
      // Function pointers: ( * name ) — anything else in parens here is not
      // a declarator form this parser models.
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      children.push_back(parse_declarator(field_name));
      children.push_back(expect_anon(")"));
      base = make("parenthesized_declarator", std::move(children));
    } else {
      if (eof() || tok().kind != TokenKind::kIdentifier ||
          kStatementKeywords.count(ahead_text())) {
        fail();
      }
      base = take_leaf(field_name ? "field_identifier" : "identifier");
    }
    return parse_declarator_suffix(std::move(base));
  }

  SyntaxNode parse_declarator_suffix(SyntaxNode base) {
    while (!eof()) {
      if (at("(")) {
        std::vector<SyntaxNode> children;
        children.push_back(std::move(base));
        children.push_back(parse_parameter_list());
        base = make("function_declarator", std::move(children));
      } else if (at("[")) {
        std::vector<SyntaxNode> children;
        children.push_back(std::move(base));
        children.push_back(take_anon());
        if (!at("]")) children.push_back(parse_expression());
        children.push_back(expect_anon("]"));
        base = make("array_declarator", std::move(children));
      } else {
        break;
      }
    }
    return base;
  }

  SyntaxNode parse_parameter_list() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_anon("("));
    if (!at(")")) {
      while (true) {
        if (at("...")) {
          children.push_back(take_anon());
        } else {
          children.push_back(parse_parameter_declaration());
        }
        if (!at(",")) break;
        children.push_back(take_anon());
      }
    }
    children.push_back(expect_anon(")"));
    return make("parameter_list", std::move(children));
  }

  SyntaxNode parse_parameter_declaration() {
    std::vector<SyntaxNode> children = parse_specifiers();
    if (!at(",") && !at(")")) {
      children.push_back(parse_possibly_abstract_declarator());
    }
    return make("parameter_declaration", std::move(children));
  }

  // A declarator that may omit the identifier ("int *", "char []").
  SyntaxNode parse_possibly_abstract_declarator() {
    if (at("*")) {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      while (!eof() && kTypeQualifiers.count(ahead_text())) {
        children.push_back(make("type_qualifier", {take_anon()}));
      }
      if (at(",") || at(")") || at("]")) {
        return make("abstract_pointer_declarator", std::move(children));
      }
      children.push_back(parse_possibly_abstract_declarator());
      std::string kind = children.back().kind.find("abstract") == 0
                             ? "abstract_pointer_declarator"
                             : "pointer_declarator";
      return make(std::move(kind), std::move(children));
    }
    return parse_declarator();
  }

  // --- declarations and functions --------------------------------------------

  // True when `node` is a declarator whose outermost suffix is a function
  // declarator (so `specs node { ... }` is a function definition).
  static bool is_function_declarator(const SyntaxNode& node) {
    if (node.kind == "function_declarator") return true;
    if (node.kind == "pointer_declarator" ||
        node.kind == "reference_declarator") {
      return !node.children.empty() &&
             is_function_declarator(node.children.back());
    }
    return false;
  }

  SyntaxNode parse_external_item() {
    if (at_declaration_start()) return parse_declaration_or_definition();
    return parse_statement();
  }

  SyntaxNode parse_declaration_or_definition() {
    std::vector<SyntaxNode> children = parse_specifiers();
    if (at(";")) {
      children.push_back(take_anon());
      return make("declaration", std::move(children));
    }
    SyntaxNode declarator = parse_declarator();
    if (at("{") && is_function_declarator(declarator)) {
      children.push_back(std::move(declarator));
      children.push_back(parse_compound_statement());
      return make("function_definition", std::move(children));
    }
    return parse_declaration_rest(std::move(children), std::move(declarator));
  }

  SyntaxNode parse_declaration_rest(std::vector<SyntaxNode> children,
                                    SyntaxNode first_declarator) {
    children.push_back(finish_init_declarator(std::move(first_declarator)));
    while (at(",")) {
      children.push_back(take_anon());
      children.push_back(finish_init_declarator(parse_declarator()));
    }
    children.push_back(expect_anon(";"));
    return make("declaration", std::move(children));
  }

  SyntaxNode finish_init_declarator(SyntaxNode declarator) {
    if (!at("=")) return declarator;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(declarator));
    children.push_back(take_anon());
    children.push_back(parse_initializer());
    return make("init_declarator", std::move(children));
  }

  SyntaxNode parse_initializer() {
    if (at("{")) return parse_initializer_list();
    return parse_assignment_expression();
  }

  SyntaxNode parse_initializer_list() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_anon("{"));
    while (!eof() && !at("}")) {
      if (at(".") || at("[")) {
        // Designated initializer: consume the designator tokens verbatim.
        std::vector<SyntaxNode> pair;
        while (!eof() && !at("=")) pair.push_back(take_anon());
        pair.push_back(expect_anon("="));
        pair.push_back(parse_initializer());
        children.push_back(make("initializer_pair", std::move(pair)));
      } else {
        children.push_back(parse_initializer());
      }
      if (at(",")) children.push_back(take_anon());
    }
    children.push_back(expect_anon("}"));
    return make("initializer_list", std::move(children));
  }

  // --- statements -------------------------------------------------------------

  SyntaxNode parse_compound_statement() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_anon("{"));
    while (!eof() && !at("}")) {
      std::size_t start = pos_;
      try {
        children.push_back(parse_external_item());
      } catch (const ParseErr&) {
        children.push_back(recover(start));
      }
    }
    if (at("}")) {
      children.push_back(take_anon());
    } else {
      // Truncated input: close the block implicitly but remember the damage.
      ++error_nodes_;
    }
    return make("compound_statement", std::move(children));
  }

  SyntaxNode parse_parenthesized_expression() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_anon("("));
    children.push_back(parse_expression());
    children.push_back(expect_anon(")"));
    return make("parenthesized_expression", std::move(children));
  }

  SyntaxNode parse_statement() {
    if (eof()) fail();
    if (at("{")) return parse_compound_statement();
    if (at(";")) return make("expression_statement", {take_anon()});
    std::string_view w = ahead_text();
    if (tok().kind == TokenKind::kIdentifier) {
      if (w == "if") return parse_if_statement();
      if (w == "for") return parse_for_statement();
      if (w == "while") return parse_while_statement();
      if (w == "do") return parse_do_statement();
      if (w == "return") return parse_return_statement();
      if (w == "break" || w == "continue") {
        std::string kind =
            w == "break" ? "break_statement" : "continue_statement";
        std::vector<SyntaxNode> children;
        children.push_back(take_anon());
        children.push_back(expect_anon(";"));
        return make(std::move(kind), std::move(children));
      }
      if (w == "switch") return parse_switch_statement();
      if (w == "case" || w == "default") return parse_case_statement();
      if (w == "goto") {
        std::vector<SyntaxNode> children;
        children.push_back(take_anon());
        if (eof() || tok().kind != TokenKind::kIdentifier) fail();
        children.push_back(take_leaf("statement_identifier"));
        children.push_back(expect_anon(";"));
        return make("goto_statement", std::move(children));
      }
      if (!kStatementKeywords.count(w) && ahead_text(1) == ":" &&
          ahead_text(2) != ":") {
        std::vector<SyntaxNode> children;
        children.push_back(take_leaf("statement_identifier"));
        children.push_back(take_anon());
        children.push_back(parse_statement());
        return make("labeled_statement", std::move(children));
      }
    }
    if (at_declaration_start()) return parse_declaration_or_definition();
    std::vector<SyntaxNode> children;
    children.push_back(parse_expression());
    children.push_back(expect_anon(";"));
    return make("expression_statement", std::move(children));
  }

  SyntaxNode parse_if_statement() {
    std::vector<SyntaxNode> children;
    children.push_back(take_anon());  // if
    children.push_back(parse_parenthesized_expression());
    children.push_back(parse_statement());
    if (at("else")) {
      std::vector<SyntaxNode> e;
      e.push_back(take_anon());
      e.push_back(parse_statement());
      children.push_back(make("else_clause", std::move(e)));
    }
    return make("if_statement", std::move(children));
  }

  SyntaxNode parse_for_statement() {
    std::vector<SyntaxNode> children;
    children.push_back(take_anon());  // for
    children.push_back(expect_anon("("));
    if (at_declaration_start()) {
      children.push_back(parse_declaration_or_definition());
    } else {
      if (!at(";")) children.push_back(parse_expression());
      children.push_back(expect_anon(";"));
    }
    if (!at(";")) children.push_back(parse_expression());
    children.push_back(expect_anon(";"));
    if (!at(")")) children.push_back(parse_expression());
    children.push_back(expect_anon(")"));
    children.push_back(parse_statement());
    return make("for_statement", std::move(children));
  }

  SyntaxNode parse_while_statement() {
    std::vector<SyntaxNode> children;
    children.push_back(take_anon());
    children.push_back(parse_parenthesized_expression());
    children.push_back(parse_statement());
    return make("while_statement", std::move(children));
  }

  SyntaxNode parse_do_statement() {
    std::vector<SyntaxNode> children;
    children.push_back(take_anon());
    children.push_back(parse_statement());
    if (!at("while")) fail();
    children.push_back(take_anon());
    children.push_back(parse_parenthesized_expression());
    children.push_back(expect_anon(";"));
    return make("do_statement", std::move(children));
  }

  SyntaxNode parse_return_statement() {
    std::vector<SyntaxNode> children;
    children.push_back(take_anon());
    if (!at(";")) children.push_back(parse_expression());
    children.push_back(expect_anon(";"));
    return make("return_statement", std::move(children));
  }

  SyntaxNode parse_switch_statement() {
    std::vector<SyntaxNode> children;
    children.push_back(take_anon());
    children.push_back(parse_parenthesized_expression());
    children.push_back(parse_compound_statement());
    return make("switch_statement", std::move(children));
  }

  SyntaxNode parse_case_statement() {
    std::vector<SyntaxNode> children;
    bool is_default = at("default");
    children.push_back(take_anon());
    if (!is_default) children.push_back(parse_expression());
    children.push_back(expect_anon(":"));
    while (!eof() && !at("case") && !at("default") && !at("}")) {
      std::size_t start = pos_;
      try {
        children.push_back(parse_external_item());
      } catch (const ParseErr&) {
        children.push_back(recover(start));
      }
    }
    return make("case_statement", std::move(children));
  }

  // --- expressions -------------------------------------------------------------

  SyntaxNode parse_expression() {
    SyntaxNode first = parse_assignment_expression();
    if (!at(",")) return first;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(first));
    while (at(",")) {
      children.push_back(take_anon());
      children.push_back(parse_assignment_expression());
    }
    return make("comma_expression", std::move(children));
  }

  SyntaxNode parse_assignment_expression() {
    SyntaxNode left = parse_conditional_expression();
    if (eof() || tok().kind != TokenKind::kPunct ||
        !kAssignOps.count(ahead_text())) {
      return left;
    }
    std::vector<SyntaxNode> children;
    children.push_back(std::move(left));
    children.push_back(take_anon());
    children.push_back(parse_assignment_expression());
    return make("assignment_expression", std::move(children));
  }

  SyntaxNode parse_conditional_expression() {
    SyntaxNode cond = parse_binary_expression(1);
    if (!at("?")) return cond;
    std::vector<SyntaxNode> children;
    children.push_back(std::move(cond));
    children.push_back(take_anon());
    children.push_back(parse_expression());
    children.push_back(expect_anon(":"));
    children.push_back(parse_assignment_expression());
    return make("conditional_expression", std::move(children));
  }

  SyntaxNode parse_binary_expression(int min_prec) {
    SyntaxNode left = parse_unary_expression();
    while (!eof() && tok().kind == TokenKind::kPunct) {
      int prec = binary_precedence(ahead_text());
      if (prec < min_prec || prec == 0) break;
      std::vector<SyntaxNode> children;
      children.push_back(std::move(left));
      children.push_back(take_anon());
      children.push_back(parse_binary_expression(prec + 1));
      left = make("binary_expression", std::move(children));
    }
    return left;
  }

  // Is the parenthesized token run starting after `(` a type name? Consumes
  // nothing; used to tell casts from parenthesized expressions.
  bool paren_starts_type() const {
    std::size_t i = 1;  // past "("
    bool saw_type_word = false;
    bool saw_star = false;
    std::string_view first;
    while (pos_ + i < tokens_.size()) {
      std::string_view t = ahead_text(i);
      if (t == "struct" || t == "union" || t == "enum") {
        // The tag keyword is decisive: `(struct name ...)` can only be a type.
        ++i;
        if (pos_ + i < tokens_.size() &&
            tokens_[pos_ + i].kind == TokenKind::kIdentifier &&
            !kStatementKeywords.count(ahead_text(i))) {
          saw_type_word = true;
          ++i;
        }
        continue;
      }
      if (kTypeQualifiers.count(t)) {
        ++i;
        continue;
      }
      if (kPrimitiveTypes.count(t) || kSizeModifiers.count(t)) {
        saw_type_word = true;
        ++i;
        continue;
      }
      if (!saw_type_word && first.empty() &&
          tokens_[pos_ + i].kind == TokenKind::kIdentifier &&
          !kStatementKeywords.count(t)) {
        first = t;
        ++i;
        continue;
      }
      break;
    }
    while (ahead_text(i) == "*") {
      saw_star = true;
      ++i;
    }
    if (ahead_text(i) != ")") return false;
    if (saw_type_word) return true;
    if (first.empty()) return false;
    if (first.size() > 2 && first.substr(first.size() - 2) == "_t") return true;
    return saw_star;  // (name *) — treat as pointer-type cast
  }

  SyntaxNode parse_type_descriptor() {
    std::vector<SyntaxNode> children = parse_specifiers();
    while (at("*")) {
      std::vector<SyntaxNode> p;
      p.push_back(take_anon());
      while (!eof() && kTypeQualifiers.count(ahead_text())) {
        p.push_back(make("type_qualifier", {take_anon()}));
      }
      children.push_back(make("abstract_pointer_declarator", std::move(p)));
    }
    return make("type_descriptor", std::move(children));
  }

  SyntaxNode parse_unary_expression() {
    if (eof()) fail();
    std::string_view w = ahead_text();
    if (w == "(" && paren_starts_type()) {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      children.push_back(parse_type_descriptor());
      children.push_back(expect_anon(")"));
      children.push_back(parse_unary_expression());
      return make("cast_expression", std::move(children));
    }
    if (w == "!" || w == "~" || w == "+" || w == "-") {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      children.push_back(parse_unary_expression());
      return make("unary_expression", std::move(children));
    }
    if (w == "*" || w == "&") {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      children.push_back(parse_unary_expression());
      return make("pointer_expression", std::move(children));
    }
    if (w == "++" || w == "--") {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      children.push_back(parse_unary_expression());
      return make("update_expression", std::move(children));
    }
    if (w == "sizeof") {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      if (at("(") && paren_starts_type()) {
        children.push_back(take_anon());
        children.push_back(parse_type_descriptor());
        children.push_back(expect_anon(")"));
      } else {
        children.push_back(parse_unary_expression());
      }
      return make("sizeof_expression", std::move(children));
    }
    if (w == "new" || w == "delete") {
      std::vector<SyntaxNode> children;
      children.push_back(take_anon());
      if (at("[")) {  // delete[]
        children.push_back(take_anon());
        children.push_back(expect_anon("]"));
      }
      children.push_back(parse_unary_expression());
      return make("unary_expression", std::move(children));
    }
    return parse_postfix_expression();
  }

  SyntaxNode parse_postfix_expression() {
    SyntaxNode node = parse_primary_expression();
    while (!eof()) {
      std::string_view w = ahead_text();
      if (w == "(") {
        std::vector<SyntaxNode> children;
        children.push_back(std::move(node));
        children.push_back(parse_argument_list());
        node = make("call_expression", std::move(children));
      } else if (w == "[") {
        std::vector<SyntaxNode> children;
        children.push_back(std::move(node));
        children.push_back(take_anon());
        children.push_back(parse_expression());
        children.push_back(expect_anon("]"));
        node = make("subscript_expression", std::move(children));
      } else if (w == "." || w == "->") {
        std::vector<SyntaxNode> children;
        children.push_back(std::move(node));
        children.push_back(take_anon());
        if (eof() || tok().kind != TokenKind::kIdentifier) fail();
        children.push_back(take_leaf("field_identifier"));
        node = make("field_expression", std::move(children));
      } else if (w == "++" || w == "--") {
        std::vector<SyntaxNode> children;
        children.push_back(std::move(node));
        children.push_back(take_anon());
        node = make("update_expression", std::move(children));
      } else {
        break;
      }
    }
    return node;
  }

  SyntaxNode parse_argument_list() {
    std::vector<SyntaxNode> children;
    children.push_back(expect_anon("("));
    if (!at(")")) {
      while (true) {
        children.push_back(parse_assignment_expression());
        if (!at(",")) break;
        children.push_back(take_anon());
      }
    }
    children.push_back(expect_anon(")"));
    return make("argument_list", std::move(children));
  }

  SyntaxNode parse_primary_expression() {
    if (eof()) fail();
    const Token& t = tok();
    switch (t.kind) {
      case TokenKind::kNumber:
        return take_leaf("number_literal");
      case TokenKind::kString: {
        SyntaxNode first = take_leaf("string_literal");
        if (!at_kind(TokenKind::kString)) return first;
        std::vector<SyntaxNode> children;
        children.push_back(std::move(first));
        while (at_kind(TokenKind::kString)) {
          children.push_back(take_leaf("string_literal"));
        }
        return make("concatenated_string", std::move(children));
      }
      case TokenKind::kChar:
        return take_leaf("char_literal");
      case TokenKind::kIdentifier: {
        std::string_view w = ahead_text();
        if (w == "true" || w == "false") return take_leaf(std::string(w));
        if (w == "NULL" || w == "nullptr") return take_leaf("null");
        if (w == "sizeof" || kStatementKeywords.count(w)) fail();
        if (ahead_text(1) == "::") return parse_qualified_identifier();
        return take_leaf("identifier");
      }
      case TokenKind::kPunct:
        if (at("(")) return parse_parenthesized_expression();
        if (at("{")) return parse_initializer_list();
        fail();
      default:
        fail();
    }
  }

  SyntaxNode parse_qualified_identifier() {
    std::vector<SyntaxNode> children;
    children.push_back(take_leaf("namespace_identifier"));
    children.push_back(expect_anon("::"));
    if (eof() || tok().kind != TokenKind::kIdentifier) fail();
    if (ahead_text(1) == "::") {
      children.push_back(parse_qualified_identifier());
    } else {
      children.push_back(take_leaf("identifier"));
    }
    return make("qualified_identifier", std::move(children));
  }

  const std::string& text_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int error_nodes_ = 0;
};

}  // namespace

ParseAttempt parse_translation_unit(const std::string& text) {
  return Parser(text).run();
}

}  // namespace spvr::internal

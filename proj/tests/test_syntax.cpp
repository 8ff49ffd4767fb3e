#include <doctest.h>

#include <string>
#include <vector>

#include "spvr/errors.hpp"
#include "spvr/lexer.hpp"
#include "spvr/source.hpp"
#include "spvr/syntax.hpp"

using namespace spvr;

namespace {

SourceUnit unit_of(const std::string& text) {
  return SourceUnit{text, Language::kC};
}

std::vector<std::string> kinds_of_children(const SyntaxNode& node) {
  std::vector<std::string> out;
  for (const SyntaxNode& c : node.children) out.push_back(c.kind);
  return out;
}

const SyntaxNode& first_kind(const SyntaxTree& tree, const std::string& kind) {
  const SyntaxNode* node = find_first(
      tree.root(), [&](const SyntaxNode& n) { return n.kind == kind; });
  REQUIRE(node != nullptr);
  return *node;
}

}  // namespace

TEST_CASE("split_lines basic shapes") {
  CHECK(split_lines("") == std::vector<std::string>{""});
  CHECK(split_lines("a") == std::vector<std::string>{"a"});
  CHECK(split_lines("a\n") == std::vector<std::string>{"a"});
  CHECK(split_lines("a\nb") == std::vector<std::string>{"a", "b"});
  CHECK(split_lines("a\r\nb\n") == std::vector<std::string>{"a", "b"});
  CHECK(split_lines("\n\n") == std::vector<std::string>{"", ""});
}

TEST_CASE("LineIndex maps offsets to lines") {
  std::string text = "ab\ncd\n\nxyz";
  LineIndex index(text);
  CHECK(index.line_count() == 4);
  CHECK(index.line_of(0) == 1);
  CHECK(index.line_of(2) == 1);  // the newline belongs to line 1
  CHECK(index.line_of(3) == 2);
  CHECK(index.line_of(6) == 3);
  CHECK(index.line_of(7) == 4);
  CHECK(index.line_start(1) == 0);
  CHECK(index.line_start(4) == 7);
  CHECK(index.line_end(1) == 2);   // excludes the newline
  CHECK(index.line_end(3) == 6);
  CHECK(index.line_end(4) == 10);
}

TEST_CASE("lexer splits code and trivia") {
  std::string text = "int x = 0x1F; // note\n/* block */ x += 2;";
  LexResult lexed = lex(text);
  std::vector<std::string> texts;
  for (const Token& t : lexed.tokens) {
    texts.push_back(text.substr(t.start, t.end - t.start));
  }
  CHECK(code_tokens(text) == texts);
  CHECK(texts == std::vector<std::string>{"int", "x", "=", "0x1F", ";", "x",
                                          "+=", "2", ";"});
  REQUIRE(lexed.trivia.size() == 2);
  CHECK(text.substr(lexed.trivia[0].start,
                    lexed.trivia[0].end - lexed.trivia[0].start) == "// note");
}

TEST_CASE("lexer handles strings, chars, and preprocessor lines") {
  std::string text = "#include <stdio.h>\nchar c = '\\n'; const char* s = \"a b\";";
  LexResult lexed = lex(text);
  REQUIRE(lexed.trivia.size() == 1);  // the preprocessor line
  bool saw_string = false;
  bool saw_char = false;
  for (const Token& t : lexed.tokens) {
    if (t.kind == TokenKind::kString) saw_string = true;
    if (t.kind == TokenKind::kChar) saw_char = true;
  }
  CHECK(saw_string);
  CHECK(saw_char);
}

TEST_CASE("is_cpp_keyword") {
  CHECK(is_cpp_keyword("if"));
  CHECK(is_cpp_keyword("unsigned"));
  CHECK(is_cpp_keyword("NULL"));
  CHECK_FALSE(is_cpp_keyword("banana"));
}

TEST_CASE("parse builds a function definition tree") {
  std::string text = "int add(int a, int b) {\n  return a + b;\n}\n";
  SyntaxTree tree = parse(unit_of(text));
  CHECK_FALSE(tree.degraded());
  CHECK_FALSE(tree.wrapped());
  CHECK(tree.root().kind == "translation_unit");
  CHECK(tree.root().span.start == 0);
  CHECK(tree.root().span.end == text.size());

  const SyntaxNode& fn = first_kind(tree, "function_definition");
  std::vector<std::string> kinds = kinds_of_children(fn);
  CHECK(kinds == std::vector<std::string>{"primitive_type",
                                          "function_declarator",
                                          "compound_statement"});
  const SyntaxNode& ret = first_kind(tree, "return_statement");
  CHECK(to_plain_code(ret, tree.unit()) == "return a + b;");
  CHECK(ret.start_line == 2);
  CHECK(ret.end_line == 2);
}

TEST_CASE("parse accepts statement fragments directly") {
  std::string text = "x = y + 1;";
  SyntaxTree tree = parse(unit_of(text));
  CHECK_FALSE(tree.degraded());
  const SyntaxNode& assign = first_kind(tree, "assignment_expression");
  CHECK(to_plain_code(assign, tree.unit()) == "x = y + 1");
  CHECK(assign.start_line == 1);
}

TEST_CASE("parse accepts bare expression fragments by wrapping") {
  std::string text = "x = y + 1";
  SyntaxTree tree = parse(unit_of(text));
  CHECK(tree.wrapped());
  CHECK_FALSE(tree.degraded());
  const SyntaxNode& assign = first_kind(tree, "assignment_expression");
  CHECK(to_plain_code(assign, tree.unit()) == "x = y + 1");
  CHECK(assign.start_line == 1);
}

TEST_CASE("parse handles common statement kinds") {
  std::string text =
      "void f(int n) {\n"
      "  int total = 0;\n"
      "  for (int i = 0; i < n; i = i + 1) {\n"
      "    total += i;\n"
      "  }\n"
      "  while (total > 10) { total = total / 2; }\n"
      "  if (total == 3) { g(total); } else { total = 0; }\n"
      "  switch (n) { case 1: total = 1; break; default: break; }\n"
      "  do { total = total - 1; } while (total > 0);\n"
      "}\n";
  SyntaxTree tree = parse(unit_of(text));
  CHECK_FALSE(tree.degraded());
  for (const char* kind :
       {"for_statement", "while_statement", "if_statement", "else_clause",
        "switch_statement", "case_statement", "do_statement",
        "call_expression", "declaration", "assignment_expression",
        "binary_expression"}) {
    INFO(kind);
    CHECK(find_first(tree.root(), [&](const SyntaxNode& n) {
            return n.kind == kind;
          }) != nullptr);
  }
}

TEST_CASE("parse handles casts, pointers, and member access") {
  std::string text =
      "long h(struct item *it, char *buf) {\n"
      "  long v = (long)it->weight;\n"
      "  it->next->weight = v * 2;\n"
      "  *buf = 'x';\n"
      "  return ((long)(v));\n"
      "}\n";
  SyntaxTree tree = parse(unit_of(text));
  CHECK_FALSE(tree.degraded());
  const SyntaxNode& cast = first_kind(tree, "cast_expression");
  CHECK(to_plain_code(cast, tree.unit()) == "(long)it->weight");
  const SyntaxNode& field = first_kind(tree, "field_expression");
  CHECK(to_plain_code(field, tree.unit()) == "it->weight");
  CHECK(find_first(tree.root(), [](const SyntaxNode& n) {
          return n.kind == "pointer_expression";
        }) != nullptr);
}

TEST_CASE("parse recovers from local errors") {
  std::string text = "int f() {\n  int x = ;\n  return 0;\n}\n";
  SyntaxTree tree = parse(unit_of(text));
  CHECK(tree.degraded());
  // The healthy statement around the error is still understood.
  CHECK(find_first(tree.root(), [](const SyntaxNode& n) {
          return n.kind == "return_statement";
        }) != nullptr);
}

TEST_CASE("parse throws on empty or token-free text") {
  CHECK_THROWS_AS(parse(unit_of("")), ParseFailure);
  CHECK_THROWS_AS(parse(unit_of("   \n  ")), ParseFailure);
  CHECK_THROWS_AS(parse(unit_of("(((")), ParseFailure);
}

TEST_CASE("strip_comments replaces each comment with one space") {
  std::string text = "int x = 1; // trailing\nint /* mid */ y = 2;\n";
  SourceUnit stripped = strip_comments(unit_of(text));
  CHECK(stripped.text == "int x = 1;  \nint   y = 2;\n");

  // A second pass changes nothing.
  SourceUnit twice = strip_comments(stripped);
  CHECK(twice.text == stripped.text);
}

TEST_CASE("strip_comments handles multi-line block comments") {
  std::string text = "int a;\n/* one\n   two */\nint b;\n";
  SourceUnit stripped = strip_comments(unit_of(text));
  CHECK(stripped.text.find("one") == std::string::npos);
  CHECK(stripped.text.find("int b;") != std::string::npos);
  SyntaxTree tree = parse(stripped);
  CHECK_FALSE(tree.degraded());
}

TEST_CASE("to_plain_code validates spans") {
  std::string text = "int x;";
  SyntaxTree tree = parse(unit_of(text));
  SyntaxNode bogus;
  bogus.kind = "identifier";
  bogus.span = {2, 99};
  CHECK_THROWS_AS(to_plain_code(bogus, tree.unit()), SpanOutOfRange);
}

TEST_CASE("taxonomy classifies kinds") {
  const KindTaxonomy& tax = KindTaxonomy::builtin();
  CHECK(tax.is_statement("if_statement"));
  CHECK(tax.is_statement("function_definition"));
  CHECK(tax.is_expression("assignment_expression"));
  CHECK(tax.is_expression("call_expression"));
  CHECK_FALSE(tax.is_statement("assignment_expression"));
  CHECK_FALSE(tax.is_expression("identifier"));
  CHECK(tax.qualifies("for_statement"));
  CHECK_FALSE(tax.qualifies("compound_statement"));
  CHECK_FALSE(tax.qualifies("identifier"));
}

TEST_CASE("is_subtype_of rejects unknown kinds and categories") {
  CHECK(is_subtype_of("if_statement", "statement"));
  CHECK(is_subtype_of("call_expression", "expression"));
  CHECK_FALSE(is_subtype_of("call_expression", "statement"));
  CHECK_FALSE(is_subtype_of("identifier", "expression"));
  CHECK_THROWS_AS(is_subtype_of("made_up_kind", "statement"), UnknownKind);
  CHECK_THROWS_AS(is_subtype_of("if_statement", "made_up_category"),
                  UnknownKind);
}

TEST_CASE("walk and path_to agree on node identity") {
  std::string text = "int f() { return g(1); }";
  SyntaxTree tree = parse(unit_of(text));
  const SyntaxNode& call = first_kind(tree, "call_expression");
  std::vector<const SyntaxNode*> path = path_to(tree.root(), call);
  REQUIRE_FALSE(path.empty());
  CHECK(path.front() == &tree.root());
  CHECK(path.back() == &call);
  bool seen = false;
  walk(tree.root(), [&](const SyntaxNode& n) { seen = seen || &n == &call; });
  CHECK(seen);
}

TEST_CASE("truncated functions stay usable but flag degradation") {
  std::string text = "int f(int a) {\n  a = a + 1;\n  return a;\n";  // no }
  SyntaxTree tree = parse(unit_of(text));
  CHECK(tree.degraded());
  CHECK(find_first(tree.root(), [](const SyntaxNode& n) {
          return n.kind == "assignment_expression";
        }) != nullptr);
}

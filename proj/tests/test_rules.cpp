#include <doctest.h>

#include <optional>
#include <string>
#include <vector>

#include "spvr/errors.hpp"
#include "spvr/met.hpp"
#include "spvr/rules.hpp"
#include "spvr/syntax.hpp"

using namespace spvr;

namespace {

struct MetFixture {
  SyntaxTree tree;
  MinimumEditTree met;
};

// Locates the tree rooted at the first node of `kind` whose text contains
// `marker`, as an online-located tree (no fixed side needed for rules).
MetFixture fixture(const std::string& code, const std::string& kind,
                   const std::string& marker) {
  SyntaxTree tree = parse(SourceUnit{code, Language::kC});
  const SyntaxNode* root = find_first(tree.root(), [&](const SyntaxNode& n) {
    return n.kind == kind &&
           to_plain_code(n, tree.unit()).find(marker) != std::string::npos;
  });
  REQUIRE(root != nullptr);
  MinimumEditTree met;
  met.vulnerable_root = root;
  met.fixed_root = nullptr;
  met.type = root->kind;
  return MetFixture{std::move(tree), std::move(met)};
}

std::vector<CheckId> checks_fired(const std::vector<RuleFinding>& findings) {
  std::vector<CheckId> out;
  for (const RuleFinding& f : findings) out.push_back(f.check);
  return out;
}

}  // namespace

TEST_CASE("normalized_similarity is 1 minus scaled edit distance") {
  CHECK(normalized_similarity("abc", "abc") == doctest::Approx(1.0));
  CHECK(normalized_similarity("abc", "abd") == doctest::Approx(2.0 / 3.0));
  CHECK(normalized_similarity("", "") == doctest::Approx(1.0));
  CHECK(normalized_similarity("a", "") == doctest::Approx(0.0));
  CHECK(normalized_similarity("buf_len", "buffer_len") ==
        doctest::Approx(0.7));
}

TEST_CASE("applicable_checks models the six tree types") {
  using C = CheckId;
  CHECK(applicable_checks("if_statement") ==
        std::vector<C>{C::kPossibleVariableUse, C::kNumberLiteral,
                       C::kFunctionCall, C::kCondition});
  CHECK(applicable_checks("assignment_expression") ==
        std::vector<C>{C::kPossibleVariableUse, C::kNumberLiteral,
                       C::kFunctionCall, C::kTypeCast, C::kMinMax,
                       C::kTernary});
  CHECK(applicable_checks("call_expression") ==
        std::vector<C>{C::kBufferWords, C::kScopeResolution});
  CHECK(applicable_checks("declaration") ==
        std::vector<C>{C::kNumberLiteral, C::kFunctionCall, C::kTypeCast,
                       C::kTypeCheck, C::kInitialization, C::kPointer});
  CHECK(applicable_checks("for_statement") ==
        std::vector<C>{C::kPossibleVariableUse, C::kNumberLiteral,
                       C::kCondition});
  CHECK(applicable_checks("function_definition") ==
        std::vector<C>{C::kTypeCheck, C::kStaticMethod});
  CHECK_THROWS_AS(applicable_checks("while_statement"), UnsupportedMetType);
}

TEST_CASE("possible_variable_use reports recurring member paths") {
  std::string code =
      "int check(struct entry *e, int limit) {\n"
      "  if (e->offset > limit) {\n"
      "    return -1;\n"
      "  }\n"
      "  log_use(e->next_offset);\n"
      "  total = total + e->next_offset;\n"
      "  return 0;\n"
      "}\n";
  MetFixture fx = fixture(code, "if_statement", "offset > limit");
  auto finding = possible_variable_use(fx.met, fx.tree, RuleConfig{});
  REQUIRE(finding.has_value());
  REQUIRE_FALSE(finding->referenced_symbols.empty());
  CHECK(finding->referenced_symbols[0] == "e->next_offset");
  CHECK(finding->instruction.find("e->next_offset") != std::string::npos);
}

TEST_CASE("possible_variable_use reports similar recurring identifiers") {
  std::string code =
      "int scale(int value) {\n"
      "  int scaled_len = value;\n"
      "  if (scale_len > 10) {\n"
      "    return 1;\n"
      "  }\n"
      "  scaled_len = scaled_len + 1;\n"
      "  use(scaled_len);\n"
      "  return scaled_len;\n"
      "}\n";
  MetFixture fx = fixture(code, "if_statement", "scale_len");
  auto finding = possible_variable_use(fx.met, fx.tree, RuleConfig{});
  REQUIRE(finding.has_value());
  CHECK(finding->referenced_symbols ==
        std::vector<std::string>{"scaled_len"});

  // A stricter similarity threshold silences it.
  RuleConfig strict;
  strict.similarity_threshold = 0.95;
  CHECK_FALSE(possible_variable_use(fx.met, fx.tree, strict).has_value());
}

TEST_CASE("possible_variable_use needs the context to recur") {
  std::string code =
      "int f(int a) {\n"
      "  if (a > 0) {\n"
      "    return 1;\n"
      "  }\n"
      "  once(b_value);\n"
      "  return 0;\n"
      "}\n";
  MetFixture fx = fixture(code, "if_statement", "a > 0");
  CHECK_FALSE(possible_variable_use(fx.met, fx.tree, RuleConfig{}).has_value());
}

TEST_CASE("check_number_literal skips zero and one in any spelling") {
  std::string code =
      "void f() {\n"
      "  x = a + 0;\n"
      "  y = b * 1;\n"
      "  z = c + 0x1;\n"
      "  w = d + 1.0;\n"
      "  v = e + 1u;\n"
      "  u = g + 42;\n"
      "  t = h + 0x10;\n"
      "}\n";
  SyntaxTree tree = parse(SourceUnit{code, Language::kC});
  MinimumEditTree met;
  met.vulnerable_root = &tree.root();
  met.type = "if_statement";
  auto finding = check_number_literal(met, tree);
  REQUIRE(finding.has_value());
  CHECK(finding->referenced_symbols ==
        std::vector<std::string>{"42", "0x10"});
}

TEST_CASE("check_function_call lists callees verbatim") {
  MetFixture fx = fixture(
      "void f() {\n  if (validate(read_size(buf), n)) {\n    g();\n  }\n}\n",
      "if_statement", "validate");
  auto finding = check_function_call(fx.met, fx.tree);
  REQUIRE(finding.has_value());
  CHECK(finding->referenced_symbols ==
        std::vector<std::string>{"validate", "read_size", "g"});
}

TEST_CASE("check_type_cast reports the cast types") {
  MetFixture fx = fixture(
      "void f() {\n  total = (unsigned long)count + (int)extra;\n}\n",
      "assignment_expression", "total");
  auto finding = check_type_cast(fx.met, fx.tree);
  REQUIRE(finding.has_value());
  CHECK(finding->referenced_symbols ==
        std::vector<std::string>{"unsigned long", "int"});
}

TEST_CASE("check_type flags signed arithmetic types only") {
  SUBCASE("plain int fires") {
    MetFixture fx = fixture("void f() {\n  int len = n;\n  use(len);\n}\n",
                            "declaration", "len");
    auto finding = check_type(fx.met, fx.tree);
    REQUIRE(finding.has_value());
    CHECK(finding->referenced_symbols == std::vector<std::string>{"int"});
  }
  SUBCASE("unsigned variants stay silent") {
    MetFixture fx = fixture(
        "void f() {\n  unsigned int len = n;\n  use(len);\n}\n",
        "declaration", "len");
    CHECK_FALSE(check_type(fx.met, fx.tree).has_value());
  }
  SUBCASE("size_t stays silent") {
    MetFixture fx = fixture("void f() {\n  size_t len = n;\n  use(len);\n}\n",
                            "declaration", "len");
    CHECK_FALSE(check_type(fx.met, fx.tree).has_value());
  }
  SUBCASE("long long fires once with the full spelling") {
    MetFixture fx = fixture(
        "void f() {\n  long long len = n;\n  use(len);\n}\n",
        "declaration", "len");
    auto finding = check_type(fx.met, fx.tree);
    REQUIRE(finding.has_value());
    CHECK(finding->referenced_symbols ==
          std::vector<std::string>{"long long"});
  }
}

TEST_CASE("check_condition reports relational operators in order") {
  SUBCASE("if condition") {
    MetFixture fx = fixture(
        "void f(int a, int b) {\n  if (a < b && b >= 3 && a < 9) {\n    g();\n  }\n}\n",
        "if_statement", "a < b");
    auto finding = check_condition(fx.met, fx.tree);
    REQUIRE(finding.has_value());
    CHECK(finding->referenced_symbols == std::vector<std::string>{"<", ">="});
  }
  SUBCASE("for condition") {
    MetFixture fx = fixture(
        "void f(int n) {\n  for (int i = 0; i <= n; i = i + 1) {\n    g(i);\n  }\n}\n",
        "for_statement", "i <= n");
    auto finding = check_condition(fx.met, fx.tree);
    REQUIRE(finding.has_value());
    CHECK(finding->referenced_symbols == std::vector<std::string>{"<="});
  }
  SUBCASE("equality-only condition is silent") {
    MetFixture fx = fixture(
        "void f(int a) {\n  if (a == 3) {\n    g();\n  }\n}\n",
        "if_statement", "a == 3");
    CHECK_FALSE(check_condition(fx.met, fx.tree).has_value());
  }
  SUBCASE("unsupported tree type throws") {
    MetFixture fx = fixture("void f() {\n  a = b;\n}\n",
                            "assignment_expression", "a = b");
    CHECK_THROWS_AS(check_condition(fx.met, fx.tree), UnsupportedMetType);
  }
}

TEST_CASE("extra checks fire per tree type") {
  SUBCASE("assignment without min/max suggests clamping") {
    MetFixture fx = fixture(
        "void f() {\n  len = a + b;\n  use(len, cap_len);\n  use(len, cap_len);\n}\n",
        "assignment_expression", "len = a");
    std::vector<RuleFinding> extras =
        run_extra_checks(fx.met, fx.tree, RuleConfig{});
    std::vector<CheckId> ids = checks_fired(extras);
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kMinMax) == 1);
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kTernary) == 1);
  }
  SUBCASE("assignment that already clamps is quiet about min/max") {
    MetFixture fx = fixture("void f() {\n  len = min(a, b);\n}\n",
                            "assignment_expression", "len");
    std::vector<CheckId> ids =
        checks_fired(run_extra_checks(fx.met, fx.tree, RuleConfig{}));
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kMinMax) == 0);
  }
  SUBCASE("buffer-flavored calls are flagged") {
    MetFixture fx = fixture("void f() {\n  memcpy(dst, src, n);\n}\n",
                            "call_expression", "memcpy");
    std::vector<RuleFinding> extras =
        run_extra_checks(fx.met, fx.tree, RuleConfig{});
    REQUIRE_FALSE(extras.empty());
    CHECK(extras[0].check == CheckId::kBufferWords);
    CHECK(extras[0].referenced_symbols ==
          std::vector<std::string>{"memcpy"});
    // No "::" in the call: the scope-resolution check also fires.
    std::vector<CheckId> ids = checks_fired(extras);
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kScopeResolution) == 1);
  }
  SUBCASE("uninitialized declarations are flagged") {
    MetFixture fx = fixture("void f() {\n  int count;\n  use(count);\n}\n",
                            "declaration", "count");
    std::vector<RuleFinding> extras =
        run_extra_checks(fx.met, fx.tree, RuleConfig{});
    std::vector<CheckId> ids = checks_fired(extras);
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kInitialization) == 1);
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kPointer) == 1);
    for (const RuleFinding& f : extras) {
      if (f.check == CheckId::kInitialization) {
        CHECK(f.referenced_symbols == std::vector<std::string>{"count"});
      }
    }
  }
  SUBCASE("initialized pointer declarations are quiet") {
    MetFixture fx = fixture("void f() {\n  char *p = q;\n  use(p);\n}\n",
                            "declaration", "p");
    std::vector<CheckId> ids =
        checks_fired(run_extra_checks(fx.met, fx.tree, RuleConfig{}));
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kInitialization) == 0);
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kPointer) == 0);
  }
  SUBCASE("non-static function definitions are flagged") {
    MetFixture fx = fixture("int helper(int a) {\n  return a;\n}\n",
                            "function_definition", "helper");
    std::vector<RuleFinding> extras =
        run_extra_checks(fx.met, fx.tree, RuleConfig{});
    std::vector<CheckId> ids = checks_fired(extras);
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kStaticMethod) == 1);
    CHECK(extras[0].referenced_symbols ==
          std::vector<std::string>{"helper"});
  }
  SUBCASE("static function definitions are quiet") {
    MetFixture fx = fixture("static int helper(int a) {\n  return a;\n}\n",
                            "function_definition", "helper");
    std::vector<CheckId> ids =
        checks_fired(run_extra_checks(fx.met, fx.tree, RuleConfig{}));
    CHECK(std::count(ids.begin(), ids.end(), CheckId::kStaticMethod) == 0);
  }
}

TEST_CASE("run_rules caps findings and numbers priorities") {
  // An if tree where variable-use, number-literal, function-call, and
  // condition checks would all fire: the cap keeps the first three.
  std::string code =
      "int f(struct e *p, int limit) {\n"
      "  if (read_size(p) + 16 < limit) {\n"
      "    return 1;\n"
      "  }\n"
      "  use(p->len);\n"
      "  save(p->len);\n"
      "  return 0;\n"
      "}\n";
  MetFixture fx = fixture(code, "if_statement", "read_size");
  std::vector<RuleFinding> findings = run_rules(fx.met, fx.tree, RuleConfig{});
  REQUIRE(findings.size() == 3);
  CHECK(findings[0].check == CheckId::kPossibleVariableUse);
  CHECK(findings[1].check == CheckId::kNumberLiteral);
  CHECK(findings[2].check == CheckId::kFunctionCall);
  CHECK(findings[0].priority == 1);
  CHECK(findings[1].priority == 2);
  CHECK(findings[2].priority == 3);

  RuleConfig wide;
  wide.max_findings = 10;
  std::vector<RuleFinding> all = run_rules(fx.met, fx.tree, wide);
  CHECK(all.size() == 4);
  CHECK(all[3].check == CheckId::kCondition);
}

TEST_CASE("keep_variables gathers condition and finding symbols") {
  std::string code =
      "int f(struct e *p, int limit) {\n"
      "  if (p->len < limit) {\n"
      "    return 1;\n"
      "  }\n"
      "  use(p->cap);\n"
      "  save(p->cap);\n"
      "  return 0;\n"
      "}\n";
  MetFixture fx = fixture(code, "if_statement", "p->len < limit");
  std::vector<RuleFinding> findings = run_rules(fx.met, fx.tree, RuleConfig{});
  std::vector<std::string> keep = keep_variables(fx.met, fx.tree, findings);
  // Condition mentions p, limit, and the path p->len.
  CHECK(std::find(keep.begin(), keep.end(), "p") != keep.end());
  CHECK(std::find(keep.begin(), keep.end(), "limit") != keep.end());
  CHECK(std::find(keep.begin(), keep.end(), "p->len") != keep.end());
  CHECK(std::find(keep.begin(), keep.end(), "len") != keep.end());
  // The variable-use finding contributes p->cap and its parts.
  CHECK(std::find(keep.begin(), keep.end(), "p->cap") != keep.end());
  CHECK(std::find(keep.begin(), keep.end(), "cap") != keep.end());
}

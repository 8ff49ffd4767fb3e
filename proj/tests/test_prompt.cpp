#include <doctest.h>

#include <string>
#include <vector>

#include "spvr/errors.hpp"
#include "spvr/met.hpp"
#include "spvr/prompt.hpp"
#include "spvr/rules.hpp"
#include "spvr/source.hpp"
#include "spvr/syntax.hpp"

using namespace spvr;

namespace {

struct MetFixture {
  SyntaxTree tree;
  MinimumEditTree met;
};

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

const std::string kBranchCode =
    "int route(struct pkt *p, int limit) {\n"        // 1
    "  if (p->len > limit) {\n"                      // 2
    "    int extra = p->len;\n"                      // 3
    "    log(\"overflow\");\n"                       // 4
    "    counter = counter + 1;\n"                   // 5
    "    use(tag);\n"                                // 6
    "    return -1;\n"                               // 7
    "  }\n"                                          // 8
    "  return 0;\n"                                  // 9
    "}\n";                                           // 10

}  // namespace

TEST_CASE("cwe_info builds the weakness sentence") {
  CHECK(cwe_info("CWE-787", "if_statement") ==
        "This if_statement has a problem of Out-of-bounds Write.");
  CHECK(cwe_info("CWE-125", "assignment_expression") ==
        "This assignment_expression has a problem of Out-of-bounds Read.");
  CHECK_THROWS_AS(cwe_info("CWE-9999", "if_statement"), UnknownCwe);
  CHECK_THROWS_AS(cwe_info("CWE-787", "while_statement"), UnsupportedMetType);
}

TEST_CASE("top-25 lookup") {
  CHECK(is_top25_cwe("CWE-787"));
  CHECK(is_top25_cwe("CWE-276"));
  CHECK_FALSE(is_top25_cwe("CWE-703"));
  CHECK_FALSE(is_top25_cwe("787"));
  CHECK(cwe_name("CWE-119") ==
        "Improper Restriction of Operations within the Bounds of a Memory "
        "Buffer");
  CHECK_THROWS_AS(cwe_name("CWE-1"), UnknownCwe);
}

TEST_CASE("regenerate_code keeps selected branch body lines") {
  MetFixture fx = fixture(kBranchCode, "if_statement", "p->len > limit");
  std::string regen = regenerate_code(fx.met, fx.tree, {"counter"});
  CHECK(regen ==
        "  if (p->len > limit) {\n"
        "    log(\"overflow\");\n"
        "    counter = counter + 1;\n"
        "    return -1;\n"
        "  }");
}

TEST_CASE("regenerate_code trims from the end to honor the budget") {
  MetFixture fx = fixture(kBranchCode, "if_statement", "p->len > limit");
  std::vector<std::string> lines = split_lines(kBranchCode);

  SUBCASE("tiny budget keeps only the header line") {
    PromptOptions options;
    options.regen_char_budget = 1;
    CHECK(regenerate_code(fx.met, fx.tree, {"counter"}, options) == lines[1]);
  }
  SUBCASE("budget cuts between kept lines") {
    PromptOptions options;
    options.regen_char_budget = lines[1].size() + 1 + lines[3].size();
    CHECK(regenerate_code(fx.met, fx.tree, {"counter"}, options) ==
          lines[1] + "\n" + lines[3]);
  }
}

TEST_CASE("regenerate_code emits whole function definitions") {
  std::string code =
      "static int twice(int a) {\n"
      "  int b = a + a;\n"
      "  return b;\n"
      "}\n";
  MetFixture fx = fixture(code, "function_definition", "twice");
  CHECK(regenerate_code(fx.met, fx.tree, {}) ==
        "static int twice(int a) {\n"
        "  int b = a + a;\n"
        "  return b;\n"
        "}");

  std::vector<std::string> lines = split_lines(code);
  PromptOptions options;
  options.regen_char_budget = lines[0].size() + 1 + lines[1].size();
  CHECK(regenerate_code(fx.met, fx.tree, {}, options) ==
        lines[0] + "\n" + lines[1]);
}

TEST_CASE("regenerate_code runs expression trees to the end of the function") {
  std::string code =
      "int f() {\n"
      "  a = b + c;\n"
      "  use(a);\n"
      "  return a;\n"
      "}\n"
      "int g() {\n"
      "  return 1;\n"
      "}\n";
  MetFixture fx = fixture(code, "assignment_expression", "a = b");
  CHECK(regenerate_code(fx.met, fx.tree, {}) ==
        "  a = b + c;\n"
        "  use(a);\n"
        "  return a;\n"
        "}");
}

TEST_CASE("assemble_prompts shares the sentence and code across bundles") {
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
  REQUIRE(findings.size() == 2);

  std::vector<PromptBundle> bundles =
      assemble_prompts("s-1", "CWE-787", fx.met, fx.tree, findings);
  REQUIRE(bundles.size() == 2);
  CHECK(bundles[0].sample_id == "s-1");
  CHECK(bundles[0].ordinal == 1);
  CHECK(bundles[1].ordinal == 2);
  CHECK(bundles[0].cwe_part == cwe_info("CWE-787", "if_statement"));
  CHECK(bundles[0].cwe_part == bundles[1].cwe_part);
  CHECK(bundles[0].regen_code == bundles[1].regen_code);
  CHECK(bundles[0].met_part == findings[0].instruction);
  CHECK(bundles[1].met_part == findings[1].instruction);
  CHECK(bundles[0].met_part != bundles[1].met_part);

  for (const PromptBundle& b : bundles) {
    CHECK(b.assembled ==
          b.cwe_part + "\n" + b.met_part +
              "\nThe code below is the relevant part of the vulnerable "
              "function:\n" +
              b.regen_code +
              "\nReturn only the fixed if_statement, enclosed in a single "
              "``` code fence, with no explanation.");
  }
}

TEST_CASE("assemble_prompts falls back when no check fired") {
  std::string code =
      "int f(int a, int b) {\n"
      "  if (a == b) {\n"
      "  }\n"
      "  return 0;\n"
      "}\n";
  MetFixture fx = fixture(code, "if_statement", "a == b");
  std::vector<RuleFinding> findings = run_rules(fx.met, fx.tree, RuleConfig{});
  REQUIRE(findings.empty());

  std::vector<PromptBundle> bundles =
      assemble_prompts("s-2", "CWE-125", fx.met, fx.tree, findings);
  REQUIRE(bundles.size() == 1);
  CHECK(bundles[0].met_part ==
        "Re-examine this if_statement and repair the vulnerability in it.");
  CHECK(bundles[0].cwe_part ==
        "This if_statement has a problem of Out-of-bounds Read.");
}

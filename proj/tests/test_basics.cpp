#include <doctest.h>

#include <set>

#include "bb/errors.h"
#include "bb/rng.h"
#include "bb/shorthand.h"
#include "bb/templates.h"
#include "bb/text.h"

using namespace bb;

TEST_CASE("tokenize lowercases and splits on punctuation") {
  CHECK(tokenize("Hello, World! x2") == std::vector<std::string>{"hello", "world", "x2"});
  CHECK(tokenize("...!!!").empty());
  CHECK(tokenize("Ünïcode «ΑΒΓ»") == std::vector<std::string>{"ünïcode", "αβγ"});
}

TEST_CASE("fnv1a64 known vectors and seeding") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("a", 1) != fnv1a64("a"));
}

TEST_CASE("Rng streams are reproducible") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
  }
  CHECK(Rng(42).next() != c.next());
  auto s1 = Rng::stream(9, 3), s2 = Rng::stream(9, 3), s3 = Rng::stream(9, 4);
  CHECK(s1.next() == s2.next());
  CHECK(Rng::stream(9, 3).next() != s3.next());
  Rng u(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.unit();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    REQUIRE(u.below(7) < 7);
  }
}

TEST_CASE("sample_without_replacement draws distinct indices") {
  Rng r(1);
  const auto s = sample_without_replacement(50, 50, r);
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 50);
  Rng r1(2), r2(2);
  CHECK(sample_without_replacement(1000, 20, r1) == sample_without_replacement(1000, 20, r2));
  CHECK(sample_without_replacement(10, 0, r).empty());
}

TEST_CASE("shorthand grammar") {
  const auto sh = parse_shorthand("Code Generation & python & string_ops");
  CHECK(sh.skill == "code_generation");
  CHECK(sh.keys == std::vector<std::string>{"python", "string_ops"});
  CHECK(render_shorthand(sh) == "code_generation & python & string_ops");
  CHECK(parse_shorthand("chess").keys.empty());
  CHECK_THROWS_AS(parse_shorthand("a & b & c & d & e"), FormatError);
  CHECK_THROWS_AS(parse_shorthand(" & b"), FormatError);
  CHECK_THROWS_AS(parse_shorthand("a & b-c"), FormatError);
  CHECK(parse_shorthand(render_shorthand(sh)) == sh);
}

TEST_CASE("templates render and reject unbound placeholders") {
  for (auto id : {TemplateId::rephrasing, TemplateId::example_synthesis, TemplateId::shorthand_rewrite,
                  TemplateId::selection_judge, TemplateId::evaluation_judge}) {
    CHECK(parse_template_id(template_name(id)) == id);
    Variables vars;
    for (const auto& p : template_placeholders(id)) vars[p] = "VALUE_" + p;
    const auto out = render_template(id, vars);
    CHECK(out.find('{' + template_placeholders(id).front() + '}') == std::string::npos);
    if (!vars.empty()) {
      vars.erase(vars.begin());
      CHECK_THROWS_AS(render_template(id, vars), TemplateError);
    }
  }
}

TEST_CASE("tag extraction and score/label parsing") {
  CHECK(extract_tags("<a> x </a><a>y</a>", "a") == std::vector<std::string>{"x", "y"});
  CHECK(parse_score_tag("<score>1</score>") == 1);
  CHECK(parse_score_tag("<score>-1</score>") == -1);
  CHECK_FALSE(parse_score_tag("<score>2</score>").has_value());
  CHECK_FALSE(parse_score_tag("<score>1</score><score>0</score>").has_value());
  CHECK(parse_label_tag("<label>RELEVANT</label>") == 2);
  CHECK(parse_label_tag("<label>PARTIAL RELEVANT</label>") == 1);
  CHECK(parse_label_tag("<label>IRRELEVANT</label>") == 0);
  CHECK_FALSE(parse_label_tag("<label>MAYBE</label>").has_value());
  CHECK_THROWS_AS(validate_response(TemplateId::selection_judge, "no tags"), ResponseFormatError);
  CHECK_NOTHROW(validate_response(TemplateId::evaluation_judge, "<label>RELEVANT</label>"));
}

#include <doctest.h>

#include "../common/parse_corpus.hpp"
#include "adlforge/annotate/llm_parse.hpp"
#include "adlforge/model/error.hpp"

using namespace adlforge;
using namespace adlforge::annotate;

TEST_SUITE("parse") {

TEST_CASE("corpus cases match their strict oracles") {
  const auto results = testing::run_parse_corpus(ADLFORGE_TEST_DATA_DIR "/fixtures/parse_corpus.json");
  CHECK(results.size() == 30);
  for (const auto& r : results) {
    INFO(r.id, ": ", r.detail);
    CHECK(r.ok);
  }
}

TEST_CASE("strategies are reported in order of attempt") {
  std::string s;
  CHECK(parse_json_lenient(R"({"Q":"q","A":"a"})", &s));
  CHECK(s == "strict");
  CHECK(parse_json_lenient("x ```json\n{\"Q\":1}\n```", &s));
  CHECK(s == "extracted");
  CHECK(parse_json_lenient("{'Q': 'q'}", &s));
  CHECK(s == "normalized");
  CHECK_FALSE(parse_json_lenient("nothing here", &s));
  CHECK_FALSE(parse_json_lenient("", &s));
}

TEST_CASE("helpers") {
  CHECK(strip_code_fences("a\n```json\n[1]\n```\nb") == "[1]\n");
  CHECK(strip_code_fences("plain") == "plain");
  CHECK(extract_bracketed("see {\"a\": [1]} ok") == "{\"a\": [1]}");
  CHECK(extract_bracketed("none") == "");
  CHECK(normalize_python_literal("{'a': True, 'b': [None, False,],}") == R"({"a": true, "b": [null, false]})");
}

TEST_CASE("failures carry the raw text") {
  try {
    parse_llm_mapping("I cannot help with that.", 1);
    FAIL("expected ParseError");
  } catch (const ArityError&) {
    FAIL("not an arity problem");
  } catch (const ParseError& e) {
    CHECK(e.raw() == "I cannot help with that.");
  }
  CHECK_THROWS_AS(parse_llm_mapping(R"([{"Q":"q","A":"a"}])", 3), ArityError);
  CHECK_THROWS_AS(parse_llm_mapping(R"({"Q":"q","A":"a"})", 3), ArityError);
  CHECK_THROWS_AS(parse_llm_mapping(R"({"Q":"q"})", 1), ParseError);
  CHECK_THROWS_AS(parse_llm_mapping(R"({"Q":"q","A":["x"]})", 1), ParseError);
  CHECK_THROWS_AS(parse_llm_mapping(R"("just text")", 1), ParseError);
}

TEST_CASE("extra keys are dropped with a warning") {
  const auto p = parse_llm_mapping(R"({"Q":"q","A":"a","why":"because"})", 1);
  REQUIRE(p.items.size() == 1);
  CHECK(p.warnings.size() == 1);
}

TEST_CASE("strict rendering round-trips") {
  const std::vector<QaItem> items = {{"Why \"so\"?", "It's\nfine"}, {"q2", "a2"}, {"q3", "{a3}"}};
  CHECK(parse_llm_mapping(to_strict_json(items, 3), 3).items == items);
  CHECK(parse_llm_mapping(to_strict_json({items[0]}, 1), 1).items == std::vector<QaItem>{items[0]});
}

}  // TEST_SUITE

#include "simpdel/discourse.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"
#include "support/tempfile.hpp"

using namespace simpdel;
using testsupport::TempDir;
using nlohmann::json;

namespace {

json leaf(int sentence) { return {{"leaf", true}, {"sentence", sentence}}; }

json node(const std::string& relation, std::vector<json> children,
          std::vector<std::string> nuclearity) {
  return {{"relation", relation}, {"children", children}, {"nuclearity", nuclearity}};
}

RstTree tree_of(const json& root) { return parse_rst_tree(root, "test"); }

}  // namespace

TEST_CASE("single-leaf tree is valid with depth zero", "[discourse]") {
  const RstTree t = tree_of(leaf(0));
  CHECK(t.nodes.size() == 1);
  CHECK(sentence_depth(t, 0) == 0);
  CHECK(nuclearity(t, 0) == Nuclearity::Nucleus);  // root convention
  CHECK(governing_relation(t, 0) == Relation::Root);
}

TEST_CASE("two-leaf nucleus-satellite elaboration", "[discourse]") {
  const RstTree t = tree_of(node("elaboration", {leaf(0), leaf(1)}, {"N", "S"}));
  CHECK(sentence_depth(t, 0) == 1);
  CHECK(sentence_depth(t, 1) == 1);
  CHECK(nuclearity(t, 0) == Nuclearity::Nucleus);
  CHECK(nuclearity(t, 1) == Nuclearity::Satellite);
  CHECK(governing_relation(t, 0) == Relation::Root);
  CHECK(governing_relation(t, 1) == Relation::Elaboration);
}

TEST_CASE("all-satellite nodes are rejected", "[discourse]") {
  CHECK_THROWS_WITH(tree_of(node("contrast", {leaf(0), leaf(1)}, {"S", "S"})),
                    Catch::Matchers::ContainsSubstring("no Nucleus child"));
}

TEST_CASE("leaves need sentence indices and nuclearity must match arity", "[discourse]") {
  CHECK_THROWS_WITH(tree_of(json{{"leaf", true}}),
                    Catch::Matchers::ContainsSubstring("sentence index"));
  CHECK_THROWS_WITH(tree_of(node("span", {leaf(0), leaf(1)}, {"N"})),
                    Catch::Matchers::ContainsSubstring("nuclearity"));
  CHECK_THROWS_WITH(tree_of(node("span", {leaf(0)}, {"N"})),
                    Catch::Matchers::ContainsSubstring("at least 2 children"));
  CHECK_THROWS_WITH(tree_of(node("span", {leaf(0), leaf(1)}, {"N", "X"})),
                    Catch::Matchers::ContainsSubstring("\"X\""));
}

TEST_CASE("figure-2 style tree: satellite leaf below the root", "[discourse]") {
  // root = background(N = [1]-[2] relation node, S = [3])
  // inner = elaboration(N = [1], S = [2])
  const json inner = node("elaboration", {leaf(0), leaf(1)}, {"N", "S"});
  const RstTree t = tree_of(node("background", {inner, leaf(2)}, {"N", "S"}));
  CHECK(sentence_depth(t, 1) == 2);
  CHECK(nuclearity(t, 1) == Nuclearity::Satellite);
  CHECK(nuclearity(t, 0) == Nuclearity::Nucleus);
  CHECK(governing_relation(t, 1) == Relation::Elaboration);
  CHECK(governing_relation(t, 2) == Relation::Background);
}

TEST_CASE("balanced four-leaf tree puts every sentence at depth two", "[discourse]") {
  const json left = node("joint", {leaf(0), leaf(1)}, {"N", "N"});
  const json right = node("joint", {leaf(2), leaf(3)}, {"N", "N"});
  const RstTree t = tree_of(node("joint", {left, right}, {"N", "N"}));
  for (int s = 0; s < 4; ++s) CHECK(sentence_depth(t, s) == 2);
}

TEST_CASE("multi-EDU sentences use their lowest spanning node", "[discourse]") {
  // sentence 0 spans two leaves under one node; sentence 1 is a sibling leaf
  const json span0 = node("same-unit", {leaf(0), leaf(0)}, {"N", "N"});
  const RstTree t = tree_of(node("elaboration", {span0, leaf(1)}, {"N", "S"}));
  CHECK(sentence_depth(t, 0) == 1);  // the spanning node, not the leaves at depth 2
  CHECK(sentence_depth(t, 1) == 1);
  CHECK(nuclearity(t, 0) == Nuclearity::Nucleus);
}

TEST_CASE("multi-EDU sentence without a spanning node falls back to the LCA",
          "[discourse]") {
  // sentence 0's two leaves sit in different subtrees; LCA = root
  const json left = node("joint", {leaf(0), leaf(1)}, {"N", "N"});
  const json right = node("joint", {leaf(2), leaf(0)}, {"N", "N"});
  const RstTree t = tree_of(node("joint", {left, right}, {"N", "N"}));
  CHECK(sentence_depth(t, 0) == 0);  // LCA is the root
  CHECK(sentence_depth(t, 1) == 2);
}

TEST_CASE("governing relation walks to the first satellite ascent", "[discourse]") {
  // leaf 0 is the nucleus of a contrast node which is the satellite of an
  // explanation node
  const json contrast = node("contrast", {leaf(0), leaf(1)}, {"N", "S"});
  const RstTree t = tree_of(node("explanation", {leaf(2), contrast}, {"N", "S"}));
  CHECK(governing_relation(t, 0) == Relation::Explanation);
  CHECK(governing_relation(t, 1) == Relation::Contrast);
  CHECK(governing_relation(t, 2) == Relation::Root);
}

TEST_CASE("relation labels map by case-insensitive prefix", "[discourse]") {
  CHECK(classify_relation("Elaboration-additional") == Relation::Elaboration);
  CHECK(classify_relation("CONTRAST") == Relation::Contrast);
  CHECK(classify_relation("background-circumstance") == Relation::Background);
  CHECK(classify_relation("joint") == Relation::OtherRel);
  CHECK(classify_relation("evaluation-s") == Relation::Evaluation);
  CHECK(classify_relation("explanation-argumentative") == Relation::Explanation);
}

TEST_CASE("root-governed sentences ride an all-nucleus path", "[discourse]") {
  const json inner = node("list", {leaf(0), leaf(1)}, {"N", "N"});
  const json mid = node("elaboration", {inner, leaf(2)}, {"N", "S"});
  const RstTree t = tree_of(node("evaluation", {mid, leaf(3)}, {"N", "S"}));
  for (int s = 0; s <= 1; ++s) {
    REQUIRE(governing_relation(t, s) == Relation::Root);
    // verify the path really is all-nucleus
    int cur = sentence_node(t, s);
    while (t.nodes[cur].parent != -1) {
      const auto& parent = t.nodes[t.nodes[cur].parent];
      CHECK(parent.child_nuc[t.nodes[cur].pos_in_parent] == Nuclearity::Nucleus);
      cur = parent.id;
    }
  }
}

TEST_CASE("rightmost leaf of a left-nucleus elaboration chain is governed by elaboration",
          "[discourse]") {
  json cur = leaf(3);
  for (int s = 2; s >= 0; --s) cur = node("elaboration", {leaf(s), cur}, {"N", "S"});
  const RstTree t = tree_of(cur);
  CHECK(governing_relation(t, 3) == Relation::Elaboration);
  CHECK(sentence_depth(t, 3) == 3);
  CHECK(sentence_depth(t, 0) == 1);
  // depth is bounded by the leaf count
  for (int s = 0; s < 4; ++s) CHECK(sentence_depth(t, s) < t.leaf_count());
}

TEST_CASE("sentence absent from the tree is an error", "[discourse]") {
  const RstTree t = tree_of(node("elaboration", {leaf(0), leaf(1)}, {"N", "S"}));
  CHECK_THROWS_AS(sentence_depth(t, 7), Error);
  CHECK_THROWS_AS(governing_relation(t, 7), Error);
}

TEST_CASE("rst files load and re-serialize losslessly", "[discourse]") {
  TempDir tmp;
  const json inner = node("Elaboration", {leaf(0), leaf(1)}, {"N", "S"});
  const json root1 = node("background", {inner, leaf(2)}, {"N", "S"});
  const std::string content = json{{"id", "a1"}, {"root", root1}}.dump() + "\n" +
                              json{{"id", "a2"}, {"root", leaf(0)}}.dump() + "\n";
  const auto path = tmp.write("trees.jsonl", content);
  const auto trees = load_rst(path);
  REQUIRE(trees.size() == 2);
  CHECK(trees.at("a1").leaf_count() == 3);
  CHECK(trees.at("a2").leaf_count() == 1);

  const auto again = tmp.file("again.jsonl");
  save_rst(trees, again);
  const auto reloaded = load_rst(again);
  REQUIRE(reloaded.size() == 2);
  CHECK(to_json("a1", reloaded.at("a1")) == to_json("a1", trees.at("a1")));
  CHECK(to_json("a2", reloaded.at("a2")) == to_json("a2", trees.at("a2")));
}

TEST_CASE("connective records load, collapse senses, and round-trip", "[discourse]") {
  TempDir tmp;
  const std::string content =
      R"({"id": "a1", "sentence": 0, "connective": "when", "sense": "Temporal", "offset": 0})"
      "\n"
      R"({"id": "a1", "sentence": 2, "connective": "however", "sense": "Comparison.Contrast", "offset": 3})"
      "\n"
      R"({"id": "a2", "sentence": 1, "connective": "so", "sense": "contingency.Cause", "offset": 0})"
      "\n";
  const auto path = tmp.write("conn.jsonl", content);
  const auto map = load_connectives(path);
  REQUIRE(map.size() == 3);
  CHECK(map.at({"a1", 0})[0].sense == ConnectiveSense::Temporal);
  CHECK(map.at({"a1", 2})[0].sense == ConnectiveSense::Comparison);
  CHECK(map.at({"a2", 1})[0].sense == ConnectiveSense::Contingency);

  const auto again = tmp.file("again.jsonl");
  save_connectives(map, again);
  const auto reloaded = load_connectives(again);
  CHECK(reloaded.size() == map.size());
  CHECK(reloaded.at({"a1", 2})[0].connective_text == "however");
  CHECK(reloaded.at({"a1", 2})[0].token_offset == 3);
}

TEST_CASE("unknown senses are rejected", "[discourse]") {
  TempDir tmp;
  const auto path = tmp.write(
      "bad.jsonl",
      R"({"id": "a", "sentence": 0, "connective": "as", "sense": "Causal", "offset": 0})"
      "\n");
  CHECK_THROWS_WITH(load_connectives(path), Catch::Matchers::ContainsSubstring("Causal"));
}

TEST_CASE("connective features aggregate records", "[discourse]") {
  const auto none = connective_features({});
  CHECK_FALSE(none.has_connective);
  CHECK(none.senses.empty());
  CHECK_FALSE(none.sent_initial.has_value());

  const auto one = connective_features({{"when", ConnectiveSense::Temporal, 0}});
  CHECK(one.has_connective);
  CHECK(one.senses == std::set<ConnectiveSense>{ConnectiveSense::Temporal});
  REQUIRE(one.sent_initial.has_value());
  CHECK(*one.sent_initial);

  const auto two = connective_features({{"also", ConnectiveSense::Expansion, 5},
                                        {"if", ConnectiveSense::Contingency, 0}});
  CHECK(two.has_connective);
  CHECK(two.senses == std::set<ConnectiveSense>{ConnectiveSense::Expansion,
                                                ConnectiveSense::Contingency});
  REQUIRE(two.sent_initial.has_value());
  CHECK(*two.sent_initial);

  const auto late = connective_features({{"then", ConnectiveSense::Temporal, 4}});
  REQUIRE(late.sent_initial.has_value());
  CHECK_FALSE(*late.sent_initial);
}

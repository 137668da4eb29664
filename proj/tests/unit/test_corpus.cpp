#include "simpdel/corpus.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "simpdel/stats.hpp"
#include "support/tempfile.hpp"

using namespace simpdel;
using testsupport::TempDir;

namespace {

const char* kTwoArticles = R"({"id": "a1", "topic": "science", "versions": {"original": {"paragraphs": [["First sentence .", "Second sentence ."], ["Third one ."]]}, "elementary": {"paragraphs": [["First ."]]}}}
{"id": "a2", "topic": "law", "versions": {"original": {"paragraphs": [["Only sentence ."]]}, "middle": {"paragraphs": [["Only ."]]}}}
)";

}  // namespace

TEST_CASE("load_corpus parses well-formed article sets", "[corpus]") {
  TempDir tmp;
  const auto path = tmp.write("corpus.jsonl", kTwoArticles);
  const Corpus corpus = load_corpus(path);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].id == "a1");
  CHECK(corpus[1].id == "a2");
  CHECK(corpus[0].topic == Topic::Science);
  const Document& orig = corpus[0].original();
  CHECK(orig.sentence_count == 3);
  CHECK(orig.paragraphs.size() == 2);
  CHECK(orig.paragraphs[1][0].article_index == 2);
  CHECK(corpus[1].has(ReadingLevel::Middle));
  CHECK_FALSE(corpus[1].has(ReadingLevel::Elementary));
}

TEST_CASE("load_corpus on an empty file yields an empty corpus", "[corpus]") {
  TempDir tmp;
  const auto path = tmp.write("empty.jsonl", "");
  CHECK(load_corpus(path).empty());
}

TEST_CASE("load_corpus reports the line of an unknown level tag", "[corpus]") {
  TempDir tmp;
  std::string content = kTwoArticles;
  content +=
      R"({"id": "a3", "topic": "war", "versions": {"original": {"paragraphs": [["X ."]]}, "highschool": {"paragraphs": [["Y ."]]}}})"
      "\n";
  const auto path = tmp.write("bad.jsonl", content);
  CHECK_THROWS_WITH(load_corpus(path),
                    Catch::Matchers::ContainsSubstring("line 3") &&
                        Catch::Matchers::ContainsSubstring("highschool"));
}

TEST_CASE("load_corpus rejects malformed JSON and duplicate ids", "[corpus]") {
  TempDir tmp;
  const auto bad = tmp.write("bad.jsonl", "{not json\n");
  CHECK_THROWS_WITH(load_corpus(bad), Catch::Matchers::ContainsSubstring("line 1"));

  std::string dup = kTwoArticles;
  dup += std::string(kTwoArticles).substr(0, std::string(kTwoArticles).find('\n') + 1);
  const auto dup_path = tmp.write("dup.jsonl", dup);
  CHECK_THROWS_WITH(load_corpus(dup_path),
                    Catch::Matchers::ContainsSubstring("duplicate article id"));

  const auto unknown_topic = tmp.write(
      "topic.jsonl",
      R"({"id": "t", "topic": "astrology", "versions": {"original": {"paragraphs": [["X ."]]}}})"
      "\n");
  CHECK_THROWS_WITH(load_corpus(unknown_topic),
                    Catch::Matchers::ContainsSubstring("astrology"));
}

TEST_CASE("tokenize splits whitespace and edge punctuation", "[corpus]") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("Hello, world.") ==
        std::vector<std::string>{"Hello", ",", "world", "."});
  CHECK(tokenize("state-of-the-art isn't") ==
        std::vector<std::string>{"state-of-the-art", "isn't"});
  CHECK(tokenize("(said) 'so'") ==
        std::vector<std::string>{"(", "said", ")", "'", "so", "'"});
  CHECK(tokenize("...") == std::vector<std::string>{".", ".", "."});
  CHECK(tokenize("  spaced\tout ") == std::vector<std::string>{"spaced", "out"});
}

TEST_CASE("relative positions hit the endpoints and the midpoint", "[corpus]") {
  Document doc;
  doc.level = ReadingLevel::Original;
  std::vector<Sentence> para;
  for (int i = 0; i < 10; ++i) {
    Sentence s;
    s.text = "s" + std::to_string(i);
    s.tokens = {s.text};
    s.article_index = i;
    s.paragraph_index = 0;
    s.index_in_paragraph = i;
    para.push_back(s);
  }
  doc.paragraphs.push_back(para);
  doc.sentence_count = 10;

  CHECK(relative_positions(doc.paragraphs[0][0], doc).first == 0.0);
  CHECK(relative_positions(doc.paragraphs[0][9], doc).first == 1.0);

  Document five;
  five.level = ReadingLevel::Original;
  five.paragraphs.push_back(std::vector<Sentence>(para.begin(), para.begin() + 5));
  five.sentence_count = 5;
  CHECK(relative_positions(five.paragraphs[0][2], five).first == 0.5);

  SECTION("single-sentence document maps to zero") {
    Document one;
    one.level = ReadingLevel::Original;
    one.paragraphs.push_back({para[0]});
    one.sentence_count = 1;
    const auto [pd, pp] = relative_positions(one.paragraphs[0][0], one);
    CHECK(pd == 0.0);
    CHECK(pp == 0.0);
  }

  SECTION("sentence not in document") {
    Sentence stray;
    stray.article_index = 42;
    stray.paragraph_index = 7;
    stray.index_in_paragraph = 0;
    CHECK_THROWS_AS(relative_positions(stray, doc), Error);
  }
}

TEST_CASE("relative position is monotone in article index", "[corpus]") {
  TempDir tmp;
  const auto path = tmp.write("corpus.jsonl", kTwoArticles);
  const Corpus corpus = load_corpus(path);
  for (const auto& art : corpus) {
    const Document& doc = art.original();
    double last = -1.0;
    for (const auto& para : doc.paragraphs) {
      for (const auto& s : para) {
        const double pos = relative_positions(s, doc).first;
        CHECK(pos >= last);
        last = pos;
      }
    }
  }
}

TEST_CASE("corpus round-trips through serialization", "[corpus]") {
  TempDir tmp;
  const auto path = tmp.write("corpus.jsonl", kTwoArticles);
  const Corpus corpus = load_corpus(path);
  const auto again = tmp.file("again.jsonl");
  save_corpus(corpus, again);
  const Corpus reloaded = load_corpus(again);
  REQUIRE(reloaded.size() == corpus.size());
  for (size_t a = 0; a < corpus.size(); ++a) {
    CHECK(reloaded[a].id == corpus[a].id);
    CHECK(reloaded[a].topic == corpus[a].topic);
    REQUIRE(reloaded[a].versions.size() == corpus[a].versions.size());
    for (const auto& [lv, doc] : corpus[a].versions) {
      const Document& other = reloaded[a].versions.at(lv);
      CHECK(other.sentence_count == doc.sentence_count);
      CHECK(other.token_count == doc.token_count);
      REQUIRE(other.paragraphs.size() == doc.paragraphs.size());
      for (size_t p = 0; p < doc.paragraphs.size(); ++p)
        for (size_t i = 0; i < doc.paragraphs[p].size(); ++i)
          CHECK(other.paragraphs[p][i].text == doc.paragraphs[p][i].text);
    }
  }
}

TEST_CASE("token_count equals the sum of tokenized lengths", "[corpus]") {
  TempDir tmp;
  const auto path = tmp.write("corpus.jsonl", kTwoArticles);
  for (const auto& art : load_corpus(path)) {
    for (const auto& [lv, doc] : art.versions) {
      int total = 0;
      for (const auto& para : doc.paragraphs)
        for (const auto& s : para) total += static_cast<int>(tokenize(s.text).size());
      CHECK(doc.token_count == total);
    }
  }
}

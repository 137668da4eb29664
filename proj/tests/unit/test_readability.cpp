#include "simpdel/readability.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support/tempfile.hpp"

using namespace simpdel;
using testsupport::TempDir;

TEST_CASE("syllable heuristic on the contract words", "[readability]") {
  CHECK(count_syllables("cat") == 1);
  CHECK(count_syllables("table") == 2);
  CHECK(count_syllables("made") == 1);
  CHECK(count_syllables("the") == 1);
  CHECK(count_syllables("unbelievable") == 5);
  CHECK(count_syllables("see") == 1);
  CHECK(count_syllables("little") == 2);
  CHECK(count_syllables("rhythm") == 1);
  CHECK(count_syllables("B") == 1);       // no vowel group, floor at 1
  CHECK(count_syllables("Isn't") == 1);   // apostrophe dropped
}

TEST_CASE("text_stats filters punctuation tokens", "[readability]") {
  const auto& easy = default_easy_words();
  const TextStats st = text_stats({"Hello", ",", "world", "."}, 1, easy);
  CHECK(st.words == 2);
  CHECK(st.sentences == 1);
  CHECK(st.characters == 10);
  CHECK(st.polysyllables == 0);
  CHECK(st.easy_words == 2);

  const TextStats empty = text_stats({}, 1, easy);
  CHECK(empty.words == 0);
  CHECK(empty.syllables == 0);
  CHECK(empty.sentences == 1);

  const TextStats poly = text_stats({"unbelievable"}, 1, easy);
  CHECK(poly.polysyllables == 1);
  CHECK(poly.easy_words == 0);
  CHECK(poly.difficult_words == 1);  // not on the bundled list
}

TEST_CASE("score_all matches the pinned formulas", "[readability]") {
  TextStats st;
  st.words = 10;
  st.sentences = 1;
  st.syllables = 10;
  st.characters = 40;
  st.polysyllables = 0;
  st.difficult_words = 0;
  st.easy_words = 10;

  const ReadabilityScores r = score_all(st);
  CHECK(r.flesch_ease == Catch::Approx(112.085).margin(1e-12));
  CHECK(r.fk_grade == Catch::Approx(0.11).margin(1e-12));
  CHECK(r.smog == Catch::Approx(3.1291).margin(1e-12));
  CHECK(r.gunning_fog == Catch::Approx(0.4 * 10.0).margin(1e-12));
  CHECK(r.ari == Catch::Approx(4.71 * 4.0 + 0.5 * 10.0 - 21.43).margin(1e-12));
  // L = 400 chars/100w, S100 = 10 sentences/100w
  CHECK(r.coleman_liau == Catch::Approx(0.0588 * 400 - 0.296 * 10 - 15.8).margin(1e-12));
  // lin = (10*1 + 0*3)/1 = 10 <= 20 -> (10-2)/2
  CHECK(r.linsear_write == Catch::Approx(4.0).margin(1e-12));
  // difficult = 0 -> no 3.6365 adjustment
  CHECK(r.dale_chall == Catch::Approx(0.0496 * 10.0).margin(1e-12));

  SECTION("dale-chall adjustment above the 5% difficult threshold") {
    st.difficult_words = 1;  // 10% > 5%
    const ReadabilityScores r2 = score_all(st);
    CHECK(r2.dale_chall ==
          Catch::Approx(0.1579 * 10.0 + 0.0496 * 10.0 + 3.6365).margin(1e-12));
  }

  SECTION("linsear halves directly above 20") {
    st.polysyllables = 10;
    st.easy_words = 0;
    const ReadabilityScores r3 = score_all(st);  // lin = 30 > 20
    CHECK(r3.linsear_write == Catch::Approx(15.0).margin(1e-12));
  }

  SECTION("zero words is an error") {
    TextStats bad;
    bad.sentences = 1;
    CHECK_THROWS_AS(score_all(bad), Error);
  }
}

TEST_CASE("flesch falls and fk rises with syllable density", "[readability]") {
  TextStats st;
  st.words = 20;
  st.sentences = 2;
  st.characters = 80;
  st.easy_words = 20;
  double last_flesch = 1e9;
  double last_fk = -1e9;
  for (int syl = 20; syl <= 60; syl += 10) {
    st.syllables = syl;
    const ReadabilityScores r = score_all(st);
    CHECK(r.flesch_ease < last_flesch);
    CHECK(r.fk_grade > last_fk);
    last_flesch = r.flesch_ease;
    last_fk = r.fk_grade;
  }
}

TEST_CASE("scores are invariant under doubling all counts", "[readability]") {
  TextStats st;
  st.words = 12;
  st.sentences = 2;
  st.syllables = 19;
  st.characters = 55;
  st.polysyllables = 3;
  st.difficult_words = 4;
  st.easy_words = 9;
  const ReadabilityScores a = score_all(st);
  TextStats doubled = st;
  doubled.words *= 2;
  doubled.sentences *= 2;
  doubled.syllables *= 2;
  doubled.characters *= 2;
  doubled.polysyllables *= 2;
  doubled.difficult_words *= 2;
  doubled.easy_words *= 2;
  const ReadabilityScores b = score_all(doubled);
  CHECK(a.flesch_ease == b.flesch_ease);
  CHECK(a.fk_grade == b.fk_grade);
  CHECK(a.smog == b.smog);
  CHECK(a.gunning_fog == b.gunning_fog);
  CHECK(a.ari == b.ari);
  CHECK(a.coleman_liau == b.coleman_liau);
  CHECK(a.linsear_write == b.linsear_write);
  CHECK(a.dale_chall == b.dale_chall);
}

TEST_CASE("score_all is bit-exact across calls", "[readability]") {
  TextStats st;
  st.words = 7;
  st.sentences = 1;
  st.syllables = 13;
  st.characters = 31;
  st.polysyllables = 2;
  st.difficult_words = 3;
  st.easy_words = 5;
  const ReadabilityScores a = score_all(st);
  const ReadabilityScores b = score_all(st);
  CHECK(as_array(a) == as_array(b));
}

TEST_CASE("word lists load one word per line", "[readability]") {
  TempDir tmp;
  const auto path = tmp.write("easy.txt", "apple\nbanana\n\ncherry\n");
  const auto words = load_word_list(path);
  CHECK(words.size() == 3);
  CHECK(words.count("banana") == 1);
  const TextStats st = text_stats({"apple", "durian"}, 1, words);
  CHECK(st.difficult_words == 1);
}

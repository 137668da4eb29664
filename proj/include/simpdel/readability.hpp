#pragma once

// The eight per-sentence readability scores used as sparse features, plus the
// syllable/word statistics they are computed from. Formulas are the standard
// published ones; each sentence is scored on its own with S = 1.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "simpdel/error.hpp"

namespace simpdel {

struct TextStats {
  int words = 0;
  int sentences = 0;
  int syllables = 0;
  int characters = 0;       // alphanumeric characters in word tokens
  int polysyllables = 0;    // words with >= 3 syllables
  int difficult_words = 0;  // words not on the easy-word list
  int easy_words = 0;       // words with <= 2 syllables
};

struct ReadabilityScores {
  double flesch_ease = 0;
  double fk_grade = 0;
  double smog = 0;
  double gunning_fog = 0;
  double ari = 0;
  double coleman_liau = 0;
  double linsear_write = 0;
  double dale_chall = 0;
};

inline bool is_word_token(const std::string& token) {
  for (char c : token)
    if (std::isalnum(static_cast<unsigned char>(c))) return true;
  return false;
}

namespace detail {

inline bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

}  // namespace detail

// Heuristic count: maximal vowel groups (aeiouy) over the lowercased letters,
// minus one for a terminal silent "e" unless it ends in consonant+"le".
// Always at least 1.
inline int count_syllables(const std::string& word) {
  std::string letters;
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c)))
      letters.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (letters.empty()) return 1;
  int groups = 0;
  bool in_group = false;
  for (char c : letters) {
    if (detail::is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  const size_t n = letters.size();
  if (n >= 2 && letters[n - 1] == 'e') {
    bool consonant_le = n >= 3 && letters[n - 2] == 'l' && !detail::is_vowel(letters[n - 3]);
    if (!consonant_le && !detail::is_vowel(letters[n - 2])) --groups;
  }
  return std::max(1, groups);
}

// The Dale-Chall list is external data; this bundled default covers common
// words so the score is usable without a resource file.
inline const std::unordered_set<std::string>& default_easy_words() {
  static const std::unordered_set<std::string> words = {
      "a", "about", "after", "again", "all", "always", "an", "and", "any", "are",
      "around", "as", "ask", "at", "away", "baby", "back", "bad", "ball", "be",
      "because", "bed", "been", "before", "best", "better", "big", "black", "blue",
      "book", "both", "box", "boy", "bring", "but", "buy", "by", "call", "came",
      "can", "car", "carry", "cat", "change", "child", "children", "city", "clean",
      "close", "cold", "come", "could", "cut", "day", "did", "do", "does", "dog",
      "done", "door", "down", "draw", "dress", "drink", "each", "eat", "eight",
      "end", "even", "every", "eye", "face", "fall", "far", "fast", "father",
      "feet", "few", "find", "fire", "first", "five", "fly", "food", "for",
      "found", "four", "friend", "from", "full", "fun", "funny", "game", "gave",
      "get", "girl", "give", "go", "good", "got", "green", "grow", "had", "hand",
      "happy", "hard", "has", "have", "he", "head", "hear", "hello", "help", "her",
      "here", "him", "his", "hold", "home", "hot", "house", "how", "i", "if",
      "in", "into", "is", "it", "its", "jump", "just", "keep", "kind", "know",
      "land", "large", "last", "late", "laugh", "learn", "leave", "left", "let",
      "light", "like", "little", "live", "long", "look", "made", "make", "man",
      "many", "may", "me", "men", "might", "milk", "money", "more", "morning",
      "most", "mother", "much", "must", "my", "name", "near", "never", "new",
      "next", "night", "nine", "no", "not", "now", "of", "off", "old", "on",
      "once", "one", "only", "open", "or", "other", "our", "out", "over", "own",
      "paper", "part", "people", "pick", "play", "please", "pretty", "pull",
      "put", "ran", "read", "red", "ride", "right", "round", "run", "said",
      "saw", "say", "school", "see", "seven", "she", "show", "sing", "sit",
      "six", "sleep", "small", "so", "some", "soon", "stand", "start", "stay",
      "step", "still", "stop", "sun", "take", "talk", "tell", "ten", "than",
      "thank", "that", "the", "their", "them", "then", "there", "these", "they",
      "thing", "think", "this", "three", "time", "to", "today", "together",
      "too", "tree", "try", "two", "under", "until", "up", "us", "use", "very",
      "walk", "want", "warm", "was", "wash", "water", "way", "we", "well",
      "went", "were", "what", "when", "where", "which", "white", "who", "why",
      "will", "wind", "wish", "with", "word", "work", "world", "would", "write",
      "year", "yellow", "yes", "you", "your"};
  return words;
}

inline std::unordered_set<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("word list: cannot open ", path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

inline TextStats text_stats(const std::vector<std::string>& tokens, int sentence_count,
                            const std::unordered_set<std::string>& easy_list) {
  TextStats st;
  st.sentences = sentence_count;
  for (const auto& token : tokens) {
    if (!is_word_token(token)) continue;
    ++st.words;
    int syl = count_syllables(token);
    st.syllables += syl;
    if (syl >= 3)
      ++st.polysyllables;
    else
      ++st.easy_words;
    for (char c : token)
      if (std::isalnum(static_cast<unsigned char>(c))) ++st.characters;
    std::string lower;
    for (char c : token)
      lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (!easy_list.count(lower)) ++st.difficult_words;
  }
  return st;
}

inline ReadabilityScores score_all(const TextStats& st) {
  if (st.words < 1) fail("readability: zero words");
  if (st.sentences < 1) fail("readability: zero sentences");
  const double W = st.words;
  const double S = st.sentences;
  const double Syl = st.syllables;
  const double chars = st.characters;
  const double poly = st.polysyllables;
  const double difficult = st.difficult_words;
  const double easy = st.easy_words;

  ReadabilityScores r;
  r.flesch_ease = 206.835 - 1.015 * (W / S) - 84.6 * (Syl / W);
  r.fk_grade = 0.39 * (W / S) + 11.8 * (Syl / W) - 15.59;
  r.smog = 1.0430 * std::sqrt(poly * 30.0 / S) + 3.1291;
  r.gunning_fog = 0.4 * ((W / S) + 100.0 * poly / W);
  r.ari = 4.71 * (chars / W) + 0.5 * (W / S) - 21.43;
  const double L = 100.0 * chars / W;   // characters per 100 words
  const double S100 = 100.0 * S / W;    // sentences per 100 words
  r.coleman_liau = 0.0588 * L - 0.296 * S100 - 15.8;
  const double lin = (easy * 1.0 + poly * 3.0) / S;
  r.linsear_write = lin > 20.0 ? lin / 2.0 : (lin - 2.0) / 2.0;
  r.dale_chall = 0.1579 * (100.0 * difficult / W) + 0.0496 * (W / S);
  if (difficult / W > 0.05) r.dale_chall += 3.6365;
  return r;
}

inline std::vector<double> as_array(const ReadabilityScores& r) {
  return {r.flesch_ease, r.fk_grade,     r.smog,          r.gunning_fog,
          r.ari,         r.coleman_liau, r.linsear_write, r.dale_chall};
}

}  // namespace simpdel

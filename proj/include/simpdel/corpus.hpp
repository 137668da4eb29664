#pragma once

// Data model for multi-level parallel article sets: the original news article
// plus its rewrites for lower reading levels, stored as paragraphs of
// pre-segmented sentences.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "simpdel/error.hpp"

namespace simpdel {

enum class ReadingLevel { Original = 2, Middle = 1, Elementary = 0 };

inline const char* to_string(ReadingLevel lv) {
  switch (lv) {
    case ReadingLevel::Original: return "original";
    case ReadingLevel::Middle: return "middle";
    case ReadingLevel::Elementary: return "elementary";
  }
  return "?";
}

inline std::optional<ReadingLevel> parse_level(const std::string& s) {
  if (s == "original") return ReadingLevel::Original;
  if (s == "middle") return ReadingLevel::Middle;
  if (s == "elementary") return ReadingLevel::Elementary;
  return std::nullopt;
}

enum class Topic { Science, Health, Arts, War, Kids, Money, Law, Sports, Other };

inline constexpr int kNumAnalyzedTopics = 8;  // "Other" is excluded from topic analyses

inline const char* to_string(Topic t) {
  switch (t) {
    case Topic::Science: return "science";
    case Topic::Health: return "health";
    case Topic::Arts: return "arts";
    case Topic::War: return "war";
    case Topic::Kids: return "kids";
    case Topic::Money: return "money";
    case Topic::Law: return "law";
    case Topic::Sports: return "sports";
    case Topic::Other: return "other";
  }
  return "?";
}

inline std::optional<Topic> parse_topic(const std::string& s) {
  static const std::map<std::string, Topic> table = {
      {"science", Topic::Science}, {"health", Topic::Health}, {"arts", Topic::Arts},
      {"war", Topic::War},         {"kids", Topic::Kids},     {"money", Topic::Money},
      {"law", Topic::Law},         {"sports", Topic::Sports}, {"other", Topic::Other}};
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;
  int article_index = 0;    // 0-based position within the whole document
  int paragraph_index = 0;  // 0-based paragraph
  int index_in_paragraph = 0;
};

struct Document {
  ReadingLevel level = ReadingLevel::Original;
  std::vector<std::vector<Sentence>> paragraphs;
  int sentence_count = 0;
  int token_count = 0;

  const Sentence& sentence(int article_index) const {
    for (const auto& para : paragraphs)
      for (const auto& s : para)
        if (s.article_index == article_index) return s;
    fail("sentence index ", article_index, " not in document");
  }
};

struct ArticleSet {
  std::string id;
  Topic topic = Topic::Other;
  std::map<ReadingLevel, Document> versions;

  const Document& original() const { return versions.at(ReadingLevel::Original); }
  bool has(ReadingLevel lv) const { return versions.count(lv) > 0; }
};

using Corpus = std::vector<ArticleSet>;

// Whitespace split with leading/trailing punctuation peeled off into their
// own tokens; internal hyphens and apostrophes stay inside the word.
inline bool is_edge_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '"': case '\'': case '(': case ')': case '[': case ']':
      return true;
    default:
      return false;
  }
}

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= n) break;
    size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    size_t lo = i, hi = j;  // [lo, hi) is one whitespace-delimited chunk
    while (lo < hi && is_edge_punct(text[lo])) {
      out.emplace_back(1, text[lo]);
      ++lo;
    }
    size_t core_end = hi;
    while (core_end > lo && is_edge_punct(text[core_end - 1])) --core_end;
    if (core_end > lo) out.emplace_back(text.substr(lo, core_end - lo));
    for (size_t k = core_end; k < hi; ++k) out.emplace_back(1, text[k]);
    i = j;
  }
  return out;
}

// pos_in_doc and pos_in_paragraph, both in [0,1]; denominator count-1 so the
// first and last sentence land exactly on the endpoints.
inline std::pair<double, double> relative_positions(const Sentence& s, const Document& doc) {
  if (s.paragraph_index < 0 || s.paragraph_index >= static_cast<int>(doc.paragraphs.size()))
    fail("sentence not in document: paragraph ", s.paragraph_index, " out of range");
  const auto& para = doc.paragraphs[s.paragraph_index];
  if (s.index_in_paragraph < 0 || s.index_in_paragraph >= static_cast<int>(para.size()) ||
      para[s.index_in_paragraph].article_index != s.article_index)
    fail("sentence not in document: index ", s.article_index, " does not match");
  double pos_doc = doc.sentence_count > 1
                       ? static_cast<double>(s.article_index) / (doc.sentence_count - 1)
                       : 0.0;
  double pos_para = para.size() > 1
                        ? static_cast<double>(s.index_in_paragraph) / (para.size() - 1)
                        : 0.0;
  return {pos_doc, pos_para};
}

namespace detail {

inline Document parse_document(ReadingLevel lv, const nlohmann::json& j, int line_no) {
  if (!j.is_object() || !j.contains("paragraphs") || !j["paragraphs"].is_array())
    fail("corpus: line ", line_no, ": version \"", to_string(lv),
         "\" must be an object with a \"paragraphs\" array");
  Document doc;
  doc.level = lv;
  int article_index = 0;
  int para_index = 0;
  for (const auto& para_json : j["paragraphs"]) {
    if (!para_json.is_array())
      fail("corpus: line ", line_no, ": paragraph ", para_index, " is not an array");
    std::vector<Sentence> para;
    int in_para = 0;
    for (const auto& sent_json : para_json) {
      if (!sent_json.is_string())
        fail("corpus: line ", line_no, ": sentence in paragraph ", para_index,
             " is not a string");
      Sentence s;
      s.text = sent_json.get<std::string>();
      s.tokens = tokenize(s.text);
      s.article_index = article_index++;
      s.paragraph_index = para_index;
      s.index_in_paragraph = in_para++;
      doc.token_count += static_cast<int>(s.tokens.size());
      para.push_back(std::move(s));
    }
    doc.paragraphs.push_back(std::move(para));
    ++para_index;
  }
  doc.sentence_count = article_index;
  return doc;
}

}  // namespace detail

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("corpus: cannot open ", path);
  Corpus corpus;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("corpus: line ", line_no, ": malformed JSON: ", e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
      fail("corpus: line ", line_no, ": record must be an object with a string \"id\"");
    ArticleSet art;
    art.id = j["id"].get<std::string>();
    if (!seen_ids.insert(art.id).second)
      fail("corpus: line ", line_no, ": duplicate article id \"", art.id, "\"");
    std::string topic_tag = j.value("topic", std::string("other"));
    auto topic = parse_topic(topic_tag);
    if (!topic)
      fail("corpus: line ", line_no, ": unknown topic tag \"", topic_tag, "\"");
    art.topic = *topic;
    if (!j.contains("versions") || !j["versions"].is_object())
      fail("corpus: line ", line_no, ": missing \"versions\" object");
    for (const auto& [key, val] : j["versions"].items()) {
      auto lv = parse_level(key);
      if (!lv) fail("corpus: line ", line_no, ": unknown level tag \"", key, "\"");
      art.versions[*lv] = detail::parse_document(*lv, val, line_no);
    }
    if (!art.has(ReadingLevel::Original))
      fail("corpus: line ", line_no, ": article \"", art.id, "\" has no original version");
    corpus.push_back(std::move(art));
  }
  return corpus;
}

inline nlohmann::json to_json(const ArticleSet& art) {
  nlohmann::json versions = nlohmann::json::object();
  for (const auto& [lv, doc] : art.versions) {
    nlohmann::json paras = nlohmann::json::array();
    for (const auto& para : doc.paragraphs) {
      nlohmann::json pj = nlohmann::json::array();
      for (const auto& s : para) pj.push_back(s.text);
      paras.push_back(std::move(pj));
    }
    versions[to_string(lv)] = {{"paragraphs", std::move(paras)}};
  }
  return {{"id", art.id}, {"topic", to_string(art.topic)}, {"versions", std::move(versions)}};
}

inline void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& art : corpus) out << to_json(art).dump() << "\n";
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("corpus: cannot write ", path);
  save_corpus(corpus, out);
}

}  // namespace simpdel

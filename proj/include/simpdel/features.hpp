#pragma once

// The 35 sparse features per original sentence, their named layout and
// ablation groups, and the Gaussian radial-basis binning that expands each
// feature into k soft bin activations.

#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "simpdel/align.hpp"
#include "simpdel/corpus.hpp"
#include "simpdel/discourse.hpp"
#include "simpdel/error.hpp"
#include "simpdel/readability.hpp"

namespace simpdel {

inline constexpr int kNumSparseFeatures = 35;

// Layout: position (2), readability (8), document (2), topic one-hot (8),
// rst (depth, nucleus, governing one-hot over 6), connective (7).
enum SparseFeature : int {
  kPosInDoc = 0,
  kPosInParagraph = 1,
  kFleschEase = 2,
  kFkGrade = 3,
  kSmog = 4,
  kGunningFog = 5,
  kAri = 6,
  kColemanLiau = 7,
  kLinsearWrite = 8,
  kDaleChall = 9,
  kDocSentenceCount = 10,
  kDocTokenCount = 11,
  kTopicFirst = 12,  // 8 topics, Science..Sports
  kRstDepth = 20,
  kRstIsNucleus = 21,
  kGoverningFirst = 22,  // 6 relations, Root..Explanation
  kHasConnective = 28,
  kSenseFirst = 29,  // 4 senses, Contingency..Temporal
  kConnectiveSentInitial = 33,
  kConnectiveNonInitial = 34,
};

inline const std::array<std::string, kNumSparseFeatures>& sparse_feature_names() {
  static const std::array<std::string, kNumSparseFeatures> names = {
      "pos_in_doc",        "pos_in_paragraph",  "flesch_ease",      "fk_grade",
      "smog",              "gunning_fog",       "ari",              "coleman_liau",
      "linsear_write",     "dale_chall",        "doc_sentences",    "doc_tokens",
      "topic_science",     "topic_health",      "topic_arts",       "topic_war",
      "topic_kids",        "topic_money",       "topic_law",        "topic_sports",
      "rst_depth",         "rst_is_nucleus",    "gov_root",         "gov_elaboration",
      "gov_contrast",      "gov_background",    "gov_evaluation",   "gov_explanation",
      "has_connective",    "sense_contingency", "sense_comparison", "sense_expansion",
      "sense_temporal",    "conn_sent_initial", "conn_non_initial"};
  return names;
}

enum class FeatureGroup { Discourse, Document, Position };

inline const char* to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Discourse: return "discourse";
    case FeatureGroup::Document: return "document";
    case FeatureGroup::Position: return "position";
  }
  return "?";
}

inline std::optional<FeatureGroup> parse_feature_group(const std::string& s) {
  if (s == "discourse") return FeatureGroup::Discourse;
  if (s == "document") return FeatureGroup::Document;
  if (s == "position") return FeatureGroup::Position;
  return std::nullopt;
}

// Indices belonging to each ablation group. Document covers length and topic;
// Discourse covers the RST and connective blocks.
inline std::vector<int> feature_group_indices(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::Position:
      return {kPosInDoc, kPosInParagraph};
    case FeatureGroup::Document: {
      std::vector<int> idx = {kDocSentenceCount, kDocTokenCount};
      for (int i = 0; i < 8; ++i) idx.push_back(kTopicFirst + i);
      return idx;
    }
    case FeatureGroup::Discourse: {
      std::vector<int> idx = {kRstDepth, kRstIsNucleus};
      for (int i = 0; i < 6; ++i) idx.push_back(kGoverningFirst + i);
      idx.push_back(kHasConnective);
      for (int i = 0; i < 4; ++i) idx.push_back(kSenseFirst + i);
      idx.push_back(kConnectiveSentInitial);
      idx.push_back(kConnectiveNonInitial);
      return idx;
    }
  }
  return {};
}

using SparseFeatureVector = std::array<double, kNumSparseFeatures>;

inline SparseFeatureVector assemble(const Sentence& sentence, const Document& document,
                                    const ArticleSet& article,
                                    const ReadabilityScores& readability,
                                    const SentenceDiscourse& discourse) {
  const auto [pos_doc, pos_para] = relative_positions(sentence, document);
  if (!article.has(document.level))
    fail("assemble: document level ", to_string(document.level), " not in article \"",
         article.id, "\"");

  SparseFeatureVector v{};
  v[kPosInDoc] = pos_doc;
  v[kPosInParagraph] = pos_para;
  const auto scores = as_array(readability);
  for (int i = 0; i < 8; ++i) v[kFleschEase + i] = scores[i];
  v[kDocSentenceCount] = document.sentence_count;
  v[kDocTokenCount] = document.token_count;
  if (article.topic != Topic::Other)
    v[kTopicFirst + static_cast<int>(article.topic)] = 1.0;
  v[kRstDepth] = discourse.depth;
  v[kRstIsNucleus] = discourse.is_nucleus ? 1.0 : 0.0;
  if (discourse.governing_relation != Relation::OtherRel)
    v[kGoverningFirst + static_cast<int>(discourse.governing_relation)] = 1.0;
  if (discourse.has_connective) {
    v[kHasConnective] = 1.0;
    for (ConnectiveSense s : discourse.senses)
      v[kSenseFirst + static_cast<int>(s)] = 1.0;
    const bool initial = discourse.connective_sent_initial.value_or(false);
    v[kConnectiveSentInitial] = initial ? 1.0 : 0.0;
    v[kConnectiveNonInitial] = initial ? 0.0 : 1.0;
  }
  return v;
}

// Per-feature ranges fitted on training data; k evenly spaced centers inside
// the range, Gaussian width sigma = gamma * (hi - lo).
struct BinningConfig {
  int k = 10;
  double gamma = 0.2;
  std::vector<std::pair<double, double>> ranges;  // one (lo, hi) per feature

  int num_features() const { return static_cast<int>(ranges.size()); }
  int binned_dim() const { return num_features() * k; }

  double center(int feature, int bin) const {
    const auto& [lo, hi] = ranges[feature];
    return lo + (bin + 0.5) * (hi - lo) / k;
  }

  double sigma(int feature) const {
    const auto& [lo, hi] = ranges[feature];
    return gamma * (hi - lo);
  }
};

template <typename VectorLike>
BinningConfig fit_binning(const std::vector<VectorLike>& training_vectors, int k = 10,
                          double gamma = 0.2) {
  if (training_vectors.empty()) fail("fit_binning: empty training set");
  if (k < 1) fail("fit_binning: k must be >= 1");
  BinningConfig cfg;
  cfg.k = k;
  cfg.gamma = gamma;
  const size_t dim = training_vectors.front().size();
  cfg.ranges.assign(dim, {0.0, 0.0});
  for (size_t f = 0; f < dim; ++f) {
    double lo = training_vectors[0][f];
    double hi = lo;
    for (const auto& v : training_vectors) {
      lo = std::min(lo, static_cast<double>(v[f]));
      hi = std::max(hi, static_cast<double>(v[f]));
    }
    if (hi <= lo) hi = lo + 1.0;  // constant feature: avoid degenerate width
    cfg.ranges[f] = {lo, hi};
  }
  return cfg;
}

template <typename VectorLike>
std::vector<double> bin(const VectorLike& v, const BinningConfig& cfg) {
  if (static_cast<int>(v.size()) != cfg.num_features())
    fail("bin: expected ", cfg.num_features(), " features, got ", v.size());
  std::vector<double> out;
  out.reserve(cfg.binned_dim());
  for (int f = 0; f < cfg.num_features(); ++f) {
    const double sigma = cfg.sigma(f);
    const double x = v[f];
    for (int j = 0; j < cfg.k; ++j) {
      const double d = x - cfg.center(f, j);
      out.push_back(std::exp(-(d * d) / (2.0 * sigma * sigma)));
    }
  }
  return out;
}

inline nlohmann::json to_json(const BinningConfig& cfg) {
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& [lo, hi] : cfg.ranges) ranges.push_back({lo, hi});
  return {{"k", cfg.k}, {"gamma", cfg.gamma}, {"ranges", std::move(ranges)}};
}

inline BinningConfig binning_from_json(const nlohmann::json& j) {
  BinningConfig cfg;
  cfg.k = j.at("k").get<int>();
  cfg.gamma = j.at("gamma").get<double>();
  for (const auto& r : j.at("ranges"))
    cfg.ranges.emplace_back(r.at(0).get<double>(), r.at(1).get<double>());
  return cfg;
}

inline void save_binning(const BinningConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("binning: cannot write ", path);
  out << to_json(cfg).dump(2) << "\n";
}

inline BinningConfig load_binning(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("binning: cannot open ", path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    fail("binning: malformed JSON in ", path, ": ", e.what());
  }
  return binning_from_json(j);
}

// --- feature rows (featurize output / train-eval input) ---------------------

struct FeatureRow {
  std::string id;
  int sentence = 0;
  ReadingLevel level = ReadingLevel::Elementary;
  DeletionLabel label = DeletionLabel::Kept;
  std::vector<double> sparse;
  std::vector<double> binned;
  std::vector<double> embedding;
};

inline nlohmann::json to_json(const FeatureRow& row) {
  return {{"id", row.id},
          {"sentence", row.sentence},
          {"level", to_string(row.level)},
          {"label", row.label == DeletionLabel::Deleted ? "deleted" : "kept"},
          {"sparse", row.sparse},
          {"binned", row.binned},
          {"embedding", row.embedding}};
}

inline void save_feature_rows(const std::vector<FeatureRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("features: cannot write ", path);
  for (const auto& r : rows) out << to_json(r).dump() << "\n";
}

inline std::vector<FeatureRow> load_feature_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("features: cannot open ", path);
  std::vector<FeatureRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("features: line ", line_no, ": malformed JSON: ", e.what());
    }
    FeatureRow row;
    row.id = j.at("id").get<std::string>();
    row.sentence = j.at("sentence").get<int>();
    auto lv = parse_level(j.at("level").get<std::string>());
    if (!lv) fail("features: line ", line_no, ": unknown level tag");
    row.level = *lv;
    const std::string label = j.at("label").get<std::string>();
    if (label == "deleted")
      row.label = DeletionLabel::Deleted;
    else if (label == "kept")
      row.label = DeletionLabel::Kept;
    else
      fail("features: line ", line_no, ": unknown label \"", label, "\"");
    row.sparse = j.at("sparse").get<std::vector<double>>();
    row.binned = j.value("binned", std::vector<double>{});
    row.embedding = j.value("embedding", std::vector<double>{});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace simpdel

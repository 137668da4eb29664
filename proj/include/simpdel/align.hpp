#pragma once

// Sentence alignment between reading levels: threshold-based automatic
// alignment (with a split rule), crowd-label aggregation with worker quality
// filtering, Cohen's kappa, and the derived per-sentence deletion labels.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "simpdel/corpus.hpp"
#include "simpdel/embeddings.hpp"
#include "simpdel/error.hpp"

namespace simpdel {

enum class AlignmentLabel { Equivalent, Partial, Mismatch };

inline const char* to_string(AlignmentLabel l) {
  switch (l) {
    case AlignmentLabel::Equivalent: return "equivalent";
    case AlignmentLabel::Partial: return "partial";
    case AlignmentLabel::Mismatch: return "mismatch";
  }
  return "?";
}

inline std::optional<AlignmentLabel> parse_alignment_label(const std::string& s) {
  if (s == "equivalent") return AlignmentLabel::Equivalent;
  if (s == "partial") return AlignmentLabel::Partial;
  if (s == "mismatch") return AlignmentLabel::Mismatch;
  return std::nullopt;
}

using SentencePair = std::pair<int, int>;  // (orig_index, simp_index)

struct AlignmentResult {
  std::set<SentencePair> pairs;
  std::set<int> deleted;  // original indices matched by no pair
  ReadingLevel target_level = ReadingLevel::Elementary;
};

struct CrowdJudgment {
  std::string worker_id;
  SentencePair pair;
  AlignmentLabel label = AlignmentLabel::Mismatch;
  bool is_test_question = false;
  std::optional<AlignmentLabel> gold_label;
};

enum class DeletionLabel { Kept, Deleted };

struct AlignParams {
  double theta_nosplit = 0.94;
  double theta_split = 0.47;
  // When present, only sentence pairs inside these (orig paragraph, simp
  // paragraph) pairs are scored.
  std::optional<std::set<std::pair<int, int>>> paragraph_pairs;
};

// Yields the vector for a sentence of the given document, or nullptr when the
// provider has none (auto_align treats that as an error).
using SentenceVectorFn = std::function<const Vec*(const Document&, const Sentence&)>;

// Provider backed by a per-sentence vector store keyed "id:level:index".
inline SentenceVectorFn store_provider(const VectorStore& store, std::string article_id) {
  return [&store, article_id = std::move(article_id)](const Document& doc,
                                                      const Sentence& s) -> const Vec* {
    return store.find(sentence_key(article_id, doc.level, s.article_index));
  };
}

// Provider that averages word vectors on the fly; owns the composed vectors.
class AveragedVectorProvider {
 public:
  explicit AveragedVectorProvider(const VectorStore& words) : words_(words) {}

  const Vec* operator()(const Document& doc, const Sentence& s) {
    auto key = std::make_pair(static_cast<int>(doc.level), s.article_index);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, sentence_vector(s.tokens, words_)).first;
    return &it->second;
  }

 private:
  const VectorStore& words_;
  std::map<std::pair<int, int>, Vec> cache_;
};

namespace detail {

inline std::vector<const Sentence*> flatten(const Document& doc) {
  std::vector<const Sentence*> out;
  out.reserve(doc.sentence_count);
  for (const auto& para : doc.paragraphs)
    for (const auto& s : para) out.push_back(&s);
  return out;
}

}  // namespace detail

// Two-stage greedy alignment. Stage 1 pairs every (i, j) whose cosine exceeds
// theta_nosplit. Stage 2 handles splits: an original sentence still unmatched
// is paired with all simplified sentences above theta_split, provided there
// are at least two of them and none of them was claimed by a different
// original sentence in stage 1.
inline AlignmentResult auto_align(const Document& orig, const Document& simp,
                                  const SentenceVectorFn& vecs,
                                  const AlignParams& params = {}) {
  if (orig.sentence_count == 0 || simp.sentence_count == 0)
    fail("auto_align: empty document");
  const auto orig_sents = detail::flatten(orig);
  const auto simp_sents = detail::flatten(simp);

  auto vector_of = [&](const Document& doc, const Sentence& s) -> const Vec& {
    const Vec* v = vecs(doc, s);
    if (!v)
      fail("auto_align: missing sentence vector for level ", to_string(doc.level),
           " sentence ", s.article_index);
    return *v;
  };

  auto in_scope = [&](const Sentence& o, const Sentence& s) {
    if (!params.paragraph_pairs) return true;
    return params.paragraph_pairs->count({o.paragraph_index, s.paragraph_index}) > 0;
  };

  const int no = orig.sentence_count;
  const int ns = simp.sentence_count;
  std::vector<std::vector<double>> sim(no, std::vector<double>(ns, -2.0));
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < ns; ++j)
      if (in_scope(*orig_sents[i], *simp_sents[j]))
        sim[i][j] = cosine(vector_of(orig, *orig_sents[i]), vector_of(simp, *simp_sents[j]));

  AlignmentResult result;
  result.target_level = simp.level;
  std::vector<int> simp_matched_to(ns, -1);  // stage-1 owner, -1 if free
  std::vector<bool> orig_matched(no, false);

  for (int i = 0; i < no; ++i) {
    for (int j = 0; j < ns; ++j) {
      if (sim[i][j] > params.theta_nosplit) {
        result.pairs.insert({i, j});
        orig_matched[i] = true;
        if (simp_matched_to[j] == -1) simp_matched_to[j] = i;
      }
    }
  }

  for (int i = 0; i < no; ++i) {
    if (orig_matched[i]) continue;
    std::vector<int> candidates;
    for (int j = 0; j < ns; ++j)
      if (sim[i][j] > params.theta_split) candidates.push_back(j);
    if (candidates.size() < 2) continue;
    bool all_free = true;
    for (int j : candidates)
      if (simp_matched_to[j] != -1 && simp_matched_to[j] != i) all_free = false;
    if (!all_free) continue;
    for (int j : candidates) result.pairs.insert({i, j});
    orig_matched[i] = true;
  }

  for (int i = 0; i < no; ++i)
    if (!orig_matched[i]) result.deleted.insert(i);
  return result;
}

// Workers whose test-question accuracy falls below min_accuracy. Workers with
// no test questions cannot be evaluated and are retained.
inline std::set<std::string> excluded_workers(const std::vector<CrowdJudgment>& judgments,
                                              double min_accuracy) {
  std::map<std::string, std::pair<int, int>> test_counts;  // worker -> (correct, total)
  for (const auto& j : judgments) {
    if (!j.is_test_question) continue;
    if (!j.gold_label) fail("aggregate_crowd: test question without gold label");
    auto& [correct, total] = test_counts[j.worker_id];
    ++total;
    if (j.label == *j.gold_label) ++correct;
  }
  std::set<std::string> excluded;
  for (const auto& [worker, counts] : test_counts) {
    if (static_cast<double>(counts.first) / counts.second < min_accuracy)
      excluded.insert(worker);
  }
  return excluded;
}

// Majority vote over judgments from workers whose test-question accuracy is
// at least min_accuracy; ties break toward the less-aligned label.
inline std::map<SentencePair, AlignmentLabel> aggregate_crowd(
    const std::vector<CrowdJudgment>& judgments, double min_accuracy = 0.8,
    [[maybe_unused]] int votes_per_pair = 5) {
  const std::set<std::string> excluded = excluded_workers(judgments, min_accuracy);

  std::map<SentencePair, std::map<AlignmentLabel, int>> votes;
  std::set<SentencePair> all_pairs;
  for (const auto& j : judgments) {
    if (j.is_test_question) continue;
    all_pairs.insert(j.pair);
    if (excluded.count(j.worker_id)) continue;
    ++votes[j.pair][j.label];
  }

  std::map<SentencePair, AlignmentLabel> result;
  for (const auto& pair : all_pairs) {
    auto it = votes.find(pair);
    if (it == votes.end())
      fail("aggregate_crowd: pair (", pair.first, ",", pair.second,
           ") has no surviving judgments");
    // tie priority: Mismatch > Partial > Equivalent
    const AlignmentLabel order[] = {AlignmentLabel::Mismatch, AlignmentLabel::Partial,
                                    AlignmentLabel::Equivalent};
    AlignmentLabel best = AlignmentLabel::Mismatch;
    int best_count = -1;
    for (AlignmentLabel l : order) {
      auto vit = it->second.find(l);
      const int c = vit == it->second.end() ? 0 : vit->second;
      if (c > best_count) {
        best = l;
        best_count = c;
      }
    }
    result[pair] = best;
  }
  return result;
}

// Cohen's kappa over two equal-length label sequences.
template <typename Label>
double cohens_kappa(const std::vector<Label>& a, const std::vector<Label>& b) {
  if (a.size() != b.size()) fail("cohens_kappa: length mismatch");
  if (a.empty()) fail("cohens_kappa: empty input");
  const double n = static_cast<double>(a.size());
  std::map<Label, double> ma, mb;
  double agree = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  const double po = agree / n;
  double pe = 0.0;
  for (const auto& [label, ca] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (ca / n) * (it->second / n);
  }
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

inline std::vector<DeletionLabel> deletion_labels(const AlignmentResult& alignment,
                                                  int n_orig) {
  for (const auto& [i, j] : alignment.pairs)
    if (i < 0 || i >= n_orig)
      fail("deletion_labels: pair index ", i, " out of range [0,", n_orig, ")");
  for (int i : alignment.deleted)
    if (i < 0 || i >= n_orig)
      fail("deletion_labels: deleted index ", i, " out of range [0,", n_orig, ")");
  std::vector<DeletionLabel> labels(n_orig, DeletionLabel::Kept);
  std::set<int> matched;
  for (const auto& [i, j] : alignment.pairs) matched.insert(i);
  for (int i = 0; i < n_orig; ++i)
    if (!matched.count(i)) labels[i] = DeletionLabel::Deleted;
  return labels;
}

inline double deletion_rate(const std::vector<DeletionLabel>& labels) {
  if (labels.empty()) fail("deletion_rate: empty label sequence");
  int deleted = 0;
  for (auto l : labels)
    if (l == DeletionLabel::Deleted) ++deleted;
  return static_cast<double>(deleted) / labels.size();
}

// --- file formats -----------------------------------------------------------

struct ArticleAlignment {
  std::string id;
  ReadingLevel level;
  AlignmentResult result;
};

inline nlohmann::json to_json(const ArticleAlignment& a) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [i, j] : a.result.pairs) pairs.push_back({i, j});
  nlohmann::json deleted = nlohmann::json::array();
  for (int i : a.result.deleted) deleted.push_back(i);
  return {{"id", a.id},
          {"level", to_string(a.level)},
          {"pairs", std::move(pairs)},
          {"deleted", std::move(deleted)}};
}

inline void save_alignments(const std::vector<ArticleAlignment>& alignments,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("alignments: cannot write ", path);
  for (const auto& a : alignments) out << to_json(a).dump() << "\n";
}

inline std::vector<ArticleAlignment> load_alignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("alignments: cannot open ", path);
  std::vector<ArticleAlignment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("alignments: line ", line_no, ": malformed JSON: ", e.what());
    }
    ArticleAlignment a;
    a.id = j.at("id").get<std::string>();
    auto lv = parse_level(j.at("level").get<std::string>());
    if (!lv) fail("alignments: line ", line_no, ": unknown level tag");
    a.level = *lv;
    a.result.target_level = *lv;
    for (const auto& p : j.at("pairs"))
      a.result.pairs.insert({p.at(0).get<int>(), p.at(1).get<int>()});
    for (const auto& d : j.at("deleted")) a.result.deleted.insert(d.get<int>());
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<CrowdJudgment> load_crowd_judgments(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("judgments: cannot open ", path);
  std::vector<CrowdJudgment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("judgments: line ", line_no, ": malformed JSON: ", e.what());
    }
    CrowdJudgment cj;
    cj.worker_id = j.at("worker").get<std::string>();
    cj.pair = {j.at("orig").get<int>(), j.at("simp").get<int>()};
    auto label = parse_alignment_label(j.at("label").get<std::string>());
    if (!label) fail("judgments: line ", line_no, ": unknown label");
    cj.label = *label;
    if (j.contains("gold") && !j["gold"].is_null()) {
      auto gold = parse_alignment_label(j["gold"].get<std::string>());
      if (!gold) fail("judgments: line ", line_no, ": unknown gold label");
      cj.gold_label = *gold;
      cj.is_test_question = true;
    }
    out.push_back(std::move(cj));
  }
  return out;
}

// Paragraph alignment file: {"id", "level", "para_pairs": [[p,q],...]}
inline std::map<std::pair<std::string, ReadingLevel>, std::set<std::pair<int, int>>>
load_paragraph_alignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("paragraph alignments: cannot open ", path);
  std::map<std::pair<std::string, ReadingLevel>, std::set<std::pair<int, int>>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail("paragraph alignments: line ", line_no, ": malformed JSON: ", e.what());
    }
    auto lv = parse_level(j.at("level").get<std::string>());
    if (!lv) fail("paragraph alignments: line ", line_no, ": unknown level tag");
    auto& pairs = out[{j.at("id").get<std::string>(), *lv}];
    for (const auto& p : j.at("para_pairs"))
      pairs.insert({p.at(0).get<int>(), p.at(1).get<int>()});
  }
  return out;
}

}  // namespace simpdel

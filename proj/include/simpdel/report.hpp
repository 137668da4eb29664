#pragma once

// Recomputes the corpus analyses from labeled data: deletion-rate summary,
// length correlations, per-topic deltas with KS tests, RST depth and
// governing-relation comparisons, and connective usage by sense/position.
// Kept-vs-deleted comparisons degenerate to "not applicable" when one class
// is empty.

#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "simpdel/align.hpp"
#include "simpdel/corpus.hpp"
#include "simpdel/discourse.hpp"
#include "simpdel/error.hpp"
#include "simpdel/stats.hpp"

namespace simpdel {

struct GroupSummary {
  double mean = 0.0;
  double std_dev = 0.0;
  int n = 0;
};

inline GroupSummary summarize(std::span<const double> xs) {
  GroupSummary g;
  g.n = static_cast<int>(xs.size());
  if (g.n == 0) return g;
  g.mean = mean(xs);
  g.std_dev = sample_std(xs);
  return g;
}

struct AnalysisReport {
  ReadingLevel level = ReadingLevel::Elementary;
  int n_articles = 0;
  int n_sentences = 0;
  GroupSummary deletion;  // per-article deletion rate

  std::optional<TestResult> corr_sentences;  // rate vs original sentence count
  std::optional<TestResult> corr_tokens;     // rate vs original token count

  struct TopicRow {
    Topic topic = Topic::Other;
    int n_articles = 0;
    double delta = 0.0;  // topic mean rate minus corpus mean rate
    std::optional<double> ks_p;
  };
  std::vector<TopicRow> topics;

  struct DepthBlock {
    bool present = false;
    std::optional<GroupSummary> kept;
    std::optional<GroupSummary> deleted;
    std::optional<double> p;  // Mann-Whitney
  } depth;

  struct RelationRow {
    Relation relation = Relation::Root;
    std::optional<double> kept_fraction;
    std::optional<double> deleted_fraction;
    std::optional<double> p;  // Mann-Whitney on indicators
  };
  std::vector<RelationRow> relations;  // filled when RST trees are supplied

  struct ConnectiveBlock {
    bool present = false;
    GroupSummary per_article_fraction;  // fraction of sentences with a connective
    std::optional<double> kept_fraction;
    std::optional<double> deleted_fraction;
    std::optional<double> p;
    struct SenseRow {
      ConnectiveSense sense = ConnectiveSense::Contingency;
      std::optional<double> kept_fraction;
      std::optional<double> deleted_fraction;
      std::optional<double> p;  // Mann-Whitney on indicators
    };
    std::vector<SenseRow> senses;
    struct PositionRow {
      std::string position;  // "sent_initial" | "non_initial"
      std::optional<double> kept_fraction;  // among connective-bearing sentences
      std::optional<double> deleted_fraction;
      std::optional<double> p;  // KS on indicators
    };
    std::vector<PositionRow> positions;
  } connectives;
};

namespace detail {

inline std::optional<double> fraction(std::span<const double> xs) {
  if (xs.empty()) return std::nullopt;
  return mean(xs);
}

inline std::optional<double> compare_mw(std::span<const double> kept,
                                        std::span<const double> deleted) {
  if (kept.empty() || deleted.empty()) return std::nullopt;
  return mann_whitney(kept, deleted).p_value;
}

inline std::optional<double> compare_ks(std::span<const double> kept,
                                        std::span<const double> deleted) {
  if (kept.empty() || deleted.empty()) return std::nullopt;
  return ks_two_sample(kept, deleted).p_value;
}

}  // namespace detail

inline AnalysisReport analysis_report(const Corpus& corpus,
                                      const std::vector<ArticleAlignment>& alignments,
                                      const std::map<std::string, RstTree>* rst,
                                      const ConnectiveMap* connectives, ReadingLevel level) {
  std::map<std::string, const ArticleAlignment*> alignment_by_id;
  for (const auto& a : alignments)
    if (a.level == level) alignment_by_id[a.id] = &a;

  std::map<std::string, const ArticleSet*> articles_by_id;
  for (const auto& art : corpus) articles_by_id[art.id] = &art;

  // Coverage: every corpus article carrying this level needs an alignment and
  // (when supplied) an RST tree; alignments must reference known articles.
  std::vector<std::string> missing;
  for (const auto& art : corpus)
    if (art.has(level) && !alignment_by_id.count(art.id)) missing.push_back(art.id);
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    fail("report: no ", to_string(level), " alignment for article(s): ", ids);
  }
  for (const auto& [id, a] : alignment_by_id)
    if (!articles_by_id.count(id))
      fail("report: alignment references unknown article \"", id, "\"");
  if (rst) {
    for (const auto& [id, a] : alignment_by_id)
      if (!rst->count(id)) missing.push_back(id);
    if (!missing.empty()) {
      std::string ids;
      for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
      fail("report: no RST tree for article(s): ", ids);
    }
  }

  AnalysisReport rep;
  rep.level = level;

  struct PerArticle {
    const ArticleSet* article;
    std::vector<DeletionLabel> labels;
    double rate;
  };
  std::vector<PerArticle> per_article;
  for (const auto& art : corpus) {
    auto it = alignment_by_id.find(art.id);
    if (it == alignment_by_id.end()) continue;
    PerArticle pa;
    pa.article = &art;
    pa.labels = deletion_labels(it->second->result, art.original().sentence_count);
    pa.rate = deletion_rate(pa.labels);
    per_article.push_back(std::move(pa));
  }
  rep.n_articles = static_cast<int>(per_article.size());
  if (per_article.empty()) fail("report: no articles cover level ", to_string(level));

  std::vector<double> rates, sent_counts, token_counts;
  for (const auto& pa : per_article) {
    rates.push_back(pa.rate);
    sent_counts.push_back(pa.article->original().sentence_count);
    token_counts.push_back(pa.article->original().token_count);
    rep.n_sentences += pa.article->original().sentence_count;
  }
  rep.deletion = summarize(rates);

  try {
    rep.corr_sentences = pearson(rates, sent_counts);
  } catch (const Error&) {
    rep.corr_sentences = std::nullopt;
  }
  try {
    rep.corr_tokens = pearson(rates, token_counts);
  } catch (const Error&) {
    rep.corr_tokens = std::nullopt;
  }

  // Topic deltas over the eight analyzed topics ("other" excluded).
  std::map<Topic, std::vector<double>> topic_rates;
  std::vector<double> analyzed_rates;
  for (const auto& pa : per_article) {
    if (pa.article->topic == Topic::Other) continue;
    topic_rates[pa.article->topic].push_back(pa.rate);
    analyzed_rates.push_back(pa.rate);
  }
  if (!analyzed_rates.empty()) {
    const double corpus_mean = mean(analyzed_rates);
    for (const auto& [topic, trates] : topic_rates) {
      AnalysisReport::TopicRow row;
      row.topic = topic;
      row.n_articles = static_cast<int>(trates.size());
      row.delta = mean(trates) - corpus_mean;
      std::vector<double> others;
      for (const auto& [t2, r2] : topic_rates)
        if (t2 != topic) others.insert(others.end(), r2.begin(), r2.end());
      row.ks_p = detail::compare_ks(trates, others);
      rep.topics.push_back(row);
    }
  }

  // Per-sentence discourse comparisons.
  if (rst) {
    std::vector<double> depth_kept, depth_deleted;
    std::map<Relation, std::pair<std::vector<double>, std::vector<double>>> rel_ind;
    const Relation analyzed[] = {Relation::Root,       Relation::Elaboration,
                                 Relation::Contrast,   Relation::Background,
                                 Relation::Evaluation, Relation::Explanation};
    for (const auto& pa : per_article) {
      const RstTree& tree = rst->at(pa.article->id);
      for (int i = 0; i < pa.article->original().sentence_count; ++i) {
        const bool deleted = pa.labels[i] == DeletionLabel::Deleted;
        const double d = sentence_depth(tree, i);
        (deleted ? depth_deleted : depth_kept).push_back(d);
        const Relation g = governing_relation(tree, i);
        for (Relation r : analyzed) {
          auto& [kept_v, del_v] = rel_ind[r];
          (deleted ? del_v : kept_v).push_back(r == g ? 1.0 : 0.0);
        }
      }
    }
    rep.depth.present = true;
    if (!depth_kept.empty()) rep.depth.kept = summarize(depth_kept);
    if (!depth_deleted.empty()) rep.depth.deleted = summarize(depth_deleted);
    rep.depth.p = detail::compare_mw(depth_kept, depth_deleted);
    for (Relation r : analyzed) {
      AnalysisReport::RelationRow row;
      row.relation = r;
      auto& [kept_v, del_v] = rel_ind[r];
      row.kept_fraction = detail::fraction(kept_v);
      row.deleted_fraction = detail::fraction(del_v);
      row.p = detail::compare_mw(kept_v, del_v);
      rep.relations.push_back(row);
    }
  }

  if (connectives) {
    rep.connectives.present = true;
    std::vector<double> per_article_fraction;
    std::vector<double> has_kept, has_deleted;
    std::map<ConnectiveSense, std::pair<std::vector<double>, std::vector<double>>> sense_ind;
    std::vector<double> init_kept, init_deleted, noninit_kept, noninit_deleted;
    const ConnectiveSense all_senses[] = {ConnectiveSense::Contingency,
                                          ConnectiveSense::Comparison,
                                          ConnectiveSense::Expansion,
                                          ConnectiveSense::Temporal};
    for (const auto& pa : per_article) {
      int with_connective = 0;
      const int n = pa.article->original().sentence_count;
      for (int i = 0; i < n; ++i) {
        const bool deleted = pa.labels[i] == DeletionLabel::Deleted;
        auto it = connectives->find({pa.article->id, i});
        const std::vector<ConnectiveRecord>* recs =
            it == connectives->end() ? nullptr : &it->second;
        const bool has = recs && !recs->empty();
        if (has) ++with_connective;
        (deleted ? has_deleted : has_kept).push_back(has ? 1.0 : 0.0);
        for (ConnectiveSense s : all_senses) {
          bool has_sense = false;
          if (recs)
            for (const auto& r : *recs)
              if (r.sense == s) has_sense = true;
          auto& [kept_v, del_v] = sense_ind[s];
          (deleted ? del_v : kept_v).push_back(has_sense ? 1.0 : 0.0);
        }
        if (has) {
          bool initial = false, non_initial = false;
          for (const auto& r : *recs) (r.token_offset == 0 ? initial : non_initial) = true;
          (deleted ? init_deleted : init_kept).push_back(initial ? 1.0 : 0.0);
          (deleted ? noninit_deleted : noninit_kept).push_back(non_initial ? 1.0 : 0.0);
        }
      }
      if (n > 0) per_article_fraction.push_back(static_cast<double>(with_connective) / n);
    }
    rep.connectives.per_article_fraction = summarize(per_article_fraction);
    rep.connectives.kept_fraction = detail::fraction(has_kept);
    rep.connectives.deleted_fraction = detail::fraction(has_deleted);
    rep.connectives.p = detail::compare_mw(has_kept, has_deleted);
    for (ConnectiveSense s : all_senses) {
      AnalysisReport::ConnectiveBlock::SenseRow row;
      row.sense = s;
      auto& [kept_v, del_v] = sense_ind[s];
      row.kept_fraction = detail::fraction(kept_v);
      row.deleted_fraction = detail::fraction(del_v);
      row.p = detail::compare_mw(kept_v, del_v);
      rep.connectives.senses.push_back(row);
    }
    AnalysisReport::ConnectiveBlock::PositionRow init_row;
    init_row.position = "sent_initial";
    init_row.kept_fraction = detail::fraction(init_kept);
    init_row.deleted_fraction = detail::fraction(init_deleted);
    init_row.p = detail::compare_ks(init_kept, init_deleted);
    rep.connectives.positions.push_back(std::move(init_row));
    AnalysisReport::ConnectiveBlock::PositionRow noninit_row;
    noninit_row.position = "non_initial";
    noninit_row.kept_fraction = detail::fraction(noninit_kept);
    noninit_row.deleted_fraction = detail::fraction(noninit_deleted);
    noninit_row.p = detail::compare_ks(noninit_kept, noninit_deleted);
    rep.connectives.positions.push_back(std::move(noninit_row));
  }

  return rep;
}

// --- rendering ---------------------------------------------------------------

namespace detail {

inline nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json test_json(const std::optional<TestResult>& t) {
  if (!t) return nullptr;
  return {{"statistic", t->statistic},
          {"p_value", t->p_value},
          {"n_a", t->n_a},
          {"n_b", t->n_b},
          {"method", t->method}};
}

inline nlohmann::json summary_json(const GroupSummary& g) {
  return {{"mean", g.mean}, {"std", g.std_dev}, {"n", g.n}};
}

}  // namespace detail

inline nlohmann::json to_json(const AnalysisReport& rep) {
  nlohmann::json j;
  j["level"] = to_string(rep.level);
  j["articles"] = rep.n_articles;
  j["sentences"] = rep.n_sentences;
  j["deletion_rate"] = detail::summary_json(rep.deletion);
  j["length_correlation"] = {{"sentences", detail::test_json(rep.corr_sentences)},
                             {"tokens", detail::test_json(rep.corr_tokens)}};
  nlohmann::json topics = nlohmann::json::array();
  for (const auto& t : rep.topics)
    topics.push_back({{"topic", to_string(t.topic)},
                      {"articles", t.n_articles},
                      {"delta", t.delta},
                      {"ks_p", detail::opt_json(t.ks_p)}});
  j["topics"] = std::move(topics);
  if (rep.depth.present) {
    j["rst_depth"] = {
        {"kept", rep.depth.kept ? detail::summary_json(*rep.depth.kept)
                                : nlohmann::json(nullptr)},
        {"deleted", rep.depth.deleted ? detail::summary_json(*rep.depth.deleted)
                                      : nlohmann::json(nullptr)},
        {"mann_whitney_p", detail::opt_json(rep.depth.p)}};
    nlohmann::json rels = nlohmann::json::array();
    for (const auto& r : rep.relations)
      rels.push_back({{"relation", to_string(r.relation)},
                      {"kept_fraction", detail::opt_json(r.kept_fraction)},
                      {"deleted_fraction", detail::opt_json(r.deleted_fraction)},
                      {"mann_whitney_p", detail::opt_json(r.p)}});
    j["governing_relations"] = std::move(rels);
  }
  if (rep.connectives.present) {
    nlohmann::json senses = nlohmann::json::array();
    for (const auto& s : rep.connectives.senses)
      senses.push_back({{"sense", to_string(s.sense)},
                        {"kept_fraction", detail::opt_json(s.kept_fraction)},
                        {"deleted_fraction", detail::opt_json(s.deleted_fraction)},
                        {"mann_whitney_p", detail::opt_json(s.p)}});
    nlohmann::json positions = nlohmann::json::array();
    for (const auto& p : rep.connectives.positions)
      positions.push_back({{"position", p.position},
                           {"kept_fraction", detail::opt_json(p.kept_fraction)},
                           {"deleted_fraction", detail::opt_json(p.deleted_fraction)},
                           {"ks_p", detail::opt_json(p.p)}});
    j["connectives"] = {
        {"per_article_fraction", detail::summary_json(rep.connectives.per_article_fraction)},
        {"kept_fraction", detail::opt_json(rep.connectives.kept_fraction)},
        {"deleted_fraction", detail::opt_json(rep.connectives.deleted_fraction)},
        {"mann_whitney_p", detail::opt_json(rep.connectives.p)},
        {"senses", std::move(senses)},
        {"positions", std::move(positions)}};
  }
  return j;
}

inline std::string to_text(const AnalysisReport& rep) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string("    n/a");
    std::ostringstream t;
    t << std::fixed << std::setprecision(4) << std::setw(7) << *v;
    return t.str();
  };
  os << "deletion analysis, target level: " << to_string(rep.level) << "\n";
  os << "articles: " << rep.n_articles << "  original sentences: " << rep.n_sentences
     << "\n\n";
  os << "deletion rate        mean " << rep.deletion.mean << "  std " << rep.deletion.std_dev
     << "\n\n";
  os << "length correlation (rate vs original length)\n";
  auto corr_line = [&](const char* name, const std::optional<TestResult>& t) {
    os << "  " << std::left << std::setw(12) << name << std::right;
    if (t)
      os << " r " << std::setw(7) << t->statistic << "  p " << std::setw(10)
         << t->p_value << "\n";
    else
      os << "     n/a\n";
  };
  corr_line("sentences", rep.corr_sentences);
  corr_line("tokens", rep.corr_tokens);
  if (!rep.topics.empty()) {
    os << "\ntopic deltas vs corpus mean (KS test)\n";
    for (const auto& t : rep.topics) {
      os << "  " << std::left << std::setw(9) << to_string(t.topic) << std::right
         << std::setw(5) << t.n_articles << " articles  delta " << std::showpos
         << std::setw(8) << t.delta << std::noshowpos << "  p " << num(t.ks_p) << "\n";
    }
  }
  if (rep.depth.present) {
    os << "\nRST depth (kept vs deleted, Mann-Whitney)\n";
    auto depth_line = [&](const char* name, const std::optional<GroupSummary>& g) {
      os << "  " << std::left << std::setw(9) << name << std::right;
      if (g)
        os << " mean " << std::setw(7) << g->mean << "  std " << std::setw(7) << g->std_dev
           << "  n " << g->n << "\n";
      else
        os << "     n/a\n";
    };
    depth_line("kept", rep.depth.kept);
    depth_line("deleted", rep.depth.deleted);
    os << "  p " << num(rep.depth.p) << "\n";
    os << "\ngoverning relations (fraction kept / deleted, Mann-Whitney)\n";
    for (const auto& r : rep.relations)
      os << "  " << std::left << std::setw(12) << to_string(r.relation) << std::right
         << num(r.kept_fraction) << " " << num(r.deleted_fraction) << "  p " << num(r.p)
         << "\n";
  }
  if (rep.connectives.present) {
    os << "\nconnectives\n";
    os << "  per-article fraction  mean " << rep.connectives.per_article_fraction.mean
       << "  std " << rep.connectives.per_article_fraction.std_dev << "\n";
    os << "  any connective " << num(rep.connectives.kept_fraction) << " "
       << num(rep.connectives.deleted_fraction) << "  p " << num(rep.connectives.p) << "\n";
    for (const auto& s : rep.connectives.senses)
      os << "  " << std::left << std::setw(14) << to_string(s.sense) << std::right
         << num(s.kept_fraction) << " " << num(s.deleted_fraction) << "  p " << num(s.p)
         << "\n";
    for (const auto& p : rep.connectives.positions)
      os << "  " << std::left << std::setw(14) << p.position << std::right
         << num(p.kept_fraction) << " " << num(p.deleted_fraction) << "  p (KS) "
         << num(p.p) << "\n";
  }
  return os.str();
}

}  // namespace simpdel

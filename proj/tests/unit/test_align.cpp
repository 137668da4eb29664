#include "simpdel/align.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "simpdel/stats.hpp"
#include "support/synthetic.hpp"
#include "support/tempfile.hpp"

using namespace simpdel;
using testsupport::TempDir;

namespace {

Document doc_of(ReadingLevel lv, int n) {
  Document doc;
  doc.level = lv;
  std::vector<Sentence> para;
  for (int i = 0; i < n; ++i) {
    Sentence s;
    s.text = "s" + std::to_string(i);
    s.tokens = {s.text};
    s.article_index = i;
    s.paragraph_index = 0;
    s.index_in_paragraph = i;
    para.push_back(s);
  }
  doc.paragraphs.push_back(std::move(para));
  doc.sentence_count = n;
  return doc;
}

// provider over explicit per-level vector lists
SentenceVectorFn list_provider(const std::vector<Vec>& orig, const std::vector<Vec>& simp) {
  return [&orig, &simp](const Document& doc, const Sentence& s) -> const Vec* {
    const auto& list = doc.level == ReadingLevel::Original ? orig : simp;
    if (s.article_index < 0 || s.article_index >= static_cast<int>(list.size()))
      return nullptr;
    return &list[s.article_index];
  };
}

}  // namespace

TEST_CASE("identical one-sentence documents align", "[align]") {
  const auto orig = doc_of(ReadingLevel::Original, 1);
  const auto simp = doc_of(ReadingLevel::Elementary, 1);
  const std::vector<Vec> ov = {{1, 2, 3}};
  const std::vector<Vec> sv = {{1, 2, 3}};
  const AlignmentResult r = auto_align(orig, simp, list_provider(ov, sv));
  CHECK(r.pairs == std::set<SentencePair>{{0, 0}});
  CHECK(r.deleted.empty());
}

TEST_CASE("orthogonal sentences are deleted", "[align]") {
  const auto orig = doc_of(ReadingLevel::Original, 2);
  const auto simp = doc_of(ReadingLevel::Elementary, 1);
  const std::vector<Vec> ov = {{1, 0, 0}, {0, 1, 0}};
  const std::vector<Vec> sv = {{1, 0, 0}};
  const AlignmentResult r = auto_align(orig, simp, list_provider(ov, sv));
  CHECK(r.pairs == std::set<SentencePair>{{0, 0}});
  CHECK(r.deleted == std::set<int>{1});
}

TEST_CASE("two candidates above the split threshold form a split", "[align]") {
  const auto orig = doc_of(ReadingLevel::Original, 1);
  const auto simp = doc_of(ReadingLevel::Elementary, 2);
  // planar vectors at cosine 0.6 on either side
  const std::vector<Vec> ov = {{1, 0}};
  const std::vector<Vec> sv = {{0.6, 0.8}, {0.6, -0.8}};
  const AlignmentResult r = auto_align(orig, simp, list_provider(ov, sv));
  CHECK(r.pairs == std::set<SentencePair>{{0, 0}, {0, 1}});
  CHECK(r.deleted.empty());
}

TEST_CASE("a single candidate below the nosplit threshold is not a split", "[align]") {
  const auto orig = doc_of(ReadingLevel::Original, 1);
  const auto simp = doc_of(ReadingLevel::Elementary, 1);
  const std::vector<Vec> ov = {{1, 0}};
  const std::vector<Vec> sv = {{0.6, 0.8}};
  const AlignmentResult r = auto_align(orig, simp, list_provider(ov, sv));
  CHECK(r.pairs.empty());
  CHECK(r.deleted == std::set<int>{0});
}

TEST_CASE("split candidates claimed at stage 1 block the split", "[align]") {
  // simp 0 is stage-1 matched to orig 0; orig 1 sees two candidates above
  // 0.47 but one of them is taken, so orig 1 stays deleted.
  const auto orig = doc_of(ReadingLevel::Original, 2);
  const auto simp = doc_of(ReadingLevel::Elementary, 2);
  const std::vector<Vec> ov = {{1, 0, 0, 0}, {0.6, 0.8, 0, 0}};
  const std::vector<Vec> sv = {{1, 0, 0, 0},               // orig0 exactly (stage 1)
                               {0.36, 0.48, 0.8, 0}};      // 0.6 to orig1, 0.36 to orig0
  REQUIRE(cosine(ov[0], sv[0]) > 0.94);
  REQUIRE(cosine(ov[1], sv[0]) == Catch::Approx(0.6));
  REQUIRE(cosine(ov[1], sv[1]) == Catch::Approx(0.6));
  REQUIRE(cosine(ov[0], sv[1]) == Catch::Approx(0.36));
  const AlignmentResult r = auto_align(orig, simp, list_provider(ov, sv));
  CHECK(r.pairs == std::set<SentencePair>{{0, 0}});
  CHECK(r.deleted == std::set<int>{1});
}

TEST_CASE("missing sentence vector is an error naming the sentence", "[align]") {
  const auto orig = doc_of(ReadingLevel::Original, 1);
  const auto simp = doc_of(ReadingLevel::Elementary, 2);
  const std::vector<Vec> ov = {{1, 0}};
  const std::vector<Vec> sv = {{1, 0}};  // simp sentence 1 has no vector
  CHECK_THROWS_WITH(auto_align(orig, simp, list_provider(ov, sv)),
                    Catch::Matchers::ContainsSubstring("sentence 1"));
}

TEST_CASE("paragraph restriction limits the scored pairs", "[align]") {
  auto orig = doc_of(ReadingLevel::Original, 2);
  auto simp = doc_of(ReadingLevel::Elementary, 2);
  // move simp sentence 1 into its own paragraph
  simp.paragraphs.push_back({simp.paragraphs[0][1]});
  simp.paragraphs[0].pop_back();
  simp.paragraphs[1][0].paragraph_index = 1;
  simp.paragraphs[1][0].index_in_paragraph = 0;

  const std::vector<Vec> ov = {{1, 0}, {0, 1}};
  const std::vector<Vec> sv = {{1, 0}, {0, 1}};
  AlignParams params;
  params.paragraph_pairs = std::set<std::pair<int, int>>{{0, 0}};
  const AlignmentResult r = auto_align(orig, simp, list_provider(ov, sv), params);
  CHECK(r.pairs == std::set<SentencePair>{{0, 0}});
  CHECK(r.deleted == std::set<int>{1});  // its match sits outside the allowed paragraphs
}

TEST_CASE("thresholds above 1 delete everything", "[align]") {
  const auto orig = doc_of(ReadingLevel::Original, 3);
  const auto simp = doc_of(ReadingLevel::Elementary, 3);
  SplitMix64 rng(5);
  std::vector<Vec> ov, sv;
  for (int i = 0; i < 3; ++i) {
    Vec u(4), v(4);
    for (int d = 0; d < 4; ++d) {
      u[d] = rng.next_double();
      v[d] = rng.next_double();
    }
    ov.push_back(u);
    sv.push_back(v);
  }
  AlignParams params;
  params.theta_nosplit = params.theta_split = 1.0 + 1e-9;
  const AlignmentResult r = auto_align(orig, simp, list_provider(ov, sv), params);
  CHECK(r.pairs.empty());
  CHECK(r.deleted == std::set<int>{0, 1, 2});
}

TEST_CASE("self-alignment keeps every sentence", "[align]") {
  const auto doc = doc_of(ReadingLevel::Original, 5);
  std::vector<Vec> vecs;
  for (int i = 0; i < 5; ++i) {
    Vec v(6, 0.0);
    v[i] = 1.0;
    v[5] = 0.1 * (i + 1);
    vecs.push_back(v);
  }
  const AlignmentResult r = auto_align(doc, doc, list_provider(vecs, vecs));
  const auto labels = deletion_labels(r, 5);
  for (auto l : labels) CHECK(l == DeletionLabel::Kept);
}

TEST_CASE("raising both thresholds never shrinks the deleted set", "[align]") {
  const auto orig = doc_of(ReadingLevel::Original, 6);
  const auto simp = doc_of(ReadingLevel::Elementary, 6);
  SplitMix64 rng(9);
  std::vector<Vec> ov, sv;
  for (int i = 0; i < 6; ++i) {
    Vec u(3), v(3);
    for (int d = 0; d < 3; ++d) {
      u[d] = rng.next_double();
      v[d] = rng.next_double();
    }
    ov.push_back(u);
    sv.push_back(v);
  }
  std::set<int> last_deleted;
  for (double theta : {0.2, 0.5, 0.8, 0.95, 1.01}) {
    AlignParams params;
    params.theta_nosplit = params.theta_split = theta;
    const auto r = auto_align(orig, simp, list_provider(ov, sv), params);
    for (int d : last_deleted) CHECK(r.deleted.count(d) == 1);
    last_deleted = r.deleted;
  }
}

TEST_CASE("crowd aggregation: unanimity, exclusion, tie-break", "[align]") {
  auto vote = [](const std::string& worker, int orig, int simp, AlignmentLabel l) {
    CrowdJudgment j;
    j.worker_id = worker;
    j.pair = {orig, simp};
    j.label = l;
    return j;
  };
  auto test_q = [](const std::string& worker, AlignmentLabel answer, AlignmentLabel gold) {
    CrowdJudgment j;
    j.worker_id = worker;
    j.pair = {90, 90};
    j.label = answer;
    j.is_test_question = true;
    j.gold_label = gold;
    return j;
  };

  SECTION("five equivalent votes") {
    std::vector<CrowdJudgment> js;
    for (int w = 0; w < 5; ++w)
      js.push_back(vote("w" + std::to_string(w), 0, 0, AlignmentLabel::Equivalent));
    const auto agg = aggregate_crowd(js);
    CHECK(agg.at({0, 0}) == AlignmentLabel::Equivalent);
  }

  SECTION("a low-accuracy worker's lone dissent does not flip the majority") {
    std::vector<CrowdJudgment> js;
    // worker bad: 2 of 5 test questions correct -> excluded at 0.8
    for (int q = 0; q < 5; ++q) {
      CrowdJudgment j;
      j.worker_id = "bad";
      j.pair = {80 + q, 80 + q};
      j.label = q < 2 ? AlignmentLabel::Mismatch : AlignmentLabel::Equivalent;
      j.is_test_question = true;
      j.gold_label = AlignmentLabel::Mismatch;
      js.push_back(j);
    }
    js.push_back(vote("bad", 1, 1, AlignmentLabel::Partial));
    for (int w = 0; w < 4; ++w)
      js.push_back(vote("w" + std::to_string(w), 1, 1, AlignmentLabel::Mismatch));
    const auto agg = aggregate_crowd(js);
    CHECK(agg.at({1, 1}) == AlignmentLabel::Mismatch);
  }

  SECTION("ties break toward the less-aligned label") {
    std::vector<CrowdJudgment> js;
    js.push_back(test_q("w0", AlignmentLabel::Mismatch, AlignmentLabel::Partial));  // 0/1
    js.push_back(vote("w0", 2, 2, AlignmentLabel::Equivalent));
    js.push_back(vote("w1", 2, 2, AlignmentLabel::Equivalent));
    js.push_back(vote("w2", 2, 2, AlignmentLabel::Equivalent));
    js.push_back(vote("w3", 2, 2, AlignmentLabel::Partial));
    js.push_back(vote("w4", 2, 2, AlignmentLabel::Partial));
    const auto agg = aggregate_crowd(js);  // 2 vs 2 after the exclusion
    CHECK(agg.at({2, 2}) == AlignmentLabel::Partial);
  }

  SECTION("a pair with no surviving judgments is an error") {
    std::vector<CrowdJudgment> js;
    js.push_back(test_q("solo", AlignmentLabel::Mismatch, AlignmentLabel::Partial));
    js.push_back(vote("solo", 3, 3, AlignmentLabel::Equivalent));
    CHECK_THROWS_WITH(aggregate_crowd(js), Catch::Matchers::ContainsSubstring("(3,3)"));
  }
}

TEST_CASE("cohen's kappa fixtures", "[align]") {
  using L = AlignmentLabel;
  const std::vector<L> same = {L::Equivalent, L::Partial, L::Mismatch, L::Equivalent};
  CHECK(cohens_kappa(same, same) == 1.0);

  const std::vector<L> a1 = {L::Equivalent, L::Equivalent, L::Partial, L::Partial};
  const std::vector<L> b1 = {L::Equivalent, L::Partial, L::Equivalent, L::Partial};
  CHECK(cohens_kappa(a1, b1) == 0.0);

  const std::vector<L> a2 = {L::Equivalent, L::Equivalent, L::Equivalent, L::Partial};
  const std::vector<L> b2 = {L::Equivalent, L::Equivalent, L::Partial, L::Partial};
  CHECK(cohens_kappa(a2, b2) == Catch::Approx(0.5).margin(1e-9));

  SECTION("degenerate marginals") {
    const std::vector<L> allsame_a = {L::Equivalent, L::Equivalent};
    CHECK(cohens_kappa(allsame_a, allsame_a) == 1.0);
    const std::vector<L> allsame_b = {L::Partial, L::Partial};
    CHECK(cohens_kappa(allsame_a, allsame_b) == 0.0);
  }

  SECTION("symmetry and errors") {
    CHECK(cohens_kappa(a2, b2) == cohens_kappa(b2, a2));
    const std::vector<L> shorter = {L::Equivalent};
    CHECK_THROWS_AS(cohens_kappa(a2, shorter), Error);
    CHECK_THROWS_AS(cohens_kappa(std::vector<L>{}, std::vector<L>{}), Error);
  }
}

TEST_CASE("deletion labels from alignments", "[align]") {
  AlignmentResult r;
  r.pairs = {{0, 0}};
  r.deleted = {1};
  CHECK(deletion_labels(r, 2) ==
        std::vector<DeletionLabel>{DeletionLabel::Kept, DeletionLabel::Deleted});

  AlignmentResult split;
  split.pairs = {{0, 0}, {0, 1}};
  CHECK(deletion_labels(split, 1) == std::vector<DeletionLabel>{DeletionLabel::Kept});

  AlignmentResult empty;
  CHECK(deletion_labels(empty, 3) ==
        std::vector<DeletionLabel>(3, DeletionLabel::Deleted));

  AlignmentResult bad;
  bad.pairs = {{5, 0}};
  CHECK_THROWS_AS(deletion_labels(bad, 3), Error);
}

TEST_CASE("deletion rate", "[align]") {
  using DL = DeletionLabel;
  CHECK(deletion_rate({DL::Kept, DL::Deleted}) == 0.5);
  CHECK(deletion_rate({DL::Kept, DL::Kept}) == 0.0);
  CHECK_THROWS_AS(deletion_rate({}), Error);
}

TEST_CASE("planted 50-article corpus reproduces its mean deletion rate", "[align]") {
  // per-article rates averaging 0.448: alternate rates around the target
  SplitMix64 rng(31);
  std::vector<double> rates;
  double total = 0;
  for (int a = 0; a < 50; ++a) {
    const int n = 125;  // 125 sentences: rate granularity 0.008
    const int deleted = static_cast<int>(std::round(0.448 * n)) + (a % 2 == 0 ? 1 : -1);
    std::vector<DeletionLabel> labels(n, DeletionLabel::Kept);
    for (int i = 0; i < deleted; ++i) labels[i] = DeletionLabel::Deleted;
    const double rate = deletion_rate(labels);
    rates.push_back(rate);
    total += rate;
  }
  CHECK(total / 50 == Catch::Approx(0.448).margin(1e-3));
}

TEST_CASE("alignment files round-trip", "[align]") {
  TempDir tmp;
  std::vector<ArticleAlignment> alignments;
  ArticleAlignment a;
  a.id = "art0";
  a.level = ReadingLevel::Elementary;
  a.result.pairs = {{0, 0}, {2, 1}, {2, 2}};
  a.result.deleted = {1, 3};
  alignments.push_back(a);
  const auto path = tmp.file("a.jsonl");
  save_alignments(alignments, path);
  const auto loaded = load_alignments(path);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].id == "art0");
  CHECK(loaded[0].level == ReadingLevel::Elementary);
  CHECK(loaded[0].result.pairs == a.result.pairs);
  CHECK(loaded[0].result.deleted == a.result.deleted);
}

TEST_CASE("synthetic fixture alignment recovers every planted decision", "[align]") {
  const auto fx = testsupport::make_alignment_fixture(10, 77);
  for (size_t i = 0; i < fx.corpus.size(); ++i) {
    const auto& art = fx.corpus[i];
    const auto& plan = fx.planted[i];
    const AlignmentResult r =
        auto_align(art.original(), art.versions.at(ReadingLevel::Elementary),
                   store_provider(fx.vectors, art.id));
    CHECK(r.pairs == plan.pairs);
    CHECK(r.deleted == plan.deleted);
  }
}

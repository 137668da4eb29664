#pragma once

// Subcommand dispatch for the simpdel executable. Every subcommand reads and
// writes only the files named by its flags, derives all randomness from
// --seed, and drops a manifest next to each output, so reruns with identical
// inputs are byte-identical.

#include <atomic>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "simpdel/align.hpp"
#include "simpdel/corpus.hpp"
#include "simpdel/discourse.hpp"
#include "simpdel/embeddings.hpp"
#include "simpdel/error.hpp"
#include "simpdel/features.hpp"
#include "simpdel/manifest.hpp"
#include "simpdel/model.hpp"
#include "simpdel/readability.hpp"
#include "simpdel/report.hpp"
#include "simpdel/stats.hpp"
#include "simpdel/version.hpp"

namespace simpdel::cli {

enum class LogLevel { Quiet, Info, Debug };

struct GlobalOpts {
  uint64_t seed = 42;
  int jobs = 1;
  LogLevel log_level = LogLevel::Info;
};

inline void log_info(const GlobalOpts& g, const std::string& msg) {
  if (g.log_level != LogLevel::Quiet) std::cerr << msg << "\n";
}

// Work items run across --jobs threads; results are merged by index so the
// output order never depends on scheduling.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const int workers = std::min(jobs, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline std::vector<ReadingLevel> target_levels(const std::string& level_flag) {
  if (level_flag == "middle") return {ReadingLevel::Middle};
  if (level_flag == "elementary") return {ReadingLevel::Elementary};
  if (level_flag == "all" || level_flag.empty())
    return {ReadingLevel::Middle, ReadingLevel::Elementary};
  fail("unknown level \"", level_flag, "\" (want middle, elementary, or all)");
}

inline ReadingLevel single_level(const std::string& level_flag) {
  auto lv = parse_level(level_flag);
  if (!lv || *lv == ReadingLevel::Original)
    fail("unknown target level \"", level_flag, "\" (want middle or elementary)");
  return *lv;
}

}  // namespace detail

// --- align -------------------------------------------------------------------

struct AlignArgs {
  std::string corpus_path;
  std::string vectors_path;
  std::string para_align_path;
  std::string level = "all";
  double theta_nosplit = 0.94;
  double theta_split = 0.47;
  std::string out_path;
};

inline int run_align(const AlignArgs& args, const GlobalOpts& g) {
  const Corpus corpus = load_corpus(args.corpus_path);
  const VectorStore vectors = load_vectors(args.vectors_path);
  std::map<std::pair<std::string, ReadingLevel>, std::set<std::pair<int, int>>> para;
  if (!args.para_align_path.empty()) para = load_paragraph_alignments(args.para_align_path);

  const auto levels = detail::target_levels(args.level);
  struct Job {
    const ArticleSet* article;
    ReadingLevel level;
  };
  std::vector<Job> jobs;
  for (const auto& art : corpus)
    for (ReadingLevel lv : levels)
      if (art.has(lv)) jobs.push_back({&art, lv});

  std::vector<ArticleAlignment> results(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), g.jobs, [&](int i) {
    const auto& job = jobs[i];
    AlignParams params;
    params.theta_nosplit = args.theta_nosplit;
    params.theta_split = args.theta_split;
    if (!args.para_align_path.empty()) {
      auto it = para.find({job.article->id, job.level});
      if (it != para.end()) params.paragraph_pairs = it->second;
    }
    ArticleAlignment out;
    out.id = job.article->id;
    out.level = job.level;
    out.result = auto_align(job.article->original(), job.article->versions.at(job.level),
                            store_provider(vectors, job.article->id), params);
    results[i] = std::move(out);
  });

  save_alignments(results, args.out_path);
  log_info(g, format_msg("aligned ", jobs.size(), " article/level pairs -> ", args.out_path));

  RunManifest manifest;
  manifest.subcommand = "align";
  manifest.seed = g.seed;
  manifest.flags = {{"corpus", args.corpus_path},
                    {"sentence-vectors", args.vectors_path},
                    {"para-align", args.para_align_path},
                    {"level", args.level},
                    {"theta-nosplit", detail::fmt_double(args.theta_nosplit)},
                    {"theta-split", detail::fmt_double(args.theta_split)},
                    {"out", args.out_path}};
  manifest.add_input(args.corpus_path);
  manifest.add_input(args.vectors_path);
  if (!args.para_align_path.empty()) manifest.add_input(args.para_align_path);
  manifest.outputs = {args.out_path};
  manifest.write();
  return 0;
}

// --- stats -------------------------------------------------------------------

struct StatsArgs {
  std::string corpus_path;
  std::string alignments_path;
  std::string rst_path;
  std::string connectives_path;
  std::string level = "elementary";
  std::string out_path;
};

inline int run_stats(const StatsArgs& args, const GlobalOpts& g) {
  const Corpus corpus = load_corpus(args.corpus_path);
  const auto alignments = load_alignments(args.alignments_path);
  std::optional<std::map<std::string, RstTree>> rst;
  if (!args.rst_path.empty()) rst = load_rst(args.rst_path);
  std::optional<ConnectiveMap> connectives;
  if (!args.connectives_path.empty()) connectives = load_connectives(args.connectives_path);

  const AnalysisReport rep =
      analysis_report(corpus, alignments, rst ? &*rst : nullptr,
                      connectives ? &*connectives : nullptr, detail::single_level(args.level));
  std::cout << to_text(rep);
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) fail_io("stats: cannot write ", args.out_path);
    out << to_json(rep).dump(2) << "\n";

    RunManifest manifest;
    manifest.subcommand = "stats";
    manifest.seed = g.seed;
    manifest.flags = {{"corpus", args.corpus_path},
                      {"alignments", args.alignments_path},
                      {"rst", args.rst_path},
                      {"connectives", args.connectives_path},
                      {"level", args.level},
                      {"out", args.out_path}};
    manifest.add_input(args.corpus_path);
    manifest.add_input(args.alignments_path);
    if (!args.rst_path.empty()) manifest.add_input(args.rst_path);
    if (!args.connectives_path.empty()) manifest.add_input(args.connectives_path);
    manifest.outputs = {args.out_path};
    manifest.write();
  }
  return 0;
}

// --- featurize ---------------------------------------------------------------

struct FeaturizeArgs {
  std::string corpus_path;
  std::string alignments_path;
  std::string rst_path;
  std::string connectives_path;
  std::string word_vectors_path;
  std::string easy_words_path;
  std::string level = "elementary";
  std::string out_path;
  std::string binning_out_path;
  std::string binning_in_path;
  int k = 10;
  double gamma = 0.2;
};

inline int run_featurize(const FeaturizeArgs& args, const GlobalOpts& g) {
  const Corpus corpus = load_corpus(args.corpus_path);
  const auto alignments = load_alignments(args.alignments_path);
  const auto rst = load_rst(args.rst_path);
  const auto connectives = load_connectives(args.connectives_path);
  const VectorStore words = load_vectors(args.word_vectors_path);
  const auto easy = args.easy_words_path.empty() ? default_easy_words()
                                                 : load_word_list(args.easy_words_path);
  const ReadingLevel level = detail::single_level(args.level);

  std::map<std::string, const AlignmentResult*> alignment_by_id;
  for (const auto& a : alignments)
    if (a.level == level) alignment_by_id[a.id] = &a.result;

  std::vector<const ArticleSet*> covered;
  std::string missing;
  for (const auto& art : corpus) {
    if (!art.has(level)) continue;
    if (!alignment_by_id.count(art.id)) {
      missing += (missing.empty() ? "" : ", ") + art.id;
      continue;
    }
    if (!rst.count(art.id)) fail("featurize: no RST tree for article \"", art.id, "\"");
    covered.push_back(&art);
  }
  if (!missing.empty())
    fail("featurize: no ", to_string(level), " alignment for article(s): ", missing);
  if (covered.empty()) fail("featurize: no articles cover level ", to_string(level));

  std::vector<std::vector<FeatureRow>> per_article(covered.size());
  parallel_for(static_cast<int>(covered.size()), g.jobs, [&](int ai) {
    const ArticleSet& art = *covered[ai];
    const Document& orig = art.original();
    const RstTree& tree = rst.at(art.id);
    const auto labels =
        deletion_labels(*alignment_by_id.at(art.id), orig.sentence_count);
    std::vector<FeatureRow> rows;
    for (const auto& para : orig.paragraphs) {
      for (const Sentence& s : para) {
        SentenceDiscourse disc;
        disc.depth = sentence_depth(tree, s.article_index);
        disc.is_nucleus = nuclearity(tree, s.article_index) == Nuclearity::Nucleus;
        disc.governing_relation = governing_relation(tree, s.article_index);
        auto cit = connectives.find({art.id, s.article_index});
        const auto conn = connective_features(
            cit == connectives.end() ? std::vector<ConnectiveRecord>{} : cit->second);
        disc.has_connective = conn.has_connective;
        disc.senses = conn.senses;
        disc.connective_sent_initial = conn.sent_initial;

        const auto stats = text_stats(s.tokens, 1, easy);
        const ReadabilityScores scores =
            stats.words >= 1 ? score_all(stats) : ReadabilityScores{};

        FeatureRow row;
        row.id = art.id;
        row.sentence = s.article_index;
        row.level = level;
        row.label = labels[s.article_index];
        const auto sparse = assemble(s, orig, art, scores, disc);
        row.sparse.assign(sparse.begin(), sparse.end());
        row.embedding = sentence_vector(s.tokens, words);
        rows.push_back(std::move(row));
      }
    }
    per_article[ai] = std::move(rows);
  });

  std::vector<FeatureRow> rows;
  for (auto& chunk : per_article)
    for (auto& r : chunk) rows.push_back(std::move(r));

  BinningConfig binning;
  if (!args.binning_in_path.empty()) {
    binning = load_binning(args.binning_in_path);
  } else {
    std::vector<std::vector<double>> sparse;
    sparse.reserve(rows.size());
    for (const auto& r : rows) sparse.push_back(r.sparse);
    binning = fit_binning(sparse, args.k, args.gamma);
  }
  for (auto& r : rows) r.binned = bin(r.sparse, binning);

  save_feature_rows(rows, args.out_path);
  if (!args.binning_out_path.empty()) save_binning(binning, args.binning_out_path);
  log_info(g, format_msg("featurized ", rows.size(), " sentences from ", covered.size(),
                         " articles -> ", args.out_path));

  RunManifest manifest;
  manifest.subcommand = "featurize";
  manifest.seed = g.seed;
  manifest.flags = {{"corpus", args.corpus_path},
                    {"alignments", args.alignments_path},
                    {"rst", args.rst_path},
                    {"connectives", args.connectives_path},
                    {"word-vectors", args.word_vectors_path},
                    {"easy-words", args.easy_words_path},
                    {"level", args.level},
                    {"out", args.out_path},
                    {"binning-out", args.binning_out_path},
                    {"binning-in", args.binning_in_path},
                    {"k", std::to_string(args.k)},
                    {"gamma", detail::fmt_double(args.gamma)}};
  manifest.add_input(args.corpus_path);
  manifest.add_input(args.alignments_path);
  manifest.add_input(args.rst_path);
  manifest.add_input(args.connectives_path);
  manifest.add_input(args.word_vectors_path);
  if (!args.easy_words_path.empty()) manifest.add_input(args.easy_words_path);
  if (!args.binning_in_path.empty()) manifest.add_input(args.binning_in_path);
  manifest.outputs = {args.out_path};
  if (!args.binning_out_path.empty()) manifest.outputs.push_back(args.binning_out_path);
  manifest.write();
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string features_path;
  std::string val_features_path;
  std::string binning_path;
  std::string arch = "lr";
  std::string mode = "sparse";
  double learning_rate = 1e-5;
  int epochs = 100;
  int batch_size = 64;
  bool no_downsample = false;
  std::string out_path;
};

inline int run_train(const TrainArgs& args, const GlobalOpts& g) {
  const auto arch = parse_architecture(args.arch);
  if (!arch) fail("train: unknown architecture \"", args.arch, "\"");
  const auto mode = parse_feature_mode(args.mode);
  if (!mode) fail("train: unknown feature mode \"", args.mode, "\"");

  const auto train_rows = load_feature_rows(args.features_path);
  const auto val_rows = load_feature_rows(args.val_features_path);

  std::optional<BinningConfig> binning;
  if (mode_uses_binned(*mode)) {
    if (args.binning_path.empty())
      fail("train: mode ", args.mode, " needs --binning from featurize");
    binning = load_binning(args.binning_path);
  }

  TrainConfig cfg;
  cfg.learning_rate = args.learning_rate;
  cfg.epochs = args.epochs;
  cfg.batch_size = args.batch_size;
  cfg.seed = g.seed;
  cfg.downsample = !args.no_downsample;

  const Dataset train_ds = make_dataset(train_rows, *mode, binning ? &*binning : nullptr);
  const Dataset val_ds = make_dataset(val_rows, *mode, binning ? &*binning : nullptr);
  const Network net = train(train_ds, val_ds, *arch, *mode, cfg, binning);
  save_model(net, args.out_path);
  const EvalResult val_result = evaluate(net, val_ds);
  log_info(g, format_msg("trained ", args.arch, "/", args.mode, ": val P ",
                         val_result.precision, " R ", val_result.recall, " F1 ",
                         val_result.f1, " -> ", args.out_path));

  RunManifest manifest;
  manifest.subcommand = "train";
  manifest.seed = g.seed;
  manifest.flags = {{"features", args.features_path},
                    {"val-features", args.val_features_path},
                    {"binning", args.binning_path},
                    {"arch", args.arch},
                    {"mode", args.mode},
                    {"lr", detail::fmt_double(args.learning_rate)},
                    {"epochs", std::to_string(args.epochs)},
                    {"batch-size", std::to_string(args.batch_size)},
                    {"downsample", args.no_downsample ? "false" : "true"},
                    {"out", args.out_path}};
  manifest.add_input(args.features_path);
  manifest.add_input(args.val_features_path);
  if (!args.binning_path.empty()) manifest.add_input(args.binning_path);
  manifest.outputs = {args.out_path};
  manifest.write();
  return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string model_path;
  std::string features_path;
  std::string out_path;
};

inline int run_eval(const EvalArgs& args, const GlobalOpts& g) {
  const Network net = load_model(args.model_path);
  const auto rows = load_feature_rows(args.features_path);
  const Dataset ds = make_dataset(rows, net.mode, net.binning ? &*net.binning : nullptr);
  const EvalResult r = evaluate(net, ds);
  std::cout << "precision " << r.precision << "\nrecall " << r.recall << "\nf1 " << r.f1
            << "\n";
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) fail_io("eval: cannot write ", args.out_path);
    nlohmann::json j = {{"precision", r.precision},
                        {"recall", r.recall},
                        {"f1", r.f1},
                        {"examples", ds.size()}};
    out << j.dump(2) << "\n";

    RunManifest manifest;
    manifest.subcommand = "eval";
    manifest.seed = g.seed;
    manifest.flags = {{"model", args.model_path},
                      {"features", args.features_path},
                      {"out", args.out_path}};
    manifest.add_input(args.model_path);
    manifest.add_input(args.features_path);
    manifest.outputs = {args.out_path};
    manifest.write();
  }
  return 0;
}

// --- ablate ------------------------------------------------------------------

struct AblateArgs {
  std::string features_path;
  std::string val_features_path;
  std::string test_features_path;
  std::string binning_path;
  std::string arch = "lr";
  std::string mode = "combined-binned";
  std::string groups = "discourse,document,position";
  double learning_rate = 1e-5;
  int epochs = 100;
  int batch_size = 64;
  int bootstrap_iterations = 10000;
  std::string out_path;
};

inline int run_ablate(const AblateArgs& args, const GlobalOpts& g) {
  const auto arch = parse_architecture(args.arch);
  if (!arch) fail("ablate: unknown architecture \"", args.arch, "\"");
  const auto mode = parse_feature_mode(args.mode);
  if (!mode) fail("ablate: unknown feature mode \"", args.mode, "\"");

  std::vector<FeatureGroup> groups;
  std::stringstream ss(args.groups);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto gparsed = parse_feature_group(item);
    if (!gparsed) fail("ablate: unknown feature group \"", item, "\"");
    groups.push_back(*gparsed);
  }

  AblationConfig cfg;
  cfg.arch = *arch;
  cfg.mode = *mode;
  cfg.train.learning_rate = args.learning_rate;
  cfg.train.epochs = args.epochs;
  cfg.train.batch_size = args.batch_size;
  cfg.train.seed = g.seed;
  cfg.bootstrap_iterations = args.bootstrap_iterations;
  cfg.bootstrap_seed = g.seed;
  if (!args.binning_path.empty()) {
    const BinningConfig base = load_binning(args.binning_path);
    cfg.binning_k = base.k;
    cfg.binning_gamma = base.gamma;
  }

  const auto train_rows = load_feature_rows(args.features_path);
  const auto val_rows = load_feature_rows(args.val_features_path);
  const auto test_rows = load_feature_rows(args.test_features_path);
  const AblationTable table = ablate(train_rows, val_rows, test_rows, groups, cfg);

  std::cout << "full model: P " << table.full.precision << " R " << table.full.recall
            << " F1 " << table.full.f1 << "\n";
  for (const auto& row : table.rows)
    std::cout << "- " << row.group << ": P " << row.result.precision << " R "
              << row.result.recall << " F1 " << row.result.f1 << " (delta "
              << row.delta_f1 << ", bootstrap p " << row.p_value << ")\n";

  if (!args.out_path.empty()) {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : table.rows)
      rows_json.push_back({{"group", row.group},
                           {"precision", row.result.precision},
                           {"recall", row.result.recall},
                           {"f1", row.result.f1},
                           {"delta_f1", row.delta_f1},
                           {"bootstrap_p", row.p_value}});
    nlohmann::json j = {{"full",
                         {{"precision", table.full.precision},
                          {"recall", table.full.recall},
                          {"f1", table.full.f1}}},
                        {"ablations", std::move(rows_json)}};
    std::ofstream out(args.out_path);
    if (!out) fail_io("ablate: cannot write ", args.out_path);
    out << j.dump(2) << "\n";

    RunManifest manifest;
    manifest.subcommand = "ablate";
    manifest.seed = g.seed;
    manifest.flags = {{"features", args.features_path},
                      {"val-features", args.val_features_path},
                      {"test-features", args.test_features_path},
                      {"binning", args.binning_path},
                      {"arch", args.arch},
                      {"mode", args.mode},
                      {"group", args.groups},
                      {"lr", detail::fmt_double(args.learning_rate)},
                      {"epochs", std::to_string(args.epochs)},
                      {"batch-size", std::to_string(args.batch_size)},
                      {"bootstrap-iters", std::to_string(args.bootstrap_iterations)},
                      {"out", args.out_path}};
    manifest.add_input(args.features_path);
    manifest.add_input(args.val_features_path);
    manifest.add_input(args.test_features_path);
    if (!args.binning_path.empty()) manifest.add_input(args.binning_path);
    manifest.outputs = {args.out_path};
    manifest.write();
  }
  return 0;
}

// --- baseline ----------------------------------------------------------------

struct BaselineArgs {
  std::string features_path;
  double rate = 0.0;
  int trials = 10000;
  std::string out_path;
};

inline int run_baseline(const BaselineArgs& args, const GlobalOpts& g) {
  const auto rows = load_feature_rows(args.features_path);
  std::vector<int> gold(rows.size());
  for (size_t i = 0; i < rows.size(); ++i)
    gold[i] = rows[i].label == DeletionLabel::Deleted ? 1 : 0;
  const EvalResult r = random_baseline(gold, args.rate, g.seed, args.trials);
  std::cout << "precision " << r.precision << "\nrecall " << r.recall << "\nf1 " << r.f1
            << "\n";
  if (!args.out_path.empty()) {
    std::ofstream out(args.out_path);
    if (!out) fail_io("baseline: cannot write ", args.out_path);
    nlohmann::json j = {{"precision", r.precision},
                        {"recall", r.recall},
                        {"f1", r.f1},
                        {"rate", args.rate},
                        {"trials", args.trials}};
    out << j.dump(2) << "\n";

    RunManifest manifest;
    manifest.subcommand = "baseline";
    manifest.seed = g.seed;
    manifest.flags = {{"features", args.features_path},
                      {"rate", detail::fmt_double(args.rate)},
                      {"trials", std::to_string(args.trials)},
                      {"out", args.out_path}};
    manifest.add_input(args.features_path);
    manifest.outputs = {args.out_path};
    manifest.write();
  }
  return 0;
}

// --- kappa -------------------------------------------------------------------

struct KappaArgs {
  std::string labels_a_path;
  std::string labels_b_path;
  std::string judgments_path;
  double min_accuracy = 0.8;
  std::string aggregate_out_path;
  std::string out_path;
};

namespace detail {

inline std::vector<AlignmentLabel> load_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("kappa: cannot open ", path);
  std::vector<AlignmentLabel> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    auto l = parse_alignment_label(line);
    if (!l) fail("kappa: ", path, " line ", line_no, ": unknown label \"", line, "\"");
    labels.push_back(*l);
  }
  return labels;
}

}  // namespace detail

inline int run_kappa(const KappaArgs& args, const GlobalOpts& g) {
  double kappa_value = 0.0;
  nlohmann::json extra;

  if (!args.labels_a_path.empty() || !args.labels_b_path.empty()) {
    if (args.labels_a_path.empty() || args.labels_b_path.empty())
      fail("kappa: --labels-a and --labels-b must be given together");
    const auto a = detail::load_label_file(args.labels_a_path);
    const auto b = detail::load_label_file(args.labels_b_path);
    kappa_value = cohens_kappa(a, b);
    extra["items"] = a.size();
  } else if (!args.judgments_path.empty()) {
    const auto judgments = load_crowd_judgments(args.judgments_path);
    const auto excluded = excluded_workers(judgments, args.min_accuracy);

    // Mean pairwise kappa over surviving workers, weighted by shared pairs.
    std::map<std::string, std::map<SentencePair, AlignmentLabel>> by_worker;
    for (const auto& j : judgments) {
      if (j.is_test_question || excluded.count(j.worker_id)) continue;
      by_worker[j.worker_id][j.pair] = j.label;
    }
    double weighted = 0.0;
    long long weight = 0;
    for (auto it1 = by_worker.begin(); it1 != by_worker.end(); ++it1) {
      for (auto it2 = std::next(it1); it2 != by_worker.end(); ++it2) {
        std::vector<AlignmentLabel> a, b;
        for (const auto& [pair, label] : it1->second) {
          auto match = it2->second.find(pair);
          if (match != it2->second.end()) {
            a.push_back(label);
            b.push_back(match->second);
          }
        }
        if (a.empty()) continue;
        weighted += cohens_kappa(a, b) * static_cast<double>(a.size());
        weight += static_cast<long long>(a.size());
      }
    }
    if (weight == 0) fail("kappa: no worker pair shares a judged sentence pair");
    kappa_value = weighted / weight;
    extra["workers"] = by_worker.size();
    extra["excluded_workers"] = excluded.size();
    extra["shared_judgments"] = weight;

    if (!args.aggregate_out_path.empty()) {
      const auto aggregated = aggregate_crowd(judgments, args.min_accuracy);
      std::ofstream out(args.aggregate_out_path);
      if (!out) fail_io("kappa: cannot write ", args.aggregate_out_path);
      for (const auto& [pair, label] : aggregated) {
        nlohmann::json j = {{"orig", pair.first}, {"simp", pair.second},
                            {"label", to_string(label)}};
        out << j.dump() << "\n";
      }
    }
  } else {
    fail("kappa: give --labels-a/--labels-b or --judgments");
  }

  std::cout << "kappa " << kappa_value << "\n";
  if (!args.out_path.empty()) {
    nlohmann::json j = extra;
    j["kappa"] = kappa_value;
    std::ofstream out(args.out_path);
    if (!out) fail_io("kappa: cannot write ", args.out_path);
    out << j.dump(2) << "\n";
  }

  if (!args.out_path.empty() || !args.aggregate_out_path.empty()) {
    RunManifest manifest;
    manifest.subcommand = "kappa";
    manifest.seed = g.seed;
    manifest.flags = {{"labels-a", args.labels_a_path},
                      {"labels-b", args.labels_b_path},
                      {"judgments", args.judgments_path},
                      {"min-accuracy", detail::fmt_double(args.min_accuracy)},
                      {"aggregate-out", args.aggregate_out_path},
                      {"out", args.out_path}};
    if (!args.labels_a_path.empty()) manifest.add_input(args.labels_a_path);
    if (!args.labels_b_path.empty()) manifest.add_input(args.labels_b_path);
    if (!args.judgments_path.empty()) manifest.add_input(args.judgments_path);
    if (!args.out_path.empty()) manifest.outputs.push_back(args.out_path);
    if (!args.aggregate_out_path.empty())
      manifest.outputs.push_back(args.aggregate_out_path);
    manifest.write();
  }
  return 0;
}

// --- dispatch ----------------------------------------------------------------

inline int dispatch(int argc, const char* const* argv) {
  CLI::App app{"document simplification sentence-deletion toolkit"};
  app.require_subcommand(1);
  app.fallthrough(true);

  GlobalOpts global;
  std::string log_level = "info";
  app.add_option("--seed", global.seed, "seed for all randomness")->capture_default_str();
  app.add_option("--jobs", global.jobs, "worker threads for per-article work")
      ->capture_default_str();
  app.add_option("--log-level", log_level, "quiet|info|debug")->capture_default_str();

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "align sentences across reading levels");
  align_cmd->add_option("--corpus", align_args.corpus_path)->required();
  align_cmd->add_option("--sentence-vectors", align_args.vectors_path)->required();
  align_cmd->add_option("--para-align", align_args.para_align_path);
  align_cmd->add_option("--level", align_args.level, "middle|elementary|all")
      ->capture_default_str();
  align_cmd->add_option("--theta-nosplit", align_args.theta_nosplit)->capture_default_str();
  align_cmd->add_option("--theta-split", align_args.theta_split)->capture_default_str();
  align_cmd->add_option("--out", align_args.out_path)->required();

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "recompute the corpus analyses");
  stats_cmd->add_option("--corpus", stats_args.corpus_path)->required();
  stats_cmd->add_option("--alignments", stats_args.alignments_path)->required();
  stats_cmd->add_option("--rst", stats_args.rst_path);
  stats_cmd->add_option("--connectives", stats_args.connectives_path);
  stats_cmd->add_option("--level", stats_args.level, "middle|elementary")
      ->capture_default_str();
  stats_cmd->add_option("--out", stats_args.out_path);

  FeaturizeArgs feat_args;
  auto* feat_cmd = app.add_subcommand("featurize", "extract feature rows for training");
  feat_cmd->add_option("--corpus", feat_args.corpus_path)->required();
  feat_cmd->add_option("--alignments", feat_args.alignments_path)->required();
  feat_cmd->add_option("--rst", feat_args.rst_path)->required();
  feat_cmd->add_option("--connectives", feat_args.connectives_path)->required();
  feat_cmd->add_option("--word-vectors", feat_args.word_vectors_path)->required();
  feat_cmd->add_option("--easy-words", feat_args.easy_words_path);
  feat_cmd->add_option("--level", feat_args.level, "middle|elementary")
      ->capture_default_str();
  feat_cmd->add_option("--out", feat_args.out_path)->required();
  feat_cmd->add_option("--binning-out", feat_args.binning_out_path);
  feat_cmd->add_option("--binning-in", feat_args.binning_in_path,
                       "apply a binning config fitted elsewhere");
  feat_cmd->add_option("--k", feat_args.k, "bins per feature")->capture_default_str();
  feat_cmd->add_option("--gamma", feat_args.gamma, "bin width fraction")
      ->capture_default_str();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train a deletion classifier");
  train_cmd->add_option("--features", train_args.features_path)->required();
  train_cmd->add_option("--val-features", train_args.val_features_path)->required();
  train_cmd->add_option("--binning", train_args.binning_path);
  train_cmd->add_option("--arch", train_args.arch, "lr|fnn")->capture_default_str();
  train_cmd
      ->add_option("--mode", train_args.mode,
                   "embedding|sparse|sparse-binned|combined|combined-binned")
      ->capture_default_str();
  train_cmd->add_option("--lr", train_args.learning_rate)->capture_default_str();
  train_cmd->add_option("--epochs", train_args.epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", train_args.batch_size)->capture_default_str();
  train_cmd->add_flag("--no-downsample", train_args.no_downsample);
  train_cmd->add_option("--out", train_args.out_path)->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained model");
  eval_cmd->add_option("--model", eval_args.model_path)->required();
  eval_cmd->add_option("--features", eval_args.features_path)->required();
  eval_cmd->add_option("--out", eval_args.out_path);

  AblateArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand("ablate", "feature-group ablation study");
  ablate_cmd->add_option("--features", ablate_args.features_path)->required();
  ablate_cmd->add_option("--val-features", ablate_args.val_features_path)->required();
  ablate_cmd->add_option("--test-features", ablate_args.test_features_path)->required();
  ablate_cmd->add_option("--binning", ablate_args.binning_path,
                         "binning config supplying k and gamma");
  ablate_cmd->add_option("--arch", ablate_args.arch, "lr|fnn")->capture_default_str();
  ablate_cmd->add_option("--mode", ablate_args.mode)->capture_default_str();
  ablate_cmd
      ->add_option("--group", ablate_args.groups,
                   "comma-separated groups to ablate (default all)")
      ->capture_default_str();
  ablate_cmd->add_option("--lr", ablate_args.learning_rate)->capture_default_str();
  ablate_cmd->add_option("--epochs", ablate_args.epochs)->capture_default_str();
  ablate_cmd->add_option("--batch-size", ablate_args.batch_size)->capture_default_str();
  ablate_cmd->add_option("--bootstrap-iters", ablate_args.bootstrap_iterations)
      ->capture_default_str();
  ablate_cmd->add_option("--out", ablate_args.out_path);

  BaselineArgs baseline_args;
  auto* baseline_cmd =
      app.add_subcommand("baseline", "random baseline at a fixed deletion rate");
  baseline_cmd->add_option("--features", baseline_args.features_path)->required();
  baseline_cmd->add_option("--rate", baseline_args.rate)->required();
  baseline_cmd->add_option("--trials", baseline_args.trials)->capture_default_str();
  baseline_cmd->add_option("--out", baseline_args.out_path);

  KappaArgs kappa_args;
  auto* kappa_cmd = app.add_subcommand("kappa", "inter-annotator agreement");
  kappa_cmd->add_option("--labels-a", kappa_args.labels_a_path);
  kappa_cmd->add_option("--labels-b", kappa_args.labels_b_path);
  kappa_cmd->add_option("--judgments", kappa_args.judgments_path);
  kappa_cmd->add_option("--min-accuracy", kappa_args.min_accuracy)->capture_default_str();
  kappa_cmd->add_option("--aggregate-out", kappa_args.aggregate_out_path);
  kappa_cmd->add_option("--out", kappa_args.out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  if (log_level == "quiet")
    global.log_level = LogLevel::Quiet;
  else if (log_level == "debug")
    global.log_level = LogLevel::Debug;
  else
    global.log_level = LogLevel::Info;

  try {
    if (align_cmd->parsed()) return run_align(align_args, global);
    if (stats_cmd->parsed()) return run_stats(stats_args, global);
    if (feat_cmd->parsed()) return run_featurize(feat_args, global);
    if (train_cmd->parsed()) return run_train(train_args, global);
    if (eval_cmd->parsed()) return run_eval(eval_args, global);
    if (ablate_cmd->parsed()) return run_ablate(ablate_args, global);
    if (baseline_cmd->parsed()) return run_baseline(baseline_args, global);
    if (kappa_cmd->parsed()) return run_kappa(kappa_args, global);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace simpdel::cli

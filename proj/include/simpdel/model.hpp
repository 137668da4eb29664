#pragma once

// Logistic-regression and feedforward classifiers over the feature rows,
// trained from scratch with mini-batch Adam on binary cross entropy.
// Deterministic for a fixed seed: initialization, shuffling, dropout masks
// and downsampling all derive from it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "simpdel/error.hpp"
#include "simpdel/features.hpp"
#include "simpdel/stats.hpp"

namespace simpdel {

enum class Architecture { LR, FNN };

inline const char* to_string(Architecture a) {
  return a == Architecture::LR ? "lr" : "fnn";
}

inline std::optional<Architecture> parse_architecture(const std::string& s) {
  if (s == "lr") return Architecture::LR;
  if (s == "fnn") return Architecture::FNN;
  return std::nullopt;
}

enum class FeatureMode { Embedding, Sparse, SparseBinned, EmbeddingSparse, EmbeddingSparseBinned };

inline const char* to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::Embedding: return "embedding";
    case FeatureMode::Sparse: return "sparse";
    case FeatureMode::SparseBinned: return "sparse-binned";
    case FeatureMode::EmbeddingSparse: return "combined";
    case FeatureMode::EmbeddingSparseBinned: return "combined-binned";
  }
  return "?";
}

inline std::optional<FeatureMode> parse_feature_mode(const std::string& s) {
  if (s == "embedding") return FeatureMode::Embedding;
  if (s == "sparse") return FeatureMode::Sparse;
  if (s == "sparse-binned") return FeatureMode::SparseBinned;
  if (s == "combined") return FeatureMode::EmbeddingSparse;
  if (s == "combined-binned") return FeatureMode::EmbeddingSparseBinned;
  return std::nullopt;
}

inline bool mode_uses_embedding(FeatureMode m) {
  return m == FeatureMode::Embedding || m == FeatureMode::EmbeddingSparse ||
         m == FeatureMode::EmbeddingSparseBinned;
}

inline bool mode_uses_binned(FeatureMode m) {
  return m == FeatureMode::SparseBinned || m == FeatureMode::EmbeddingSparseBinned;
}

inline bool mode_uses_sparse(FeatureMode m) {
  return m == FeatureMode::Sparse || m == FeatureMode::EmbeddingSparse;
}

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }
  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

struct Dataset {
  Matrix embedding;  // n x e (e == 0 when unused)
  Matrix sparse;     // n x s
  Matrix binned;     // n x b (b == 0 when unused)
  std::vector<int> labels;  // 1 = Deleted

  int size() const { return static_cast<int>(labels.size()); }
};

// Builds the per-mode matrices from feature rows. Binned inputs are always
// recomputed from the sparse columns through `binning` so that train and
// inference share one definition (and so ablation can zero features before
// binning). `zero_features` lists sparse indices forced to 0.
inline Dataset make_dataset(const std::vector<FeatureRow>& rows, FeatureMode mode,
                            const BinningConfig* binning = nullptr,
                            const std::vector<int>* zero_features = nullptr) {
  if (rows.empty()) fail("make_dataset: no rows");
  Dataset ds;
  const int n = static_cast<int>(rows.size());
  const int s = static_cast<int>(rows[0].sparse.size());
  ds.sparse = Matrix(n, s);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].sparse.size()) != s)
      fail("make_dataset: row ", i, ": sparse dimension mismatch");
    std::copy(rows[i].sparse.begin(), rows[i].sparse.end(), ds.sparse.row(i));
    if (zero_features)
      for (int f : *zero_features) ds.sparse.at(i, f) = 0.0;
  }
  if (mode_uses_embedding(mode)) {
    const int e = static_cast<int>(rows[0].embedding.size());
    if (e == 0) fail("make_dataset: mode ", to_string(mode), " needs embeddings");
    ds.embedding = Matrix(n, e);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].embedding.size()) != e)
        fail("make_dataset: row ", i, ": embedding dimension mismatch");
      std::copy(rows[i].embedding.begin(), rows[i].embedding.end(), ds.embedding.row(i));
    }
  }
  if (mode_uses_binned(mode)) {
    if (!binning) fail("make_dataset: mode ", to_string(mode), " needs a binning config");
    ds.binned = Matrix(n, binning->binned_dim());
    std::vector<double> sparse_row(s);
    for (int i = 0; i < n; ++i) {
      std::copy(ds.sparse.row(i), ds.sparse.row(i) + s, sparse_row.begin());
      const auto b = bin(sparse_row, *binning);
      std::copy(b.begin(), b.end(), ds.binned.row(i));
    }
  }
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i)
    ds.labels[i] = rows[i].label == DeletionLabel::Deleted ? 1 : 0;
  return ds;
}

struct Dense {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // out x in, row-major
  std::vector<double> b;  // out
};

struct Network {
  Architecture arch = Architecture::LR;
  FeatureMode mode = FeatureMode::Sparse;
  int embedding_dim = 0;  // trunk input width (0 when no trunk)
  int direct_dim = 0;     // width of the non-trunk input block
  std::vector<Dense> trunk;  // ReLU after every layer
  std::vector<Dense> head;   // ReLU after all but the last; last emits the logit
  std::optional<BinningConfig> binning;
  uint64_t seed = 0;

  bool has_trunk() const { return !trunk.empty(); }

  std::vector<std::vector<double>*> param_blocks() {
    std::vector<std::vector<double>*> blocks;
    for (auto& l : trunk) {
      blocks.push_back(&l.w);
      blocks.push_back(&l.b);
    }
    for (auto& l : head) {
      blocks.push_back(&l.w);
      blocks.push_back(&l.b);
    }
    return blocks;
  }
};

inline int half_width(int in) { return (in + 1) / 2; }

namespace detail {

inline Dense make_dense(int in, int out, SplitMix64& rng) {
  Dense d;
  d.in = in;
  d.out = out;
  const double limit = std::sqrt(6.0 / (in + out));
  d.w.resize(static_cast<size_t>(in) * out);
  d.b.resize(out);
  for (auto& x : d.w) x = (2.0 * rng.next_double() - 1.0) * limit;
  for (auto& x : d.b) x = (2.0 * rng.next_double() - 1.0) * limit;
  return d;
}

}  // namespace detail

// LR is a one-layer sigmoid network over the concatenated inputs. FNN stacks
// two ReLU layers (each half its input width); with embeddings the trunk's
// output is concatenated with the sparse/binned block before the head.
inline Network make_network(Architecture arch, FeatureMode mode, int embedding_dim,
                            int direct_dim, uint64_t seed) {
  Network net;
  net.arch = arch;
  net.mode = mode;
  net.seed = seed;
  SplitMix64 rng(seed, 0);

  if (arch == Architecture::LR) {
    const int in = (mode_uses_embedding(mode) ? embedding_dim : 0) + direct_dim;
    if (in <= 0) fail("make_network: zero input width");
    net.embedding_dim = 0;  // LR takes everything through the direct block
    net.direct_dim = in;
    net.head.push_back(detail::make_dense(in, 1, rng));
    return net;
  }

  if (mode_uses_embedding(mode)) {
    if (embedding_dim <= 0) fail("make_network: mode needs embedding input");
    net.embedding_dim = embedding_dim;
    const int h1 = half_width(embedding_dim);
    const int h2 = half_width(h1);
    net.trunk.push_back(detail::make_dense(embedding_dim, h1, rng));
    net.trunk.push_back(detail::make_dense(h1, h2, rng));
    if (mode == FeatureMode::Embedding) {
      net.direct_dim = 0;
      net.head.push_back(detail::make_dense(h2, 1, rng));  // single-node linear output
      return net;
    }
    net.direct_dim = direct_dim;
    const int head_in = h2 + direct_dim;
    const int g1 = half_width(head_in);
    const int g2 = half_width(g1);
    net.head.push_back(detail::make_dense(head_in, g1, rng));
    net.head.push_back(detail::make_dense(g1, g2, rng));
    net.head.push_back(detail::make_dense(g2, 1, rng));
    return net;
  }

  if (direct_dim <= 0) fail("make_network: zero input width");
  net.direct_dim = direct_dim;
  const int g1 = half_width(direct_dim);
  const int g2 = half_width(g1);
  net.head.push_back(detail::make_dense(direct_dim, g1, rng));
  net.head.push_back(detail::make_dense(g1, g2, rng));
  net.head.push_back(detail::make_dense(g2, 1, rng));
  return net;
}

namespace detail {

inline void linear_forward(const Dense& l, const Matrix& x, Matrix* y) {
  *y = Matrix(x.rows, l.out);
  for (int r = 0; r < x.rows; ++r) {
    const double* xr = x.row(r);
    double* yr = y->row(r);
    for (int o = 0; o < l.out; ++o) {
      const double* wr = l.w.data() + static_cast<size_t>(o) * l.in;
      double acc = l.b[o];
      for (int i = 0; i < l.in; ++i) acc += wr[i] * xr[i];
      yr[o] = acc;
    }
  }
}

// dY (rows x out) -> accumulates dW, dB; writes dX if non-null.
inline void linear_backward(const Dense& l, const Matrix& x, const Matrix& dy,
                            std::vector<double>* dw, std::vector<double>* db, Matrix* dx) {
  for (int r = 0; r < x.rows; ++r) {
    const double* xr = x.row(r);
    const double* dyr = dy.row(r);
    for (int o = 0; o < l.out; ++o) {
      const double g = dyr[o];
      if (g == 0.0) continue;
      double* dwr = dw->data() + static_cast<size_t>(o) * l.in;
      for (int i = 0; i < l.in; ++i) dwr[i] += g * xr[i];
      (*db)[o] += g;
    }
  }
  if (dx) {
    *dx = Matrix(x.rows, l.in);
    for (int r = 0; r < x.rows; ++r) {
      const double* dyr = dy.row(r);
      double* dxr = dx->row(r);
      for (int o = 0; o < l.out; ++o) {
        const double g = dyr[o];
        if (g == 0.0) continue;
        const double* wr = l.w.data() + static_cast<size_t>(o) * l.in;
        for (int i = 0; i < l.in; ++i) dxr[i] += g * wr[i];
      }
    }
  }
}

struct ForwardCache {
  Matrix emb_in;
  Matrix direct_in;
  std::vector<Matrix> trunk_in;    // input to each trunk layer
  std::vector<Matrix> trunk_act;   // post ReLU (+dropout) output
  std::vector<Matrix> trunk_mask;  // dropout multipliers (empty if inference)
  std::vector<Matrix> head_in;
  std::vector<Matrix> head_act;
  std::vector<Matrix> head_mask;
  std::vector<double> logits;
};

// Inverted dropout: surviving activations are scaled by 1/keep during
// training so inference runs unscaled.
inline void relu_dropout(Matrix* m, double dropout, SplitMix64* rng, Matrix* mask_out) {
  const double keep = 1.0 - dropout;
  if (rng && mask_out) *mask_out = Matrix(m->rows, m->cols);
  for (int r = 0; r < m->rows; ++r) {
    double* row = m->row(r);
    double* mask = rng && mask_out ? mask_out->row(r) : nullptr;
    for (int c = 0; c < m->cols; ++c) {
      if (row[c] < 0.0) row[c] = 0.0;
      if (mask) {
        const double keep_it = rng->next_double() < keep ? 1.0 / keep : 0.0;
        mask[c] = keep_it;
        row[c] *= keep_it;
      }
    }
  }
}

inline ForwardCache forward(const Network& net, const Matrix& emb, const Matrix& direct,
                            double dropout, SplitMix64* dropout_rng) {
  ForwardCache cache;
  cache.emb_in = emb;
  cache.direct_in = direct;
  const int n = net.has_trunk() ? emb.rows : direct.rows;

  Matrix trunk_out;
  if (net.has_trunk()) {
    if (emb.cols != net.embedding_dim)
      fail("predict: embedding width ", emb.cols, " does not match model (",
           net.embedding_dim, ")");
    Matrix cur = emb;
    for (const auto& layer : net.trunk) {
      cache.trunk_in.push_back(cur);
      Matrix next;
      linear_forward(layer, cur, &next);
      Matrix mask;
      relu_dropout(&next, dropout, dropout_rng, dropout_rng ? &mask : nullptr);
      cache.trunk_mask.push_back(std::move(mask));
      cache.trunk_act.push_back(next);
      cur = std::move(next);
    }
    trunk_out = cur;
  }

  Matrix head_input;
  if (net.has_trunk() && net.direct_dim > 0) {
    if (direct.cols != net.direct_dim)
      fail("predict: input width ", direct.cols, " does not match model (", net.direct_dim,
           ")");
    head_input = Matrix(n, trunk_out.cols + direct.cols);
    for (int r = 0; r < n; ++r) {
      std::copy(trunk_out.row(r), trunk_out.row(r) + trunk_out.cols, head_input.row(r));
      std::copy(direct.row(r), direct.row(r) + direct.cols,
                head_input.row(r) + trunk_out.cols);
    }
  } else if (net.has_trunk()) {
    head_input = trunk_out;
  } else {
    if (direct.cols != net.direct_dim)
      fail("predict: input width ", direct.cols, " does not match model (", net.direct_dim,
           ")");
    head_input = direct;
  }

  Matrix cur = head_input;
  for (size_t li = 0; li < net.head.size(); ++li) {
    cache.head_in.push_back(cur);
    Matrix next;
    linear_forward(net.head[li], cur, &next);
    const bool last = li + 1 == net.head.size();
    if (!last) {
      Matrix mask;
      relu_dropout(&next, dropout, dropout_rng, dropout_rng ? &mask : nullptr);
      cache.head_mask.push_back(std::move(mask));
    } else {
      cache.head_mask.emplace_back();
    }
    cache.head_act.push_back(next);
    cur = std::move(next);
  }
  cache.logits.resize(n);
  for (int r = 0; r < n; ++r) cache.logits[r] = cur.at(r, 0);
  return cache;
}

struct Gradients {
  std::vector<std::vector<double>> blocks;  // aligned with Network::param_blocks()
};

inline Gradients zero_gradients(Network& net) {
  Gradients g;
  for (auto* block : net.param_blocks()) g.blocks.emplace_back(block->size(), 0.0);
  return g;
}

// Backprop of dL/dlogit through head (and trunk, if any).
inline void backward(Network& net, const ForwardCache& cache,
                     const std::vector<double>& dlogits, Gradients* grads) {
  const int n = static_cast<int>(dlogits.size());
  size_t block_index = grads->blocks.size();

  Matrix dcur(n, 1);
  for (int r = 0; r < n; ++r) dcur.at(r, 0) = dlogits[r];

  Matrix dhead_input;
  for (int li = static_cast<int>(net.head.size()) - 1; li >= 0; --li) {
    const bool last = li + 1 == static_cast<int>(net.head.size());
    if (!last) {
      // through dropout mask and ReLU of this layer's output
      const Matrix& act = cache.head_act[li];
      const Matrix& mask = cache.head_mask[li];
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < act.cols; ++c) {
          double g = dcur.at(r, c);
          if (mask.rows > 0) g *= mask.at(r, c);
          if (act.at(r, c) <= 0.0) g = 0.0;  // ReLU gate (post-activation zero)
          dcur.at(r, c) = g;
        }
    }
    std::vector<double>& db = grads->blocks[--block_index];
    std::vector<double>& dw = grads->blocks[--block_index];
    Matrix dx;
    linear_backward(net.head[li], cache.head_in[li], dcur, &dw, &db, &dx);
    dcur = std::move(dx);
  }
  dhead_input = std::move(dcur);

  if (net.has_trunk()) {
    const int trunk_out_cols = cache.trunk_act.back().cols;
    Matrix dtrunk(n, trunk_out_cols);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < trunk_out_cols; ++c) dtrunk.at(r, c) = dhead_input.at(r, c);
    for (int li = static_cast<int>(net.trunk.size()) - 1; li >= 0; --li) {
      const Matrix& act = cache.trunk_act[li];
      const Matrix& mask = cache.trunk_mask[li];
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < act.cols; ++c) {
          double g = dtrunk.at(r, c);
          if (mask.rows > 0) g *= mask.at(r, c);
          if (act.at(r, c) <= 0.0) g = 0.0;
          dtrunk.at(r, c) = g;
        }
      std::vector<double>& db = grads->blocks[--block_index];
      std::vector<double>& dw = grads->blocks[--block_index];
      Matrix dx;
      linear_backward(net.trunk[li], cache.trunk_in[li], dtrunk, &dw, &db,
                      li > 0 ? &dx : nullptr);
      dtrunk = std::move(dx);
    }
  }
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Mean binary cross entropy on logits; also fills dL/dlogit.
inline double bce_loss(const std::vector<double>& logits, std::span<const int> labels,
                       std::vector<double>* dlogits) {
  const int n = static_cast<int>(logits.size());
  double loss = 0.0;
  if (dlogits) dlogits->assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double z = logits[i];
    const double y = labels[i];
    loss += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
    if (dlogits) (*dlogits)[i] = (sigmoid(z) - y) / n;
  }
  return loss / n;
}

inline void gather_rows(const Matrix& src, std::span<const int> idx, Matrix* dst) {
  if (src.cols == 0) {
    *dst = Matrix(static_cast<int>(idx.size()), 0);
    return;
  }
  *dst = Matrix(static_cast<int>(idx.size()), src.cols);
  for (size_t r = 0; r < idx.size(); ++r)
    std::copy(src.row(idx[r]), src.row(idx[r]) + src.cols, dst->row(static_cast<int>(r)));
}

}  // namespace detail

// Mode-dependent (embedding, direct) views of a dataset for a network shape.
inline void split_inputs(const Network& net, const Dataset& ds, Matrix* emb, Matrix* direct) {
  const int n = ds.size();
  if (net.arch == Architecture::LR) {
    *emb = Matrix(n, 0);
    const Matrix* parts[2] = {nullptr, nullptr};
    if (mode_uses_embedding(net.mode)) parts[0] = &ds.embedding;
    if (mode_uses_binned(net.mode))
      parts[1] = &ds.binned;
    else if (net.mode != FeatureMode::Embedding)
      parts[1] = &ds.sparse;
    int cols = 0;
    for (auto* p : parts)
      if (p) cols += p->cols;
    *direct = Matrix(n, cols);
    for (int r = 0; r < n; ++r) {
      double* row = direct->row(r);
      for (auto* p : parts) {
        if (!p) continue;
        std::copy(p->row(r), p->row(r) + p->cols, row);
        row += p->cols;
      }
    }
    return;
  }
  *emb = mode_uses_embedding(net.mode) ? ds.embedding : Matrix(n, 0);
  if (mode_uses_binned(net.mode))
    *direct = ds.binned;
  else if (mode_uses_sparse(net.mode))
    *direct = ds.sparse;
  else
    *direct = Matrix(n, 0);
}

inline std::vector<double> predict_probabilities(const Network& net, const Dataset& ds) {
  Matrix emb, direct;
  split_inputs(net, ds, &emb, &direct);
  auto cache = detail::forward(net, emb, direct, 0.0, nullptr);
  std::vector<double> probs(cache.logits.size());
  for (size_t i = 0; i < probs.size(); ++i) probs[i] = detail::sigmoid(cache.logits[i]);
  return probs;
}

// Threshold 0.5, strict: probability exactly 0.5 stays Kept.
inline std::vector<int> predict_labels(const Network& net, const Dataset& ds) {
  auto probs = predict_probabilities(net, ds);
  std::vector<int> labels(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) labels[i] = probs[i] > 0.5 ? 1 : 0;
  return labels;
}

struct EvalResult {
  double precision = 0.0;  // all three reported x100
  double recall = 0.0;
  double f1 = 0.0;
};

inline EvalResult evaluate_labels(std::span<const int> gold, std::span<const int> pred) {
  if (gold.size() != pred.size()) fail("evaluate: length mismatch");
  long long tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (pred[i] == 1 && gold[i] == 1) ++tp;
    else if (pred[i] == 1) ++fp;
    else if (gold[i] == 1) ++fn;
  }
  EvalResult r;
  if (tp + fp > 0) r.precision = 100.0 * tp / (tp + fp);
  if (tp + fn > 0) r.recall = 100.0 * tp / (tp + fn);
  if (r.precision + r.recall > 0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

inline EvalResult evaluate(const Network& net, const Dataset& test) {
  if (test.size() == 0) fail("evaluate: empty test set");
  return evaluate_labels(test.labels, predict_labels(net, test));
}

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 64;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 100;
  uint64_t seed = 42;
  bool downsample = true;
  double dropout = 0.5;
};

// Majority class subsampled (without replacement) to the minority count,
// then the whole set reshuffled; deterministic in the seed.
inline std::vector<int> downsample_indices(std::span<const int> labels, uint64_t seed) {
  std::vector<int> pos, neg;
  for (size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(static_cast<int>(i));
  if (pos.empty() || neg.empty()) fail("downsample: both classes must be present");
  auto shuffle = [](std::vector<int>& v, SplitMix64& rng) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[rng.next_below(i)]);
  };
  SplitMix64 rng_major(seed, 10);
  std::vector<int>& majority = pos.size() > neg.size() ? pos : neg;
  std::vector<int>& minority = pos.size() > neg.size() ? neg : pos;
  shuffle(majority, rng_major);
  majority.resize(minority.size());
  std::vector<int> combined;
  combined.reserve(2 * minority.size());
  combined.insert(combined.end(), minority.begin(), minority.end());
  combined.insert(combined.end(), majority.begin(), majority.end());
  SplitMix64 rng_all(seed, 11);
  shuffle(combined, rng_all);
  return combined;
}

inline Dataset subset(const Dataset& ds, std::span<const int> idx) {
  Dataset out;
  detail::gather_rows(ds.embedding, idx, &out.embedding);
  detail::gather_rows(ds.sparse, idx, &out.sparse);
  detail::gather_rows(ds.binned, idx, &out.binned);
  out.labels.reserve(idx.size());
  for (int i : idx) out.labels.push_back(ds.labels[i]);
  return out;
}

inline Dataset downsample(const Dataset& ds, uint64_t seed) {
  return subset(ds, downsample_indices(ds.labels, seed));
}

// Loss and parameter gradients on one batch with dropout disabled; the
// gradient-check tests drive this directly.
inline double loss_and_gradients(Network& net, const Matrix& emb, const Matrix& direct,
                                 std::span<const int> labels, detail::Gradients* grads) {
  auto cache = detail::forward(net, emb, direct, 0.0, nullptr);
  std::vector<double> dlogits;
  const double loss = detail::bce_loss(cache.logits, labels, &dlogits);
  if (grads) {
    *grads = detail::zero_gradients(net);
    detail::backward(net, cache, dlogits, grads);
  }
  return loss;
}

// Mini-batch Adam on BCE; returns the parameters with the best validation F1
// across epochs.
inline Network train(const Dataset& train_set_in, const Dataset& val_set, Architecture arch,
                     FeatureMode mode, const TrainConfig& cfg,
                     std::optional<BinningConfig> binning = std::nullopt) {
  if (val_set.size() == 0) fail("train: empty validation set");
  if (train_set_in.size() == 0) fail("train: empty training set");

  Dataset train_set =
      cfg.downsample ? downsample(train_set_in, cfg.seed) : train_set_in;

  const int emb_dim = mode_uses_embedding(mode) ? train_set.embedding.cols : 0;
  int direct_dim = 0;
  if (mode_uses_binned(mode))
    direct_dim = train_set.binned.cols;
  else if (mode != FeatureMode::Embedding)
    direct_dim = train_set.sparse.cols;

  Network net = make_network(arch, mode, emb_dim, direct_dim, cfg.seed);
  net.binning = std::move(binning);

  auto blocks = net.param_blocks();
  std::vector<std::vector<double>> m(blocks.size()), v(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    m[i].assign(blocks[i]->size(), 0.0);
    v[i].assign(blocks[i]->size(), 0.0);
  }

  Matrix full_emb, full_direct;
  split_inputs(net, train_set, &full_emb, &full_direct);
  Matrix val_emb, val_direct;
  split_inputs(net, val_set, &val_emb, &val_direct);

  SplitMix64 shuffle_rng(cfg.seed, 1);
  SplitMix64 dropout_rng(cfg.seed, 2);

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::vector<double>> best_params;
  double best_f1 = -1.0;
  long long adam_t = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);

    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<int> batch_idx(order.begin() + start, order.begin() + end);
      Matrix bemb, bdirect;
      detail::gather_rows(full_emb, batch_idx, &bemb);
      detail::gather_rows(full_direct, batch_idx, &bdirect);
      std::vector<int> blabels(batch_idx.size());
      for (size_t i = 0; i < batch_idx.size(); ++i)
        blabels[i] = train_set.labels[batch_idx[i]];

      auto cache = detail::forward(net, bemb, bdirect, cfg.dropout,
                                   cfg.dropout > 0.0 ? &dropout_rng : nullptr);
      std::vector<double> dlogits;
      const double loss = detail::bce_loss(cache.logits, blabels, &dlogits);
      if (!std::isfinite(loss))
        fail("train: non-finite loss at epoch ", epoch, " batch ", start / cfg.batch_size);
      auto grads = detail::zero_gradients(net);
      detail::backward(net, cache, dlogits, &grads);

      ++adam_t;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t));
      for (size_t bi = 0; bi < blocks.size(); ++bi) {
        auto& params = *blocks[bi];
        auto& gb = grads.blocks[bi];
        for (size_t j = 0; j < params.size(); ++j) {
          m[bi][j] = cfg.beta1 * m[bi][j] + (1.0 - cfg.beta1) * gb[j];
          v[bi][j] = cfg.beta2 * v[bi][j] + (1.0 - cfg.beta2) * gb[j] * gb[j];
          const double mhat = m[bi][j] / bc1;
          const double vhat = v[bi][j] / bc2;
          params[j] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
      }
    }

    auto val_cache = detail::forward(net, val_emb, val_direct, 0.0, nullptr);
    std::vector<int> val_pred(val_cache.logits.size());
    for (size_t i = 0; i < val_pred.size(); ++i)
      val_pred[i] = detail::sigmoid(val_cache.logits[i]) > 0.5 ? 1 : 0;
    const double val_f1 = evaluate_labels(val_set.labels, val_pred).f1;
    if (val_f1 > best_f1) {
      best_f1 = val_f1;
      best_params.clear();
      for (auto* block : blocks) best_params.push_back(*block);
    }
  }

  if (!best_params.empty())
    for (size_t i = 0; i < blocks.size(); ++i) *blocks[i] = best_params[i];
  return net;
}

// Random baseline: label Deleted independently with the training-set deletion
// rate; P/R/F1 averaged over trials.
inline EvalResult random_baseline(std::span<const int> gold, double rate, uint64_t seed,
                                  int trials) {
  if (rate < 0.0 || rate > 1.0) fail("random_baseline: rate must be in [0,1]");
  if (trials <= 0) fail("random_baseline: trials must be positive");
  double sp = 0, sr = 0, sf = 0;
  std::vector<int> pred(gold.size());
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng(seed, static_cast<uint64_t>(t));
    for (size_t i = 0; i < gold.size(); ++i) pred[i] = rng.next_double() < rate ? 1 : 0;
    const EvalResult r = evaluate_labels(gold, pred);
    sp += r.precision;
    sr += r.recall;
    sf += r.f1;
  }
  return {sp / trials, sr / trials, sf / trials};
}

// --- ablation ----------------------------------------------------------------

struct AblationRow {
  std::string group;
  EvalResult result;
  double delta_f1 = 0.0;  // ablated minus full
  double p_value = 1.0;   // paired bootstrap vs the full model
};

struct AblationTable {
  EvalResult full;
  std::vector<AblationRow> rows;
};

struct AblationConfig {
  Architecture arch = Architecture::LR;
  FeatureMode mode = FeatureMode::EmbeddingSparseBinned;
  TrainConfig train;
  int binning_k = 10;
  double binning_gamma = 0.2;
  int bootstrap_iterations = 10000;
  uint64_t bootstrap_seed = 42;
};

// Retrains with each feature group zeroed out of both the binning fit and the
// inputs, and bootstraps the F1 difference against the full model.
inline AblationTable ablate(const std::vector<FeatureRow>& train_rows,
                            const std::vector<FeatureRow>& val_rows,
                            const std::vector<FeatureRow>& test_rows,
                            const std::vector<FeatureGroup>& groups,
                            const AblationConfig& cfg) {
  auto run = [&](const std::vector<int>* zeroed) {
    BinningConfig binning;
    const BinningConfig* binning_ptr = nullptr;
    if (mode_uses_binned(cfg.mode)) {
      std::vector<std::vector<double>> sparse;
      sparse.reserve(train_rows.size());
      for (const auto& r : train_rows) {
        sparse.push_back(r.sparse);
        if (zeroed)
          for (int f : *zeroed) sparse.back()[f] = 0.0;
      }
      binning = fit_binning(sparse, cfg.binning_k, cfg.binning_gamma);
      binning_ptr = &binning;
    }
    Dataset train_ds = make_dataset(train_rows, cfg.mode, binning_ptr, zeroed);
    Dataset val_ds = make_dataset(val_rows, cfg.mode, binning_ptr, zeroed);
    Dataset test_ds = make_dataset(test_rows, cfg.mode, binning_ptr, zeroed);
    Network net = train(train_ds, val_ds, cfg.arch, cfg.mode, cfg.train,
                        binning_ptr ? std::optional<BinningConfig>(binning) : std::nullopt);
    return std::make_pair(predict_labels(net, test_ds), test_ds.labels);
  };

  AblationTable table;
  auto [full_pred, gold] = run(nullptr);
  table.full = evaluate_labels(gold, full_pred);

  for (FeatureGroup g : groups) {
    const auto zero = feature_group_indices(g);
    auto [pred, gold2] = run(&zero);
    AblationRow row;
    row.group = to_string(g);
    row.result = evaluate_labels(gold2, pred);
    row.delta_f1 = row.result.f1 - table.full.f1;
    row.p_value = bootstrap_compare(gold2, full_pred, pred, cfg.bootstrap_iterations,
                                    cfg.bootstrap_seed)
                      .p_value;
    table.rows.push_back(std::move(row));
  }
  return table;
}

// --- serialization -----------------------------------------------------------

namespace detail {

inline nlohmann::json dense_to_json(const Dense& l) {
  nlohmann::json w = nlohmann::json::array();
  for (int o = 0; o < l.out; ++o) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < l.in; ++i) row.push_back(l.w[static_cast<size_t>(o) * l.in + i]);
    w.push_back(std::move(row));
  }
  return {{"in", l.in}, {"out", l.out}, {"w", std::move(w)}, {"b", l.b}};
}

inline Dense dense_from_json(const nlohmann::json& j) {
  Dense l;
  l.in = j.at("in").get<int>();
  l.out = j.at("out").get<int>();
  l.w.reserve(static_cast<size_t>(l.in) * l.out);
  for (const auto& row : j.at("w"))
    for (const auto& x : row) l.w.push_back(x.get<double>());
  l.b = j.at("b").get<std::vector<double>>();
  if (static_cast<int>(l.w.size()) != l.in * l.out ||
      static_cast<int>(l.b.size()) != l.out)
    fail("model: layer weight shape mismatch");
  return l;
}

}  // namespace detail

inline nlohmann::json to_json(const Network& net) {
  nlohmann::json trunk = nlohmann::json::array();
  for (const auto& l : net.trunk) trunk.push_back(detail::dense_to_json(l));
  nlohmann::json head = nlohmann::json::array();
  for (const auto& l : net.head) head.push_back(detail::dense_to_json(l));
  return {{"architecture", to_string(net.arch)},
          {"feature_mode", to_string(net.mode)},
          {"dims", {{"embedding", net.embedding_dim}, {"direct", net.direct_dim}}},
          {"weights", {{"trunk", std::move(trunk)}, {"head", std::move(head)}}},
          {"binning", net.binning ? to_json(*net.binning) : nlohmann::json(nullptr)},
          {"seed", net.seed}};
}

inline Network network_from_json(const nlohmann::json& j) {
  Network net;
  auto arch = parse_architecture(j.at("architecture").get<std::string>());
  if (!arch) fail("model: unknown architecture");
  net.arch = *arch;
  auto mode = parse_feature_mode(j.at("feature_mode").get<std::string>());
  if (!mode) fail("model: unknown feature mode");
  net.mode = *mode;
  net.embedding_dim = j.at("dims").at("embedding").get<int>();
  net.direct_dim = j.at("dims").at("direct").get<int>();
  for (const auto& l : j.at("weights").at("trunk"))
    net.trunk.push_back(detail::dense_from_json(l));
  for (const auto& l : j.at("weights").at("head"))
    net.head.push_back(detail::dense_from_json(l));
  if (j.contains("binning") && !j["binning"].is_null())
    net.binning = binning_from_json(j["binning"]);
  net.seed = j.at("seed").get<uint64_t>();
  return net;
}

inline void save_model(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_io("model: cannot write ", path);
  out << to_json(net).dump() << "\n";
}

inline Network load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("model: cannot open ", path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    fail("model: malformed JSON in ", path, ": ", e.what());
  }
  return network_from_json(j);
}

}  // namespace simpdel

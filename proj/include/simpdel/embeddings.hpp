#pragma once

// Pretrained word / sentence vectors loaded from the usual text format:
// one "token v1 v2 ... vd" row per line, optional "count dim" header.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "simpdel/corpus.hpp"
#include "simpdel/error.hpp"

namespace simpdel {

using Vec = std::vector<double>;

struct VectorStore {
  int dim = 0;
  std::unordered_map<std::string, Vec> table;

  const Vec* find(const std::string& key) const {
    auto it = table.find(key);
    return it == table.end() ? nullptr : &it->second;
  }
};

inline VectorStore load_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("vectors: cannot open ", path);
  VectorStore store;
  std::string line;
  int line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    if (first_content_line) {
      first_content_line = false;
      // header line: exactly two integer fields, "count dim"
      std::string second, extra;
      std::istringstream probe(line);
      std::string f1;
      probe >> f1 >> second;
      if (!(probe >> extra) && !second.empty()) {
        char* end1 = nullptr;
        char* end2 = nullptr;
        long cnt = std::strtol(f1.c_str(), &end1, 10);
        long dim = std::strtol(second.c_str(), &end2, 10);
        if (*end1 == '\0' && *end2 == '\0' && cnt >= 0 && dim > 0) {
          store.dim = static_cast<int>(dim);
          continue;
        }
      }
    }
    Vec v;
    double x;
    while (ss >> x) v.push_back(x);
    if (v.empty()) fail("vectors: line ", line_no, ": no values for token \"", token, "\"");
    if (store.dim == 0) store.dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != store.dim)
      fail("vectors: line ", line_no, ": expected ", store.dim, " values, got ", v.size());
    store.table[token] = std::move(v);
  }
  if (store.table.empty()) fail("vectors: ", path, " contains no vectors");
  return store;
}

// Mean of the in-vocabulary token vectors; all-OOV sentences get the zero
// vector so they score cosine 0 against everything.
inline Vec sentence_vector(const std::vector<std::string>& tokens, const VectorStore& store) {
  Vec sum(store.dim, 0.0);
  int hits = 0;
  for (const auto& t : tokens) {
    if (const Vec* v = store.find(t)) {
      for (int i = 0; i < store.dim; ++i) sum[i] += (*v)[i];
      ++hits;
    }
  }
  if (hits > 0)
    for (double& x : sum) x /= hits;
  return sum;
}

inline double cosine(const Vec& u, const Vec& v) {
  if (u.size() != v.size())
    fail("cosine: length mismatch (", u.size(), " vs ", v.size(), ")");
  double dot = 0, nu = 0, nv = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// Key for per-sentence vector stores (precomputed sentence embeddings).
inline std::string sentence_key(const std::string& article_id, ReadingLevel lv,
                                int article_index) {
  return article_id + ":" + to_string(lv) + ":" + std::to_string(article_index);
}

}  // namespace simpdel

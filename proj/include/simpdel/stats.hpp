#pragma once

// Two-sample tests, correlation, and the paired bootstrap used across the
// analysis tables and the ablation study.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "simpdel/dist.hpp"
#include "simpdel/error.hpp"

namespace simpdel {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int n_a = 0;
  int n_b = 0;
  std::string method;
};

// Deterministic per-stream generator: every consumer seeds one of these from
// (seed, stream index) so parallel work stays reproducible.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}
  SplitMix64(uint64_t seed, uint64_t stream)
      : state(seed ^ (0x9e3779b97f4a7c15ULL + stream * 0xbf58476d1ce4e5b9ULL)) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, n)
  uint64_t next_below(uint64_t n) { return next() % n; }

  // uniform in [0, 1)
  double next_double() { return (next() >> 11) * 0x1.0p-53; }
};

inline TestResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail("pearson: length mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 3) fail("pearson: need at least 3 points, got ", n);
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail("pearson: zero variance");
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);
  TestResult res;
  res.statistic = r;
  res.n_a = res.n_b = n;
  res.method = "pearson-t";
  if (std::fabs(r) >= 1.0) {
    res.p_value = 0.0;
  } else {
    const double t = r * std::sqrt((n - 2) / (1.0 - r * r));
    res.p_value = t_two_sided_p(t, n - 2);
  }
  return res;
}

inline TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail("ks_two_sample: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const size_t na = sa.size(), nb = sb.size();
  size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < na && ib < nb) {
    const double v = std::min(sa[ia], sb[ib]);
    while (ia < na && sa[ia] <= v) ++ia;
    while (ib < nb && sb[ib] <= v) ++ib;
    d = std::max(d, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  TestResult res;
  res.statistic = d;
  res.n_a = static_cast<int>(na);
  res.n_b = static_cast<int>(nb);
  res.method = "ks-two-sample";
  const double ne = static_cast<double>(na) * nb / (na + nb);
  res.p_value = kolmogorov_asymptotic_p(d, ne);
  return res;
}

namespace detail {

inline double rank_sum_of_first(const std::vector<double>& a, const std::vector<double>& b,
                                std::vector<double>* ranks_out,
                                std::vector<double>* pooled_out) {
  const size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(n);
  for (double v : a) pooled.push_back({v, 0});
  for (double v : b) pooled.push_back({v, 1});
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[k] = r;
    i = j + 1;
  }
  double ra = 0.0;
  for (size_t k = 0; k < n; ++k)
    if (pooled[k].second == 0) ra += ranks[k];
  if (ranks_out) *ranks_out = ranks;
  if (pooled_out) {
    pooled_out->clear();
    for (const auto& [v, g] : pooled) pooled_out->push_back(v);
  }
  return ra;
}

}  // namespace detail

// Rank-sum U for two independent groups. Small pooled samples get an exact
// permutation p (all assignments enumerated); larger ones use the normal
// approximation with tie-corrected variance, z = (U - na*nb/2) / sigma.
inline constexpr int kMannWhitneyExactLimit = 10;

inline TestResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail("mann_whitney: empty sample");
  const std::vector<double> va(a.begin(), a.end());
  const std::vector<double> vb(b.begin(), b.end());
  const int na = static_cast<int>(va.size());
  const int nb = static_cast<int>(vb.size());
  const int n = na + nb;
  std::vector<double> ranks, pooled;
  const double ra = detail::rank_sum_of_first(va, vb, &ranks, &pooled);
  const double u = ra - static_cast<double>(na) * (na + 1) / 2.0;
  const double mu = static_cast<double>(na) * nb / 2.0;

  TestResult res;
  res.statistic = u;
  res.n_a = na;
  res.n_b = nb;

  if (n <= kMannWhitneyExactLimit) {
    // Enumerate all C(n, na) group assignments; ranks of the pooled sample
    // are fixed, so each assignment's U is a subset rank sum.
    const double obs = std::fabs(u - mu);
    long long total = 0, extreme = 0;
    std::vector<int> idx(na);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      double rsum = 0.0;
      for (int i : idx) rsum += ranks[i];
      const double ustar = rsum - static_cast<double>(na) * (na + 1) / 2.0;
      ++total;
      if (std::fabs(ustar - mu) >= obs - 1e-12) ++extreme;
      int k = na - 1;
      while (k >= 0 && idx[k] == n - na + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < na; ++j) idx[j] = idx[j - 1] + 1;
    }
    res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    res.method = "mann-whitney-exact";
    return res;
  }

  std::map<double, int> tie_counts;
  for (double v : pooled) ++tie_counts[v];
  double tie_term = 0.0;
  for (const auto& [v, t] : tie_counts)
    tie_term += static_cast<double>(t) * t * t - t;
  const double var = (static_cast<double>(na) * nb / 12.0) *
                     ((n + 1) - tie_term / (static_cast<double>(n) * (n - 1)));
  res.method = "mann-whitney-normal";
  if (var <= 0.0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = (u - mu) / std::sqrt(var);
  res.p_value = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
  return res;
}

inline TestResult chi_squared_2x2(const std::array<std::array<long long, 2>, 2>& table) {
  const double r0 = static_cast<double>(table[0][0] + table[0][1]);
  const double r1 = static_cast<double>(table[1][0] + table[1][1]);
  const double c0 = static_cast<double>(table[0][0] + table[1][0]);
  const double c1 = static_cast<double>(table[0][1] + table[1][1]);
  if (r0 <= 0 || r1 <= 0 || c0 <= 0 || c1 <= 0) fail("chi_squared_2x2: zero marginal");
  const double total = r0 + r1;
  double stat = 0.0;
  const double rows[2] = {r0, r1};
  const double cols[2] = {c0, c1};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double expected = rows[i] * cols[j] / total;
      const double diff = static_cast<double>(table[i][j]) - expected;
      stat += diff * diff / expected;
    }
  }
  TestResult res;
  res.statistic = stat;
  res.p_value = chi_squared_sf(stat, 1.0);
  res.n_a = static_cast<int>(r0);
  res.n_b = static_cast<int>(r1);
  res.method = "chi-squared-2x2";
  return res;
}

// F1 (in [0,1]) of binary predictions against gold, positive class = 1.
inline double binary_f1(std::span<const int> gold, std::span<const int> pred) {
  if (gold.size() != pred.size()) fail("binary_f1: length mismatch");
  long long tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (pred[i] == 1 && gold[i] == 1) ++tp;
    else if (pred[i] == 1) ++fp;
    else if (gold[i] == 1) ++fn;
  }
  if (tp == 0) return 0.0;
  const double prec = static_cast<double>(tp) / (tp + fp);
  const double rec = static_cast<double>(tp) / (tp + fn);
  return 2.0 * prec * rec / (prec + rec);
}

// Paired bootstrap comparison of two systems on shared gold labels
// (Berg-Kirkpatrick style): p = fraction of resamples with delta* >= 2*delta,
// after orienting system a as the better one.
inline TestResult bootstrap_compare(std::span<const int> gold, std::span<const int> pred_a,
                                    std::span<const int> pred_b, int iterations,
                                    uint64_t seed) {
  if (gold.size() != pred_a.size() || gold.size() != pred_b.size())
    fail("bootstrap_compare: length mismatch");
  if (gold.empty()) fail("bootstrap_compare: empty input");
  if (iterations <= 0) fail("bootstrap_compare: iterations must be positive");
  const size_t n = gold.size();

  std::span<const int> best = pred_a;
  std::span<const int> other = pred_b;
  double delta = binary_f1(gold, pred_a) - binary_f1(gold, pred_b);
  if (delta < 0.0) {
    std::swap(best, other);
    delta = -delta;
  }

  long long hits = 0;
  std::vector<int> g(n), pa(n), pb(n);
  for (int it = 0; it < iterations; ++it) {
    SplitMix64 rng(seed, static_cast<uint64_t>(it));
    for (size_t i = 0; i < n; ++i) {
      const size_t k = static_cast<size_t>(rng.next_below(n));
      g[i] = gold[k];
      pa[i] = best[k];
      pb[i] = other[k];
    }
    const double dstar = binary_f1(g, pa) - binary_f1(g, pb);
    if (dstar >= 2.0 * delta) ++hits;
  }
  TestResult res;
  res.statistic = delta;
  res.p_value = static_cast<double>(hits) / iterations;
  res.n_a = res.n_b = static_cast<int>(n);
  res.method = "bootstrap-f1";
  return res;
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) fail("mean: empty");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

// Sample standard deviation (n-1 denominator); 0 for n < 2.
inline double sample_std(std::span<const double> xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / (n - 1));
}

}  // namespace simpdel

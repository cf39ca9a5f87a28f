#include "bb/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "bb/errors.h"

namespace bb {

namespace {

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw ShapeError("score vectors differ in length (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  if (x.size() < 2) throw ShapeError("need at least 2 paired scores");
}

// Pairs tied within runs of equal values of an already sorted sequence.
template <typename Eq>
std::int64_t tied_pairs(std::size_t n, Eq&& same_as_prev) {
  std::int64_t total = 0, run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (same_as_prev(i)) {
      ++run;
    } else {
      total += run * (run - 1) / 2;
      run = 1;
    }
  }
  return total + run * (run - 1) / 2;
}

std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, o = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[o++] = v[j++];
    } else {
      buf[o++] = v[i++];
    }
  }
  while (i < mid) buf[o++] = v[i++];
  while (j < hi) buf[o++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateError("zero-variance margin");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });
  const auto n0 = static_cast<std::int64_t>(n * (n - 1) / 2);
  const std::int64_t tx = tied_pairs(n, [&](std::size_t i) { return x[order[i]] == x[order[i - 1]]; });
  const std::int64_t txy = tied_pairs(
      n, [&](std::size_t i) { return x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]]; });

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const std::int64_t swaps = merge_count(ys, buf, 0, n);
  const std::int64_t ty = tied_pairs(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });

  // n0 - tx = C + D + (tied in y only), n0 - ty = C + D + (tied in x only)
  const std::int64_t cd = n0 - tx - ty + txy;
  const std::int64_t discordant = swaps;
  const std::int64_t concordant = cd - discordant;
  const std::int64_t left = n0 - tx, right = n0 - ty;
  if (left == 0 || right == 0) throw DegenerateError("kendall tau undefined: a margin is fully tied");
  return static_cast<double>(concordant - discordant) / std::sqrt(static_cast<double>(left * right));
}

std::vector<double> mid_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
    i = j;
  }
  return ranks;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  return pearson(mid_ranks(x), mid_ranks(y));
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts, int raters_per_item) {
  if (raters_per_item < 2) throw ShapeError("fleiss kappa needs at least 2 raters per item");
  if (counts.empty()) throw ShapeError("fleiss kappa needs at least one item");
  const std::size_t cats = counts.front().size();
  if (cats == 0) throw ShapeError("fleiss kappa needs at least one category");
  const double r = raters_per_item;
  std::vector<double> col(cats, 0.0);
  double p_bar = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& row = counts[i];
    if (row.size() != cats) throw ShapeError("row " + std::to_string(i) + " has the wrong number of categories");
    long sum = 0, sq = 0;
    for (std::size_t j = 0; j < cats; ++j) {
      if (row[j] < 0) throw ShapeError("negative count in row " + std::to_string(i));
      sum += row[j];
      sq += static_cast<long>(row[j]) * row[j];
      col[j] += row[j];
    }
    if (sum != raters_per_item)
      throw ShapeError("row " + std::to_string(i) + " sums to " + std::to_string(sum) + ", expected " +
                       std::to_string(raters_per_item));
    p_bar += (static_cast<double>(sq) - r) / (r * (r - 1.0));
  }
  const double items = static_cast<double>(counts.size());
  p_bar /= items;
  double p_e = 0.0;
  for (double c : col) {
    const double p = c / (items * r);
    p_e += p * p;
  }
  if (p_e >= 1.0) throw DegenerateError("fleiss kappa undefined: expected agreement is 1");
  return (p_bar - p_e) / (1.0 - p_e);
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw ArgumentError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return boost::math::ibeta(dof / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - y[i];
  if (std::all_of(d.begin(), d.end(), [&](double v) { return v == d.front(); }))
    throw DegenerateError("paired t-test undefined: differences have zero variance");
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult r;
  r.dof = n - 1;
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, static_cast<double>(r.dof));
  return r;
}

}  // namespace bb

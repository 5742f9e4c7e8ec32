#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cbctt {

using Sample = std::vector<double>;

inline double median(const Sample& sample) {
  if (sample.empty()) throw std::invalid_argument("median of an empty sample");
  Sample sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

namespace detail {

/// 1-based midranks, aligned with the input order.
inline std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

/// Sum of t^3 - t over tie groups.
inline double tie_term(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j + 1 < values.size() && values[j + 1] == values[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    sum += t * t * t - t;
    i = j + 1;
  }
  return sum;
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Regularized upper incomplete gamma Q(a, x): series for the lower tail,
/// Lentz continued fraction for the upper.
inline double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    double denom = a;
    for (int i = 0; i < 1000; ++i) {
      denom += 1.0;
      term *= x / denom;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(log_prefactor);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefactor) * h;
}

inline double chi_square_sf(double x, int dof) {
  if (x <= 0.0) return 1.0;
  return std::min(1.0, std::max(gamma_q(0.5 * dof, 0.5 * x), 1e-300));
}

inline double clamp_p(double p) { return std::min(1.0, std::max(p, 1e-300)); }

/// Exact two-sided rank-sum p by enumerating every equally likely label
/// assignment of the pooled multiset (the sample sizes stay <= 12, so at
/// most C(12,6) = 924 subsets).
inline double wilcoxon_exact(const std::vector<double>& pooled_ranks, std::size_t n_first,
                             double observed) {
  const std::size_t n = pooled_ranks.size();
  long long total = 0;
  long long at_most = 0;
  long long at_least = 0;
  const double eps = 1e-9;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n_first) continue;
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) w += pooled_ranks[i];
    }
    ++total;
    if (w <= observed + eps) ++at_most;
    if (w >= observed - eps) ++at_least;
  }
  const double tail =
      static_cast<double>(std::min(at_most, at_least)) / static_cast<double>(total);
  return clamp_p(std::min(1.0, 2.0 * tail));
}

}  // namespace detail

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) p-value. Exact by enumeration
/// when the combined size is at most 12; otherwise a tie-corrected normal
/// approximation with continuity correction.
inline double wilcoxon_rank_sum(const Sample& a, const Sample& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wilcoxon needs non-empty samples");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t total = n + m;

  std::vector<double> pooled;
  pooled.reserve(total);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = detail::midranks(pooled);
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) w += ranks[i];

  if (total <= 12) {
    return detail::wilcoxon_exact(ranks, n, w);
  }

  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double tt = static_cast<double>(total);
  const double mean = nn * (tt + 1.0) / 2.0;
  const double variance =
      nn * mm / 12.0 * ((tt + 1.0) - detail::tie_term(pooled) / (tt * (tt - 1.0)));
  if (variance <= 0.0) return 1.0;  // every pooled value identical
  const double diff = std::fabs(w - mean);
  const double z = diff <= 0.5 ? 0.0 : (diff - 0.5) / std::sqrt(variance);
  return detail::clamp_p(2.0 * detail::normal_sf(z));
}

namespace detail {

struct KruskalWallis {
  double h = 0.0;
  double p = 1.0;
};

inline KruskalWallis kruskal_wallis_impl(const std::vector<Sample>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal-wallis needs >= 2 groups");
  std::vector<double> pooled;
  for (const Sample& g : groups) {
    if (g.empty()) throw std::invalid_argument("kruskal-wallis: empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double n_total = static_cast<double>(pooled.size());
  const std::vector<double> ranks = midranks(pooled);

  double h = 0.0;
  std::size_t offset = 0;
  for (const Sample& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    offset += g.size();
    const double mean_rank = rank_sum / static_cast<double>(g.size());
    const double centered = mean_rank - (n_total + 1.0) / 2.0;
    h += static_cast<double>(g.size()) * centered * centered;
  }
  h *= 12.0 / (n_total * (n_total + 1.0));

  const double correction =
      1.0 - tie_term(pooled) / (n_total * n_total * n_total - n_total);
  if (correction <= 1e-12) return {0.0, 1.0};  // all pooled values identical
  h /= correction;
  return {h, chi_square_sf(h, static_cast<int>(groups.size()) - 1)};
}

}  // namespace detail

/// Kruskal-Wallis p-value (tie-corrected H against chi-square, k-1 dof).
inline double kruskal_wallis(const std::vector<Sample>& groups) {
  return detail::kruskal_wallis_impl(groups).p;
}

/// The tie-corrected H statistic alone.
inline double kruskal_wallis_h(const std::vector<Sample>& groups) {
  return detail::kruskal_wallis_impl(groups).h;
}

/// Friedman test on a blocked cost matrix (rows = blocks, columns =
/// treatments), mid-ranks within rows, tie-corrected.
inline double friedman(const std::vector<std::vector<double>>& blocked) {
  const std::size_t n = blocked.size();
  if (n < 2) throw std::invalid_argument("friedman needs >= 2 rows");
  const std::size_t k = blocked.front().size();
  if (k < 2) throw std::invalid_argument("friedman needs >= 2 columns");
  for (const auto& row : blocked) {
    if (row.size() != k) throw std::invalid_argument("friedman: ragged matrix");
  }

  std::vector<double> column_rank_sum(k, 0.0);
  double rank_square_sum = 0.0;
  for (const auto& row : blocked) {
    const std::vector<double> ranks = detail::midranks(row);
    for (std::size_t j = 0; j < k; ++j) {
      column_rank_sum[j] += ranks[j];
      rank_square_sum += ranks[j] * ranks[j];
    }
  }

  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  const double denom = rank_square_sum - nn * kk * (kk + 1.0) * (kk + 1.0) / 4.0;
  if (denom <= 1e-12) return 1.0;  // every row fully tied
  double numer = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double centered = column_rank_sum[j] - nn * (kk + 1.0) / 2.0;
    numer += centered * centered;
  }
  numer *= kk - 1.0;
  return detail::chi_square_sf(numer / denom, static_cast<int>(k) - 1);
}

/// Benjamini-Hochberg step-up; returns reject flags in the input order.
inline std::vector<bool> benjamini_hochberg(const std::vector<double>& pvals, double q) {
  if (!(q > 0.0) || !(q < 1.0)) throw std::invalid_argument("FDR level must be in (0, 1)");
  for (double p : pvals) {
    if (!(p >= 0.0) || !(p <= 1.0)) throw std::invalid_argument("p-values must be in [0, 1]");
  }
  const std::size_t m = pvals.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  std::size_t cutoff = 0;  // number of rejections
  for (std::size_t i = m; i >= 1; --i) {
    if (pvals[order[i - 1]] <= q * static_cast<double>(i) / static_cast<double>(m)) {
      cutoff = i;
      break;
    }
  }
  std::vector<bool> reject(m, false);
  for (std::size_t i = 0; i < cutoff; ++i) reject[order[i]] = true;
  return reject;
}

}  // namespace cbctt

#pragma once

#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbctt/forest.hpp"
#include "cbctt/parallel.hpp"
#include "cbctt/rng.hpp"
#include "cbctt/stats.hpp"

namespace cbctt {

/// Per-instance flags marking which configurations are statistically
/// equivalent to the best-performing one.
struct PerformanceMatrix {
  std::vector<std::string> instance_ids;
  std::vector<std::string> config_ids;
  std::vector<std::vector<char>> good;  // rows x cols, 0/1

  std::size_t n_rows() const { return instance_ids.size(); }
  std::size_t n_cols() const { return config_ids.size(); }

  std::vector<double> success_rates() const {
    std::vector<double> rates(n_cols(), 0.0);
    if (good.empty()) return rates;
    for (const auto& row : good) {
      for (std::size_t j = 0; j < rates.size(); ++j) rates[j] += row[j];
    }
    for (double& r : rates) r /= static_cast<double>(good.size());
    return rates;
  }
};

/// Run costs for one instance under every configuration.
using InstanceResults = std::vector<Sample>;

/// Per row: the config with the smallest median is the reference; every
/// other config is compared against it with a two-sided rank-sum test and
/// the per-row p-values go through Benjamini-Hochberg at `fdr_q`. A config
/// is flagged good when it is the reference or not rejected.
inline PerformanceMatrix build_performance_matrix(const std::vector<std::string>& instance_ids,
                                                  const std::vector<std::string>& config_ids,
                                                  const std::vector<InstanceResults>& results,
                                                  double fdr_q) {
  const std::size_t n_configs = config_ids.size();
  if (results.size() != instance_ids.size()) {
    throw std::invalid_argument("row count does not match instance ids");
  }
  PerformanceMatrix matrix;
  matrix.instance_ids = instance_ids;
  matrix.config_ids = config_ids;

  for (std::size_t i = 0; i < results.size(); ++i) {
    const InstanceResults& row = results[i];
    if (row.size() != n_configs) {
      throw std::invalid_argument("instance " + instance_ids[i] + ": missing config cells");
    }
    std::size_t best = 0;
    double best_median = 0.0;
    for (std::size_t j = 0; j < n_configs; ++j) {
      if (row[j].size() < 2) {
        throw std::invalid_argument("instance " + instance_ids[i] +
                                    ": every cell needs at least two runs");
      }
      const double med = median(row[j]);
      if (j == 0 || med < best_median) {  // ties keep the smaller index
        best = j;
        best_median = med;
      }
    }

    std::vector<double> pvals;
    pvals.reserve(n_configs - 1);
    for (std::size_t j = 0; j < n_configs; ++j) {
      if (j != best) pvals.push_back(wilcoxon_rank_sum(row[j], row[best]));
    }
    const std::vector<bool> rejected = benjamini_hochberg(pvals, fdr_q);

    std::vector<char> flags(n_configs, 0);
    flags[best] = 1;
    std::size_t at = 0;
    for (std::size_t j = 0; j < n_configs; ++j) {
      if (j == best) continue;
      flags[j] = rejected[at] ? 0 : 1;
      ++at;
    }
    matrix.good.push_back(std::move(flags));
  }
  return matrix;
}

/// Keeps instances whose cost distribution actually depends on the
/// configuration (Kruskal-Wallis across config samples, p < alpha).
inline std::vector<char> screen_instances(const std::vector<InstanceResults>& results,
                                          double alpha) {
  std::vector<char> keep(results.size(), 0);
  for (std::size_t i = 0; i < results.size(); ++i) {
    keep[i] = kruskal_wallis(results[i]) < alpha ? 1 : 0;
  }
  return keep;
}

// ---------------------------------------------------------------------------
// Racing
// ---------------------------------------------------------------------------

/// Cost of one solver run: (instance index, config index, seed) -> best total.
/// The seed is shared across configs inside a block, which is what makes the
/// race's rank rows paired.
using RaceSolver = std::function<double(int instance, int config, std::uint64_t seed)>;

struct RaceResult {
  std::vector<int> survivors;        // ordered by mean rank, best first
  std::vector<double> mean_ranks;    // aligned with survivors
  std::vector<int> eliminated_after; // per config: block count when dropped, -1 if never
  long long runs_used = 0;
  int blocks_run = 0;
};

/// Sequential elimination: after each (instance x runs_per_step) block, a
/// Friedman test over all paired rows so far; on significance, every config
/// whose pooled costs lose a pairwise rank-sum test against the rank-best
/// config at the same level is dropped. Stops on budget exhaustion or a
/// single survivor. Runs inside a block may execute concurrently; results
/// are merged by index so the outcome is independent of scheduling.
inline RaceResult f_race(int n_instances, int n_configs, int runs_per_step, double confidence,
                         long long budget, const RaceSolver& solve, std::uint64_t seed = 1,
                         int n_workers = 1) {
  if (n_instances < 1) throw std::invalid_argument("race needs at least one instance");
  if (n_configs < 1) throw std::invalid_argument("race needs at least one configuration");
  if (runs_per_step < 1) throw std::invalid_argument("runs_per_step must be >= 1");
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw std::invalid_argument("confidence must be in (0, 1)");
  }
  const double alpha = 1.0 - confidence;

  RaceResult result;
  result.eliminated_after.assign(n_configs, -1);
  std::vector<int> alive(n_configs);
  std::iota(alive.begin(), alive.end(), 0);

  // Rows over *all* configs; eliminated columns are simply ignored later.
  std::vector<std::vector<double>> rows;
  std::vector<Sample> pooled(n_configs);

  auto mean_ranks_of_alive = [&]() {
    std::vector<double> sums(alive.size(), 0.0);
    std::vector<double> row(alive.size());
    for (const auto& full_row : rows) {
      for (std::size_t j = 0; j < alive.size(); ++j) row[j] = full_row[alive[j]];
      const std::vector<double> ranks = detail::midranks(row);
      for (std::size_t j = 0; j < alive.size(); ++j) sums[j] += ranks[j];
    }
    for (double& s : sums) s /= static_cast<double>(rows.size());
    return sums;
  };

  long long run_counter = 0;
  int block = 0;
  while (alive.size() > 1) {
    const int instance = block % n_instances;
    if (result.runs_used + static_cast<long long>(alive.size()) * runs_per_step > budget) break;

    struct Task {
      int config;
      std::uint64_t run_seed;
      std::size_t row;
      double cost = 0.0;
    };
    std::vector<Task> tasks;
    const std::size_t first_row = rows.size();
    for (int r = 0; r < runs_per_step; ++r) {
      const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(run_counter++));
      rows.emplace_back(n_configs, 0.0);
      for (int c : alive) tasks.push_back({c, run_seed, first_row + r});
    }
    parallel_for(tasks.size(), n_workers, [&](std::size_t t) {
      tasks[t].cost = solve(instance, tasks[t].config, tasks[t].run_seed);
    });
    for (const Task& t : tasks) {
      rows[t.row][t.config] = t.cost;
      pooled[t.config].push_back(t.cost);
      ++result.runs_used;
    }
    ++block;

    if (rows.size() < 2) continue;
    std::vector<std::vector<double>> alive_rows(rows.size(), std::vector<double>(alive.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < alive.size(); ++j) alive_rows[i][j] = rows[i][alive[j]];
    }
    if (friedman(alive_rows) >= alpha) continue;

    const std::vector<double> ranks = mean_ranks_of_alive();
    std::size_t best_pos = 0;
    for (std::size_t j = 1; j < alive.size(); ++j) {
      if (ranks[j] < ranks[best_pos]) best_pos = j;
    }
    const int best = alive[best_pos];
    std::vector<int> next_alive;
    for (std::size_t j = 0; j < alive.size(); ++j) {
      const int c = alive[j];
      bool drop = false;
      if (c != best && ranks[j] > ranks[best_pos]) {
        drop = wilcoxon_rank_sum(pooled[c], pooled[best]) < alpha;
      }
      if (drop) {
        result.eliminated_after[c] = block;
      } else {
        next_alive.push_back(c);
      }
    }
    alive = std::move(next_alive);
  }
  result.blocks_run = block;

  // Survivors ordered by mean rank (single survivor or empty history: input order).
  if (rows.size() >= 1 && alive.size() > 1) {
    const std::vector<double> ranks = mean_ranks_of_alive();
    std::vector<std::size_t> order(alive.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });
    for (std::size_t pos : order) {
      result.survivors.push_back(alive[pos]);
      result.mean_ranks.push_back(ranks[pos]);
    }
  } else {
    for (int c : alive) {
      result.survivors.push_back(c);
      result.mean_ranks.push_back(1.0);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Feature-based configuration selection
// ---------------------------------------------------------------------------

/// argmax of predicted good-performance probability; ties fall back to the
/// higher training success rate, then the lower index. When every forest
/// says the same thing this reduces exactly to the majority rule.
inline std::size_t select_config_by_probability(const std::vector<double>& probabilities,
                                                const std::vector<double>& success_rates) {
  if (probabilities.empty() || probabilities.size() != success_rates.size()) {
    throw std::invalid_argument("probabilities/success rates mismatched");
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < probabilities.size(); ++j) {
    constexpr double eps = 1e-12;
    if (probabilities[j] > probabilities[best] + eps) {
      best = j;
    } else if (probabilities[j] >= probabilities[best] - eps &&
               success_rates[j] > success_rates[best] + eps) {
      best = j;
    }
  }
  return best;
}

inline std::size_t select_config(const std::vector<Forest>& forests,
                                 const std::vector<double>& features,
                                 const PerformanceMatrix& matrix) {
  if (forests.size() != matrix.n_cols()) {
    throw std::invalid_argument("one forest per configuration required");
  }
  std::vector<double> probabilities;
  probabilities.reserve(forests.size());
  for (const Forest& f : forests) probabilities.push_back(f.predict_proba(features));
  return select_config_by_probability(probabilities, matrix.success_rates());
}

struct ForestTrainingOptions {
  int n_trees = 100;
  int m_try = 3;
  int min_node_size = 5;
};

/// One classifier per configuration, each predicting that configuration's
/// good-performance flag from the instance features.
inline std::vector<Forest> train_config_forests(const FeatureMatrix& x,
                                                const std::vector<std::vector<char>>& y_matrix,
                                                const ForestTrainingOptions& options,
                                                std::uint64_t seed) {
  if (x.empty() || y_matrix.size() != x.size()) {
    throw std::invalid_argument("rows of features and flags must match");
  }
  const std::size_t n_configs = y_matrix.front().size();
  std::vector<Forest> forests;
  forests.reserve(n_configs);
  for (std::size_t c = 0; c < n_configs; ++c) {
    Labels y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = y_matrix[i][c];
    forests.push_back(train_forest(x, y, options.n_trees, options.m_try,
                                   derive_seed(seed, c), options.min_node_size));
  }
  return forests;
}

/// 10-fold (by default) cross validation of the whole selection rule: train
/// the per-config forests on the complement, pick a config for each held-out
/// instance, score it against that instance's true flag row.
inline double cross_validate_accuracy(const FeatureMatrix& x,
                                      const std::vector<std::vector<char>>& y_matrix,
                                      int folds, std::uint64_t seed,
                                      ForestTrainingOptions options = {}) {
  const std::size_t n = x.size();
  if (n == 0 || y_matrix.size() != n) throw std::invalid_argument("rows mismatched");
  if (folds < 2 || static_cast<std::size_t>(folds) > n) {
    throw std::invalid_argument("fold count must be in [2, rows]");
  }
  const std::size_t n_configs = y_matrix.front().size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, 0xf01d));
  shuffle(order, rng);

  int correct = 0;
  for (int fold = 0; fold < folds; ++fold) {
    FeatureMatrix train_x;
    std::vector<std::vector<char>> train_y;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i % folds) == fold) {
        test_rows.push_back(order[i]);
      } else {
        train_x.push_back(x[order[i]]);
        train_y.push_back(y_matrix[order[i]]);
      }
    }
    if (train_x.empty() || test_rows.empty()) continue;

    const std::vector<Forest> forests =
        train_config_forests(train_x, train_y, options, derive_seed(seed, 100 + fold));
    std::vector<double> rates(n_configs, 0.0);
    for (const auto& row : train_y) {
      for (std::size_t j = 0; j < n_configs; ++j) rates[j] += row[j];
    }
    for (double& r : rates) r /= static_cast<double>(train_y.size());

    for (std::size_t row : test_rows) {
      std::vector<double> probabilities(n_configs);
      for (std::size_t j = 0; j < n_configs; ++j) {
        probabilities[j] = forests[j].predict_proba(x[row]);
      }
      const std::size_t chosen = select_config_by_probability(probabilities, rates);
      if (y_matrix[row][chosen]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

/// Mean accuracy drop over the classifier bank after permuting one feature
/// column; larger means the feature carries more signal.
inline std::vector<double> permutation_importance(const std::vector<Forest>& forests,
                                                  const FeatureMatrix& x,
                                                  const std::vector<std::vector<char>>& y_matrix,
                                                  std::uint64_t seed) {
  if (forests.empty() || x.empty() || y_matrix.size() != x.size()) {
    throw std::invalid_argument("forests/rows mismatched");
  }
  const std::size_t d = x.front().size();
  const std::size_t n = x.size();

  auto bank_accuracy = [&](const FeatureMatrix& data) {
    double sum = 0.0;
    for (std::size_t c = 0; c < forests.size(); ++c) {
      int correct = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const int predicted = forests[c].predict_proba(data[i]) > 0.5 ? 1 : 0;
        if (predicted == y_matrix[i][c]) ++correct;
      }
      sum += static_cast<double>(correct) / static_cast<double>(n);
    }
    return sum / static_cast<double>(forests.size());
  };

  const double baseline = bank_accuracy(x);
  std::vector<double> importance(d, 0.0);
  for (std::size_t f = 0; f < d; ++f) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(seed, 7000 + f));
    shuffle(perm, rng);
    FeatureMatrix shuffled = x;
    for (std::size_t i = 0; i < n; ++i) shuffled[i][f] = x[perm[i]][f];
    importance[f] = baseline - bank_accuracy(shuffled);
  }
  return importance;
}

// ---------------------------------------------------------------------------
// Matrix CSV: instance id column followed by one 0/1 flag per configuration.
// ---------------------------------------------------------------------------

inline void write_matrix_csv(std::ostream& out, const PerformanceMatrix& matrix) {
  out << "instance";
  for (const std::string& c : matrix.config_ids) out << "," << c;
  out << "\n";
  for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
    out << matrix.instance_ids[i];
    for (char flag : matrix.good[i]) out << "," << (flag ? 1 : 0);
    out << "\n";
  }
}

inline PerformanceMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty matrix CSV");
  auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
  };
  const std::vector<std::string> header = split(line);
  if (header.size() < 2 || header.front() != "instance") {
    throw std::invalid_argument("matrix CSV must start with an instance column");
  }
  PerformanceMatrix matrix;
  matrix.config_ids.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument("matrix CSV row has wrong field count");
    }
    matrix.instance_ids.push_back(fields.front());
    std::vector<char> flags;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      flags.push_back(fields[i] == "1" ? 1 : 0);
    }
    matrix.good.push_back(std::move(flags));
  }
  return matrix;
}

}  // namespace cbctt

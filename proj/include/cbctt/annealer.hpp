#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cbctt/cost.hpp"
#include "cbctt/instance.hpp"
#include "cbctt/neighborhood.hpp"
#include "cbctt/rng.hpp"
#include "cbctt/timetable.hpp"

namespace cbctt {

/// Search parameters. Shipped defaults are the tuned configuration that won
/// the race on the training families.
struct SAParams {
  double t0 = 30.25;            // starting temperature
  double t_min = 0.1567;        // expected minimum temperature
  double cooling_rate = 0.99;   // cr
  double accepted_ratio = 0.0364;  // rho = n_a / n_s
  double swap_rate = 0.43;      // sr
  long long w_hard = 100;
  long long iter_max = 300'000'000;

  void check() const {
    if (!(t0 > t_min) || !(t_min > 0)) {
      throw std::invalid_argument("temperatures must satisfy t0 > t_min > 0");
    }
    if (!(cooling_rate > 0) || !(cooling_rate < 1)) {
      throw std::invalid_argument("cooling rate must be in (0, 1)");
    }
    if (!(accepted_ratio > 0) || accepted_ratio > 1) {
      throw std::invalid_argument("accepted ratio must be in (0, 1]");
    }
    if (swap_rate < 0 || swap_rate > 1) {
      throw std::invalid_argument("swap rate must be in [0, 1]");
    }
    if (w_hard < 1) throw std::invalid_argument("w_hard must be >= 1");
    if (iter_max < 1) throw std::invalid_argument("iteration budget must be >= 1");
  }
};

/// Samples per temperature level, chosen so plain geometric cooling from t0
/// to t_min consumes the whole iteration budget exactly.
inline long long compute_ns(const SAParams& p) {
  p.check();
  const double cooling_steps = std::log(p.t0 / p.t_min) / (-std::log(p.cooling_rate));
  const long long ns = std::llround(static_cast<double>(p.iter_max) / cooling_steps);
  return ns < 1 ? 1 : ns;
}

/// Metropolis rule on integer deltas: accept improvements and sideways moves
/// outright, worsenings with probability exp(-delta/T).
inline bool metropolis_accept(long long delta, double temperature, Rng& rng) {
  if (delta <= 0) return true;
  return rng.real() < std::exp(-static_cast<double>(delta) / temperature);
}

struct SearchResult {
  Timetable best_timetable;
  CostBreakdown best_cost;
  long long iterations_used = 0;
  std::vector<std::pair<long long, double>> temperature_trace;  // (iteration, T)
  bool feasible = false;
  std::uint64_t seed = 0;
};

/// Called at every cooling step and once at the end of a run.
class AnnealObserver {
 public:
  virtual ~AnnealObserver() = default;
  virtual void on_level(long long iteration, double temperature, long long current_cost,
                        long long best_cost) = 0;
  virtual void on_finish(const SearchResult& result) = 0;
};

/// Single-stage simulated annealing with cutoff cooling. A temperature level
/// ends after n_s sampled moves or round(rho * n_s) accepted moves, whichever
/// comes first; every sampled move counts against the budget. Once the
/// temperature floor is reached the spared iterations are spent there as
/// plain intensification. Deterministic for a fixed (instance, params, seed).
inline SearchResult anneal(const Instance& inst, const SAParams& params, std::uint64_t seed,
                           AnnealObserver* observer = nullptr, double max_seconds = 0.0) {
  params.check();
  const auto started = std::chrono::steady_clock::now();

  Timetable tt = random_assignment(inst, seed);
  Rng rng(derive_seed(seed, 1));

  long long current = full_cost(inst, tt, params.w_hard).total;
  std::vector<int> best_periods(inst.total_lectures());
  std::vector<int> best_rooms(inst.total_lectures());
  auto snapshot = [&] {
    for (int l = 0; l < inst.total_lectures(); ++l) {
      best_periods[l] = tt.period_of(l);
      best_rooms[l] = tt.room_of(l);
    }
  };
  long long best = current;
  snapshot();

  const long long ns = compute_ns(params);
  const long long na = std::max(1LL, std::llround(params.accepted_ratio * ns));

  SearchResult result{Timetable(inst), CostBreakdown{}, 0, {}, false, seed};
  double temperature = params.t0;
  bool on_floor = temperature <= params.t_min;
  result.temperature_trace.emplace_back(0, temperature);

  long long level_sampled = 0;
  long long level_accepted = 0;
  long long iterations = 0;
  while (iterations < params.iter_max) {
    ++iterations;
    const Move mv = sample_move(inst, tt, params.swap_rate, rng);
    const long long delta = delta_cost(inst, tt, mv, params.w_hard);
    if (metropolis_accept(delta, temperature, rng)) {
      tt.apply(mv);
      current += delta;
      ++level_accepted;
      if (current < best) {
        best = current;
        snapshot();
      }
    }
    ++level_sampled;

    if (!on_floor && (level_sampled >= ns || level_accepted >= na)) {
      temperature *= params.cooling_rate;
      if (temperature <= params.t_min) {
        temperature = params.t_min;
        on_floor = true;
      }
      result.temperature_trace.emplace_back(iterations, temperature);
      if (observer != nullptr) observer->on_level(iterations, temperature, current, best);
      level_sampled = 0;
      level_accepted = 0;
    }

    if (max_seconds > 0 && (iterations & 0xfff) == 0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      if (elapsed.count() >= max_seconds) break;
    }
  }

  for (int l = 0; l < inst.total_lectures(); ++l) {
    result.best_timetable.place(l, best_periods[l], best_rooms[l]);
  }
  result.best_cost = full_cost(inst, result.best_timetable, params.w_hard);
  result.iterations_used = iterations;
  result.feasible = result.best_cost.feasible();
  if (observer != nullptr) observer->on_finish(result);
  return result;
}

}  // namespace cbctt

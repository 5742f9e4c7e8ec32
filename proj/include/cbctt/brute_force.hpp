#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cbctt/cost.hpp"
#include "cbctt/instance.hpp"
#include "cbctt/timetable.hpp"

namespace cbctt {

struct SearchSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Number of structurally valid assignments, treating lectures of one course
/// as interchangeable: per course C(available, lectures) * rooms^lectures.
/// Saturates at `cap` (cap must stay below 2^40 so the arithmetic cannot
/// overflow).
inline long long count_assignments(const Instance& inst, long long cap = (1LL << 40)) {
  long long space = 1;
  for (int c = 0; c < inst.n_courses(); ++c) {
    const long long avail = static_cast<long long>(inst.available_periods(c).size());
    const long long k = inst.courses[c].n_lectures;
    if (avail < k) return 0;
    long long combos = 1;
    for (long long i = 0; i < k; ++i) {
      combos = combos * (avail - i) / (i + 1);  // partial binomials are integral
      if (combos > cap) combos = cap;
    }
    for (long long i = 0; i < k && combos < cap; ++i) {
      combos = std::min(combos * inst.n_rooms(), cap);
    }
    if (combos == 0) return 0;  // no rooms
    if (space > cap / combos) return cap;
    space *= combos;
  }
  return std::min(space, cap);
}

namespace detail {

class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const Instance& inst, long long w_hard)
      : inst_(inst), w_hard_(w_hard), tt_(inst), chosen_(inst.n_courses()) {
    for (int c = 0; c < inst.n_courses(); ++c) {
      chosen_[c].assign(inst.courses[c].n_lectures, -1);
    }
  }

  std::pair<Timetable, CostBreakdown> run() {
    recurse_course(0);
    if (!best_) throw InfeasibleInstance("no structurally valid assignment exists");
    return {std::move(*best_), best_cost_};
  }

 private:
  void recurse_course(int course) {
    if (course == inst_.n_courses()) {
      const CostBreakdown cost = full_cost(inst_, tt_, w_hard_);
      if (!best_ || cost.total < best_cost_.total) {  // ties keep the first optimum found
        best_ = tt_;
        best_cost_ = cost;
      }
      return;
    }
    choose_periods(course, 0, 0);
  }

  // Ascending period combinations; lectures within a course are
  // interchangeable, so this canonical order enumerates each distinct
  // assignment exactly once.
  void choose_periods(int course, int depth, int from) {
    const auto& avail = inst_.available_periods(course);
    const int k = inst_.courses[course].n_lectures;
    if (depth == k) {
      choose_rooms(course, 0);
      return;
    }
    for (int i = from; i <= static_cast<int>(avail.size()) - (k - depth); ++i) {
      chosen_[course][depth] = avail[i];
      choose_periods(course, depth + 1, i + 1);
    }
  }

  void choose_rooms(int course, int depth) {
    const int k = inst_.courses[course].n_lectures;
    if (depth == k) {
      recurse_course(course + 1);
      return;
    }
    const int lecture = inst_.first_lecture(course) + depth;
    const int period = chosen_[course][depth];
    for (int r = 0; r < inst_.n_rooms(); ++r) {
      tt_.place(lecture, period, r);
      choose_rooms(course, depth + 1);
      tt_.remove(lecture);
    }
  }

  const Instance& inst_;
  long long w_hard_;
  Timetable tt_;
  std::vector<std::vector<int>> chosen_;  // per course, periods picked so far
  std::optional<Timetable> best_;
  CostBreakdown best_cost_;
};

}  // namespace detail

/// Exhaustive optimum for desk-scale instances; the oracle the search engine
/// is tested against. Guarded: throws when the space exceeds `guard`.
inline std::pair<Timetable, CostBreakdown> brute_force_optimum(const Instance& inst,
                                                               long long w_hard,
                                                               long long guard = 10'000'000) {
  const long long space = count_assignments(inst, guard + 1);
  if (space == 0) throw InfeasibleInstance("some course has fewer available periods than lectures");
  if (space > guard) {
    throw SearchSpaceTooLarge("search space exceeds the exhaustive-enumeration guard");
  }
  detail::ExhaustiveSearch search(inst, w_hard);
  return search.run();
}

}  // namespace cbctt

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cbctt/instance.hpp"
#include "cbctt/timetable.hpp"

namespace cbctt {

// Fixed soft-constraint weights of the problem formulation; the hard weight
// is a search parameter.
inline constexpr long long kWeightMinWorkingDays = 5;
inline constexpr long long kWeightIsolatedLectures = 2;
inline constexpr long long kWeightRoomCapacity = 1;
inline constexpr long long kWeightRoomStability = 1;

struct CostBreakdown {
  long long conflicts = 0;
  long long room_occupancy = 0;
  long long room_capacity = 0;
  long long min_working_days = 0;
  long long isolated_lectures = 0;
  long long room_stability = 0;
  long long w_hard = 1;
  long long total = 0;

  long long recompute_total() const {
    return w_hard * (conflicts + room_occupancy) + kWeightMinWorkingDays * min_working_days +
           kWeightIsolatedLectures * isolated_lectures + kWeightRoomCapacity * room_capacity +
           kWeightRoomStability * room_stability;
  }

  /// Feasible in the competition sense: no hard-constraint violations.
  bool feasible() const { return conflicts == 0 && room_occupancy == 0; }

  friend bool operator==(const CostBreakdown& a, const CostBreakdown& b) {
    return a.conflicts == b.conflicts && a.room_occupancy == b.room_occupancy &&
           a.room_capacity == b.room_capacity && a.min_working_days == b.min_working_days &&
           a.isolated_lectures == b.isolated_lectures && a.room_stability == b.room_stability &&
           a.w_hard == b.w_hard && a.total == b.total;
  }
};

namespace detail {

/// A lecture in a slot is isolated when no lecture of the same curriculum
/// sits in the slot or in an adjacent slot of the same day; two lectures
/// sharing the slot count as adjacent to each other. Days never wrap.
template <typename GetCount>
int isolated_in_day(int periods_per_day, GetCount&& count) {
  int isolated = 0;
  for (int ts = 0; ts < periods_per_day; ++ts) {
    if (count(ts) != 1) continue;
    const bool left = ts > 0 && count(ts - 1) > 0;
    const bool right = ts + 1 < periods_per_day && count(ts + 1) > 0;
    if (!left && !right) ++isolated;
  }
  return isolated;
}

}  // namespace detail

/// Evaluates the full cost from the raw assignment alone, independently of
/// the incremental tables. Conflicts are counted as unordered lecture pairs
/// sharing a period; RoomOccupancy counts k-1 per over-occupied (room,
/// period) cell.
inline CostBreakdown full_cost(const Instance& inst, const Timetable& tt, long long w_hard) {
  if (w_hard < 1) throw std::invalid_argument("w_hard must be >= 1");
  CostBreakdown cost;
  cost.w_hard = w_hard;
  const int np = inst.n_periods();
  const int nr = inst.n_rooms();
  const int nl = inst.total_lectures();

  std::vector<std::vector<int>> lectures_in_period(np);
  for (int l = 0; l < nl; ++l) lectures_in_period[tt.period_of(l)].push_back(l);
  for (int p = 0; p < np; ++p) {
    const auto& in_p = lectures_in_period[p];
    for (std::size_t i = 0; i < in_p.size(); ++i) {
      const int ci = inst.course_of_lecture(in_p[i]);
      for (std::size_t j = i + 1; j < in_p.size(); ++j) {
        if (inst.conflict(ci, inst.course_of_lecture(in_p[j]))) ++cost.conflicts;
      }
    }
  }

  std::vector<int> cell_count(static_cast<std::size_t>(np) * nr, 0);
  for (int l = 0; l < nl; ++l) {
    ++cell_count[static_cast<std::size_t>(tt.period_of(l)) * nr + tt.room_of(l)];
  }
  for (int k : cell_count) {
    if (k > 1) cost.room_occupancy += k - 1;
  }

  for (int l = 0; l < nl; ++l) {
    const Course& course = inst.courses[inst.course_of_lecture(l)];
    const int over = course.n_students - inst.rooms[tt.room_of(l)].capacity;
    if (over > 0) cost.room_capacity += over;
  }

  std::vector<char> used(static_cast<std::size_t>(std::max(inst.n_days, nr)), 0);
  for (int c = 0; c < inst.n_courses(); ++c) {
    const Course& course = inst.courses[c];
    std::fill(used.begin(), used.begin() + inst.n_days, 0);
    int distinct_days = 0;
    for (int k = 0; k < course.n_lectures; ++k) {
      const int day = inst.day_of(tt.period_of(inst.first_lecture(c) + k));
      if (!used[day]) {
        used[day] = 1;
        ++distinct_days;
      }
    }
    if (distinct_days < course.min_working_days) {
      cost.min_working_days += course.min_working_days - distinct_days;
    }

    std::fill(used.begin(), used.begin() + nr, 0);
    int distinct_rooms = 0;
    for (int k = 0; k < course.n_lectures; ++k) {
      const int room = tt.room_of(inst.first_lecture(c) + k);
      if (!used[room]) {
        used[room] = 1;
        ++distinct_rooms;
      }
    }
    cost.room_stability += distinct_rooms - 1;
  }

  std::vector<int> slot_count(np, 0);
  for (int q = 0; q < inst.n_curricula(); ++q) {
    std::fill(slot_count.begin(), slot_count.end(), 0);
    for (int c : inst.curricula[q].course_indices) {
      for (int k = 0; k < inst.courses[c].n_lectures; ++k) {
        ++slot_count[tt.period_of(inst.first_lecture(c) + k)];
      }
    }
    for (int d = 0; d < inst.n_days; ++d) {
      const int base = d * inst.periods_per_day;
      cost.isolated_lectures += detail::isolated_in_day(
          inst.periods_per_day, [&](int ts) { return slot_count[base + ts]; });
    }
  }

  cost.total = cost.recompute_total();
  return cost;
}

namespace detail {

struct CurriculumDelta {
  int curriculum;
  int period;
  int change;
};

/// Recomputes the isolated-lecture count on every (curriculum, day) touched
/// by the pending period changes, before vs after.
inline long long isolated_delta(const Instance& inst, const Timetable& tt,
                                const std::vector<CurriculumDelta>& deltas) {
  long long delta = 0;
  const int ppd = inst.periods_per_day;
  // (curriculum, day) pairs, deduplicated; the lists involved hold a handful
  // of entries.
  thread_local std::vector<std::pair<int, int>> affected;
  affected.clear();
  for (const auto& cd : deltas) {
    if (cd.change == 0) continue;
    affected.emplace_back(cd.curriculum, inst.day_of(cd.period));
  }
  std::sort(affected.begin(), affected.end());
  affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

  for (const auto& [q, day] : affected) {
    auto count_now = [&](int ts) { return tt.curriculum_lectures_in(q, inst.period(day, ts)); };
    auto count_after = [&](int ts) {
      int count = count_now(ts);
      const int p = inst.period(day, ts);
      for (const auto& cd : deltas) {
        if (cd.curriculum == q && cd.period == p) count += cd.change;
      }
      return count;
    };
    delta += isolated_in_day(ppd, count_after) - isolated_in_day(ppd, count_now);
  }
  return delta;
}

inline void append_curriculum_deltas(const Instance& inst, int course, int from_period,
                                     int to_period, std::vector<CurriculumDelta>& out) {
  if (from_period == to_period) return;
  for (int q : inst.curricula_of(course)) {
    out.push_back({q, from_period, -1});
    out.push_back({q, to_period, +1});
  }
}

inline long long capacity_term(const Instance& inst, int course, int room) {
  const int over = inst.courses[course].n_students - inst.rooms[room].capacity;
  return over > 0 ? over : 0;
}

inline long long working_days_delta(const Instance& inst, const Timetable& tt, int course,
                                    int from_day, int to_day) {
  if (from_day == to_day) return 0;
  const int mwd = inst.courses[course].min_working_days;
  const int before = tt.days_used(course);
  int after = before;
  if (tt.course_lectures_on_day(course, from_day) == 1) --after;
  if (tt.course_lectures_on_day(course, to_day) == 0) ++after;
  const long long pen_before = std::max(0, mwd - before);
  const long long pen_after = std::max(0, mwd - after);
  return pen_after - pen_before;
}

inline long long room_stability_delta(const Timetable& tt, int course, int from_room,
                                      int to_room) {
  if (from_room == to_room) return 0;
  int change = 0;
  if (tt.course_lectures_in_room(course, from_room) == 1) --change;
  if (tt.course_lectures_in_room(course, to_room) == 0) ++change;
  return change;
}

}  // namespace detail

/// Exact cost change of applying `mv`, computed from the incremental tables
/// without mutating the timetable. Equals full_cost(after) - full_cost(before)
/// as an integer.
inline long long delta_cost(const Instance& inst, const Timetable& tt, const Move& mv,
                            long long w_hard) {
  if (!tt.applicable(mv)) throw std::invalid_argument("move not applicable");

  thread_local std::vector<detail::CurriculumDelta> deltas;
  deltas.clear();

  long long conflicts = 0;
  long long occupancy = 0;
  long long capacity = 0;
  long long working_days = 0;
  long long stability = 0;

  if (mv.kind == Move::Kind::ML) {
    const int course = inst.course_of_lecture(mv.lecture);
    const int p1 = tt.period_of(mv.lecture);
    const int r1 = tt.room_of(mv.lecture);
    const int p2 = mv.period;
    const int r2 = mv.room;

    conflicts = tt.conflicting_lectures_in(course, p2) - tt.conflicting_lectures_in(course, p1);
    // Target cell differs from the source cell, so the counts are exclusive
    // of the moved lecture on the target side only.
    if (tt.occupancy(p1, r1) >= 2) --occupancy;
    if (tt.occupancy(p2, r2) >= 1) ++occupancy;
    capacity = detail::capacity_term(inst, course, r2) - detail::capacity_term(inst, course, r1);
    working_days =
        detail::working_days_delta(inst, tt, course, inst.day_of(p1), inst.day_of(p2));
    stability = detail::room_stability_delta(tt, course, r1, r2);
    detail::append_curriculum_deltas(inst, course, p1, p2, deltas);
  } else {
    const int ca = inst.course_of_lecture(mv.lecture_a);
    const int cb = inst.course_of_lecture(mv.lecture_b);
    const int pa = tt.period_of(mv.lecture_a);
    const int ra = tt.room_of(mv.lecture_a);
    const int pb = tt.period_of(mv.lecture_b);
    const int rb = tt.room_of(mv.lecture_b);

    if (pa != pb) {
      const long long cross = inst.conflict(ca, cb) ? 1 : 0;
      conflicts = tt.conflicting_lectures_in(ca, pb) + tt.conflicting_lectures_in(cb, pa) -
                  tt.conflicting_lectures_in(ca, pa) - tt.conflicting_lectures_in(cb, pb) -
                  2 * cross;
    }
    // Occupancy is unchanged: the two cells keep one lecture each.
    capacity = detail::capacity_term(inst, ca, rb) - detail::capacity_term(inst, ca, ra) +
               detail::capacity_term(inst, cb, ra) - detail::capacity_term(inst, cb, rb);
    working_days =
        detail::working_days_delta(inst, tt, ca, inst.day_of(pa), inst.day_of(pb)) +
        detail::working_days_delta(inst, tt, cb, inst.day_of(pb), inst.day_of(pa));
    stability = detail::room_stability_delta(tt, ca, ra, rb) +
                detail::room_stability_delta(tt, cb, rb, ra);
    detail::append_curriculum_deltas(inst, ca, pa, pb, deltas);
    detail::append_curriculum_deltas(inst, cb, pb, pa, deltas);
  }

  const long long isolated = detail::isolated_delta(inst, tt, deltas);
  return w_hard * (conflicts + occupancy) + kWeightMinWorkingDays * working_days +
         kWeightIsolatedLectures * isolated + kWeightRoomCapacity * capacity +
         kWeightRoomStability * stability;
}

/// Applies an applicable move, keeping all derived tables consistent.
inline void apply_move(Timetable& tt, const Move& mv) { tt.apply(mv); }

}  // namespace cbctt

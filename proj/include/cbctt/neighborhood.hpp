#pragma once

#include <stdexcept>

#include "cbctt/instance.hpp"
#include "cbctt/rng.hpp"
#include "cbctt/timetable.hpp"

namespace cbctt {

struct NeighborhoodExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr int kSampleRetryCap = 10'000;

/// Uniform over applicable ML moves: rejection from the full
/// lecture x period x room product. While the instance has spare room
/// capacity overall, only rooms empty in the target period are admissible;
/// at 100% occupancy there are no empty rooms and the restriction is lifted.
inline Move sample_ml(const Instance& inst, const Timetable& tt, Rng& rng) {
  const bool require_empty_room = inst.under_full_occupancy();
  const int nl = inst.total_lectures();
  const int np = inst.n_periods();
  const int nr = inst.n_rooms();
  for (int attempt = 0; attempt < kSampleRetryCap; ++attempt) {
    const int lecture = rng.int_below(nl);
    const int period = rng.int_below(np);
    const int room = rng.int_below(nr);
    const int course = inst.course_of_lecture(lecture);
    if (!inst.available(course, period)) continue;
    const int p1 = tt.period_of(lecture);
    if (period == p1) {
      if (room == tt.room_of(lecture)) continue;
    } else if (tt.course_lectures_in(course, period) != 0) {
      continue;
    }
    if (require_empty_room && tt.occupancy(period, room) != 0) continue;
    return Move::ml(lecture, period, room);
  }
  throw NeighborhoodExhausted("no applicable lecture move found");
}

/// Uniform over applicable SL moves: rejection from lecture pairs.
inline Move sample_sl(const Instance& inst, const Timetable& tt, Rng& rng) {
  const int nl = inst.total_lectures();
  for (int attempt = 0; attempt < kSampleRetryCap; ++attempt) {
    const int a = rng.int_below(nl);
    const int b = rng.int_below(nl);
    if (a == b) continue;
    const Move mv = Move::sl(a, b);
    if (tt.applicable(mv)) return mv;
  }
  throw NeighborhoodExhausted("no applicable lecture swap found");
}

}  // namespace detail

/// Two-stage draw: with probability `swap_rate` a swap, otherwise a
/// relocation; within the chosen neighborhood the move is uniform among
/// applicable moves.
inline Move sample_move(const Instance& inst, const Timetable& tt, double swap_rate, Rng& rng) {
  if (rng.real() < swap_rate) return detail::sample_sl(inst, tt, rng);
  return detail::sample_ml(inst, tt, rng);
}

}  // namespace cbctt

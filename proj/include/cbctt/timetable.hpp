#pragma once

#include <cassert>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbctt/instance.hpp"
#include "cbctt/rng.hpp"

namespace cbctt {

struct InfeasibleInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A neighborhood move: relocate one lecture (ML) or swap period and room of
/// two lectures of distinct courses (SL).
struct Move {
  enum class Kind : unsigned char { ML, SL };
  Kind kind = Kind::ML;
  int lecture = -1;  // ML
  int period = -1;
  int room = -1;
  int lecture_a = -1;  // SL
  int lecture_b = -1;

  static Move ml(int lecture, int period, int room) {
    Move m;
    m.kind = Kind::ML;
    m.lecture = lecture;
    m.period = period;
    m.room = room;
    return m;
  }
  static Move sl(int lecture_a, int lecture_b) {
    Move m;
    m.kind = Kind::SL;
    m.lecture_a = lecture_a;
    m.lecture_b = lecture_b;
    return m;
  }
};

/// Mutable assignment of every lecture to a (period, room) pair, plus the
/// occupancy tables that make move evaluation O(affected entities). The
/// search space keeps two structural rules at all times: a lecture only sits
/// in a period its course is available in, and lectures of one course sit in
/// distinct periods.
class Timetable {
 public:
  explicit Timetable(const Instance& inst)
      : inst_(&inst),
        period_of_(inst.total_lectures(), -1),
        room_of_(inst.total_lectures(), -1),
        occupancy_(static_cast<std::size_t>(inst.n_periods()) * inst.n_rooms(), 0),
        course_period_(static_cast<std::size_t>(inst.n_courses()) * inst.n_periods(), 0),
        course_day_(static_cast<std::size_t>(inst.n_courses()) * inst.n_days, 0),
        course_days_used_(inst.n_courses(), 0),
        course_room_(static_cast<std::size_t>(inst.n_courses()) * inst.n_rooms(), 0),
        course_rooms_used_(inst.n_courses(), 0),
        curriculum_period_(static_cast<std::size_t>(inst.n_curricula()) * inst.n_periods(), 0),
        conflicting_in_period_(static_cast<std::size_t>(inst.n_courses()) * inst.n_periods(),
                               0),
        assigned_(0) {}

  const Instance& instance() const { return *inst_; }

  int period_of(int lecture) const { return period_of_[lecture]; }
  int room_of(int lecture) const { return room_of_[lecture]; }
  bool fully_assigned() const { return assigned_ == inst_->total_lectures(); }

  int occupancy(int period, int room) const {
    return occupancy_[static_cast<std::size_t>(period) * inst_->n_rooms() + room];
  }
  int course_lectures_in(int course, int period) const {
    return course_period_[static_cast<std::size_t>(course) * inst_->n_periods() + period];
  }
  int curriculum_lectures_in(int curriculum, int period) const {
    return curriculum_period_[static_cast<std::size_t>(curriculum) * inst_->n_periods() +
                              period];
  }
  int conflicting_lectures_in(int course, int period) const {
    return conflicting_in_period_[static_cast<std::size_t>(course) * inst_->n_periods() +
                                  period];
  }
  int course_lectures_on_day(int course, int day) const {
    return course_day_[static_cast<std::size_t>(course) * inst_->n_days + day];
  }
  int days_used(int course) const { return course_days_used_[course]; }
  int rooms_used(int course) const { return course_rooms_used_[course]; }
  int course_lectures_in_room(int course, int room) const {
    return course_room_[static_cast<std::size_t>(course) * inst_->n_rooms() + room];
  }

  /// Places an unassigned lecture. Availability and the distinct-period rule
  /// are the caller's contract; asserts catch violations in debug builds.
  void place(int lecture, int period, int room) {
    assert(period_of_[lecture] < 0);
    const int course = inst_->course_of_lecture(lecture);
    assert(inst_->available(course, period));
    assert(course_lectures_in(course, period) == 0);
    period_of_[lecture] = period;
    room_of_[lecture] = room;
    ++assigned_;

    const int np = inst_->n_periods();
    ++occupancy_[static_cast<std::size_t>(period) * inst_->n_rooms() + room];
    ++course_period_[static_cast<std::size_t>(course) * np + period];

    const int day = inst_->day_of(period);
    if (++course_day_[static_cast<std::size_t>(course) * inst_->n_days + day] == 1) {
      ++course_days_used_[course];
    }
    if (++course_room_[static_cast<std::size_t>(course) * inst_->n_rooms() + room] == 1) {
      ++course_rooms_used_[course];
    }
    for (int q : inst_->curricula_of(course)) {
      ++curriculum_period_[static_cast<std::size_t>(q) * np + period];
    }
    for (int other : inst_->conflict_neighbors(course)) {
      ++conflicting_in_period_[static_cast<std::size_t>(other) * np + period];
    }
  }

  void remove(int lecture) {
    const int period = period_of_[lecture];
    assert(period >= 0);
    const int room = room_of_[lecture];
    const int course = inst_->course_of_lecture(lecture);
    period_of_[lecture] = -1;
    room_of_[lecture] = -1;
    --assigned_;

    const int np = inst_->n_periods();
    --occupancy_[static_cast<std::size_t>(period) * inst_->n_rooms() + room];
    --course_period_[static_cast<std::size_t>(course) * np + period];

    const int day = inst_->day_of(period);
    if (--course_day_[static_cast<std::size_t>(course) * inst_->n_days + day] == 0) {
      --course_days_used_[course];
    }
    if (--course_room_[static_cast<std::size_t>(course) * inst_->n_rooms() + room] == 0) {
      --course_rooms_used_[course];
    }
    for (int q : inst_->curricula_of(course)) {
      --curriculum_period_[static_cast<std::size_t>(q) * np + period];
    }
    for (int other : inst_->conflict_neighbors(course)) {
      --conflicting_in_period_[static_cast<std::size_t>(other) * np + period];
    }
  }

  bool applicable(const Move& mv) const {
    if (mv.kind == Move::Kind::ML) {
      if (mv.lecture < 0 || mv.lecture >= inst_->total_lectures()) return false;
      if (mv.period < 0 || mv.period >= inst_->n_periods()) return false;
      if (mv.room < 0 || mv.room >= inst_->n_rooms()) return false;
      const int course = inst_->course_of_lecture(mv.lecture);
      const int p1 = period_of_[mv.lecture];
      if (mv.period == p1 && mv.room == room_of_[mv.lecture]) return false;
      if (!inst_->available(course, mv.period)) return false;
      if (mv.period != p1 && course_lectures_in(course, mv.period) != 0) return false;
      return true;
    }
    if (mv.lecture_a < 0 || mv.lecture_b < 0 || mv.lecture_a == mv.lecture_b) return false;
    if (mv.lecture_a >= inst_->total_lectures() || mv.lecture_b >= inst_->total_lectures()) {
      return false;
    }
    const int ca = inst_->course_of_lecture(mv.lecture_a);
    const int cb = inst_->course_of_lecture(mv.lecture_b);
    if (ca == cb) return false;
    const int pa = period_of_[mv.lecture_a];
    const int pb = period_of_[mv.lecture_b];
    if (!inst_->available(ca, pb) || !inst_->available(cb, pa)) return false;
    if (pa != pb &&
        (course_lectures_in(ca, pb) != 0 || course_lectures_in(cb, pa) != 0)) {
      return false;
    }
    return true;
  }

  void apply(const Move& mv) {
    if (!applicable(mv)) throw std::invalid_argument("move not applicable");
    if (mv.kind == Move::Kind::ML) {
      remove(mv.lecture);
      place(mv.lecture, mv.period, mv.room);
      return;
    }
    const int pa = period_of_[mv.lecture_a];
    const int ra = room_of_[mv.lecture_a];
    const int pb = period_of_[mv.lecture_b];
    const int rb = room_of_[mv.lecture_b];
    remove(mv.lecture_a);
    remove(mv.lecture_b);
    place(mv.lecture_a, pb, rb);
    place(mv.lecture_b, pa, ra);
  }

  /// Full invariant check (assignment complete, availability, distinct
  /// periods per course); used by tests and the solution reader.
  bool valid(std::string* why = nullptr) const {
    auto fail = [&why](const std::string& msg) {
      if (why != nullptr) *why = msg;
      return false;
    };
    if (!fully_assigned()) return fail("not all lectures assigned");
    for (int l = 0; l < inst_->total_lectures(); ++l) {
      const int course = inst_->course_of_lecture(l);
      const int p = period_of_[l];
      if (p < 0 || p >= inst_->n_periods() || room_of_[l] < 0 ||
          room_of_[l] >= inst_->n_rooms()) {
        return fail("lecture " + std::to_string(l) + " out of range");
      }
      if (!inst_->available(course, p)) {
        return fail("course " + inst_->courses[course].id + " placed in an unavailable period");
      }
    }
    for (int c = 0; c < inst_->n_courses(); ++c) {
      for (int p = 0; p < inst_->n_periods(); ++p) {
        if (course_lectures_in(c, p) > 1) {
          return fail("course " + inst_->courses[c].id + " has two lectures in one period");
        }
      }
    }
    return true;
  }

  /// Rebuilds every derived table from the raw assignment and compares;
  /// the oracle for incremental-update correctness.
  bool tables_consistent() const {
    Timetable fresh(*inst_);
    for (int l = 0; l < inst_->total_lectures(); ++l) {
      if (period_of_[l] >= 0) fresh.place(l, period_of_[l], room_of_[l]);
    }
    return fresh.occupancy_ == occupancy_ && fresh.course_period_ == course_period_ &&
           fresh.course_day_ == course_day_ && fresh.course_days_used_ == course_days_used_ &&
           fresh.course_room_ == course_room_ &&
           fresh.course_rooms_used_ == course_rooms_used_ &&
           fresh.curriculum_period_ == curriculum_period_ &&
           fresh.conflicting_in_period_ == conflicting_in_period_;
  }

  friend bool operator==(const Timetable& a, const Timetable& b) {
    return a.period_of_ == b.period_of_ && a.room_of_ == b.room_of_;
  }

 private:
  const Instance* inst_;
  std::vector<int> period_of_;
  std::vector<int> room_of_;
  std::vector<int> occupancy_;              // period x room -> lectures
  std::vector<int> course_period_;          // course x period -> lectures (0/1)
  std::vector<int> course_day_;             // course x day -> lectures
  std::vector<int> course_days_used_;       // course -> distinct days
  std::vector<int> course_room_;            // course x room -> lectures
  std::vector<int> course_rooms_used_;      // course -> distinct rooms
  std::vector<int> curriculum_period_;      // curriculum x period -> lectures
  std::vector<int> conflicting_in_period_;  // course x period -> conflicting lectures
  int assigned_;
};

/// Builds a random structurally valid timetable: every course gets a random
/// subset of its available periods (one per lecture) and random rooms.
inline Timetable random_assignment(const Instance& inst, std::uint64_t seed) {
  Rng rng(seed);
  Timetable tt(inst);
  std::vector<int> periods;
  for (int c = 0; c < inst.n_courses(); ++c) {
    const Course& course = inst.courses[c];
    periods = inst.available_periods(c);
    if (static_cast<int>(periods.size()) < course.n_lectures) {
      throw InfeasibleInstance("course " + course.id +
                               " cannot receive " + std::to_string(course.n_lectures) +
                               " distinct available periods");
    }
    shuffle(periods, rng);
    for (int k = 0; k < course.n_lectures; ++k) {
      tt.place(inst.first_lecture(c) + k, periods[k], rng.int_below(inst.n_rooms()));
    }
  }
  return tt;
}

}  // namespace cbctt

#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "cbctt/instance.hpp"
#include "cbctt/timetable.hpp"

namespace cbctt {

/// One line per lecture, `<CourseID> <RoomID> <Day> <Timeslot>`, lectures of
/// a course in period order.
inline std::string format_solution(const Instance& inst, const Timetable& tt) {
  std::ostringstream out;
  std::vector<std::pair<int, int>> placements;  // (period, room)
  for (int c = 0; c < inst.n_courses(); ++c) {
    placements.clear();
    for (int k = 0; k < inst.courses[c].n_lectures; ++k) {
      const int l = inst.first_lecture(c) + k;
      placements.emplace_back(tt.period_of(l), tt.room_of(l));
    }
    std::sort(placements.begin(), placements.end());
    for (const auto& [p, r] : placements) {
      out << inst.courses[c].id << " " << inst.rooms[r].id << " " << inst.day_of(p) << " "
          << inst.slot_of(p) << "\n";
    }
  }
  return out.str();
}

/// Reads a solution file back into a Timetable, enforcing the structural
/// rules (known ids, in-range periods, availability, distinct periods per
/// course, one line per lecture).
inline Timetable parse_solution(const Instance& inst, std::istream& in) {
  Timetable tt(inst);
  std::vector<int> seen(inst.n_courses(), 0);
  std::string course_id, room_id;
  int line = 0;
  while (in >> course_id) {
    ++line;
    int day = -1, slot = -1;
    if (!(in >> room_id >> day >> slot)) {
      throw ParseError(line, "incomplete solution line");
    }
    const int c = inst.course_index(course_id);
    if (c < 0) throw ParseError(line, "unknown course id " + course_id);
    const int r = inst.room_index(room_id);
    if (r < 0) throw ParseError(line, "unknown room id " + room_id);
    if (day < 0 || day >= inst.n_days || slot < 0 || slot >= inst.periods_per_day) {
      throw ParseError(line, "day/timeslot out of range");
    }
    const int p = inst.period(day, slot);
    if (!inst.available(c, p)) {
      throw ParseError(line, "course " + course_id + " is unavailable in day " +
                                 std::to_string(day) + " timeslot " + std::to_string(slot));
    }
    if (tt.course_lectures_in(c, p) != 0) {
      throw ParseError(line, "course " + course_id + " already has a lecture in that period");
    }
    if (seen[c] >= inst.courses[c].n_lectures) {
      throw ParseError(line, "course " + course_id + " has more lines than lectures");
    }
    tt.place(inst.first_lecture(c) + seen[c], p, r);
    ++seen[c];
  }
  if (!tt.fully_assigned()) {
    for (int c = 0; c < inst.n_courses(); ++c) {
      if (seen[c] < inst.courses[c].n_lectures) {
        throw ParseError(line, "course " + inst.courses[c].id + " has " +
                                   std::to_string(seen[c]) + " of " +
                                   std::to_string(inst.courses[c].n_lectures) + " lectures");
      }
    }
  }
  return tt;
}

inline Timetable parse_solution(const Instance& inst, const std::string& text) {
  std::istringstream in(text);
  return parse_solution(inst, in);
}

}  // namespace cbctt

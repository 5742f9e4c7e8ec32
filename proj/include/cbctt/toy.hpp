#pragma once

#include <stdexcept>
#include <string>

#include "cbctt/instance.hpp"
#include "cbctt/rng.hpp"

namespace cbctt {

/// Shape of a generated test instance. All counts are >= 1; lecture counts
/// per course are drawn in [1, max_lectures_per_course].
struct ToySpec {
  int days = 2;
  int periods_per_day = 2;
  int rooms = 2;
  int courses = 2;
  int curricula = 1;
  int max_lectures_per_course = 2;
  double unavailability_rate = 0.15;
};

/// Deterministic generator for small instances used by the test oracles and
/// the experiment harness. The result always parses its own serialization
/// and never triggers a ProvablyInfeasible finding: unavailability rows are
/// only added while the course keeps at least as many free periods as
/// lectures.
inline Instance generate_toy_instance(const ToySpec& spec, std::uint64_t seed) {
  if (spec.days < 1 || spec.periods_per_day < 1 || spec.rooms < 1 || spec.courses < 1 ||
      spec.curricula < 1 || spec.max_lectures_per_course < 1) {
    throw std::invalid_argument("toy spec: all counts must be >= 1");
  }
  if (spec.unavailability_rate < 0.0 || spec.unavailability_rate >= 1.0) {
    throw std::invalid_argument("toy spec: unavailability rate must be in [0, 1)");
  }
  const int n_periods = spec.days * spec.periods_per_day;
  if (spec.max_lectures_per_course > n_periods) {
    throw std::invalid_argument(
        "toy spec impossible: a course may need more lectures than there are periods");
  }

  Rng rng(splitmix64(seed));
  Instance inst;
  inst.name = "toy-d" + std::to_string(spec.days) + "x" + std::to_string(spec.periods_per_day) +
              "-r" + std::to_string(spec.rooms) + "-c" + std::to_string(spec.courses) + "-q" +
              std::to_string(spec.curricula) + "-s" + std::to_string(seed);
  inst.n_days = spec.days;
  inst.periods_per_day = spec.periods_per_day;

  const int n_teachers = std::max(1, (2 * spec.courses + 2) / 3);
  for (int c = 0; c < spec.courses; ++c) {
    Course course;
    course.id = "c" + std::to_string(c + 1);
    course.teacher = "t" + std::to_string(rng.int_below(n_teachers) + 1);
    course.n_lectures = 1 + rng.int_below(spec.max_lectures_per_course);
    course.min_working_days = 1 + rng.int_below(std::min(course.n_lectures, spec.days));
    course.n_students = 1 + rng.int_below(30);
    inst.courses.push_back(std::move(course));
  }
  for (int r = 0; r < spec.rooms; ++r) {
    inst.rooms.push_back({"r" + std::to_string(r + 1), 5 + rng.int_below(35)});
  }

  // Round-robin membership guarantees every course sits in a curriculum;
  // extra memberships add cross-curriculum structure.
  inst.curricula.assign(spec.curricula, {});
  for (int q = 0; q < spec.curricula; ++q) {
    inst.curricula[q].id = "q" + std::to_string(q + 1);
  }
  for (int c = 0; c < spec.courses; ++c) {
    inst.curricula[c % spec.curricula].course_indices.push_back(c);
  }
  if (spec.curricula > 1) {
    for (int c = 0; c < spec.courses; ++c) {
      if (rng.chance(0.2)) {
        const int q = rng.int_below(spec.curricula);
        auto& members = inst.curricula[q].course_indices;
        if (std::find(members.begin(), members.end(), c) == members.end()) {
          members.push_back(c);
        }
      }
    }
  }

  for (int c = 0; c < spec.courses; ++c) {
    int free_periods = n_periods;
    for (int p = 0; p < n_periods; ++p) {
      if (free_periods <= inst.courses[c].n_lectures) break;
      if (rng.chance(spec.unavailability_rate)) {
        inst.unavailabilities.push_back(
            {c, p / spec.periods_per_day, p % spec.periods_per_day});
        --free_periods;
      }
    }
  }

  inst.finalize();
  return inst;
}

}  // namespace cbctt

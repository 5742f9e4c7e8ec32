#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

#include "cbctt/instance.hpp"

namespace cbctt {

/// The seven instance descriptors the configuration predictor is trained on.
/// Percentages are in [0, 100].
struct FeatureVector {
  int lectures = 0;                     // Le
  int curricula = 0;                    // Cu
  double room_occupation = 0.0;         // RO
  double conflicts = 0.0;               // Co
  double availability = 0.0;            // Av
  double room_suitability = 0.0;        // RS
  double daily_lectures_per_curriculum = 0.0;  // DL

  static constexpr int kCount = 7;

  static const std::array<std::string, kCount>& names() {
    static const std::array<std::string, kCount> n = {"Le", "Cu", "RO", "Co",
                                                      "Av", "RS", "DL"};
    return n;
  }

  std::array<double, kCount> as_row() const {
    return {static_cast<double>(lectures),
            static_cast<double>(curricula),
            room_occupation,
            conflicts,
            availability,
            room_suitability,
            daily_lectures_per_curriculum};
  }
};

inline FeatureVector extract_features(const Instance& inst) {
  if (inst.n_rooms() == 0 || inst.n_periods() == 0) {
    throw std::invalid_argument("degenerate instance: features need rooms and periods");
  }
  FeatureVector f;
  const int nc = inst.n_courses();
  const int nr = inst.n_rooms();
  const int np = inst.n_periods();

  f.lectures = inst.total_lectures();
  f.curricula = inst.n_curricula();
  // Capped: an oversaturated instance (more lectures than room-period slots)
  // still reports a percentage.
  f.room_occupation =
      std::min(100.0, 100.0 * f.lectures / (static_cast<double>(nr) * np));

  if (nc >= 2) {
    const auto pairs = conflict_pairs(inst);
    const double all_pairs = static_cast<double>(nc) * (nc - 1) / 2.0;
    f.conflicts = 100.0 * static_cast<double>(pairs.size()) / all_pairs;
  }

  if (nc > 0) {
    f.availability = 100.0 * (1.0 - static_cast<double>(inst.unavailabilities.size()) /
                                        (static_cast<double>(nc) * np));
    double suitability_sum = 0.0;
    for (const Course& c : inst.courses) {
      int fitting = 0;
      for (const Room& r : inst.rooms) {
        if (r.capacity >= c.n_students) ++fitting;
      }
      suitability_sum += 100.0 * fitting / nr;
    }
    f.room_suitability = suitability_sum / nc;
  } else {
    f.availability = 100.0;
    f.room_suitability = 100.0;
  }

  if (inst.n_curricula() > 0) {
    double lecture_sum = 0.0;
    for (const Curriculum& q : inst.curricula) {
      for (int c : q.course_indices) lecture_sum += inst.courses[c].n_lectures;
    }
    f.daily_lectures_per_curriculum =
        lecture_sum / (static_cast<double>(inst.n_curricula()) * inst.n_days);
  }
  return f;
}

}  // namespace cbctt

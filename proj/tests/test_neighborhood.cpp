#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "cbctt/instance.hpp"
#include "cbctt/neighborhood.hpp"
#include "cbctt/rng.hpp"
#include "cbctt/timetable.hpp"
#include "cbctt/toy.hpp"

using namespace cbctt;

namespace {

Instance sampling_instance() {
  ToySpec spec;
  spec.days = 3;
  spec.periods_per_day = 4;
  spec.rooms = 3;
  spec.courses = 8;
  spec.curricula = 3;
  spec.max_lectures_per_course = 3;
  spec.unavailability_rate = 0.1;
  return generate_toy_instance(spec, 99);
}

/// Every room busy in every period: lectures = rooms x periods.
Instance saturated_instance() {
  Instance inst;
  inst.name = "saturated";
  inst.n_days = 1;
  inst.periods_per_day = 3;
  inst.courses.push_back({"a", "t1", 3, 1, 5});
  inst.courses.push_back({"b", "t2", 3, 1, 5});
  inst.rooms.push_back({"r1", 10});
  inst.rooms.push_back({"r2", 10});
  inst.finalize();
  REQUIRE_FALSE(inst.under_full_occupancy());
  return inst;
}

}  // namespace

TEST_CASE("swap-rate boundaries pin the neighborhood", "[neighborhood]") {
  const Instance inst = sampling_instance();
  Timetable tt = random_assignment(inst, 1);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    CHECK(sample_move(inst, tt, 0.0, rng).kind == Move::Kind::ML);
    CHECK(sample_move(inst, tt, 1.0, rng).kind == Move::Kind::SL);
  }
}

TEST_CASE("swap fraction tracks the configured rate", "[neighborhood]") {
  const Instance inst = sampling_instance();
  Timetable tt = random_assignment(inst, 2);
  Rng rng(17);
  const int n = 100'000;
  int swaps = 0;
  for (int i = 0; i < n; ++i) {
    if (sample_move(inst, tt, 0.43, rng).kind == Move::Kind::SL) ++swaps;
  }
  const double fraction = static_cast<double>(swaps) / n;
  CHECK(fraction > 0.42);
  CHECK(fraction < 0.44);
}

TEST_CASE("sampled moves are always applicable", "[neighborhood]") {
  const Instance inst = sampling_instance();
  Timetable tt = random_assignment(inst, 3);
  Rng rng(23);
  for (int i = 0; i < 20'000; ++i) {
    const Move mv = sample_move(inst, tt, 0.43, rng);
    REQUIRE(tt.applicable(mv));
    tt.apply(mv);
    if (i % 4000 == 0) {
      std::string why;
      INFO(why);
      REQUIRE(tt.valid(&why));
    }
  }
}

TEST_CASE("relocations respect the empty-room restriction under spare capacity",
          "[neighborhood]") {
  const Instance inst = sampling_instance();
  REQUIRE(inst.under_full_occupancy());
  Timetable tt = random_assignment(inst, 4);
  Rng rng(31);
  for (int i = 0; i < 10'000; ++i) {
    const Move mv = sample_move(inst, tt, 0.0, rng);
    REQUIRE(mv.kind == Move::Kind::ML);
    REQUIRE(tt.occupancy(mv.period, mv.room) == 0);
    tt.apply(mv);
  }
}

TEST_CASE("full occupancy lifts the empty-room restriction", "[neighborhood]") {
  const Instance inst = saturated_instance();
  Timetable tt(inst);
  // Pack everything: course a fills room 0, course b fills room 1.
  for (int k = 0; k < 3; ++k) {
    tt.place(k, k, 0);
    tt.place(3 + k, k, 1);
  }
  Rng rng(41);
  int occupied_targets = 0;
  for (int i = 0; i < 5000; ++i) {
    const Move mv = sample_move(inst, tt, 0.0, rng);
    REQUIRE(mv.kind == Move::Kind::ML);
    if (tt.occupancy(mv.period, mv.room) > 0) ++occupied_targets;
    REQUIRE(tt.applicable(mv));
  }
  CHECK(occupied_targets > 0);
}

TEST_CASE("move streams are reproducible for a fixed seed", "[neighborhood]") {
  const Instance inst = sampling_instance();
  const Timetable tt = random_assignment(inst, 6);
  std::vector<Move> first, second;
  for (int round = 0; round < 2; ++round) {
    Rng rng(77);
    auto& out = round == 0 ? first : second;
    for (int i = 0; i < 500; ++i) out.push_back(sample_move(inst, tt, 0.43, rng));
  }
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].kind == second[i].kind);
    CHECK(first[i].lecture == second[i].lecture);
    CHECK(first[i].period == second[i].period);
    CHECK(first[i].room == second[i].room);
    CHECK(first[i].lecture_a == second[i].lecture_a);
    CHECK(first[i].lecture_b == second[i].lecture_b);
  }
}

TEST_CASE("a structurally empty neighborhood is reported", "[neighborhood]") {
  // One course only: every swap needs two distinct courses.
  Instance inst;
  inst.n_days = 1;
  inst.periods_per_day = 2;
  inst.courses.push_back({"c1", "t1", 1, 1, 5});
  inst.rooms.push_back({"r1", 10});
  inst.finalize();
  Timetable tt = random_assignment(inst, 1);
  Rng rng(3);
  REQUIRE_THROWS_AS(sample_move(inst, tt, 1.0, rng), NeighborhoodExhausted);
}

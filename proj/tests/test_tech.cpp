#include <numeric>
#include <sstream>

#include "cellforge/tech.hpp"
#include "doctest.h"

using namespace cellforge;

TEST_CASE("offset enumeration per gear ratio") {
  CHECK(enumerate_offsets(45, 45) == std::vector<Nm>{0});
  CHECK(enumerate_offsets(45, 30) == std::vector<Nm>{0, 15});
  CHECK(enumerate_offsets(45, 27) == std::vector<Nm>{0, 9, 18});
}

TEST_CASE("offset enumeration size is mp3/gcd") {
  for (Nm mp1 : {20, 27, 30, 45, 60}) {
    for (Nm mp3 : {9, 15, 18, 27, 30, 45}) {
      auto offs = enumerate_offsets(mp1, mp3);
      CHECK(offs.size() == static_cast<size_t>(mp3 / std::gcd(mp1, mp3)));
      CHECK(offs.front() == 0);
      for (size_t i = 1; i < offs.size(); ++i) CHECK(offs[i - 1] < offs[i]);
    }
  }
}

TEST_CASE("total cell width") {
  CHECK(total_cell_width(270, 225, 1, 45) == 315);
  CHECK(total_cell_width(0, 0, 0, 45) == 0);
  CHECK(total_cell_width(90, 90, 2, 30) == 150);
}

TEST_CASE("M1 resource counts for a 7-CPP cell") {
  CHECK(count_m1_resources(7, default_tech(45, 0)) == 6);
  CHECK(count_m1_resources(7, default_tech(30, 0)) == 10);
  CHECK(count_m1_resources(7, default_tech(27, 0)) == 11);
  CHECK(count_m1_resources(7, default_tech(27, 9)) == 12);
  CHECK(count_m1_resources(7, default_tech(27, 18)) == 11);
}

TEST_CASE("1:1 GR with zero offset yields width-1 columns") {
  auto cfg = default_tech(45, 0);
  for (int w = 1; w <= 20; ++w) CHECK(count_m1_resources(w, cfg) == w - 1);
}

TEST_CASE("offset variants differ by at most one column") {
  for (Nm mp3 : {45, 30, 27}) {
    auto offsets = enumerate_offsets(45, mp3);
    for (int w = 1; w <= 20; ++w) {
      int lo = 1 << 20, hi = -1;
      for (Nm d : offsets) {
        int c = count_m1_resources(w, default_tech(mp3, d));
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("placement alignment against the global grid") {
  // A 3:2 GR cell with zero offset is placeable at origins that are
  // multiples of lcm(45,30); with a 15nm offset it fits at the misaligned
  // poly sites in between.
  auto zero = default_tech(30, 0);
  auto off15 = default_tech(30, 15);
  CHECK(check_placement_alignment(3, zero, 0));
  CHECK_FALSE(check_placement_alignment(2, zero, 135));
  CHECK(check_placement_alignment(2, off15, 135));
  CHECK(check_placement_alignment(2, zero, 90));
  CHECK_FALSE(check_placement_alignment(2, off15, 90));
  // Non-poly origins are never legal.
  CHECK_FALSE(check_placement_alignment(2, zero, 30));
}

TEST_CASE("alignment is periodic with lcm of the pitches") {
  auto cfg = default_tech(27, 9);
  Nm period = 45 * 27 / std::gcd<Nm>(45, 27);
  for (Nm o = 0; o < 2 * period; o += 9) {
    CHECK(check_placement_alignment(4, cfg, o) ==
          check_placement_alignment(4, cfg, o + period));
  }
}

TEST_CASE("every enumerated offset is placeable somewhere in one period") {
  for (Nm mp3 : {45, 30, 27}) {
    for (Nm d : enumerate_offsets(45, mp3)) {
      auto cfg = default_tech(mp3, d);
      Nm period = 45 * mp3 / std::gcd<Nm>(45, mp3);
      bool placeable = false;
      for (Nm o = 0; o <= period; o += 45) {
        if (check_placement_alignment(2, cfg, o)) placeable = true;
      }
      CHECK(placeable);
    }
  }
}

TEST_CASE("config round trip") {
  auto cfg = default_tech(30, 15);
  cfg.min_pin_opening = 3;
  cfg.weights.sgd = 7;
  cfg.rules.by_layer[kLayerM0].prl = {{60, 20}, {120, 40}};
  std::string text = dump_tech_config(cfg);
  std::istringstream in(text);
  auto back = parse_tech_config(in);
  CHECK(back.mp(3) == 30);
  CHECK(back.delta(3) == 15);
  CHECK(back.min_pin_opening == 3);
  CHECK(back.weights.sgd == 7);
  CHECK(back.rules.layer(kLayerM0).prl.size() == 2);
  CHECK(dump_tech_config(back) == text);
}

TEST_CASE("config validation failures") {
  CHECK_THROWS_AS(default_tech(30, 7), TechError);   // inadmissible offset
  auto cfg = default_tech(30, 0);
  cfg.pitch[4] = 60;  // mp2 != mp4
  CHECK_THROWS_AS(cfg.validate(), TechError);
  cfg = default_tech(30, 0);
  cfg.min_cut_width_cpp = 3;
  CHECK_THROWS_AS(cfg.validate(), TechError);
  std::istringstream bad("pitch.m9 = 4\n");
  CHECK_THROWS_AS(parse_tech_config(bad), TechError);
  std::istringstream bad2("rows == 4\n");
  CHECK_THROWS_AS(parse_tech_config(bad2), TechError);
}

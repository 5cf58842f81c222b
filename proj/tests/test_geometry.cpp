// Copyright 2026 The FastMap Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fastmap/geometry.hpp"
#include "fastmap/rng.hpp"
#include "support/oracles.hpp"

using namespace fastmap;

namespace {

BevGridSpec default_spec() {
  return BevGridSpec::from_resolution(BevRange{}, 0.3);  // 200 x 100
}

MapInstance open_line(std::vector<Point2> pts, MapClass cls = MapClass::Divider) {
  MapInstance inst;
  inst.cls = cls;
  inst.points = std::move(pts);
  return inst;
}

}  // namespace

TEST_CASE("world_to_grid maps corners, center and clamps the max edge") {
  const BevGridSpec spec = default_spec();
  CHECK(spec.h == 200);
  CHECK(spec.w == 100);

  CHECK(world_to_grid({-15.0, -30.0}, spec) == GridCell{0, 0});
  CHECK(world_to_grid({0.0, 0.0}, spec) == GridCell{100, 50});
  CHECK(world_to_grid({14.999, 29.999}, spec) == GridCell{199, 99});
  CHECK(world_to_grid({15.0, 30.0}, spec) == GridCell{199, 99});  // max edge clamps

  CHECK_THROWS_AS(world_to_grid({15.5, 0.0}, spec), RangeError);
}

TEST_CASE("grid_to_world returns cell centers") {
  const BevGridSpec spec = default_spec();
  const Point2 origin = grid_to_world({0, 0}, spec);
  CHECK(origin.x == doctest::Approx(-14.85));
  CHECK(origin.y == doctest::Approx(-29.85));
  const Point2 center = grid_to_world({100, 50}, spec);
  CHECK(center.x == doctest::Approx(0.15));
  CHECK(center.y == doctest::Approx(0.15));

  CHECK_THROWS_AS(grid_to_world({200, 0}, spec), IndexError);
  CHECK_THROWS_AS(grid_to_world({0, -1}, spec), IndexError);
}

TEST_CASE("grid round-trip is the identity for every cell") {
  const BevGridSpec small = BevGridSpec::from_resolution(
      BevRange{-2.0, 2.0, -2.0, 2.0}, 1.0);  // 4 x 4
  for (int r = 0; r < small.h; ++r)
    for (int c = 0; c < small.w; ++c)
      CHECK(world_to_grid(grid_to_world({r, c}, small), small) == GridCell{r, c});

  const BevGridSpec spec = default_spec();
  SplitMix64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const GridCell cell{rng.next_int(0, spec.h - 1), rng.next_int(0, spec.w - 1)};
    CHECK(world_to_grid(grid_to_world(cell, spec), spec) == cell);
  }
}

TEST_CASE("resample_polyline splits an open line uniformly") {
  const MapInstance line = open_line({{0, 0}, {0, 2}});
  const MapInstance r3 = resample_polyline(line, 3);
  REQUIRE(r3.num_points() == 3);
  CHECK(r3.points[0].x == doctest::Approx(0.0));
  CHECK(r3.points[0].y == doctest::Approx(0.0));
  CHECK(r3.points[1].y == doctest::Approx(1.0));
  CHECK(r3.points[2].y == doctest::Approx(2.0));

  const MapInstance r2 = resample_polyline(line, 2);
  CHECK(r2.points[0].y == 0.0);
  CHECK(r2.points[1].y == 2.0);
}

TEST_CASE("resample_polyline recovers the corners of a closed square") {
  MapInstance square;
  square.cls = MapClass::PedCrossing;
  square.closed = true;
  square.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  // Densify first so the resampler has to find the corners again.
  const MapInstance dense = resample_polyline(square, 16);
  const MapInstance back = resample_polyline(dense, 4);
  REQUIRE(back.num_points() == 4);

  const std::vector<Point2> oracle = testing::oracle_resample(dense, 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(back.points[j].x == doctest::Approx(oracle[j].x).epsilon(1e-12));
    CHECK(back.points[j].y == doctest::Approx(oracle[j].y).epsilon(1e-12));
  }
  // Each resampled point is one of the square's corners.
  for (const Point2& p : back.points) {
    const bool corner = (std::abs(p.x) < 1e-9 || std::abs(p.x - 1) < 1e-9) &&
                        (std::abs(p.y) < 1e-9 || std::abs(p.y - 1) < 1e-9);
    CHECK(corner);
  }
}

TEST_CASE("resample_polyline preserves arc length on length-preserving families") {
  // Straight line with uneven intermediate spacing.
  MapInstance line = open_line({{0, 0}, {0.3, 0.6}, {1.1, 2.2}, {2.0, 4.0}, {3.0, 6.0}});
  for (int m : {2, 5, 9, 33}) {
    const MapInstance r = resample_polyline(line, m);
    CHECK(arc_length(r) == doctest::Approx(arc_length(line)).epsilon(1e-9));
  }
  // A square resampled with m divisible by 4 keeps every corner (the equal
  // per-edge spacing lands on them), so the perimeter is preserved.
  MapInstance square;
  square.cls = MapClass::PedCrossing;
  square.closed = true;
  square.points = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  for (int m : {4, 8, 12}) {
    const MapInstance r = resample_polyline(square, m);
    CHECK(arc_length(r) == doctest::Approx(16.0).epsilon(1e-9));
  }
}

TEST_CASE("resample_polyline is idempotent at the same m") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const MapInstance inst = testing::random_open_instance(rng, 17, MapClass::Boundary);
    const MapInstance once = resample_polyline(inst, 8);
    const MapInstance twice = resample_polyline(once, 8);
    REQUIRE(twice.num_points() == once.num_points());
    for (int j = 0; j < 8; ++j) {
      CHECK(twice.points[j].x == once.points[j].x);
      CHECK(twice.points[j].y == once.points[j].y);
    }
  }
}

TEST_CASE("resample_polyline rejects degenerate input") {
  const MapInstance degenerate = open_line({{1, 1}, {1, 1}});
  CHECK_THROWS_AS(resample_polyline(degenerate, 4), DegenerateGeometryError);
  CHECK_THROWS_AS(resample_polyline(open_line({{0, 0}, {1, 0}}), 1), Error);
}

TEST_CASE("scene validation enforces the documented invariants") {
  Scene scene;
  scene.instances.push_back(open_line({{0, 0}, {1, 1}}));
  CHECK_NOTHROW(validate_scene(scene));

  SUBCASE("point outside range") {
    scene.instances[0].points[1] = {20.0, 0.0};
    CHECK_THROWS_AS(validate_scene(scene), RangeError);
  }
  SUBCASE("coincident consecutive points") {
    scene.instances[0].points.push_back({1.0, 1.0 + 1e-12});
    CHECK_THROWS_AS(validate_scene(scene), DegenerateGeometryError);
  }
  SUBCASE("closed flag must match the class") {
    scene.instances[0].closed = true;
    CHECK_THROWS_AS(validate_scene(scene), Error);
  }
  SUBCASE("single point is degenerate") {
    scene.instances[0].points.resize(1);
    CHECK_THROWS_AS(validate_scene(scene), DegenerateGeometryError);
  }
}

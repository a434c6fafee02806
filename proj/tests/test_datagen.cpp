#include <cmath>
#include <set>

#include "doctest.h"
#include "uncle/datagen.hpp"

using namespace uncle;

TEST_CASE("lorenz96 shape, truth structure, and boundedness") {
  Lorenz96Params p;
  p.num_vars = 20;
  p.num_steps = 250;
  p.forcing = 10.0;
  GeneratedData g = gen_lorenz96(p, 1);
  CHECK(g.data.num_vars == 20);
  CHECK(g.data.num_steps == 250);
  REQUIRE(g.truth.kind == GroundTruth::Kind::kStatic);

  for (int i = 0; i < 20; ++i) {
    int incoming = 0;
    for (int j = 0; j < 20; ++j)
      if (j != i && g.truth.static_adj.at(j, i) != 0.0) ++incoming;
    CHECK(incoming == 3);
    CHECK(g.truth.static_adj.at(i, i) == 1.0);
  }

  double max_abs = 0.0;
  for (double v : g.data.values) {
    CHECK(std::isfinite(v));
    max_abs = std::max(max_abs, std::abs(v));
  }
  CHECK(max_abs < 4.0 * p.forcing);
  CHECK(max_abs > 1.0);  // trajectory left the fixed point
}

TEST_CASE("lorenz96 rejects degenerate sizes and is seed-deterministic") {
  Lorenz96Params p;
  p.num_vars = 3;
  CHECK_THROWS_AS(gen_lorenz96(p, 0), std::invalid_argument);

  Lorenz96Params q;
  q.num_steps = 40;
  GeneratedData a = gen_lorenz96(q, 7);
  GeneratedData b = gen_lorenz96(q, 7);
  CHECK(a.data.values == b.data.values);
  GeneratedData c = gen_lorenz96(q, 8);
  CHECK(a.data.values != c.data.values);
}

TEST_CASE("tvsem segments, alternating direction, and signal strength") {
  GeneratedData g = gen_tvsem(2000, 0);
  CHECK(g.data.num_vars == 2);
  REQUIRE(g.truth.kind == GroundTruth::Kind::kDynamic);
  REQUIRE(g.truth.segments.size() == 5);
  for (std::size_t s = 0; s < 5; ++s) {
    const TruthSegment& seg = g.truth.segments[s];
    CHECK(seg.t_start == static_cast<int>(s) * 400 + 1);
    CHECK(seg.t_end == static_cast<int>(s + 1) * 400);
    if (s % 2 == 0) {
      CHECK(seg.adj.at(1, 0) == 1.0);  // Y -> X
      CHECK(seg.adj.at(0, 1) == 0.0);
    } else {
      CHECK(seg.adj.at(0, 1) == 1.0);  // X -> Y
      CHECK(seg.adj.at(1, 0) == 0.0);
    }
  }

  // Variance of X within the first segment exceeds the noise variance 0.1.
  double mean = 0.0;
  for (int t = 0; t < 400; ++t) mean += g.data.at(0, t);
  mean /= 400;
  double var = 0.0;
  for (int t = 0; t < 400; ++t) var += (g.data.at(0, t) - mean) * (g.data.at(0, t) - mean);
  var /= 400;
  CHECK(var > 0.1);
}

TEST_CASE("tvsem segment boundaries tile an uneven T") {
  GeneratedData g = gen_tvsem(1000, 3);
  REQUIRE(g.truth.segments.size() == 3);
  CHECK(g.truth.segments[2].t_start == 801);
  CHECK(g.truth.segments[2].t_end == 1000);
  int covered = 0;
  for (const TruthSegment& s : g.truth.segments) covered += s.t_end - s.t_start + 1;
  CHECK(covered == 1000);
}

TEST_CASE("nc8 truth edges and sinusoid-driven x") {
  GeneratedData g = gen_nc8(2000, 0, 5);
  CHECK(g.data.num_vars == 8);
  REQUIRE(g.truth.kind == GroundTruth::Kind::kStatic);

  // Variable order: x y z w a b c o.
  const int x = 0, y = 1, z = 2, w = 3, a = 4, b = 5, c = 6, o = 7;
  std::set<std::pair<int, int>> expected = {{x, y}, {x, z}, {z, w}, {a, b},
                                            {a, c}, {x, c}, {x, o}, {a, o}};
  int off_diag = 0;
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) {
      if (i == j) continue;
      if (g.truth.static_adj.at(j, i) != 0.0) {
        ++off_diag;
        CHECK(expected.count({j, i}) == 1);
      }
    }
  CHECK(off_diag == 8);

  // x is its driving sinusoid plus 0.1-scaled unit noise; the mean absolute
  // deviation from the closed form must look like that noise, not like a
  // mis-transcribed equation.
  const double pi = 3.14159265358979323846;
  double mad = 0.0;
  for (int t = 1; t <= 2000; ++t) {
    const double drive = 0.45 * std::sin(t / (4.0 * pi)) + 0.45 * std::sin(t / (9.0 * pi)) +
                         0.25 * std::sin(t / (3.0 * pi));
    mad += std::abs(g.data.at(x, t - 1) - drive);
  }
  mad /= 2000;
  CHECK(mad < 0.2);
  CHECK(mad > 0.01);
}

TEST_CASE("nc8 t0 shifts the trajectory deterministically") {
  GeneratedData a = gen_nc8(100, 0, 9);
  GeneratedData b = gen_nc8(100, 0, 9);
  CHECK(a.data.values == b.data.values);
  GeneratedData c = gen_nc8(100, 100, 9);
  CHECK(a.data.values != c.data.values);
  CHECK(a.truth.static_adj.entries == c.truth.static_adj.entries);
}

TEST_CASE("nd8 alternating segments keep z/w/c/o edges fixed") {
  GeneratedData g = gen_nd8(2000, 2);
  REQUIRE(g.truth.kind == GroundTruth::Kind::kDynamic);
  REQUIRE(g.truth.segments.size() == 4);

  const int x = 0, y = 1, z = 2, w = 3, a = 4, b = 5, c = 6, o = 7;
  for (std::size_t s = 0; s < 4; ++s) {
    const Adjacency& adj = g.truth.segments[s].adj;
    CHECK(g.truth.segments[s].t_start == static_cast<int>(s) * 500 + 1);
    CHECK(g.truth.segments[s].t_end == static_cast<int>(s + 1) * 500);
    // constant part
    CHECK(adj.at(x, z) == 1.0);
    CHECK(adj.at(z, w) == 1.0);
    CHECK(adj.at(a, c) == 1.0);
    CHECK(adj.at(x, c) == 1.0);
    CHECK(adj.at(x, o) == 1.0);
    CHECK(adj.at(a, o) == 1.0);
    // reversing part
    if (s % 2 == 0) {
      CHECK(adj.at(x, y) == 1.0);
      CHECK(adj.at(a, b) == 1.0);
      CHECK(adj.at(y, x) == 0.0);
      CHECK(adj.at(b, a) == 0.0);
    } else {
      CHECK(adj.at(y, x) == 1.0);
      CHECK(adj.at(b, a) == 1.0);
      CHECK(adj.at(x, y) == 0.0);
      CHECK(adj.at(a, b) == 0.0);
    }
  }
  for (double v : g.data.values) CHECK(std::isfinite(v));
}

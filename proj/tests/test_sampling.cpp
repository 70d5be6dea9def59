#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "poropinn/errors.hpp"
#include "poropinn/sampling.hpp"

using namespace poropinn;

TEST(Grid, CoordinatesAreExactAtEnds) {
  EXPECT_EQ(grid_coordinate(0, 50), 0.0);
  EXPECT_EQ(grid_coordinate(49, 50), 1.0);
  EXPECT_DOUBLE_EQ(grid_coordinate(1, 5), 0.25);
}

TEST(Grid, DefaultCounts) {
  const GridSpec gs;
  const SolutionParams sp;
  EXPECT_EQ(make_grid(gs).size(), 125000u);
  const auto ic = extract_ic(gs, sp);
  const auto bc = extract_bc(gs, sp);
  EXPECT_EQ(ic.size(), 2500u);
  EXPECT_EQ(bc.size(), 9800u);
  EXPECT_EQ(ic.size() + bc.size(), 12300u);
}

TEST(Grid, OrderingIsTimeMajor) {
  const auto g = make_grid({3, 4, 2});
  ASSERT_EQ(g.size(), 24u);
  EXPECT_EQ(g[1].x, 0.5);
  EXPECT_EQ(g[3].z, grid_coordinate(1, 4));
  EXPECT_EQ(g[12].t, 1.0);
}

TEST(Grid, TooSmallIsRejected) {
  EXPECT_THROW(validate(GridSpec{1, 5, 5}), ConfigError);
  EXPECT_THROW(make_grid({5, 5, 1}), ConfigError);
}

TEST(Grid, SetsCarryAnalyticTargetsOnTheirFaces) {
  const GridSpec gs{6, 7, 5};
  const SolutionParams sp;
  const auto ic = extract_ic(gs, sp);
  for (std::size_t i = 0; i < ic.size(); ++i) {
    EXPECT_EQ(ic.points[i].t, 0.0);
    EXPECT_EQ(ic.targets[i], analytic_solution(ic.points[i], sp));
  }
  const auto bc = extract_bc(gs, sp);
  EXPECT_EQ(bc.size(), 5u * (2u * 6u + 2u * 7u - 4u));
  for (std::size_t i = 0; i < bc.size(); ++i) {
    const auto& q = bc.points[i];
    EXPECT_TRUE(q.x == 0.0 || q.x == 1.0 || q.z == 0.0 || q.z == 1.0);
    EXPECT_EQ(bc.targets[i], analytic_solution(q, sp));
  }
}

TEST(Lhs, OneSamplePerStratumOnEveryAxis) {
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    const Box box = Box::time_slab(0.2, 0.3);
    const auto s = lhs_sample(n, box, 42);
    ASSERT_EQ(s.size(), n);
    for (int a = 0; a < 3; ++a) {
      std::vector<int> hits(n, 0);
      for (const auto& q : s.points) {
        EXPECT_GE(q[a], box.axes[a].lo);
        EXPECT_LT(q[a], box.axes[a].hi);
        ++hits[lhs_stratum(q[a], box.axes[a], n)];
      }
      EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; })) << "n=" << n << " axis " << a;
    }
  }
}

TEST(Lhs, SeedsReproduceAndDiffer) {
  const auto a = lhs_sample(100, Box::unit(), 5);
  const auto b = lhs_sample(100, Box::unit(), 5);
  const auto c = lhs_sample(100, Box::unit(), 6);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, c.points);
}

TEST(Lhs, CenteredJitterSitsOnMidpoints) {
  const auto s = lhs_sample(4, Box::unit(), 1, LhsJitter::kCentered);
  std::set<double> xs;
  for (const auto& q : s.points) xs.insert(q.x);
  EXPECT_EQ(xs, (std::set<double>{0.125, 0.375, 0.625, 0.875}));
}

TEST(Lhs, ZeroSamplesRejected) { EXPECT_THROW(lhs_sample(0, Box::unit(), 1), UsageError); }

TEST(Schedule, LevelOwnership) {
  EXPECT_EQ(interval_of_level(0, 50, 10), 0);
  EXPECT_EQ(interval_of_level(49, 50, 10), 9);
  // t = 5/50 = 0.1 sits on an edge and stays in the earlier interval.
  EXPECT_EQ(interval_of_level(5, 51, 10), 0);
  EXPECT_EQ(interval_of_level(6, 51, 10), 1);
}

TEST(Schedule, DefaultCountsPerInterval) {
  const GridSpec gs;
  const auto sch = build_schedule(gs, {}, 10, 100, CurriculumMode::kIncremental, 1000);
  ASSERT_EQ(sch.per_interval_data.size(), 10u);
  std::size_t total = 0;
  for (int i = 0; i < 10; ++i) {
    const std::size_t bc = sch.per_interval_data[i].size() - (i == 0 ? 2500u : 0u);
    EXPECT_EQ(bc, 980u) << "interval " << i;
    EXPECT_EQ(sch.per_interval_colloc[i].size(), 100u);
    total += sch.per_interval_data[i].size();
  }
  EXPECT_EQ(total, 12300u);
}

TEST(Schedule, IcSubsample) {
  ScheduleOptions opt;
  opt.ic_subsample = 250;
  const auto sch = build_schedule(GridSpec{}, {}, 10, 100, CurriculumMode::kIncremental, 3, opt);
  EXPECT_EQ(sch.per_interval_data[0].size(), 250u + 980u);
  std::size_t at_zero = 0;
  for (const auto& q : sch.per_interval_data[0].points) at_zero += q.t == 0.0;
  EXPECT_EQ(at_zero, 250u + 196u);
}

TEST(Schedule, CollocationStaysInsideItsSlab) {
  const auto sch = build_schedule(GridSpec{20, 20, 20}, {}, 4, 30, CurriculumMode::kIncremental, 9);
  for (int i = 0; i < 4; ++i) {
    const auto& c = sch.per_interval_colloc[i];
    for (const auto& q : c.points) {
      EXPECT_GE(q.t, sch.edges[i]);
      EXPECT_LE(q.t, sch.edges[i + 1]);
    }
    EXPECT_EQ(c.points, lhs_sample(30, Box::time_slab(sch.edges[i], sch.edges[i + 1]), 9 + i).points);
  }
}

TEST(Schedule, IntervalsPartitionTheData) {
  const GridSpec gs{8, 9, 25};
  const SolutionParams sp;
  const auto sch = build_schedule(gs, sp, 10, 5, CurriculumMode::kIncremental, 1);
  LabeledSet all;
  for (const auto& d : sch.per_interval_data) all.append(d);
  auto expected = extract_ic(gs, sp);
  expected.append(extract_bc(gs, sp));
  ASSERT_EQ(all.size(), expected.size());
  EXPECT_EQ(all.points, expected.points);
  for (int i = 0; i < 10; ++i) {
    for (const auto& q : sch.per_interval_data[i].points) {
      if (q.t == 0.0) continue;
      EXPECT_GT(q.t, sch.edges[i] - 1e-12);
      EXPECT_LE(q.t, sch.edges[i + 1] + 1e-12);
    }
  }
}

TEST(Schedule, CumulativeStagesAreUnions) {
  const auto inc = build_schedule(GridSpec{6, 6, 11}, {}, 5, 4, CurriculumMode::kIncremental, 2);
  auto cum = inc;
  cum.mode = CurriculumMode::kCumulative;
  std::size_t running = 0, colloc = 0;
  for (int i = 0; i < 5; ++i) {
    running += inc.stage_data(i).size();
    colloc += inc.stage_colloc(i).size();
    EXPECT_EQ(cum.stage_data(i).size(), running);
    EXPECT_EQ(cum.stage_colloc(i).size(), colloc);
  }
}

TEST(Schedule, RejectsTooManyIntervals) {
  EXPECT_THROW(build_schedule(GridSpec{5, 5, 5}, {}, 5, 10, CurriculumMode::kIncremental, 0), ConfigError);
  EXPECT_NO_THROW(build_schedule(GridSpec{5, 5, 5}, {}, 4, 10, CurriculumMode::kIncremental, 0));
}

TEST(Csv, HeadersAndRowCounts) {
  std::ostringstream a, b;
  write_csv(a, extract_ic(GridSpec{3, 3, 3}, {}));
  write_csv(b, lhs_sample(4, Box::unit(), 0));
  const std::string text = a.str();
  EXPECT_EQ(text.substr(0, 12), "x,z,t,u,v,p\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
  EXPECT_EQ(b.str().substr(0, 6), "x,z,t\n");
}

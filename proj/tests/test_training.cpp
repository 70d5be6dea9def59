#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poropinn/errors.hpp"
#include "poropinn/gradcheck.hpp"
#include "poropinn/training.hpp"

using namespace poropinn;

namespace {

LabeledSet labeled(const std::vector<SpacetimePoint>& pts, const SolutionParams& sp) {
  LabeledSet s;
  for (const auto& q : pts) {
    s.points.push_back(q);
    s.targets.push_back(analytic_solution(q, sp));
  }
  return s;
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.grid = {6, 6, 11};
  cfg.net.hidden_layers = 2;
  cfg.net.hidden_units = 8;
  cfg.epochs = 4;
  cfg.batch_size = 32;
  cfg.colloc_total = 40;
  cfg.record_wall_clock = false;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Loss, DataLossMatchesOracle) {
  const SolutionParams sp;
  const MlpParams p = init_params(LayerSpec{}, 4);
  const auto set = labeled(oracle::random_points(25, 1), sp);
  double su = 0, sv = 0, sq = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto y = oracle::network_value(p, set.points[i]);
    const auto want = oracle::manufactured(set.points[i].x, set.points[i].z, set.points[i].t, sp);
    su += (y[0] - want[0]) * (y[0] - want[0]);
    sv += (y[1] - want[1]) * (y[1] - want[1]);
    sq += (y[2] - want[2]) * (y[2] - want[2]);
  }
  const auto d = data_loss(p, DataBatch::of(set));
  EXPECT_NEAR(d.mse_u, su / 25, 1e-14);
  EXPECT_NEAR(d.mse_v, sv / 25, 1e-14);
  EXPECT_NEAR(d.mse_p, sq / 25, 1e-14);
}

TEST(Loss, PhysicsLossMatchesOracle) {
  const SolutionParams sp;
  const double eta = sp.eta;
  const MlpParams p = init_params(LayerSpec{}, 5);
  const auto pts = oracle::random_points(20, 2);
  double sf = 0, sg = 0, sh = 0;
  for (const auto& q : pts) {
    const auto j = oracle::network_jets(p, q);
    const auto& u = j[0];
    const auto& v = j[1];
    const auto& pr = j[2];
    const double f = (eta + 1) * u.h[0][0] + u.h[1][1] + eta * v.h[0][1] + (eta + 1) * pr.g[0];
    const double g = v.h[0][0] + (eta + 1) * v.h[1][1] + eta * u.h[0][1] + (eta + 1) * pr.g[1];
    const double h = u.h[2][0] + v.h[2][1] - pr.h[0][0] - pr.h[1][1];
    sf += std::pow(f - source_ru(q, sp), 2);
    sg += std::pow(g - source_rv(q, sp), 2);
    sh += std::pow(h - source_rp(q, sp), 2);
  }
  const auto ph = physics_loss(p, pts, sp);
  EXPECT_NEAR(ph.mse_f, sf / 20, 1e-10 * (1 + sf));
  EXPECT_NEAR(ph.mse_g, sg / 20, 1e-10 * (1 + sg));
  EXPECT_NEAR(ph.mse_h, sh / 20, 1e-10 * (1 + sh));
}

TEST(Loss, EmptyInputsRejected) {
  const MlpParams p = init_params(LayerSpec{}, 1);
  const auto pts = oracle::random_points(2, 1);
  const auto set = labeled(pts, {});
  EXPECT_THROW(data_loss(p, DataBatch{}), UsageError);
  EXPECT_THROW(physics_loss(p, {}, {}), UsageError);
  EXPECT_THROW(total_loss(p, DataBatch::of(set), {}, {}), UsageError);
  EXPECT_NO_THROW(batch_loss(p, DataBatch::of(set), {}, {}));
}

TEST(Loss, BreakdownIsAdditiveAndMatchesGradientPath) {
  const SolutionParams sp;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MlpParams p = init_params(LayerSpec{}, seed);
    const auto set = labeled(oracle::random_points(16, seed + 10), sp);
    const auto colloc = oracle::random_points(16, seed + 20);
    const auto l = total_loss(p, DataBatch::of(set), colloc, sp);
    EXPECT_EQ(l.data, l.mse_u + l.mse_v + l.mse_p);
    EXPECT_EQ(l.physics, l.mse_f + l.mse_g + l.mse_h);
    EXPECT_EQ(l.total, l.data + l.physics);
    const auto lg = loss_and_gradient(p, DataBatch::of(set), colloc, sp);
    EXPECT_EQ(lg.losses, l);
  }
}

TEST(Loss, PerfectNetworkOnZeroFieldHasZeroDataLoss) {
  MlpParams p(LayerSpec{});
  LabeledSet s;
  s.points = oracle::random_points(5, 3);
  s.targets.assign(5, FieldValues{});
  EXPECT_EQ(data_loss(p, DataBatch::of(s)).mse_u, 0.0);
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  const SolutionParams sp;
  const MlpParams p = init_params(LayerSpec{}, 9);
  const auto set = labeled(oracle::random_points(16, 30), sp);
  const auto colloc = oracle::random_points(16, 31);
  const auto probe = check_param_gradient(p, DataBatch::of(set), colloc, sp);
  EXPECT_EQ(probe.compared > 0, true);
  EXPECT_LE(probe.worst, 1e-5) << probe.where;
}

TEST(Adam, FirstStepByHand) {
  LayerSpec s{1, 0, 1, 1, Activation::kTanh, Activation::kLinear};
  MlpParams p(s);
  ASSERT_EQ(p.size(), 2u);
  p.values()[0] = 0.5;
  ParamGradient g(s);
  g.values()[0] = 1.0;
  AdamState st(s);
  adam_step(p, g, st, 1e-3);
  EXPECT_EQ(st.step_count, 1u);
  EXPECT_NEAR(p.values()[0], 0.5 - 0.001 / (1 + 1e-8), 1e-15);
  EXPECT_EQ(p.values()[1], 0.0);
}

TEST(Adam, TwoStepsMatchRecurrence) {
  LayerSpec s{1, 0, 1, 1, Activation::kTanh, Activation::kLinear};
  MlpParams p(s);
  ParamGradient g(s);
  g.values()[0] = 0.3;
  g.values()[1] = -2.0;
  AdamState st(s);
  adam_step(p, g, st, 0.01);
  adam_step(p, g, st, 0.01);
  for (int i = 0; i < 2; ++i) {
    const double gi = g.values()[i];
    double m = 0, v = 0, th = 0;
    for (int k = 1; k <= 2; ++k) {
      m = 0.9 * m + 0.1 * gi;
      v = 0.999 * v + 0.001 * gi * gi;
      th -= 0.01 * (m / (1 - std::pow(0.9, k))) / (std::sqrt(v / (1 - std::pow(0.999, k))) + 1e-8);
    }
    EXPECT_NEAR(p.values()[i], th, 1e-15);
  }
}

TEST(Adam, ZeroGradientLeavesParamsAndDecaysMoments) {
  const LayerSpec s;
  MlpParams p = init_params(s, 1);
  const MlpParams before = p;
  AdamState st(s);
  st.first_moment.values()[0] = 1.0;
  adam_step(p, ParamGradient(s), st, 1e-3);
  EXPECT_EQ(st.first_moment.values()[0], 0.9);
  MlpParams q = before;
  q.values()[0] = p.values()[0];
  EXPECT_EQ(p, q);
}

TEST(Adam, ShapeMismatchIsUsageError) {
  MlpParams p(LayerSpec{});
  LayerSpec other;
  other.hidden_units = 4;
  AdamState st(LayerSpec{});
  EXPECT_THROW(adam_step(p, ParamGradient(other), st, 1e-3), UsageError);
}

TEST(Train, ZeroEpochsReturnsInitialParams) {
  auto cfg = tiny_config();
  cfg.epochs = 0;
  const auto r = train_standard(cfg);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.params, init_params(cfg.net, cfg.seed));
}

TEST(Train, LogHasOneRecordPerEpochAndIsDeterministic) {
  const auto cfg = tiny_config();
  std::vector<int> seen;
  const auto a = train_standard(cfg, [&](const TrainingLogRecord& r) { seen.push_back(r.epoch); });
  const auto b = train_standard(cfg);
  ASSERT_EQ(a.log.size(), 4u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.adam, b.adam);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(format_log_row(a.log[i]), format_log_row(b.log[i]));
    const auto& l = a.log[i].losses;
    EXPECT_EQ(l.total, l.data + l.physics);
    EXPECT_FALSE(a.log[i].interval.has_value());
  }
  // 6*6 + 11*(4*6-4) = 256 points in batches of 32: 8 steps per epoch.
  EXPECT_EQ(a.adam.step_count, 32u);
  for (auto n : a.residual_evals_per_epoch) EXPECT_EQ(n, 40u);
}

TEST(Train, SeedChangesTrajectory) {
  auto cfg = tiny_config();
  const auto a = train_standard(cfg);
  cfg.seed = 4;
  EXPECT_FALSE(a.params == train_standard(cfg).params);
}

TEST(Train, LossDecreasesOnSmallProblem) {
  auto cfg = tiny_config();
  cfg.epochs = 60;
  const auto r = train_standard(cfg);
  EXPECT_LT(r.log.back().losses.total, 0.5 * r.log.front().losses.total);
}

TEST(Train, CurriculumLogsIntervalsInOrder) {
  auto cfg = tiny_config();
  cfg.curriculum = CurriculumConfig{5, 3, CurriculumMode::kIncremental, 0};
  const auto r = train_curriculum(cfg);
  ASSERT_EQ(r.log.size(), 15u);
  for (std::size_t i = 0; i < r.log.size(); ++i) {
    EXPECT_EQ(r.log[i].epoch, static_cast<int>(i) + 1);
    EXPECT_EQ(*r.log[i].interval, static_cast<int>(i / 3));
  }
  for (auto n : r.residual_evals_per_epoch) EXPECT_EQ(n, 8u);
}

TEST(Train, SingleIntervalCurriculumEqualsStandard) {
  auto cfg = tiny_config();
  const auto std_run = train_standard(cfg);
  cfg.curriculum = CurriculumConfig{1, cfg.epochs, CurriculumMode::kIncremental, 0};
  const auto cur_run = train_curriculum(cfg);
  EXPECT_EQ(std_run.params, cur_run.params);
  ASSERT_EQ(std_run.log.size(), cur_run.log.size());
  for (std::size_t i = 0; i < std_run.log.size(); ++i) EXPECT_EQ(std_run.log[i].losses, cur_run.log[i].losses);
}

TEST(Train, ConfigErrorsBeforeTraining) {
  auto cfg = tiny_config();
  cfg.batch_size = 0;
  EXPECT_THROW(train_standard(cfg), ConfigError);
  cfg = tiny_config();
  cfg.curriculum = CurriculumConfig{7, 1, CurriculumMode::kIncremental, 0};
  EXPECT_THROW(train_curriculum(cfg), ConfigError);  // 40 % 7 != 0
  cfg.curriculum = CurriculumConfig{20, 1, CurriculumMode::kIncremental, 0};
  cfg.colloc_total = 40;
  EXPECT_THROW(train_curriculum(cfg), ConfigError);  // more intervals than time steps
  EXPECT_THROW(train_standard(cfg), ConfigError);
}

TEST(Train, BlowUpIsNumericError) {
  auto cfg = tiny_config();
  cfg.learning_rate = 1e300;
  std::size_t logged = 0;
  EXPECT_THROW(train_standard(cfg, [&](const TrainingLogRecord&) { ++logged; }), NumericError);
}

TEST(Train, GradcheckModePassesOnHealthyRun) {
  auto cfg = tiny_config();
  cfg.gradcheck_steps = 3;
  EXPECT_NO_THROW(train_standard(cfg));
}

TEST(Checkpoint, RoundTripIsBitExact) {
  auto cfg = tiny_config();
  const auto r = train_standard(cfg);
  std::stringstream ss;
  write_checkpoint(ss, r.params, &r.adam);
  const Checkpoint c = read_checkpoint(ss);
  EXPECT_EQ(c.params, r.params);
  ASSERT_TRUE(c.adam.has_value());
  EXPECT_EQ(*c.adam, r.adam);
  for (const auto& q : oracle::random_points(100, 8)) EXPECT_EQ(forward(c.params, q), forward(r.params, q));
}

TEST(Checkpoint, WithoutOptimizerState) {
  const MlpParams p = init_params(LayerSpec{}, 3);
  std::stringstream ss;
  write_checkpoint(ss, p, nullptr);
  const auto c = read_checkpoint(ss);
  EXPECT_EQ(c.params, p);
  EXPECT_FALSE(c.adam.has_value());
}

TEST(Checkpoint, TruncatedFileIsParseError) {
  const MlpParams p = init_params(LayerSpec{}, 3);
  std::stringstream full;
  write_checkpoint(full, p, nullptr);
  const std::string text = full.str();
  std::stringstream cut(text.substr(0, text.size() / 2));
  EXPECT_THROW(read_checkpoint(cut), ParseError);
}

TEST(Checkpoint, VersionTwoIsRejected) {
  const MlpParams p = init_params(LayerSpec{}, 3);
  std::stringstream full;
  write_checkpoint(full, p, nullptr);
  std::string text = full.str();
  text.replace(text.find("v1"), 2, "v2");
  std::stringstream ss(text);
  try {
    read_checkpoint(ss);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported checkpoint version"), std::string::npos);
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(Checkpoint, GarbageNamesTheLine) {
  const MlpParams p = init_params(LayerSpec{}, 3);
  std::stringstream full;
  write_checkpoint(full, p, nullptr);
  std::string text = full.str();
  const auto pos = text.find('\n', text.find("layer 1"));
  text.replace(pos + 1, 3, "abc");
  std::stringstream ss(text);
  EXPECT_THROW(read_checkpoint(ss), ParseError);
}

namespace {

double moving_average(const std::vector<TrainingLogRecord>& log, std::size_t end, std::size_t window) {
  double acc = 0.0;
  for (std::size_t i = end - window; i < end; ++i) acc += log[i].losses.total;
  return acc / static_cast<double>(window);
}

}  // namespace

TEST(TrainDesk, StandardLossDropsTwoOrdersWithDownwardTrend) {
  TrainConfig cfg;
  cfg.grid = {20, 20, 20};
  cfg.epochs = 500;
  cfg.colloc_total = 500;
  cfg.record_wall_clock = false;
  const auto r = train_standard(cfg);
  ASSERT_EQ(r.log.size(), 500u);
  EXPECT_LT(r.log.back().losses.total, 0.01 * r.log.front().losses.total);
  EXPECT_LT(moving_average(r.log, 500, 50), moving_average(r.log, 50, 50));
}

TEST(TrainDesk, CurriculumDownwardTrend) {
  TrainConfig cfg;
  cfg.grid = {20, 20, 20};
  cfg.colloc_total = 500;
  cfg.record_wall_clock = false;
  cfg.curriculum = CurriculumConfig{10, 50, CurriculumMode::kIncremental, 0};
  const auto r = train_curriculum(cfg);
  ASSERT_EQ(r.log.size(), 500u);
  EXPECT_LT(moving_average(r.log, 500, 50), moving_average(r.log, 50, 50));
}

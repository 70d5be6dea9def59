#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poropinn/errors.hpp"
#include "poropinn/poroelastic_pde.hpp"

using namespace poropinn;

TEST(Pde, AnalyticValuesByHand) {
  const SolutionParams sp;
  const auto f = analytic_solution({1.0, 1.0, 1.0}, sp);
  EXPECT_NEAR(f.u, (1 - std::exp(-0.5)) * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(f.u, 0.144749, 1e-6);
  EXPECT_NEAR(f.v, 0.318092, 1e-6);
  EXPECT_NEAR(f.p, 0.0, 1e-15);
  EXPECT_NEAR(analytic_solution({0.3, 0.5, 0.5}, sp).p, 0.75 * std::exp(-0.75), 1e-15);
  EXPECT_NEAR(analytic_solution({0.3, 0.5, 0.5}, sp).p, 0.35427, 1e-5);
}

TEST(Pde, InitialStateIsDisplacementFree) {
  const SolutionParams sp;
  for (const auto& q : oracle::random_points(20, 2)) {
    const auto f = analytic_solution({q.x, q.z, 0.0}, sp);
    EXPECT_EQ(f.u, 0.0);
    EXPECT_EQ(f.v, 0.0);
    EXPECT_NEAR(f.p, 3 * q.z * (1 - q.z), 1e-15);
  }
}

TEST(Pde, AnalyticMatchesTypedOutClosedForm) {
  SolutionParams sp{0.7, 1.3, 0.4, 2.1, 0.9, 3.0};
  for (const auto& q : oracle::random_points(30, 5)) {
    const auto want = oracle::manufactured(q.x, q.z, q.t, sp);
    const auto got = analytic_solution(q, sp);
    for (int f = 0; f < 3; ++f) EXPECT_NEAR(got[f], want[f], 1e-15);
  }
}

TEST(Pde, AnalyticBundleMatchesFiniteDifferences) {
  const SolutionParams sp;
  for (const auto& q : oracle::random_points(20, 6)) {
    const DerivBundle b = analytic_bundle(q, sp);
    auto at = [&](double dx, double dz, double dt) { return oracle::manufactured(q.x + dx, q.z + dz, q.t + dt, sp); };
    auto step = [](int a, double h) {
      std::array<double, 3> d{};
      d[a] = h;
      return d;
    };
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-5;
      const auto dj = step(j, h);
      const auto up = at(dj[0], dj[1], dj[2]);
      const auto dn = at(-dj[0], -dj[1], -dj[2]);
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(b.jacobian[i][j], (up[i] - dn[i]) / (2 * h), 1e-8);
      for (int k = 0; k < 3; ++k) {
        const double g = 1e-4;
        const auto a = step(j, g), c = step(k, g);
        const auto pp = at(a[0] + c[0], a[1] + c[1], a[2] + c[2]);
        const auto pm = at(a[0] - c[0], a[1] - c[1], a[2] - c[2]);
        const auto mp = at(-a[0] + c[0], -a[1] + c[1], -a[2] + c[2]);
        const auto mm = at(-a[0] - c[0], -a[1] - c[1], -a[2] - c[2]);
        for (int i = 0; i < 3; ++i) {
          EXPECT_NEAR(b.hessians[i][j][k], (pp[i] - pm[i] - mp[i] + mm[i]) / (4 * g * g), 1e-6);
        }
      }
    }
  }
}

TEST(Pde, ResidualFAtOriginEdgeByHand) {
  // At (1, 0, 1) only u_zz survives: -alpha^2 x t e^{-delta t}.
  const SolutionParams sp;
  const DerivBundle b = analytic_bundle({1.0, 0.0, 1.0}, sp);
  EXPECT_NEAR(residual_f(b, sp.eta), -0.25 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(residual_f(b, sp.eta), -0.0919699, 1e-7);
}

TEST(Pde, SourceRpAtInitialTime) {
  // t = 0: u_tx = 1 - e^{-alpha z}, v_tz = 0, -p_zz = 6.
  const SolutionParams sp;
  for (double z : {0.0, 0.25, 0.8, 1.0}) {
    EXPECT_NEAR(source_rp({0.4, z, 0.0}, sp), 7.0 - std::exp(-0.5 * z), 1e-14);
  }
}

TEST(Pde, ManufacturedIdentityHolds) {
  for (const SolutionParams& sp : {SolutionParams{}, SolutionParams{1.1, 0.6, 2.0, 0.3, 0.8, 1.7}}) {
    for (const auto& q : oracle::random_points(1000, 77)) {
      const DerivBundle b = analytic_bundle(q, sp);
      EXPECT_NEAR(residual_f(b, sp.eta), source_ru(q, sp), 1e-10);
      EXPECT_NEAR(residual_g(b, sp.eta), source_rv(q, sp), 1e-10);
      EXPECT_NEAR(residual_h(b), source_rp(q, sp), 1e-10);
    }
  }
}

TEST(Pde, ResidualsReadTheRightEntries) {
  DerivBundle b;
  b.jacobian[kP][kX] = 1.0;
  b.jacobian[kP][kZ] = 2.0;
  b.hessians[kU][kX][kX] = 3.0;
  b.hessians[kU][kZ][kZ] = 5.0;
  b.hessians[kV][kX][kZ] = b.hessians[kV][kZ][kX] = 7.0;
  b.hessians[kU][kX][kZ] = b.hessians[kU][kZ][kX] = 11.0;
  b.hessians[kV][kX][kX] = 13.0;
  b.hessians[kV][kZ][kZ] = 17.0;
  b.hessians[kU][kT][kX] = b.hessians[kU][kX][kT] = 19.0;
  b.hessians[kV][kT][kZ] = b.hessians[kV][kZ][kT] = 23.0;
  b.hessians[kP][kX][kX] = 29.0;
  b.hessians[kP][kZ][kZ] = 31.0;
  const double eta = 2.0;
  EXPECT_EQ(residual_f(b, eta), 3 * 3.0 + 5.0 + 2 * 7.0 + 3 * 1.0);
  EXPECT_EQ(residual_g(b, eta), 13.0 + 3 * 17.0 + 2 * 11.0 + 3 * 2.0);
  EXPECT_EQ(residual_h(b), 19.0 + 23.0 - 29.0 - 31.0);
}

TEST(Pde, EtaFromLame) {
  EXPECT_DOUBLE_EQ(eta_from_lame(1.5, 1.0), 2.5);
  EXPECT_THROW(eta_from_lame(1.0, 0.0), ParameterError);
}

TEST(Pde, ScalingRoundTrip) {
  MaterialParams mat{2.0, 1.5, 1e-3, 9.81, 10.0};
  const SpacetimePoint q{3.0, 7.0, 100.0};
  const FieldValues f{0.02, -0.01, 5000.0};
  const auto nd = nondimensionalize(q, f, mat);
  EXPECT_DOUBLE_EQ(nd.point.x, 0.3);
  EXPECT_DOUBLE_EQ(nd.fields.p, 5000.0 / 5.0);
  EXPECT_DOUBLE_EQ(nd.point.t, 5.0 * 1e-3 / (9.81 * 100.0) * 100.0);
  const auto back = redimensionalize(nd.point, nd.fields, mat);
  EXPECT_NEAR(back.point.t, q.t, 1e-12);
  EXPECT_NEAR(back.point.z, q.z, 1e-15);
  EXPECT_NEAR(back.fields.u, f.u, 1e-17);
  EXPECT_NEAR(back.fields.p, f.p, 1e-10);
}

TEST(Pde, ValidateRejectsBadParameters) {
  SolutionParams sp;
  sp.eta = std::nan("");
  EXPECT_THROW(validate(sp), ParameterError);
  MaterialParams mat;
  mat.mu_lame = -1.0;
  EXPECT_THROW(validate(mat), ParameterError);
}

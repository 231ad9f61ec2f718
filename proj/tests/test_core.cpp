#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "cvlc/error.hpp"
#include "cvlc/kinematics.hpp"
#include "cvlc/motion.hpp"
#include "cvlc/scenario.hpp"

using namespace cvlc;

namespace {

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

SurroundingVehicle* Leader(ScenarioConfig& cfg, int index) {
  for (auto& s : cfg.surroundings) {
    if (s.role == VehicleRole::kLeader && s.leader_index == index) return &s;
  }
  return nullptr;
}

}  // namespace

TEST(StepKinematics, ConstantAcceleration) {
  const VehicleState s = StepKinematics({0.0, 10.0, 0.0, 0.0}, 2.0, 0.0, 0.1);
  EXPECT_NEAR(s.v_x, 10.2, 1e-12);
  EXPECT_NEAR(s.p_x, 1.01, 1e-12);
}

TEST(StepKinematics, StopsInsideStep) {
  const VehicleState s = StepKinematics({0.0, 0.05, 0.0, 0.0}, -6.0, 0.0, 0.1);
  EXPECT_EQ(s.v_x, 0.0);
  // stop distance v^2 / (2a)
  EXPECT_NEAR(s.p_x, 0.05 * 0.05 / 12.0, 1e-15);
}

TEST(StepKinematics, ZeroStepIsIdentity) {
  const VehicleState s0{3.0, 12.0, 1.2, -0.4};
  EXPECT_EQ(StepKinematics(s0, 2.5, -1.0, 0.0), s0);
}

TEST(StepKinematics, LateralUnconstrained) {
  const VehicleState s = StepKinematics({0.0, 0.0, 0.5, 0.1}, 0.0, -2.0, 0.5);
  EXPECT_NEAR(s.v_y, -0.9, 1e-12);
  EXPECT_NEAR(s.p_y, 0.5 + 0.05 - 0.25, 1e-12);
}

TEST(StepKinematics, SubstepsMatchOneLongStep) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v(0.0, 35.0), a(-6.0, 3.0), ay(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const VehicleState s0{0.0, v(rng), 0.3, 0.2};
    const double ax = a(rng);
    const double ayv = ay(rng);
    const int n = 1 + trial % 40;
    const double dt = 0.1;
    VehicleState s = s0;
    for (int k = 0; k < n; ++k) s = StepKinematics(s, ax, ayv, dt);
    const VehicleState once = StepKinematics(s0, ax, ayv, n * dt);
    EXPECT_NEAR(s.p_x, once.p_x, 1e-9);
    EXPECT_NEAR(s.v_x, once.v_x, 1e-9);
    EXPECT_NEAR(s.p_y, once.p_y, 1e-9);
    EXPECT_NEAR(s.v_y, once.v_y, 1e-9);
    EXPECT_GE(s.v_x, 0.0);
  }
}

TEST(PiecewiseMotion, BrakeThenHold) {
  const PiecewiseMotion m = PiecewiseMotion::Constant(20.0, 30.0, -6.0);
  EXPECT_NEAR(m.Position(2.0), 68.0, 1e-12);
  EXPECT_NEAR(m.Position(6.0), 95.0, 1e-12);
  EXPECT_EQ(m.Velocity(6.0), 0.0);
}

TEST(PiecewiseMotion, PhasesAreContinuous) {
  PiecewiseMotion m(0.0, 30.0);
  m.Then(0.7, 3.0).Then(1.1, -6.0).Then(kInf, -2.0);
  for (double t : {0.7, 1.8}) {
    EXPECT_NEAR(m.Position(t - 1e-9), m.Position(t + 1e-9), 1e-7);
    EXPECT_NEAR(m.Velocity(t - 1e-9), m.Velocity(t + 1e-9), 1e-7);
  }
}

TEST(MinGap, MatchesDenseSampling) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(0.0, 35.0), a(-6.0, 3.0), gap(5.0, 60.0);
  for (int trial = 0; trial < 300; ++trial) {
    PiecewiseMotion front = PiecewiseMotion::Constant(gap(rng), v(rng), a(rng));
    PiecewiseMotion rear(0.0, v(rng));
    rear.Then(1.0, a(rng)).Then(kInf, a(rng));
    const GapExtremum g = MinGap(front, rear, 0.0, 8.0);
    double sampled = kInf;
    for (int k = 0; k <= 80000; ++k) {
      const double t = k * 1e-4;
      sampled = std::min(sampled, front.Position(t) - rear.Position(t));
    }
    EXPECT_LE(g.gap, sampled + 1e-9);
    EXPECT_NEAR(g.gap, sampled, 1e-6);
  }
}

TEST(ValidateScenario, DefaultLayoutIsValid) {
  const ScenarioConfig cfg = MakeScenario({});
  EXPECT_NO_THROW(ValidateScenario(cfg));
  EXPECT_EQ(cfg.leaders().size(), 6u);
  ASSERT_NE(cfg.follower(), nullptr);
}

TEST(ValidateScenario, IsIdempotent) {
  const ScenarioConfig cfg = MakeScenario({});
  const ScenarioConfig once = ValidateScenario(cfg);
  EXPECT_EQ(ValidateScenario(once), cfg);
}

TEST(ValidateScenario, CoincidentLeadersRejected) {
  ScenarioConfig cfg = MakeScenario({});
  Leader(cfg, 3)->state.p_x = Leader(cfg, 2)->state.p_x;
  EXPECT_EQ(CodeOf([&] { ValidateScenario(cfg); }), ErrorCode::kInvalidScenario);
}

TEST(ValidateScenario, LeaderGapBelowMinimum) {
  ScenarioConfig cfg = MakeScenario({});
  Leader(cfg, 1)->state.p_x = cfg.ego.p_x + cfg.geometry.l_v + 1.0;
  EXPECT_EQ(CodeOf([&] { ValidateScenario(cfg); }), ErrorCode::kGapTooSmall);
}

TEST(ValidateScenario, RejectsBadFields) {
  {
    ScenarioConfig cfg = MakeScenario({});
    cfg.ego.v_x = -1.0;
    EXPECT_EQ(CodeOf([&] { ValidateScenario(cfg); }), ErrorCode::kInvalidScenario);
  }
  {
    ScenarioConfig cfg = MakeScenario({});
    cfg.p_v = 1.5;
    EXPECT_EQ(CodeOf([&] { ValidateScenario(cfg); }), ErrorCode::kInvalidScenario);
  }
  {
    ScenarioConfig cfg = MakeScenario({});
    cfg.n_connected_leaders = 4;
    EXPECT_EQ(CodeOf([&] { ValidateScenario(cfg); }), ErrorCode::kInvalidScenario);
  }
  {
    ScenarioConfig cfg = MakeScenario({});
    Leader(cfg, 2)->promise.reset();
    EXPECT_EQ(CodeOf([&] { ValidateScenario(cfg); }), ErrorCode::kInvalidScenario);
  }
}

TEST(Scenario, HumanDrivenPromiseIsWider) {
  LayoutParams p;
  p.human_driven_leaders = true;
  const ScenarioConfig cfg = MakeScenario(p);
  const auto leaders = cfg.leaders();
  EXPECT_NEAR(leaders[0]->promise->a_m_d, 0.75, 1e-12);
  EXPECT_NEAR(leaders[0]->promise->a_m_a, 3.0, 1e-12);
  EXPECT_FALSE(leaders.back()->connected);
}

TEST(Scenario, JsonRoundTrip) {
  LayoutParams p;
  p.n_connected = 3;
  p.follower_connected = true;
  p.p_v = 0.1;
  p.event_decel = 4.0;
  const ScenarioConfig cfg = MakeScenario(p);
  EXPECT_EQ(ScenarioFromJson(ScenarioToJson(cfg)), cfg);
}

TEST(Scenario, MalformedJsonIsInvalid) {
  EXPECT_EQ(CodeOf([] { ScenarioFromJson("{\"ego\": 3"); }), ErrorCode::kInvalidScenario);
  EXPECT_EQ(CodeOf([] { LoadScenario("/nonexistent/scenario.json"); }), ErrorCode::kIo);
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "porodarcy/drag.hpp"
#include "porodarcy/errors.hpp"

using namespace porodarcy;

TEST(Alpha, BarusAtZeroPressure) { EXPECT_EQ(DragModel(DragLaw::Barus, 1.0, 0.3).alpha(0, 0.0), 1.0); }

TEST(Alpha, LinearArithmetic) { EXPECT_NEAR(DragModel(DragLaw::Linear, 1.0, 0.3).alpha(0, 2.0), 1.6, 1e-15); }

TEST(Alpha, BarusAtUnitPressure) {
  EXPECT_NEAR(DragModel(DragLaw::Barus, 1.0, 0.3).alpha(0, 1.0), 1.3498588075760032, 1e-15);
}

TEST(AlphaInverse, BarusWithZeroBeta) {
  const DragModel m(DragLaw::Barus, 1.0, 0.0);
  for (double p : {-50.0, 0.0, 3.0, 1e4}) EXPECT_EQ(m.alpha_inverse(0, p), 1.0);
}

TEST(AlphaInverse, LinearSmallAlpha0) {
  const DragModel m(DragLaw::Linear, 0.001, 0.0);
  EXPECT_NEAR(m.alpha_inverse(0, 12.0), 1000.0, 1e-12);
}

TEST(AlphaInverse, BarusAtUnitPressure) {
  EXPECT_NEAR(DragModel(DragLaw::Barus, 1.0, 0.3).alpha_inverse(0, 1.0), 0.74081822068171788, 1e-15);
}

TEST(Alpha, LinearNonpositiveDragThrows) {
  const DragModel m(DragLaw::Linear, 1.0, 0.5);
  EXPECT_THROW(m.alpha(0, -2.0), NonpositiveDrag);
  EXPECT_THROW(m.alpha(0, -3.0), NonpositiveDrag);
  EXPECT_NO_THROW(m.alpha(0, -1.9));
}

TEST(DragModelContract, RejectsInvalidParameters) {
  EXPECT_THROW(DragModel(DragLaw::Barus, 0.0, 0.1), InvalidArgument);
  EXPECT_THROW(DragModel(DragLaw::Barus, 1.0, -0.1), InvalidArgument);
  EXPECT_THROW(DragModel(DragLaw::Barus, 1.0, 0.1, 0.0), InvalidArgument);
  EXPECT_THROW(DragModel(DragLaw::Barus, std::map<int, double>{{1, 1.0}, {2, -1.0}}, 0.1), InvalidArgument);
  EXPECT_THROW(parse_drag_law("forchheimer"), InvalidArgument);
}

TEST(DragModelContract, RegionMapLookup) {
  const DragModel m(DragLaw::Barus, {{1, 1.0}, {2, 0.001}}, 0.0);
  EXPECT_EQ(m.alpha(1, 5.0), 1.0);
  EXPECT_EQ(m.alpha(2, 5.0), 0.001);
  EXPECT_THROW(m.alpha(3, 0.0), InvalidArgument);
}

TEST(DragModelContract, ConstantMatchesZeroBeta) {
  const DragModel constant(DragLaw::Constant, 2.5, 0.7);
  const DragModel linear(DragLaw::Linear, 2.5, 0.0);
  const DragModel barus(DragLaw::Barus, 2.5, 0.0);
  for (double p : {-10.0, -0.3, 0.0, 1.0, 77.0}) {
    EXPECT_EQ(linear.alpha(0, p), constant.alpha(0, p));
    EXPECT_NEAR(barus.alpha(0, p), constant.alpha(0, p), 1e-15 * 2.5);
  }
  EXPECT_TRUE(constant.pressure_independent());
  EXPECT_TRUE(barus.pressure_independent());
  EXPECT_FALSE(barus.with_beta(0.1).pressure_independent());
}

TEST(DragProperties, AlphaTimesInverseIsOne) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> beta(0.0, 1.0), alpha0(1e-3, 1e2), p(-2.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    for (DragLaw law : {DragLaw::Linear, DragLaw::Barus}) {
      const DragModel m(law, alpha0(rng), beta(rng));
      const double pv = law == DragLaw::Linear ? std::abs(p(rng)) : p(rng);
      EXPECT_NEAR(m.alpha(0, pv) * m.alpha_inverse(0, pv), 1.0, 1e-15);
    }
  }
}

TEST(DragProperties, NondecreasingInPressure) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> beta(0.0, 1.0), p(0.0, 10.0), dp(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    for (DragLaw law : {DragLaw::Linear, DragLaw::Barus}) {
      const DragModel m(law, 1.3, beta(rng));
      const double a = p(rng), b = a + dp(rng);
      EXPECT_LE(m.alpha(0, a), m.alpha(0, b));
    }
  }
}

TEST(DragProperties, LinearIsTwoTermTaylorOfBarus) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> beta(0.0, 0.5), alpha0(0.1, 10.0), p(0.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double a0 = alpha0(rng), b = beta(rng), pv = p(rng);
    const double lin = DragModel(DragLaw::Linear, a0, b).alpha(0, pv);
    const double bar = DragModel(DragLaw::Barus, a0, b).alpha(0, pv);
    const double bound = a0 * (b * pv) * (b * pv) * std::exp(b * pv) / 2.0;
    EXPECT_LE(std::abs(lin - bar), bound * (1 + 1e-12) + 1e-15);
  }
}

TEST(ReferenceScales, DimensionlessNumbers) {
  ReferenceScales s{.length = 2.0, .velocity = 0.5, .pressure = 4.0, .drag = 8.0, .density = 3.0, .body_force = 10.0};
  EXPECT_DOUBLE_EQ(s.drag_number(), 2.0);
  EXPECT_DOUBLE_EQ(s.body_force_number(), 15.0);
  EXPECT_DOUBLE_EQ(s.nondimensional_beta(0.25), 1.0);
}

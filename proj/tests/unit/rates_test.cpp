#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "tritilt/rates.hpp"

using namespace tritilt;

TEST(Rates, RateFunctionIdentity) {
  // I_p(u) = I(u) - (h_p/2) u - (1/2) log(1-p).
  for (double p : {0.05, 0.2, 0.35, 0.7}) {
    for (double u = 0.0; u <= 1.0; u += 0.05) {
      const double rhs = entropy_term(u) - 0.5 * log_odds(p) * u -
                         0.5 * std::log1p(-p);
      EXPECT_NEAR(rate_function(u, p), rhs, 1e-13) << p << " " << u;
    }
  }
}

TEST(Rates, RateFunctionShape) {
  EXPECT_EQ(rate_function(0.3, 0.3), 0.0);
  EXPECT_NEAR(rate_function(0.4, 0.35), 0.002694, 1e-6);
  EXPECT_NEAR(rate_function(0.0, 0.2), -0.5 * std::log(0.8), 1e-15);
  EXPECT_NEAR(rate_function(1.0, 0.2), -0.5 * std::log(0.2), 1e-15);
  EXPECT_EQ(entropy_term(0.0), 0.0);
  EXPECT_EQ(entropy_term(1.0), 0.0);
}

TEST(Rates, LogOddsAndLogistic) {
  EXPECT_NEAR(log_odds(0.2), std::log(0.25), 1e-15);
  for (double h : {-40.0, -3.0, 0.0, 1.5, 12.0}) {
    EXPECT_NEAR(log_odds(logistic(h)), h, 1e-9 * (1 + std::abs(h)));
  }
  EXPECT_GT(logistic(-800.0), -1.0);
  EXPECT_LE(logistic(800.0), 1.0);
}

TEST(Rates, PotentialDerivativesMatchFiniteDifferences) {
  const TiltParams cases[] = {{-1.0, 2.0, 1.0}, {0.3, 5.0, 2.0 / 3.0},
                              {-1.2, 3.0, 0.5}, {-0.5, 1.0, 1.7}};
  const double step = 1e-5;
  for (const auto& params : cases) {
    for (double u = 0.05; u < 0.96; u += 0.1) {
      const double fd1 = (potential(u + step, params) -
                          potential(u - step, params)) / (2 * step);
      const double fd2 = (potential_slope(u + step, params) -
                          potential_slope(u - step, params)) / (2 * step);
      EXPECT_NEAR(potential_slope(u, params), fd1, 1e-7);
      EXPECT_NEAR(potential_curvature(u, params), fd2, 1e-5);
      const auto e = potential_eval(u, params);
      EXPECT_EQ(e.value, potential(u, params));
    }
  }
  EXPECT_TRUE(std::isinf(potential_slope(0.0, {})));
  EXPECT_GT(potential_slope(0.0, {}), 0.0);
  EXPECT_LT(potential_slope(1.0, {}), 0.0);
}

TEST(Rates, BetaStarValues) {
  EXPECT_NEAR(beta_star_formula(0.2, 0.3, 1.0), 5.98885, 1e-5);
  EXPECT_NEAR(beta_star(ProblemSpec{0.35, 0.4}, 1.0),
              (log_odds(0.4) - log_odds(0.35)) / 0.16, 1e-14);
  EXPECT_THROW(beta_star(ProblemSpec{0.05, 0.5}, 1.0), std::domain_error);
  EXPECT_NO_THROW(beta_star(ProblemSpec{0.2, 0.3}, 2.0 / 3.0));
}

TEST(Rates, TriangleTiltMaximiserIsTarget) {
  const ProblemSpec spec{0.35, 0.4};
  for (double alpha : {2.0 / 3.0, 1.0}) {
    const auto params = TiltParams::triangle(spec, alpha);
    const auto res = maximize_potential(params);
    ASSERT_TRUE(res.unique);
    EXPECT_NEAR(res.u_star(), 0.4, 1e-9);
  }
}

TEST(Rates, SourceAndEdgeMaximisers) {
  EXPECT_NEAR(maximize_potential(TiltParams::source(0.2)).u_star(), 0.2, 1e-10);
  EXPECT_NEAR(maximize_potential(TiltParams::edge(0.6)).u_star(), 0.6, 1e-10);
}

TEST(Rates, CapAddsEndpoint) {
  // Edge tilt to 0.6 capped at 0.5: V increases up to the cap.
  const auto res = maximize_potential(TiltParams::edge(0.6), 0.5);
  EXPECT_DOUBLE_EQ(res.u_star(), 0.5);
}

TEST(Rates, HybridFamily) {
  const double t = 0.4;
  // q = t collapses to the edge tilt.
  EXPECT_EQ(beta_q(t, t), 0.0);
  EXPECT_NEAR(TiltParams::hybrid(t, t).h, log_odds(t), 1e-14);
  // q = p recovers the alpha = 1 triangle tilt.
  const auto tri = TiltParams::triangle(ProblemSpec{0.35, t}, 1.0);
  const auto hyb = TiltParams::hybrid(0.35, t);
  EXPECT_NEAR(hyb.h, tri.h, 1e-13);
  EXPECT_NEAR(hyb.beta, tri.beta, 1e-13);
  for (double q : {0.35, 0.36, 0.37, 0.38, 0.39, 0.4}) {
    EXPECT_NEAR(potential_slope(t, TiltParams::hybrid(q, t)), 0.0, 1e-13);
  }
  EXPECT_THROW(beta_q(0.5, 0.4), std::invalid_argument);
}

TEST(Rates, Beta0Bracket) {
  for (double u : {0.3, 0.5, 0.7}) {
    const double bound = beta_curvature_bound(u, 1.0);
    const double b0 = beta0_boundary(u, 1.0);
    EXPECT_GT(b0, 0.0);
    EXPECT_LE(b0, bound + 1e-12);
    EXPECT_TRUE(hybrid_is_unique_at(u, 1.0, 0.99 * b0));
    if (b0 < bound - 1e-6) {
      EXPECT_FALSE(hybrid_is_unique_at(u, 1.0, std::min(bound, 1.01 * b0)));
    }
    // At the curvature bound t stops being a strict local maximum.
    const TiltParams at_bound{hybrid_h(bound, 1.0, u), bound, 1.0};
    EXPECT_NEAR(potential_curvature(u, at_bound), 0.0, 1e-9);
  }
}

TEST(Rates, Validation) {
  EXPECT_THROW((ProblemSpec{0.4, 0.3}.validate()), std::invalid_argument);
  EXPECT_THROW((ProblemSpec{0.0, 0.3}.validate()), std::invalid_argument);
  EXPECT_THROW((TiltParams{0.0, -1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((TiltParams{0.0, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_EQ(parse_threshold_mode("graphon"), ThresholdMode::graphon);
  EXPECT_THROW(parse_threshold_mode("other"), std::invalid_argument);
}

#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace tritilt {

/// How the rare event {many triangles} is thresholded at finite n:
/// binomial means T >= C(n,3) t^3, graphon means 6T/n^3 >= t^3.
enum class ThresholdMode { binomial, graphon };

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view text);

/// Source edge probability p and target density t, 0 < p < t < 1.
struct ProblemSpec {
  double p = 0.0;
  double t = 0.0;
  ThresholdMode mode = ThresholdMode::binomial;

  /// Throws std::invalid_argument unless 0 < p < t < 1.
  void validate() const;

  bool operator==(const ProblemSpec&) const = default;
};

/// Gibbs parameters of Q ∝ exp(n^2 [(h/2) eps + (beta/6) tau^alpha]).
struct TiltParams {
  double h = 0.0;
  double beta = 0.0;
  double alpha = 1.0;

  /// Throws std::invalid_argument unless alpha > 0 and beta >= 0.
  void validate() const;

  /// The Erdős–Rényi source G(n,p) itself.
  static TiltParams source(double p);
  /// G(n,t).
  static TiltParams edge(double t);
  /// (h_p, beta*, alpha). Throws if (p,t) is not replica symmetric.
  static TiltParams triangle(const ProblemSpec& spec, double alpha);
  /// The alpha = 1 family (h_q, beta_q) whose potential is stationary at t.
  static TiltParams hybrid(double q, double t);

  bool operator==(const TiltParams&) const = default;
};

// ---------------------------------------------------------------------------
// Scalar rate functions

/// I_p(u) = (u log(u/p) + (1-u) log((1-u)/(1-p))) / 2, continuous on [0,1].
double rate_function(double u, double p);

/// I(u) = (u log u + (1-u) log(1-u)) / 2 with I(0) = I(1) = 0.
double entropy_term(double u);

/// h_p = log(p / (1-p)).
double log_odds(double p);
double logistic(double h);

// ---------------------------------------------------------------------------
// The potential V(u) = (h/2) u + (beta/6) u^{3 alpha} - I(u)

struct PotentialEval {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
};

double potential(double u, const TiltParams& params);
/// V'(u); +inf at u = 0 and -inf at u = 1.
double potential_slope(double u, const TiltParams& params);
double potential_curvature(double u, const TiltParams& params);
PotentialEval potential_eval(double u, const TiltParams& params);

enum class StationaryKind { maximum, minimum, saddle };
std::string_view to_string(StationaryKind kind);

struct StationaryPoint {
  double u = 0.0;
  StationaryKind kind = StationaryKind::saddle;
  double value = 0.0;
};

struct VariationalResult {
  /// Global maximisers in increasing order; more than one means a tie.
  std::vector<double> argmax;
  double value = 0.0;
  /// Interior stationary points of V on (0, cap), increasing in u.
  std::vector<StationaryPoint> stationary_points;
  bool unique = true;

  double u_star() const { return argmax.front(); }
  std::vector<StationaryPoint> maxima() const;
};

struct SolverOptions {
  int grid_points = 10'000;
  double root_tolerance = 1e-12;
  /// Two maxima whose values differ by at most this are tied.
  double tie_tolerance = 1e-9;
  /// Maxima closer than this in u are the same point.
  double separation = 1e-6;
};

/// Global maximum of V on [0, cap] (cap = 1 when absent). A cap below 1 adds
/// the endpoint as a candidate when V'(cap) > 0.
VariationalResult maximize_potential(const TiltParams& params,
                                     std::optional<double> cap = std::nullopt,
                                     const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// Tilt parameter formulas

/// beta* = (h_t - h_p) / (alpha t^{3 alpha - 1}). No phase check.
double beta_star_formula(double p, double t, double alpha);

/// beta* for a replica-symmetric (p,t); throws std::domain_error otherwise.
double beta_star(const ProblemSpec& spec, double alpha);

/// Field h that makes u_star a stationary point of V for the given beta.
double hybrid_h(double beta, double alpha, double u_star);

/// beta_q = (h_t - h_q) / t^2 for 0 < q <= t < 1.
double beta_q(double q, double t);

/// Largest beta for which u_star is still a local maximum (V''(u_star) = 0);
/// needs alpha > 1/3.
double beta_curvature_bound(double u_star, double alpha);

/// Supremum of beta in [0, beta_curvature_bound] for which u_star is the
/// unique global maximiser of V(.; hybrid_h(beta, alpha, u_star), beta, alpha),
/// found by bisection on that predicate.
double beta0_boundary(double u_star, double alpha,
                      double tolerance = 1e-10);

/// True when u_star is the unique global maximiser of the hybrid potential.
bool hybrid_is_unique_at(double u_star, double alpha, double beta);

}  // namespace tritilt

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tritilt/rates.hpp"

namespace tritilt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Lower convex hull of a sampled function.
class MinorantHull {
 public:
  MinorantHull(std::vector<Point2> samples, std::vector<Point2> vertices);

  const std::vector<Point2>& samples() const { return samples_; }
  const std::vector<Point2>& vertices() const { return vertices_; }

  /// Piecewise-linear hull value; x must lie within the sampled range.
  double value_at(double x) const;

  /// Slopes of the hull segments to the left and right of x. Equal inside a
  /// segment; at a vertex they bracket the subdifferential. At the ends of
  /// the range the missing side repeats the other.
  std::pair<double, double> subdifferential(double x) const;

  /// True when y - hull(x) <= tolerance.
  bool touches(double x, double y, double tolerance = 1e-9) const;

 private:
  std::vector<Point2> samples_;
  std::vector<Point2> vertices_;
};

/// Andrew's monotone chain, lower half. Throws std::invalid_argument for
/// fewer than two points, non-increasing x, or non-finite y.
MinorantHull convex_minorant(std::vector<Point2> points);

struct SAlphaResult {
  bool member = false;
  bool on_hull = false;
  bool unique_max = false;
  /// 6 x the hull subdifferential at t^{3 alpha}.
  double beta_lo = 0.0;
  double beta_hi = 0.0;
};

struct SAlphaOptions {
  int grid_points = 10'000;
  double hull_tolerance = 1e-9;
  /// Half-width of the probe pair inserted around the query abscissa.
  double probe = 1e-7;
};

/// Minorant condition with exponent alpha, I_p standing in for the constrained
/// free energy, plus uniqueness of the maximiser of V(.; h_p, beta*, alpha).
SAlphaResult in_s_alpha(const ProblemSpec& spec, double alpha,
                        const SAlphaOptions& options = {});

bool is_replica_symmetric(const ProblemSpec& spec);

/// e^{-1/2} / (1 + e^{-1/2}).
double critical_p_tilde();

/// g(t) = t^2 I_p(1) + (1-t^2) I_p(0) - I_p(t) + ((h_t - h_p)/2)(t^2 - t).
double edge_tilt_gap(double p, double t);

/// Largest root of g in (p, 1); empty when p >= p_tilde.
std::optional<double> edge_tilt_threshold(double p);

/// Constant-t and clique candidates for the edge-tilt second moment.
struct GammaPair {
  double at_t = 0.0;
  double at_clique = 0.0;
};
GammaPair edge_tilt_gammas(const ProblemSpec& spec, const TiltParams& params);

/// -min(Gamma_t, Gamma_1) + Gamma_t - 2 I_p(t) for the edge tilt (h_t, 0, 1).
double edge_tilt_second_moment_lower_bound(const ProblemSpec& spec);

/// lim (1/n^2) log E_Q[qhat^2] over constant candidates, with Q the Gibbs
/// measure restricted to {u <= cap}. Throws std::domain_error when (p,t) is
/// replica breaking and std::invalid_argument when cap < t.
double asymptotic_second_moment(const ProblemSpec& spec,
                                const TiltParams& params,
                                std::optional<double> cap = std::nullopt);

/// Same value without the replica-symmetry check. Used for curves that
/// deliberately sweep through non-optimal tilts.
double asymptotic_second_moment_unchecked(const ProblemSpec& spec,
                                          const TiltParams& params,
                                          std::optional<double> cap);

struct PhaseCurveRow {
  double beta = 0.0;
  double global_argmax = 0.0;
  std::vector<StationaryPoint> points;
};

/// Stationary points of V(.; h, beta, alpha) along a beta grid.
std::vector<PhaseCurveRow> phase_curve(double h, double alpha,
                                       const std::vector<double>& betas);

/// Local minimum of V lying between the two leftmost local maxima; this is
/// the natural cap r for a chain that must stay in the low-density well.
std::optional<double> separating_minimum(const TiltParams& params);

struct Transition {
  double beta = 0.0;
  double u_left = 0.0;
  double u_right = 0.0;
};

/// First beta in [beta_lo, beta_hi] where the global maximiser of
/// V(.; h, beta, alpha) leaves the leftmost local maximum. Scans a grid of
/// `scan_points` then bisects to `tolerance`. Empty when no jump is found.
std::optional<Transition> find_transition(double h, double alpha,
                                          double beta_lo, double beta_hi,
                                          int scan_points = 200,
                                          double tolerance = 1e-10);

struct PhaseReport {
  double p = 0.0;
  double t = 0.0;
  bool replica_symmetric = false;
  std::map<double, SAlphaResult> s_alpha;
  std::map<double, double> beta_star;
  std::optional<double> t_tilde;
  double p_tilde = 0.0;
  bool edge_tilt_non_optimal = false;
};

PhaseReport phase_report(const ProblemSpec& spec,
                         const std::vector<double>& alphas);

}  // namespace tritilt

#include "tritilt/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tritilt {

namespace {

// Cross product of (b - a) and (c - a); non-positive means b is not strictly
// below the chord ac.
double cross(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double slope(const Point2& a, const Point2& b) {
  return (b.y - a.y) / (b.x - a.x);
}

// Index of the hull segment [v[k], v[k+1]] containing x.
std::size_t segment_index(const std::vector<Point2>& v, double x) {
  auto it = std::upper_bound(v.begin(), v.end(), x,
                             [](double value, const Point2& q) {
                               return value < q.x;
                             });
  std::size_t k = static_cast<std::size_t>(it - v.begin());
  if (k == 0) return 0;
  return std::min(k - 1, v.size() - 2);
}

// Golden-section refinement of a grid minimum of f on [lo, hi].
template <class F>
double grid_minimum(F&& f, double lo, double hi, int grid = 10'000) {
  if (hi <= lo) return f(lo);
  int best_k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double u = lo + (hi - lo) * k / grid;
    const double v = f(u);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  double a = lo + (hi - lo) * std::max(best_k - 1, 0) / grid;
  double b = lo + (hi - lo) * std::min(best_k + 1, grid) / grid;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return std::min({best, fc, fd});
}

}  // namespace

MinorantHull::MinorantHull(std::vector<Point2> samples,
                           std::vector<Point2> vertices)
    : samples_(std::move(samples)), vertices_(std::move(vertices)) {}

double MinorantHull::value_at(double x) const {
  const auto& v = vertices_;
  if (x < v.front().x || x > v.back().x) {
    throw std::out_of_range("query outside hull range");
  }
  const std::size_t k = segment_index(v, x);
  const double w = (x - v[k].x) / (v[k + 1].x - v[k].x);
  return v[k].y + w * (v[k + 1].y - v[k].y);
}

std::pair<double, double> MinorantHull::subdifferential(double x) const {
  const auto& v = vertices_;
  if (x < v.front().x || x > v.back().x) {
    throw std::out_of_range("query outside hull range");
  }
  const std::size_t k = segment_index(v, x);
  const double inside = slope(v[k], v[k + 1]);
  if (x == v[k].x && k > 0) return {slope(v[k - 1], v[k]), inside};
  if (x == v[k + 1].x && k + 2 < v.size()) {
    return {inside, slope(v[k + 1], v[k + 2])};
  }
  return {inside, inside};
}

bool MinorantHull::touches(double x, double y, double tolerance) const {
  return y - value_at(x) <= tolerance;
}

MinorantHull convex_minorant(std::vector<Point2> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("convex minorant needs at least two points");
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!std::isfinite(points[k].x) || !std::isfinite(points[k].y)) {
      throw std::invalid_argument("convex minorant needs finite points");
    }
    if (k > 0 && !(points[k].x > points[k - 1].x)) {
      throw std::invalid_argument("x must be strictly increasing");
    }
  }
  std::vector<Point2> hull;
  hull.reserve(points.size());
  for (const auto& q : points) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), q) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(q);
  }
  return MinorantHull(std::move(points), std::move(hull));
}

SAlphaResult in_s_alpha(const ProblemSpec& spec, double alpha,
                        const SAlphaOptions& options) {
  spec.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const double e = 3.0 * alpha;
  const double xt = std::pow(spec.t, e);
  const double yt = rate_function(spec.t, spec.p);
  auto phi = [&](double x) {
    return rate_function(std::min(1.0, std::pow(x, 1.0 / e)), spec.p);
  };

  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(options.grid_points) + 4);
  for (int k = 0; k <= options.grid_points; ++k) {
    xs.push_back(static_cast<double>(k) / options.grid_points);
  }
  for (double x : {xt - options.probe, xt, xt + options.probe}) {
    if (x > 0.0 && x < 1.0) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Point2> pts;
  pts.reserve(xs.size());
  for (double x : xs) pts.push_back({x, x == xt ? yt : phi(x)});
  const MinorantHull hull = convex_minorant(std::move(pts));

  SAlphaResult out;
  out.on_hull = hull.touches(xt, yt, options.hull_tolerance);
  const auto [lo, hi] = hull.subdifferential(xt);
  out.beta_lo = 6.0 * lo;
  out.beta_hi = 6.0 * hi;

  const TiltParams params{log_odds(spec.p),
                          beta_star_formula(spec.p, spec.t, alpha), alpha};
  SolverOptions solver;
  solver.tie_tolerance = options.hull_tolerance;
  const auto vr = maximize_potential(params, std::nullopt, solver);
  out.unique_max =
      vr.unique && std::abs(vr.u_star() - spec.t) <= solver.separation;
  out.member = out.on_hull && out.unique_max;
  return out;
}

bool is_replica_symmetric(const ProblemSpec& spec) {
  return in_s_alpha(spec, 2.0 / 3.0).member;
}

double critical_p_tilde() { return logistic(-0.5); }

double edge_tilt_gap(double p, double t) {
  const double ip1 = rate_function(1.0, p);
  const double ip0 = rate_function(0.0, p);
  return t * t * ip1 + (1.0 - t * t) * ip0 - rate_function(t, p) +
         0.5 * (log_odds(t) - log_odds(p)) * (t * t - t);
}

std::optional<double> edge_tilt_threshold(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
  if (p >= critical_p_tilde()) return std::nullopt;
  // g vanishes at 1 and is negative just below it; walk left to the first
  // sign change.
  const int steps = 100'000;
  const double top = 1.0 - 1e-9;
  double right = top;
  for (int k = 1; k <= steps; ++k) {
    const double left = top - (top - p) * k / steps;
    if (left <= p) break;
    if (edge_tilt_gap(p, left) >= 0.0) {
      double a = left;
      double b = right;
      while (b - a > 1e-13) {
        const double mid = 0.5 * (a + b);
        if (edge_tilt_gap(p, mid) >= 0.0) {
          a = mid;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    right = left;
  }
  return std::nullopt;
}

GammaPair edge_tilt_gammas(const ProblemSpec& spec, const TiltParams& params) {
  spec.validate();
  const double t = spec.t;
  const double p = spec.p;
  const double field = 0.5 * (params.h - log_odds(p));
  const double tri = params.beta / 6.0 * t * t * t;
  return {rate_function(t, p) + tri + field * t,
          t * t * rate_function(1.0, p) + (1.0 - t * t) * rate_function(0.0, p) +
              tri + field * t * t};
}

double edge_tilt_second_moment_lower_bound(const ProblemSpec& spec) {
  const auto g = edge_tilt_gammas(spec, TiltParams::edge(spec.t));
  return -std::min(g.at_t, g.at_clique) + g.at_t -
         2.0 * rate_function(spec.t, spec.p);
}

double asymptotic_second_moment_unchecked(const ProblemSpec& spec,
                                          const TiltParams& params,
                                          std::optional<double> cap) {
  spec.validate();
  params.validate();
  const double r = cap.value_or(1.0);
  if (r < spec.t) {
    throw std::invalid_argument("cap must be at least t");
  }
  const double hp = log_odds(spec.p);
  auto cost = [&](double u) {
    const double tri =
        params.beta == 0.0 ? 0.0
                           : params.beta / 6.0 * std::pow(u, 3.0 * params.alpha);
    return rate_function(u, spec.p) + 0.5 * (params.h - hp) * u + tri;
  };
  const double inf_cost = grid_minimum(cost, spec.t, r);
  const double free_energy = maximize_potential(params, cap).value;
  return -inf_cost + free_energy + 0.5 * std::log1p(-spec.p);
}

double asymptotic_second_moment(const ProblemSpec& spec,
                                const TiltParams& params,
                                std::optional<double> cap) {
  spec.validate();
  if (!is_replica_symmetric(spec)) {
    throw std::domain_error(
        "constant-function evaluation needs a replica symmetric (p,t)");
  }
  return asymptotic_second_moment_unchecked(spec, params, cap);
}

std::vector<PhaseCurveRow> phase_curve(double h, double alpha,
                                       const std::vector<double>& betas) {
  std::vector<PhaseCurveRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    const auto vr = maximize_potential({h, beta, alpha});
    rows.push_back({beta, vr.u_star(), vr.stationary_points});
  }
  return rows;
}

std::optional<double> separating_minimum(const TiltParams& params) {
  const auto points = maximize_potential(params).stationary_points;
  for (std::size_t k = 1; k + 1 < points.size(); ++k) {
    if (points[k].kind == StationaryKind::minimum &&
        points[k - 1].kind == StationaryKind::maximum &&
        points[k + 1].kind == StationaryKind::maximum) {
      return points[k].u;
    }
  }
  return std::nullopt;
}

namespace {

// True while the global maximiser is the leftmost local maximum.
bool left_branch_wins(double h, double alpha, double beta) {
  const auto vr = maximize_potential({h, beta, alpha});
  const auto maxima = vr.maxima();
  if (maxima.size() < 2) return true;
  return maxima.front().value >= maxima.back().value;
}

}  // namespace

std::optional<Transition> find_transition(double h, double alpha,
                                          double beta_lo, double beta_hi,
                                          int scan_points, double tolerance) {
  if (!(beta_hi > beta_lo) || scan_points < 1) {
    throw std::invalid_argument("need beta_lo < beta_hi and a positive scan");
  }
  double prev = beta_lo;
  if (!left_branch_wins(h, alpha, prev)) return std::nullopt;
  for (int k = 1; k <= scan_points; ++k) {
    const double next = beta_lo + (beta_hi - beta_lo) * k / scan_points;
    if (left_branch_wins(h, alpha, next)) {
      prev = next;
      continue;
    }
    double a = prev;
    double b = next;
    while (b - a > tolerance) {
      const double mid = 0.5 * (a + b);
      if (left_branch_wins(h, alpha, mid)) {
        a = mid;
      } else {
        b = mid;
      }
    }
    const double beta = 0.5 * (a + b);
    const auto maxima = maximize_potential({h, beta, alpha}).maxima();
    if (maxima.size() < 2) return std::nullopt;
    return Transition{beta, maxima.front().u, maxima.back().u};
  }
  return std::nullopt;
}

PhaseReport phase_report(const ProblemSpec& spec,
                         const std::vector<double>& alphas) {
  spec.validate();
  PhaseReport out;
  out.p = spec.p;
  out.t = spec.t;
  out.replica_symmetric = is_replica_symmetric(spec);
  for (double a : alphas) {
    out.s_alpha[a] = in_s_alpha(spec, a);
    out.beta_star[a] = beta_star_formula(spec.p, spec.t, a);
  }
  out.p_tilde = critical_p_tilde();
  out.t_tilde = edge_tilt_threshold(spec.p);
  out.edge_tilt_non_optimal = out.t_tilde && spec.t > *out.t_tilde;
  return out;
}

}  // namespace tritilt

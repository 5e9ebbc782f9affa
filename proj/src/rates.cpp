#include "tritilt/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tritilt/phase.hpp"

namespace tritilt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0,1), got " +
                                std::to_string(p));
  }
}

void require_unit(double u, const char* what) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1], got " +
                                std::to_string(u));
  }
}

// x log(x / y) with the convention 0 log 0 = 0.
double xlogxy(double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; }

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// u^e, with exact branches for the classical exponents.
double power(double u, double e) {
  if (e == 3.0) return u * u * u;
  if (e == 2.0) return u * u;
  if (e == 1.0) return u;
  if (e == 0.0) return 1.0;
  return std::pow(u, e);
}

}  // namespace

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::binomial ? "binomial" : "graphon";
}

ThresholdMode parse_threshold_mode(std::string_view text) {
  if (text == "binomial") return ThresholdMode::binomial;
  if (text == "graphon") return ThresholdMode::graphon;
  throw std::invalid_argument("unknown threshold mode '" + std::string(text) +
                              "'");
}

void ProblemSpec::validate() const {
  if (!(p > 0.0 && p < t && t < 1.0)) {
    throw std::invalid_argument("need 0 < p < t < 1, got p=" +
                                std::to_string(p) + " t=" + std::to_string(t));
  }
}

void TiltParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  if (!std::isfinite(h)) throw std::invalid_argument("h must be finite");
}

TiltParams TiltParams::source(double p) { return {log_odds(p), 0.0, 1.0}; }

TiltParams TiltParams::edge(double t) { return {log_odds(t), 0.0, 1.0}; }

TiltParams TiltParams::triangle(const ProblemSpec& spec, double alpha) {
  return {log_odds(spec.p), beta_star(spec, alpha), alpha};
}

TiltParams TiltParams::hybrid(double q, double t) {
  const double beta = beta_q(q, t);
  return {hybrid_h(beta, 1.0, t), beta, 1.0};
}

double rate_function(double u, double p) {
  require_probability(p, "p");
  require_unit(u, "u");
  return 0.5 * (xlogxy(u, p) + xlogxy(1.0 - u, 1.0 - p));
}

double entropy_term(double u) {
  require_unit(u, "u");
  return 0.5 * (xlogx(u) + xlogx(1.0 - u));
}

double log_odds(double p) {
  require_probability(p, "p");
  return std::log(p) - std::log1p(-p);
}

double logistic(double h) {
  return h >= 0.0 ? 1.0 / (1.0 + std::exp(-h))
                  : std::exp(h) / (1.0 + std::exp(h));
}

double potential(double u, const TiltParams& params) {
  require_unit(u, "u");
  const double triangle =
      params.beta == 0.0 ? 0.0
                         : params.beta / 6.0 * power(u, 3.0 * params.alpha);
  return 0.5 * params.h * u + triangle - entropy_term(u);
}

double potential_slope(double u, const TiltParams& params) {
  if (u <= 0.0) return kInf;
  if (u >= 1.0) return -kInf;
  const double triangle =
      params.beta == 0.0
          ? 0.0
          : 0.5 * params.beta * params.alpha *
                power(u, 3.0 * params.alpha - 1.0);
  return 0.5 * params.h + triangle - 0.5 * (std::log(u) - std::log1p(-u));
}

double potential_curvature(double u, const TiltParams& params) {
  if (u <= 0.0 || u >= 1.0) return -kInf;
  const double a = params.alpha;
  const double triangle =
      params.beta == 0.0
          ? 0.0
          : 0.5 * params.beta * a * (3.0 * a - 1.0) * power(u, 3.0 * a - 2.0);
  return triangle - 0.5 * (1.0 / u + 1.0 / (1.0 - u));
}

PotentialEval potential_eval(double u, const TiltParams& params) {
  return {potential(u, params), potential_slope(u, params),
          potential_curvature(u, params)};
}

std::string_view to_string(StationaryKind kind) {
  switch (kind) {
    case StationaryKind::maximum:
      return "max";
    case StationaryKind::minimum:
      return "min";
    case StationaryKind::saddle:
      return "saddle";
  }
  return "saddle";
}

std::vector<StationaryPoint> VariationalResult::maxima() const {
  std::vector<StationaryPoint> out;
  for (const auto& s : stationary_points) {
    if (s.kind == StationaryKind::maximum) out.push_back(s);
  }
  return out;
}

VariationalResult maximize_potential(const TiltParams& params,
                                     std::optional<double> cap,
                                     const SolverOptions& options) {
  params.validate();
  const double hi = cap.value_or(1.0);
  if (!(hi > 0.0 && hi <= 1.0)) {
    throw std::invalid_argument("cap must lie in (0,1]");
  }
  const int cells = std::max(options.grid_points, 2);

  std::vector<double> nodes(static_cast<std::size_t>(cells) + 1);
  std::vector<double> slopes(nodes.size());
  for (int k = 0; k <= cells; ++k) {
    nodes[k] = k == cells ? hi : hi * static_cast<double>(k) / cells;
    slopes[k] = potential_slope(nodes[k], params);
  }

  VariationalResult result;
  for (int k = 0; k < cells; ++k) {
    const bool left_positive = slopes[k] > 0.0;
    if (left_positive == (slopes[k + 1] > 0.0)) continue;
    double lo = nodes[k];
    double up = nodes[k + 1];
    while (up - lo > options.root_tolerance) {
      const double mid = 0.5 * (lo + up);
      if ((potential_slope(mid, params) > 0.0) == left_positive) {
        lo = mid;
      } else {
        up = mid;
      }
    }
    const double u = 0.5 * (lo + up);
    result.stationary_points.push_back(
        {u, left_positive ? StationaryKind::maximum : StationaryKind::minimum,
         potential(u, params)});
  }

  std::vector<std::pair<double, double>> candidates;  // (u, V(u))
  for (const auto& s : result.stationary_points) {
    if (s.kind == StationaryKind::maximum) candidates.emplace_back(s.u, s.value);
  }
  if (hi < 1.0 && slopes.back() > 0.0) {
    candidates.emplace_back(hi, potential(hi, params));
  }
  if (candidates.empty()) {
    // Only reachable when every cell is monotone decreasing from a node at 0.
    candidates.emplace_back(nodes.front(), potential(nodes.front(), params));
  }

  double best = -kInf;
  for (const auto& [u, v] : candidates) best = std::max(best, v);
  result.value = best;
  for (const auto& [u, v] : candidates) {
    if (v < best - options.tie_tolerance) continue;
    if (!result.argmax.empty() &&
        u - result.argmax.back() <= options.separation) {
      continue;
    }
    result.argmax.push_back(u);
  }
  result.unique = result.argmax.size() == 1;
  return result;
}

double beta_star_formula(double p, double t, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return (log_odds(t) - log_odds(p)) / (alpha * power(t, 3.0 * alpha - 1.0));
}

double beta_star(const ProblemSpec& spec, double alpha) {
  spec.validate();
  if (!is_replica_symmetric(spec)) {
    throw std::domain_error(
        "(p,t) is replica breaking; beta* needs the minorant subdifferential");
  }
  return beta_star_formula(spec.p, spec.t, alpha);
}

double hybrid_h(double beta, double alpha, double u_star) {
  require_probability(u_star, "u*");
  return log_odds(u_star) - beta * alpha * power(u_star, 3.0 * alpha - 1.0);
}

double beta_q(double q, double t) {
  require_probability(q, "q");
  require_probability(t, "t");
  if (q > t) throw std::invalid_argument("beta_q needs q <= t");
  return (log_odds(t) - log_odds(q)) / (t * t);
}

double beta_curvature_bound(double u_star, double alpha) {
  require_probability(u_star, "u*");
  if (!(alpha > 1.0 / 3.0)) {
    throw std::invalid_argument("curvature bound needs alpha > 1/3");
  }
  return power(u_star, 2.0 - 3.0 * alpha) /
         (alpha * (3.0 * alpha - 1.0) * u_star * (1.0 - u_star));
}

bool hybrid_is_unique_at(double u_star, double alpha, double beta) {
  const TiltParams params{hybrid_h(beta, alpha, u_star), beta, alpha};
  const auto result = maximize_potential(params);
  const SolverOptions defaults;
  return result.unique &&
         std::abs(result.u_star() - u_star) <= defaults.separation;
}

double beta0_boundary(double u_star, double alpha, double tolerance) {
  double lo = 0.0;
  double hi = beta_curvature_bound(u_star, alpha);
  if (hybrid_is_unique_at(u_star, alpha, hi)) return hi;
  while (hi - lo > tolerance * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (hybrid_is_unique_at(u_star, alpha, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace tritilt

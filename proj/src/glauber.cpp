#include "tritilt/glauber.hpp"

#include <algorithm>
#include <cassert>
#include <iostream>
#include <stdexcept>

namespace tritilt {

ConstraintSet ConstraintSet::cap(double r) {
  ConstraintSet c;
  c.tau_hi = r * r * r;
  c.epsilon_cap = r;
  c.validate();
  return c;
}

void ConstraintSet::validate() const {
  if (!(0.0 <= tau_lo && tau_lo <= tau_hi && tau_hi <= 1.0)) {
    throw std::invalid_argument("triangle-density interval must lie in [0,1]");
  }
  if (epsilon_cap && !(*epsilon_cap > 0.0 && *epsilon_cap <= 1.0)) {
    throw std::invalid_argument("edge-density cap must lie in (0,1]");
  }
}

double ConstraintSet::density_cap() const {
  return std::min(epsilon_cap.value_or(1.0), std::cbrt(tau_hi));
}

double flip_log_odds(Vertex n, Count others, Count two_stars,
                     const TiltParams& params) {
  if (params.beta == 0.0) return params.h;
  if (params.alpha == 1.0) {
    return params.h + params.beta * static_cast<double>(two_stars) / n;
  }
  const double n3 = static_cast<double>(n) * n * n;
  const double scale = static_cast<double>(n) * n * params.beta / 6.0;
  const double with = std::pow(6.0 * static_cast<double>(others + two_stars) / n3,
                               params.alpha);
  const double without =
      std::pow(6.0 * static_cast<double>(others) / n3, params.alpha);
  return params.h + scale * (with - without);
}

double acceptance_prob(const Graph& g, Vertex i, Vertex j,
                       const TiltParams& params) {
  const Count two_stars = g.common_neighbors(i, j);
  const Count others =
      g.triangle_count() - (g.has_edge(i, j) ? two_stars : Count{0});
  return logistic(flip_log_odds(g.order(), others, two_stars, params));
}

double acceptance_prob_classical(Vertex n, Count two_stars,
                                 const TiltParams& params) {
  return logistic(params.h + params.beta * static_cast<double>(two_stars) / n);
}

std::uint64_t step_budget(Vertex n, double coefficient) {
  const double nn = static_cast<double>(n);
  return static_cast<std::uint64_t>(std::llround(coefficient * nn * nn * std::log(nn)));
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double unit_draw(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Graph bernoulli_graph(Vertex n, double u, Rng& rng) {
  Graph g(n);
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i + 1; j < n; ++j) {
      if (unit_draw(rng) < u) g.apply_flip(i, j, g.common_neighbors_unchecked(i, j));
    }
  }
  return g;
}

Graph initial_graph(Vertex n, const TiltParams& params,
                    const std::optional<ConstraintSet>& constraint, Rng& rng,
                    int attempts) {
  std::optional<double> cap;
  if (constraint) cap = constraint->density_cap();
  double u = maximize_potential(params, cap).u_star();
  if (cap) u = std::min(u, *cap);
  for (int a = 0; a < attempts; ++a) {
    Graph g = bernoulli_graph(n, u, rng);
    if (!constraint || constraint->contains(g)) return g;
  }
  throw std::runtime_error("no initial graph inside the constraint set after " +
                           std::to_string(attempts) + " draws");
}

GlauberChain::GlauberChain(Graph start, TiltParams params,
                           std::optional<ConstraintSet> constraint,
                           std::uint64_t seed)
    : graph_(std::move(start)),
      params_(params),
      constraint_(std::move(constraint)),
      rng_(seed) {
  params_.validate();
  if (graph_.order() < 2) throw std::invalid_argument("chain needs n >= 2");
  if (constraint_) {
    constraint_->validate();
    if (!constraint_->one_sided()) {
      std::clog << "warning: interior triangle-density interval; the "
                   "constrained state space may be disconnected\n";
    }
    if (!constraint_->contains(graph_)) {
      throw std::invalid_argument("initial graph violates the constraint");
    }
  }
  build_tables();
}

GlauberChain::GlauberChain(Vertex n, TiltParams params,
                           std::optional<ConstraintSet> constraint,
                           std::uint64_t seed)
    : graph_(std::max<Vertex>(n, 1)),
      params_(params),
      constraint_(std::move(constraint)),
      rng_(seed) {
  params_.validate();
  if (n < 2) throw std::invalid_argument("chain needs n >= 2");
  if (constraint_) constraint_->validate();
  graph_ = initial_graph(n, params_, constraint_, rng_);
  if (constraint_ && !constraint_->one_sided()) {
    std::clog << "warning: interior triangle-density interval; the "
                 "constrained state space may be disconnected\n";
  }
  build_tables();
}

void GlauberChain::build_tables() {
  const Vertex n = graph_.order();
  if (params_.alpha == 1.0 || params_.beta == 0.0) {
    phi_by_two_stars_.resize(n - 1);
    for (Vertex l = 0; l + 1 < n; ++l) {
      phi_by_two_stars_[l] = logistic(flip_log_odds(n, 0, l, params_));
    }
    return;
  }
  const double n3 = static_cast<double>(n) * n * n;
  const double scale = static_cast<double>(n) * n * params_.beta / 6.0;
  energy_by_triangles_.resize(static_cast<std::size_t>(triple_count(n)) + 1);
  for (std::size_t t = 0; t < energy_by_triangles_.size(); ++t) {
    energy_by_triangles_[t] =
        scale * std::pow(6.0 * static_cast<double>(t) / n3, params_.alpha);
  }
}

double GlauberChain::flip_probability(Count others, Count two_stars) const {
  if (!phi_by_two_stars_.empty()) return phi_by_two_stars_[two_stars];
  return logistic(params_.h + energy_by_triangles_[others + two_stars] -
                  energy_by_triangles_[others]);
}

// Lemire's nearly divisionless bounded draw.
std::uint64_t GlauberChain::below(std::uint64_t bound) {
  unsigned __int128 m = static_cast<unsigned __int128>(rng_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void GlauberChain::step() {
  const Vertex n = graph_.order();
  // Uniform ordered pair, hence uniform unordered pair.
  const std::uint64_t k = below(static_cast<std::uint64_t>(n) * (n - 1));
  const auto i = static_cast<Vertex>(k / (n - 1));
  auto j = static_cast<Vertex>(k % (n - 1));
  if (j >= i) ++j;
  ++steps_;

  const Count two_stars = graph_.common_neighbors_unchecked(i, j);
  const bool present = graph_.has_edge_unchecked(i, j);
  const Count others = graph_.triangle_count() - (present ? two_stars : 0);
  const bool next = unit_draw(rng_) < flip_probability(others, two_stars);
  if (next == present) return;

  if (constraint_) {
    const Count e = graph_.edge_count() + (next ? 1 : -1);
    const Count t = graph_.triangle_count() + (next ? two_stars : -two_stars);
    if (!constraint_->contains(n, e, t)) {
      ++reverted_;
      return;
    }
  }
  graph_.apply_flip(i, j, two_stars);
  assert(!constraint_ || constraint_->contains(graph_));
}

}  // namespace tritilt

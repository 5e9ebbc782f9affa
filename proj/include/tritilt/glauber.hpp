#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "tritilt/graph.hpp"
#include "tritilt/rates.hpp"

namespace tritilt {

/// Region {tau in [tau_lo, tau_hi], eps <= epsilon_cap} on which a chain may
/// be confined.
struct ConstraintSet {
  double tau_lo = 0.0;
  double tau_hi = 1.0;
  std::optional<double> epsilon_cap;

  /// {tau <= r^3, eps <= r}.
  static ConstraintSet cap(double r);

  /// Throws std::invalid_argument unless 0 <= tau_lo <= tau_hi <= 1 and the
  /// cap (if any) lies in (0, 1].
  void validate() const;

  /// Intervals touching 0 or 1 are known to give a connected state space.
  bool one_sided() const { return tau_lo <= 0.0 || tau_hi >= 1.0; }

  /// Largest edge density a constant graphon in the set can have.
  double density_cap() const;

  bool contains(Vertex n, Count edges, Count triangles) const noexcept {
    const double nn = static_cast<double>(n);
    const double tau = 6.0 * static_cast<double>(triangles) / (nn * nn * nn);
    if (tau < tau_lo || tau > tau_hi) return false;
    if (epsilon_cap) {
      const double eps = 2.0 * static_cast<double>(edges) / (nn * nn);
      if (eps > *epsilon_cap) return false;
    }
    return true;
  }
  bool contains(const Graph& g) const noexcept {
    return contains(g.order(), g.edge_count(), g.triangle_count());
  }

  bool operator==(const ConstraintSet&) const = default;
};

/// Log-odds of the new value of pair ij being 1, given n, the number M of
/// triangles not using ij and L = L_ij:
/// h + (n^2 beta / 6) [ (6(M+L)/n^3)^alpha - (6M/n^3)^alpha ].
double flip_log_odds(Vertex n, Count others, Count two_stars,
                     const TiltParams& params);

/// Heat-bath probability that pair ij is present after an update.
double acceptance_prob(const Graph& g, Vertex i, Vertex j,
                       const TiltParams& params);

/// The alpha = 1 shortcut logistic(h + beta L / n).
double acceptance_prob_classical(Vertex n, Count two_stars,
                                 const TiltParams& params);

/// Exact c * n^2 * ln n, rounded to the nearest integer.
std::uint64_t step_budget(Vertex n, double coefficient);

/// Seed of replica `index` derived from a master seed (splitmix64 of
/// master + (index + 1) * golden gamma).
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t index);

using Rng = std::mt19937_64;

/// Independent Bernoulli(u) edges.
Graph bernoulli_graph(Vertex n, double u, Rng& rng);

/// Bernoulli(u*) start, u* the tilt's maximiser of V (capped by the
/// constraint's density cap); redrawn until it lies in the constraint, at
/// most `attempts` times. Throws std::runtime_error when every draw fails.
Graph initial_graph(Vertex n, const TiltParams& params,
                    const std::optional<ConstraintSet>& constraint, Rng& rng,
                    int attempts = 100);

/// Glauber dynamics for Q ∝ exp(hE + n^2 (beta/6) tau^alpha), optionally
/// confined to a constraint set by rejecting moves that leave it.
class GlauberChain {
 public:
  /// Throws std::invalid_argument if the start is outside the constraint.
  GlauberChain(Graph start, TiltParams params,
               std::optional<ConstraintSet> constraint, std::uint64_t seed);
  /// Draws the start with initial_graph from the chain's own generator.
  GlauberChain(Vertex n, TiltParams params,
               std::optional<ConstraintSet> constraint, std::uint64_t seed);

  void step();
  void run(std::uint64_t steps) {
    for (std::uint64_t s = 0; s < steps; ++s) step();
  }

  const Graph& graph() const noexcept { return graph_; }
  const TiltParams& params() const noexcept { return params_; }
  std::uint64_t steps_taken() const noexcept { return steps_; }
  /// Moves undone because they left the constraint set.
  std::uint64_t reverted() const noexcept { return reverted_; }

 private:
  void build_tables();
  double flip_probability(Count others, Count two_stars) const;
  std::uint64_t below(std::uint64_t bound);

  Graph graph_;
  TiltParams params_;
  std::optional<ConstraintSet> constraint_;
  Rng rng_;
  std::uint64_t steps_ = 0;
  std::uint64_t reverted_ = 0;
  // alpha == 1: probability by L. Otherwise n^2 (beta/6) tau^alpha by T.
  std::vector<double> phi_by_two_stars_;
  std::vector<double> energy_by_triangles_;
};

struct ChainConfig {
  Vertex n = 0;
  TiltParams params;
  std::optional<ConstraintSet> constraint;
  /// Includes burn-in.
  std::uint64_t total_steps = 0;
  std::uint64_t burnin = 0;
  std::uint64_t seed = 0;
};

struct ChainSummary {
  std::uint64_t steps = 0;
  std::uint64_t observed = 0;
  std::uint64_t reverted = 0;
  Count final_edges = 0;
  Count final_triangles = 0;
};

/// Runs total_steps Glauber updates and calls observer(E, T) after every
/// update past the burn-in.
template <class Observer>
ChainSummary run_chain(const ChainConfig& config, Observer&& observer) {
  if (config.burnin > config.total_steps) {
    throw std::invalid_argument("burn-in exceeds total steps");
  }
  GlauberChain chain(config.n, config.params, config.constraint, config.seed);
  chain.run(config.burnin);
  for (std::uint64_t s = config.burnin; s < config.total_steps; ++s) {
    chain.step();
    observer(chain.graph().edge_count(), chain.graph().triangle_count());
  }
  return {chain.steps_taken(), config.total_steps - config.burnin,
          chain.reverted(), chain.graph().edge_count(),
          chain.graph().triangle_count()};
}

}  // namespace tritilt

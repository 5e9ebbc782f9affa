#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tritilt/glauber.hpp"
#include "tritilt/graph.hpp"
#include "tritilt/rates.hpp"

namespace tritilt {

/// Number of labelled graphs on n vertices with each (E, T).
class JointDistribution {
 public:
  explicit JointDistribution(Vertex n);

  Vertex order() const noexcept { return n_; }
  Count max_edges() const noexcept { return pair_count(n_); }
  Count max_triangles() const noexcept { return triple_count(n_); }

  std::uint64_t count(Count edges, Count triangles) const {
    return counts_[index(edges, triangles)];
  }
  void add(Count edges, Count triangles, std::uint64_t k = 1) {
    counts_[index(edges, triangles)] += k;
  }
  std::uint64_t total() const;

  /// Calls f(E, T, count) for every nonzero cell.
  template <class F>
  void for_each(F&& f) const {
    for (Count e = 0; e <= max_edges(); ++e) {
      for (Count t = 0; t <= max_triangles(); ++t) {
        const auto k = counts_[index(e, t)];
        if (k > 0) f(e, t, k);
      }
    }
  }

  /// CSV with header n,E,T,count.
  std::string to_csv() const;
  static JointDistribution from_csv(const std::string& text);

  bool operator==(const JointDistribution&) const = default;

 private:
  std::size_t index(Count e, Count t) const {
    return static_cast<std::size_t>(e * (max_triangles() + 1) + t);
  }

  Vertex n_;
  std::vector<std::uint64_t> counts_;
};

/// Gray-code walk over all 2^{C(n,2)} graphs. n <= 7 unless allow_eight.
JointDistribution enumerate_joint(Vertex n, bool allow_eight = false);

/// P(T(G(n,p)) >= threshold) from the histogram.
double exact_mu(const JointDistribution& joint, double p, double t,
                ThresholdMode mode);
/// Same probability by summing over every graph separately; n <= 5.
double exact_mu_direct(Vertex n, double p, double t, ThresholdMode mode);

/// n^2 H = h E + n^2 (beta/6) tau^alpha.
double scaled_hamiltonian(Vertex n, Count edges, Count triangles,
                          const TiltParams& params);

/// (1/n^2) log sum over graphs (in the constraint, if given) of e^{n^2 H}.
double exact_psi(const JointDistribution& joint, const TiltParams& params,
                 const std::optional<ConstraintSet>& constraint = std::nullopt);

struct ExactMoments {
  double mean = 0.0;
  double second = 0.0;
  double variance = 0.0;
  /// mu_n, or P(W | A) when a constraint is given.
  double reference = 0.0;
};

/// Moments of qhat = 1_W dP_A/dQ_A under Q_A, where qhat is assembled from
/// log_unnormalized_weight and exact free energies.
ExactMoments exact_estimator_moments(
    const JointDistribution& joint, const ProblemSpec& spec,
    const TiltParams& tilt,
    const std::optional<ConstraintSet>& constraint = std::nullopt);

struct GlauberMatrix {
  Vertex n = 0;
  std::size_t states = 0;
  /// Row-major transition matrix over edge bitmasks.
  std::vector<double> transition;
  /// Exact Gibbs law (restricted and renormalised when constrained); zero
  /// off the constraint.
  std::vector<double> stationary;
  double detailed_balance_residual = 0.0;
  double stationarity_residual = 0.0;
  double row_sum_residual = 0.0;
};

/// Full transition matrix of the sampler for n <= 4, built from
/// acceptance_prob. Throws std::invalid_argument for n > 4.
GlauberMatrix exact_glauber_matrix(
    Vertex n, const TiltParams& params,
    const std::optional<ConstraintSet>& constraint = std::nullopt);

/// The pairs i < j in the bit order used by enumeration and the matrix.
std::vector<Edge> pair_order(Vertex n);

}  // namespace tritilt

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tritilt/graph.hpp"
#include "tritilt/rates.hpp"

namespace tritilt {

/// n^2 ((h_p - h)/2 eps - (beta/6) tau^alpha): log dP/dQ without the free
/// energies.
double log_unnormalized_weight(double eps, double tau, Vertex n, double p,
                               const TiltParams& tilt);

/// (n-1)/(2n) log(1/(1-p)): the finite-n free energy of G(n,p).
double psi_er_exact(Vertex n, double p);

/// Real triangle-count threshold of the rare event at size n.
double triangle_threshold(Vertex n, double t, ThresholdMode mode);

/// Log-weight and rare-event indicator as functions of (E, T), tabulated in T.
class WeightModel {
 public:
  WeightModel(Vertex n, const ProblemSpec& spec, const TiltParams& tilt);

  double log_weight(Count edges, Count triangles) const {
    return edge_coeff_ * static_cast<double>(edges) -
           triangle_term_[static_cast<std::size_t>(triangles)];
  }
  bool hit(Count triangles) const {
    return static_cast<double>(triangles) >= threshold_;
  }

  Vertex order() const noexcept { return n_; }
  double threshold() const noexcept { return threshold_; }

 private:
  Vertex n_;
  double threshold_;
  double edge_coeff_;
  std::vector<double> triangle_term_;
};

/// log of a sum of positive terms, kept as max + log(scaled sum).
class LogSum {
 public:
  void add(double log_term, double multiplicity = 1.0);
  void merge(const LogSum& other);
  /// log(num / den^power), computed from the shifts and scaled sums
  /// separately so that a common offset in the terms cancels exactly.
  static double log_ratio(const LogSum& num, const LogSum& den,
                          double power = 1.0) {
    if (power == 1.0) {
      return (num.max_ - den.max_) + std::log(num.scaled_ / den.scaled_);
    }
    return (num.max_ - power * den.max_) +
           (std::log(num.scaled_) - power * std::log(den.scaled_));
  }

  double log() const {
    return scaled_ > 0.0 ? max_ + std::log(scaled_)
                         : -std::numeric_limits<double>::infinity();
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

enum class EstimatorMode { exact_psi, self_normalized, conditioned };
std::string_view to_string(EstimatorMode mode);

struct EstimateReport {
  std::uint64_t samples = 0;  // K
  double mu_hat = 0.0;
  double std_error = 0.0;
  double sample_variance = 0.0;
  double log_second_moment = 0.0;
  double log_prob = 0.0;
  double ess = 0.0;
  double hit_rate = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  EstimatorMode mode = EstimatorMode::self_normalized;
  bool degenerate = false;
  /// Set for conditioned runs: the target is P(W | A), not P(W).
  bool biased_for_mu = false;
};

nlohmann::json to_json(const EstimateReport& report);

/// Streaming reducer of (E, T) observations. Runs of identical consecutive
/// states are folded into one weighted term, and observations are grouped
/// into fixed-size batches whose ratio residuals give the standard error.
class ImportanceAccumulator {
 public:
  ImportanceAccumulator(const WeightModel& model, std::uint64_t batch_size);

  void operator()(Count edges, Count triangles) {
    if (run_ > 0 && edges == last_edges_ && triangles == last_triangles_) {
      ++run_;
      return;
    }
    flush();
    last_edges_ = edges;
    last_triangles_ = triangles;
    run_ = 1;
  }

  /// Feeds a term with an explicit log-weight; used by tests and oracles.
  void add_term(double log_weight, bool hit, std::uint64_t multiplicity = 1);

  /// Appends another accumulator's batches after this one's.
  void merge(ImportanceAccumulator other);

  std::uint64_t observations() const;

  /// Self-normalised (or conditioned) report.
  EstimateReport report(EstimatorMode mode, Vertex n) const;
  /// Unbiased report using exact free energies of the tilt and the source.
  EstimateReport report_exact_psi(Vertex n, double psi_tilt,
                                  double psi_source) const;

 private:
  struct Batch {
    LogSum w, hit_w, hit_w2, w2;
    std::uint64_t count = 0;
    std::uint64_t hits = 0;
  };

  void flush();
  void push(double log_weight, bool hit, std::uint64_t multiplicity);

  const WeightModel* model_;
  std::uint64_t batch_size_;
  std::vector<Batch> batches_;
  Count last_edges_ = 0;
  Count last_triangles_ = 0;
  std::uint64_t run_ = 0;
};

/// Unweighted counts of E among observations in the rare event.
class EdgeHistogram {
 public:
  EdgeHistogram(const WeightModel& model);

  void operator()(Count edges, Count triangles) {
    if (model_->hit(triangles)) ++counts_[static_cast<std::size_t>(edges)];
  }
  void merge(const EdgeHistogram& other);

  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const;
  /// Two columns, edge_count and frequency, nonzero rows only. Throws
  /// std::runtime_error when there are no hits.
  std::string to_csv() const;

 private:
  const WeightModel* model_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace tritilt

#include "tritilt/estimator.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace tritilt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

double log_unnormalized_weight(double eps, double tau, Vertex n, double p,
                               const TiltParams& tilt) {
  const double nn = static_cast<double>(n);
  const double tri =
      tilt.beta == 0.0 ? 0.0 : tilt.beta / 6.0 * std::pow(tau, tilt.alpha);
  return nn * nn * (0.5 * (log_odds(p) - tilt.h) * eps - tri);
}

double psi_er_exact(Vertex n, double p) {
  if (n < 2) throw std::invalid_argument("psi needs n >= 2");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
  return (static_cast<double>(n) - 1.0) / (2.0 * n) * -std::log1p(-p);
}

double triangle_threshold(Vertex n, double t, ThresholdMode mode) {
  const double t3 = t * t * t;
  if (mode == ThresholdMode::binomial) {
    return static_cast<double>(triple_count(n)) * t3;
  }
  const double nn = static_cast<double>(n);
  return nn * nn * nn / 6.0 * t3;
}

WeightModel::WeightModel(Vertex n, const ProblemSpec& spec,
                         const TiltParams& tilt)
    : n_(n),
      threshold_(triangle_threshold(n, spec.t, spec.mode)),
      edge_coeff_(log_odds(spec.p) - tilt.h) {
  spec.validate();
  tilt.validate();
  const double nn = static_cast<double>(n);
  triangle_term_.resize(static_cast<std::size_t>(triple_count(n)) + 1);
  for (std::size_t t = 0; t < triangle_term_.size(); ++t) {
    const double tau = 6.0 * static_cast<double>(t) / (nn * nn * nn);
    triangle_term_[t] =
        tilt.beta == 0.0 ? 0.0
                         : nn * nn * tilt.beta / 6.0 * std::pow(tau, tilt.alpha);
  }
}

void LogSum::add(double log_term, double multiplicity) {
  if (log_term == kNegInf || multiplicity <= 0.0) return;
  if (log_term > max_) {
    scaled_ = scaled_ * std::exp(max_ - log_term) + multiplicity;
    max_ = log_term;
  } else {
    scaled_ += multiplicity * std::exp(log_term - max_);
  }
}

void LogSum::merge(const LogSum& other) {
  if (other.scaled_ <= 0.0) return;
  if (other.max_ > max_) {
    scaled_ = scaled_ * std::exp(max_ - other.max_) + other.scaled_;
    max_ = other.max_;
  } else {
    scaled_ += other.scaled_ * std::exp(other.max_ - max_);
  }
}

std::string_view to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::exact_psi:
      return "exact_psi";
    case EstimatorMode::self_normalized:
      return "self_normalized";
    case EstimatorMode::conditioned:
      return "conditioned";
  }
  return "self_normalized";
}

nlohmann::json to_json(const EstimateReport& r) {
  return {
      {"K", r.samples},
      {"mu_hat", r.mu_hat},
      {"std_error", finite_or_null(r.std_error)},
      {"sample_variance", finite_or_null(r.sample_variance)},
      {"log_second_moment", finite_or_null(r.log_second_moment)},
      {"log_prob", finite_or_null(r.log_prob)},
      {"ess", r.ess},
      {"hit_rate", r.hit_rate},
      {"hits", r.hits},
      {"seed", r.seed},
      {"steps", r.steps},
      {"mode", std::string(to_string(r.mode))},
      {"degenerate", r.degenerate},
      {"biased_for_mu", r.biased_for_mu},
  };
}

ImportanceAccumulator::ImportanceAccumulator(const WeightModel& model,
                                             std::uint64_t batch_size)
    : model_(&model), batch_size_(std::max<std::uint64_t>(batch_size, 1)) {}

void ImportanceAccumulator::flush() {
  if (run_ == 0) return;
  push(model_->log_weight(last_edges_, last_triangles_),
       model_->hit(last_triangles_), run_);
  run_ = 0;
}

void ImportanceAccumulator::add_term(double log_weight, bool hit,
                                     std::uint64_t multiplicity) {
  flush();
  push(log_weight, hit, multiplicity);
}

void ImportanceAccumulator::push(double lw, bool hit, std::uint64_t m) {
  while (m > 0) {
    if (batches_.empty() || batches_.back().count == batch_size_) {
      batches_.emplace_back();
    }
    Batch& b = batches_.back();
    const std::uint64_t take = std::min(m, batch_size_ - b.count);
    const double k = static_cast<double>(take);
    b.w.add(lw, k);
    b.w2.add(2.0 * lw, k);
    if (hit) {
      b.hit_w.add(lw, k);
      b.hit_w2.add(2.0 * lw, k);
      b.hits += take;
    }
    b.count += take;
    m -= take;
  }
}

void ImportanceAccumulator::merge(ImportanceAccumulator other) {
  flush();
  other.flush();
  batches_.insert(batches_.end(), other.batches_.begin(), other.batches_.end());
}

std::uint64_t ImportanceAccumulator::observations() const {
  std::uint64_t total = run_;
  for (const auto& b : batches_) total += b.count;
  return total;
}

EstimateReport ImportanceAccumulator::report(EstimatorMode mode,
                                             Vertex n) const {
  ImportanceAccumulator self = *this;
  self.flush();
  if (self.batches_.empty()) throw std::runtime_error("no observations");

  LogSum w, hit_w, hit_w2, w2;
  std::uint64_t count = 0;
  std::uint64_t hits = 0;
  for (const auto& b : self.batches_) {
    w.merge(b.w);
    hit_w.merge(b.hit_w);
    hit_w2.merge(b.hit_w2);
    w2.merge(b.w2);
    count += b.count;
    hits += b.hits;
  }
  const double nn2 = static_cast<double>(n) * n;
  const double log_k = std::log(static_cast<double>(count));
  const double log_w = w.log();

  EstimateReport r;
  r.samples = count;
  r.hits = hits;
  r.mode = mode;
  r.biased_for_mu = mode == EstimatorMode::conditioned;
  r.hit_rate = static_cast<double>(hits) / static_cast<double>(count);
  r.ess = std::exp(2.0 * log_w - w2.log());
  r.degenerate = hits == 0;
  if (r.degenerate) {
    r.mu_hat = 0.0;
    r.std_error = 0.0;
    r.sample_variance = 0.0;
    r.log_second_moment = kNegInf;
    r.log_prob = kNegInf;
    return r;
  }
  const double log_mu = LogSum::log_ratio(hit_w, w);
  r.mu_hat = std::exp(log_mu);
  // E[qhat^2] with qhat = 1_W w / mean(w).
  const double log_second = LogSum::log_ratio(hit_w2, w, 2.0) + log_k;
  r.sample_variance = std::exp(log_second) - r.mu_hat * r.mu_hat;
  r.log_second_moment = log_second / nn2;
  r.log_prob = log_mu / nn2;

  const auto nb = static_cast<double>(self.batches_.size());
  if (self.batches_.size() > 1) {
    double sum_sq = 0.0;
    for (const auto& b : self.batches_) {
      const double z =
          std::exp(b.hit_w.log() - log_w) - r.mu_hat * std::exp(b.w.log() - log_w);
      sum_sq += z * z;
    }
    r.std_error = std::sqrt(nb / (nb - 1.0) * sum_sq);
  } else {
    r.std_error = std::numeric_limits<double>::infinity();
  }
  return r;
}

EstimateReport ImportanceAccumulator::report_exact_psi(Vertex n,
                                                       double psi_tilt,
                                                       double psi_source) const {
  ImportanceAccumulator self = *this;
  self.flush();
  if (self.batches_.empty()) throw std::runtime_error("no observations");

  const double nn2 = static_cast<double>(n) * n;
  const double shift = nn2 * (psi_tilt - psi_source);
  LogSum w, hit_w, hit_w2, w2;
  std::uint64_t count = 0;
  std::uint64_t hits = 0;
  for (const auto& b : self.batches_) {
    w.merge(b.w);
    hit_w.merge(b.hit_w);
    hit_w2.merge(b.hit_w2);
    w2.merge(b.w2);
    count += b.count;
    hits += b.hits;
  }
  const double log_k = std::log(static_cast<double>(count));

  EstimateReport r;
  r.samples = count;
  r.hits = hits;
  r.mode = EstimatorMode::exact_psi;
  r.hit_rate = static_cast<double>(hits) / static_cast<double>(count);
  r.ess = std::exp(2.0 * w.log() - w2.log());
  r.degenerate = hits == 0;
  if (r.degenerate) {
    r.log_second_moment = kNegInf;
    r.log_prob = kNegInf;
    return r;
  }
  const double log_mu = hit_w.log() + shift - log_k;
  const double log_second = hit_w2.log() + 2.0 * shift - log_k;
  r.mu_hat = std::exp(log_mu);
  r.sample_variance = std::exp(log_second) - r.mu_hat * r.mu_hat;
  r.log_second_moment = log_second / nn2;
  r.log_prob = log_mu / nn2;

  // Batch means of qhat.
  const auto nb = static_cast<double>(self.batches_.size());
  if (self.batches_.size() > 1) {
    double sum_sq = 0.0;
    for (const auto& b : self.batches_) {
      const double mean_b =
          std::exp(b.hit_w.log() + shift - std::log(static_cast<double>(b.count)));
      const double weight = static_cast<double>(b.count) / count;
      sum_sq += weight * weight * (mean_b - r.mu_hat) * (mean_b - r.mu_hat);
    }
    r.std_error = std::sqrt(nb / (nb - 1.0) * sum_sq);
  } else {
    r.std_error = std::numeric_limits<double>::infinity();
  }
  return r;
}

EdgeHistogram::EdgeHistogram(const WeightModel& model)
    : model_(&model),
      counts_(static_cast<std::size_t>(pair_count(model.order())) + 1, 0) {}

void EdgeHistogram::merge(const EdgeHistogram& other) {
  if (other.counts_.size() != counts_.size()) {
    throw std::invalid_argument("histograms of different sizes");
  }
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
}

std::uint64_t EdgeHistogram::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::string EdgeHistogram::to_csv() const {
  if (total() == 0) throw std::runtime_error("edge histogram has no hits");
  std::string out = "edge_count,frequency\n";
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    if (counts_[k] > 0) out += fmt::format("{},{}\n", k, counts_[k]);
  }
  return out;
}

}  // namespace tritilt

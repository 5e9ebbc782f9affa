#include "tritilt/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "tritilt/estimator.hpp"

namespace tritilt {

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_source_prob(Count edges, Count pairs, double p) {
  return static_cast<double>(edges) * std::log(p) +
         static_cast<double>(pairs - edges) * std::log1p(-p);
}

}  // namespace

std::vector<Edge> pair_order(Vertex n) {
  std::vector<Edge> out;
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i + 1; j < n; ++j) out.emplace_back(i, j);
  }
  return out;
}

JointDistribution::JointDistribution(Vertex n) : n_(n) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  counts_.assign(static_cast<std::size_t>((max_edges() + 1) * (max_triangles() + 1)),
                 0);
}

std::uint64_t JointDistribution::total() const {
  std::uint64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

std::string JointDistribution::to_csv() const {
  std::string out = "n,E,T,count\n";
  for_each([&](Count e, Count t, std::uint64_t k) {
    out += fmt::format("{},{},{},{}\n", n_, e, t, k);
  });
  return out;
}

JointDistribution JointDistribution::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,E,T,count", 0) != 0) {
    throw std::runtime_error("joint CSV: missing header");
  }
  std::optional<JointDistribution> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long long n = 0, e = 0, t = 0;
    unsigned long long k = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream row(line);
    if (!(row >> n >> c1 >> e >> c2 >> t >> c3 >> k) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      throw std::runtime_error("joint CSV: bad row '" + line + "'");
    }
    if (!out) out.emplace(static_cast<Vertex>(n));
    if (static_cast<Vertex>(n) != out->order() || e < 0 || t < 0 ||
        e > out->max_edges() || t > out->max_triangles()) {
      throw std::runtime_error("joint CSV: row out of range '" + line + "'");
    }
    out->add(e, t, k);
  }
  if (!out) throw std::runtime_error("joint CSV: no rows");
  return *out;
}

JointDistribution enumerate_joint(Vertex n, bool allow_eight) {
  const Vertex limit = allow_eight ? 8 : 7;
  if (n < 2 || n > limit) {
    throw std::invalid_argument(fmt::format(
        "enumeration supports 2 <= n <= {}, got {}", limit, n));
  }
  const auto pairs = pair_order(n);
  const std::uint64_t graphs = std::uint64_t{1} << pairs.size();
  JointDistribution joint(n);
  Graph g(n);
  joint.add(0, 0);
  for (std::uint64_t k = 1; k < graphs; ++k) {
    const auto& [i, j] = pairs[static_cast<std::size_t>(std::countr_zero(k))];
    g.apply_flip(i, j, g.common_neighbors_unchecked(i, j));
    joint.add(g.edge_count(), g.triangle_count());
  }
  return joint;
}

double exact_mu(const JointDistribution& joint, double p, double t,
                ThresholdMode mode) {
  const double threshold = triangle_threshold(joint.order(), t, mode);
  double mu = 0.0;
  joint.for_each([&](Count e, Count tri, std::uint64_t k) {
    if (static_cast<double>(tri) >= threshold) {
      mu += static_cast<double>(k) *
            std::exp(log_source_prob(e, joint.max_edges(), p));
    }
  });
  return mu;
}

double exact_mu_direct(Vertex n, double p, double t, ThresholdMode mode) {
  if (n < 2 || n > 5) throw std::invalid_argument("direct sum needs n <= 5");
  const auto pairs = pair_order(n);
  const double threshold = triangle_threshold(n, t, mode);
  double mu = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size());
       ++mask) {
    std::vector<Edge> edges;
    double prob = 1.0;
    for (std::size_t b = 0; b < pairs.size(); ++b) {
      if ((mask >> b) & 1U) {
        edges.push_back(pairs[b]);
        prob *= p;
      } else {
        prob *= 1.0 - p;
      }
    }
    const Graph g(n, edges);
    if (static_cast<double>(g.recount_triangles()) >= threshold) mu += prob;
  }
  return mu;
}

double scaled_hamiltonian(Vertex n, Count edges, Count triangles,
                          const TiltParams& params) {
  const double nn = static_cast<double>(n);
  double out = params.h * static_cast<double>(edges);
  if (params.beta != 0.0) {
    const double tau = 6.0 * static_cast<double>(triangles) / (nn * nn * nn);
    out += nn * nn * params.beta / 6.0 * std::pow(tau, params.alpha);
  }
  return out;
}

double exact_psi(const JointDistribution& joint, const TiltParams& params,
                 const std::optional<ConstraintSet>& constraint) {
  const Vertex n = joint.order();
  std::vector<double> terms;
  joint.for_each([&](Count e, Count t, std::uint64_t k) {
    if (constraint && !constraint->contains(n, e, t)) return;
    terms.push_back(std::log(static_cast<double>(k)) +
                    scaled_hamiltonian(n, e, t, params));
  });
  const double nn = static_cast<double>(n);
  return log_sum_exp(terms) / (nn * nn);
}

ExactMoments exact_estimator_moments(
    const JointDistribution& joint, const ProblemSpec& spec,
    const TiltParams& tilt, const std::optional<ConstraintSet>& constraint) {
  spec.validate();
  const Vertex n = joint.order();
  const double nn = static_cast<double>(n);
  const double n2 = nn * nn;
  const double psi_q = exact_psi(joint, tilt, constraint);
  const double psi_p = exact_psi(joint, TiltParams::source(spec.p), constraint);
  const double threshold = triangle_threshold(n, spec.t, spec.mode);

  ExactMoments out;
  double p_a = 0.0;
  double p_aw = 0.0;
  joint.for_each([&](Count e, Count t, std::uint64_t k) {
    if (constraint && !constraint->contains(n, e, t)) return;
    const double c = static_cast<double>(k);
    const double prob = std::exp(log_source_prob(e, joint.max_edges(), spec.p));
    p_a += c * prob;
    if (static_cast<double>(t) < threshold) return;
    p_aw += c * prob;
    const auto d = densities(n, e, t);
    const double log_q = scaled_hamiltonian(n, e, t, tilt) - n2 * psi_q;
    const double log_qhat =
        log_unnormalized_weight(d.edge, d.triangle, n, spec.p, tilt) +
        n2 * (psi_q - psi_p);
    out.mean += c * std::exp(log_q + log_qhat);
    out.second += c * std::exp(log_q + 2.0 * log_qhat);
  });
  out.variance = out.second - out.mean * out.mean;
  out.reference = constraint ? p_aw / p_a : p_aw;
  return out;
}

GlauberMatrix exact_glauber_matrix(Vertex n, const TiltParams& params,
                                   const std::optional<ConstraintSet>& constraint) {
  if (n < 2 || n > 4) {
    throw std::invalid_argument("transition matrix needs 2 <= n <= 4");
  }
  const auto pairs = pair_order(n);
  const std::size_t m = pairs.size();
  const std::size_t states = std::size_t{1} << m;

  std::vector<Graph> graphs;
  graphs.reserve(states);
  for (std::size_t mask = 0; mask < states; ++mask) {
    std::vector<Edge> edges;
    for (std::size_t b = 0; b < m; ++b) {
      if ((mask >> b) & 1U) edges.push_back(pairs[b]);
    }
    graphs.emplace_back(n, edges);
  }
  auto allowed = [&](std::size_t s) {
    const Graph& g = graphs[s];
    return !constraint ||
           constraint->contains(n, g.recount_edges(), g.recount_triangles());
  };

  GlauberMatrix out;
  out.n = n;
  out.states = states;
  out.transition.assign(states * states, 0.0);
  out.stationary.assign(states, 0.0);

  std::vector<double> log_weights(states,
                                  -std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < states; ++s) {
    if (!allowed(s)) continue;
    const Graph& g = graphs[s];
    log_weights[s] =
        scaled_hamiltonian(n, g.recount_edges(), g.recount_triangles(), params);
  }
  const double log_z = log_sum_exp(log_weights);
  for (std::size_t s = 0; s < states; ++s) {
    if (std::isfinite(log_weights[s])) {
      out.stationary[s] = std::exp(log_weights[s] - log_z);
    }
  }

  const double pick = 1.0 / static_cast<double>(m);
  for (std::size_t s = 0; s < states; ++s) {
    if (!allowed(s)) {
      out.transition[s * states + s] = 1.0;
      continue;
    }
    for (std::size_t b = 0; b < m; ++b) {
      const auto [i, j] = pairs[b];
      const double phi = acceptance_prob(graphs[s], i, j, params);
      const std::size_t on = s | (std::size_t{1} << b);
      const std::size_t off = s & ~(std::size_t{1} << b);
      out.transition[s * states + (allowed(on) ? on : s)] += pick * phi;
      out.transition[s * states + (allowed(off) ? off : s)] += pick * (1.0 - phi);
    }
  }

  for (std::size_t x = 0; x < states; ++x) {
    double row = 0.0;
    double flow_in = 0.0;
    for (std::size_t y = 0; y < states; ++y) {
      row += out.transition[x * states + y];
      flow_in += out.stationary[y] * out.transition[y * states + x];
      const double db = out.stationary[x] * out.transition[x * states + y] -
                        out.stationary[y] * out.transition[y * states + x];
      out.detailed_balance_residual =
          std::max(out.detailed_balance_residual, std::abs(db));
    }
    out.row_sum_residual = std::max(out.row_sum_residual, std::abs(row - 1.0));
    out.stationarity_residual =
        std::max(out.stationarity_residual, std::abs(flow_in - out.stationary[x]));
  }
  return out;
}

}  // namespace tritilt

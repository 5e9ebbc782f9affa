// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance            run all ten
//   acceptance 2 7 8      run a subset
//
// Exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "tritilt/estimator.hpp"
#include "tritilt/exact.hpp"
#include "tritilt/experiments.hpp"
#include "tritilt/glauber.hpp"
#include "tritilt/graph.hpp"
#include "tritilt/phase.hpp"
#include "tritilt/rates.hpp"

using namespace tritilt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Accumulates sub-check results and a detail string for one criterion.
struct Outcome {
  bool ok = true;
  std::vector<std::string> notes;

  void check(bool cond, std::string note) {
    if (!cond) ok = false;
    notes.push_back((cond ? "" : "!") + std::move(note));
  }
};

bool within_rel(double x, double target, double rel) {
  return std::abs(x - target) <= rel * std::abs(target);
}

ExperimentConfig table3_config(TiltKind kind, double alpha) {
  ExperimentConfig c;
  c.spec = {0.2, 0.3, ThresholdMode::binomial};
  c.tilt = kind;
  c.alpha = alpha;
  return c;
}

ExperimentConfig conditioned_config() {
  auto c = table3_config(TiltKind::triangle, 1.0);
  c.r_auto = true;
  return c;
}

// --------------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome out;
  const auto start = Clock::now();
  const ProblemSpec spec{0.35, 0.4, ThresholdMode::binomial};
  const Vertex n = 6;
  const double mu = exact_mu(enumerate_joint(n), spec.p, spec.t, spec.mode);
  struct Case {
    const char* name;
    TiltParams tilt;
  };
  const Case cases[] = {{"triangle", TiltParams::triangle(spec, 1.0)},
                        {"edge", TiltParams::edge(spec.t)},
                        {"hybrid_q0.37", TiltParams::hybrid(0.37, spec.t)}};
  const std::uint64_t observed = 100'000;
  std::uint64_t seed = 11;
  for (const auto& c : cases) {
    const WeightModel model(n, spec, c.tilt);
    ImportanceAccumulator acc(model, observed / 64);
    ChainConfig cc;
    cc.n = n;
    cc.params = c.tilt;
    cc.burnin = step_budget(n, 10.0);
    cc.total_steps = cc.burnin + observed;
    cc.seed = seed++;
    run_chain(cc, acc);
    const auto r = acc.report(EstimatorMode::self_normalized, n);
    const double z = (r.mu_hat - mu) / r.std_error;
    out.check(std::abs(z) <= 3.0,
              fmt::format("{} mu_hat={:.6f} se={:.2e} z={:+.2f}", c.name, r.mu_hat,
                          r.std_error, z));
  }
  const double secs = seconds_since(start);
  out.check(secs < 60.0, fmt::format("exact={:.6f} {:.2f}s", mu, secs));
  return out;
}

Outcome exact_unbiasedness() {
  Outcome out;
  double worst = 0.0;
  std::string worst_case;
  const ProblemSpec rs{0.35, 0.4, ThresholdMode::binomial};
  const ProblemSpec rb{0.2, 0.3, ThresholdMode::binomial};
  const TiltParams tri_rb{log_odds(rb.p), beta_star_formula(rb.p, rb.t, 1.0), 1.0};
  struct Case {
    std::string name;
    ProblemSpec spec;
    TiltParams tilt;
    std::optional<ConstraintSet> cap;
  };
  const std::vector<Case> cases = {
      {"edge", rs, TiltParams::edge(rs.t), std::nullopt},
      {"triangle_a2/3", rs, TiltParams::triangle(rs, 2.0 / 3.0), std::nullopt},
      {"triangle_a1", rs, TiltParams::triangle(rs, 1.0), std::nullopt},
      {"hybrid_q0.37", rs, TiltParams::hybrid(0.37, rs.t), std::nullopt},
      {"conditioned_r0.8", rs, TiltParams::triangle(rs, 1.0), ConstraintSet::cap(0.8)},
      {"conditioned_r0.8_rb", rb, tri_rb, ConstraintSet::cap(0.8)},
      {"conditioned_r0.6", rs, TiltParams::triangle(rs, 1.0), ConstraintSet::cap(0.6)},
      {"conditioned_r0.4272_rb", rb, tri_rb, ConstraintSet::cap(0.4272)},
  };
  for (Vertex n = 3; n <= 5; ++n) {
    const auto joint = enumerate_joint(n);
    for (const auto& c : cases) {
      const auto m = exact_estimator_moments(joint, c.spec, c.tilt, c.cap);
      const double err = std::abs(m.mean - m.reference);
      if (err >= worst) {
        worst = err;
        worst_case = fmt::format("{} n={}", c.name, n);
      }
      if (!(err <= 1e-12)) {
        out.check(false, fmt::format("{} n={} err={:.2e}", c.name, n, err));
      }
    }
  }
  out.check(worst <= 1e-12, fmt::format("{} cases x n=3..5 max_err={:.2e} ({})",
                                        cases.size(), worst, worst_case));
  return out;
}

Outcome detailed_balance() {
  Outcome out;
  const TiltParams params[] = {{-1.0, 1.0, 1.0}, {-1.0, 1.0, 0.5},
                               {log_odds(0.2), 5.99, 1.0}};
  double worst = 0.0;
  for (const auto& p : params) {
    // A_0.8 removes no state at n = 4; A_0.6 is added as a binding cap.
    for (const auto& cap : {std::optional<ConstraintSet>{},
                            std::optional<ConstraintSet>{ConstraintSet::cap(0.8)},
                            std::optional<ConstraintSet>{ConstraintSet::cap(0.6)}}) {
      const auto m = exact_glauber_matrix(4, p, cap);
      const double res = std::max(m.detailed_balance_residual, m.stationarity_residual);
      worst = std::max(worst, res);
      out.check(res <= 1e-12,
                fmt::format("({:.3f},{},{}){} res={:.1e}", p.h, p.beta, p.alpha,
                            cap ? fmt::format("|A{}", *cap->epsilon_cap) : "", res));
    }
  }
  out.notes.push_back(fmt::format("max={:.1e}", worst));
  return out;
}

Outcome table1() {
  Outcome out;
  ExperimentConfig c;
  c.spec = {0.35, 0.4, ThresholdMode::binomial};
  c.tilt = TiltKind::hybrid;
  c.q = 0.35;
  const auto r16 = run_estimate(c, 16).report;
  out.check(within_rel(r16.mu_hat, 0.12475, 0.05),
            fmt::format("n=16 mu={:.5f} (0.12475 +-5%)", r16.mu_hat));
  const auto r32 = run_estimate(c, 32).report;
  out.check(within_rel(r32.mu_hat, 0.01107, 0.15),
            fmt::format("n=32 mu={:.5f} (0.01107 +-15%)", r32.mu_hat));
  out.check(std::abs(r32.log_prob - -0.004398) <= 0.0003,
            fmt::format("log={:.6f} (-0.004398 +-3e-4)", r32.log_prob));
  return out;
}

Outcome table3() {
  Outcome out;
  struct Cell {
    const char* name;
    ExperimentConfig config;
    double mu;
    double log_prob;
  };
  const Cell cells[] = {
      {"triangle_a2/3", table3_config(TiltKind::triangle, 2.0 / 3.0), 0.0064, -0.0197},
      {"conditioned", conditioned_config(), 0.006474, -0.0197},
      {"edge", table3_config(TiltKind::edge, 1.0), 0.006285, -0.0198},
  };
  for (const auto& cell : cells) {
    const auto r = run_estimate(cell.config, 16).report;
    out.check(within_rel(r.mu_hat, cell.mu, 0.10),
              fmt::format("{} mu={:.6f} ({} +-10%)", cell.name, r.mu_hat, cell.mu));
    out.check(std::abs(r.log_prob - cell.log_prob) <= 0.0005,
              fmt::format("log={:.5f} ({} +-5e-4)", r.log_prob, cell.log_prob));
  }
  return out;
}

Outcome second_moment_ordering() {
  Outcome out;
  int tri_wins = 0;
  int cond_wins = 0;
  std::string series;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto tri = table3_config(TiltKind::triangle, 2.0 / 3.0);
    auto cond = conditioned_config();
    auto edge = table3_config(TiltKind::edge, 1.0);
    tri.seed = cond.seed = edge.seed = seed;
    const double lt = run_estimate(tri, 32).report.log_second_moment;
    const double lc = run_estimate(cond, 32).report.log_second_moment;
    const double le = run_estimate(edge, 32).report.log_second_moment;
    tri_wins += lt < le;
    cond_wins += lc < le;
    series += fmt::format(" s{}:{:.4f}/{:.4f}/{:.4f}", seed, lt, lc, le);
    std::cerr << fmt::format("  [6] seed {} tri={:.5f} cond={:.5f} edge={:.5f}\n",
                             seed, lt, lc, le);
  }
  out.check(tri_wins >= 8, fmt::format("triangle_a2/3<edge {}/10", tri_wins));
  out.check(cond_wins >= 8, fmt::format("conditioned<edge {}/10", cond_wins));
  out.notes.push_back("tri/cond/edge" + series);
  return out;
}

Outcome analytic() {
  Outcome out;
  auto timed = [&](const char* label, const std::function<std::string()>& body,
                   const std::function<bool()>& pass) {
    const auto start = Clock::now();
    const std::string text = body();
    const double secs = seconds_since(start);
    out.check(pass() && secs < 1.0, fmt::format("{} {} ({:.3f}s)", label, text, secs));
  };
  const double hp = log_odds(0.2);

  double bstar = 0.0;
  timed("beta*", [&] {
    bstar = beta_star_formula(0.2, 0.3, 1.0);
    return fmt::format("{:.5f}", bstar);
  }, [&] { return std::abs(bstar - 5.990) <= 0.005; });

  std::optional<Transition> tr;
  timed("jump", [&] {
    tr = find_transition(hp, 1.0, 0.0, 8.0);
    return tr ? fmt::format("beta={:.4f} u={:.4f}->{:.4f}", tr->beta, tr->u_left,
                            tr->u_right)
              : std::string("none");
  }, [&] {
    return tr && std::abs(tr->beta - 4.76) <= 0.01 &&
           std::abs(tr->u_left - 0.253) <= 0.002 &&
           std::abs(tr->u_right - 0.947) <= 0.002;
  });

  std::optional<double> r;
  timed("r", [&] {
    r = separating_minimum({hp, beta_star_formula(0.2, 0.3, 1.0), 1.0});
    return r ? fmt::format("{:.5f}", *r) : std::string("none");
  }, [&] { return r && std::abs(*r - 0.4272) <= 0.001; });

  std::optional<double> tt;
  timed("t~(0.35)", [&] {
    tt = edge_tilt_threshold(0.35);
    return tt ? fmt::format("{:.5f}", *tt) : std::string("none");
  }, [&] { return tt && std::abs(*tt - 0.948) <= 0.002; });

  double pt = 0.0;
  const double pt_ref = std::exp(-0.5) / (1.0 + std::exp(-0.5));
  timed("p~", [&] {
    pt = critical_p_tilde();
    return fmt::format("{:.12f}", pt);
  }, [&] { return std::abs(pt - pt_ref) <= 1e-12; });

  double i = 0.0;
  timed("I", [&] {
    i = rate_function(0.4, 0.35);
    return fmt::format("{:.7f} -2I={:.7f}", i, -2.0 * i);
  }, [&] {
    return std::abs(i - 0.002694) <= 1e-6 && std::abs(-2.0 * i - -0.0053869) <= 2e-6;
  });
  return out;
}

Outcome phase_tests() {
  Outcome out;
  const ProblemSpec a{0.2, 0.3};
  out.check(in_s_alpha(a, 2.0 / 3.0).member, "(0.2,0.3) in S_2/3");
  out.check(!in_s_alpha(a, 1.0).member, "(0.2,0.3) not in S_1");
  out.check(is_replica_symmetric({0.35, 0.4}), "(0.35,0.4) replica symmetric");

  const double alphas[] = {0.5, 2.0 / 3.0, 1.0};
  int points = 0;
  int members[3] = {0, 0, 0};
  int violations = 0;
  for (int i = 0; i < 20; ++i) {
    const double p = 0.02 + 0.048 * i;
    for (int j = 0; j < 20; ++j) {
      const double t = p + (1.0 - p) * (j + 1) / 21.0;
      const ProblemSpec spec{p, t};
      bool m[3];
      for (int k = 0; k < 3; ++k) {
        m[k] = in_s_alpha(spec, alphas[k]).member;
        members[k] += m[k];
      }
      ++points;
      // Membership for a larger exponent implies it for every smaller one.
      for (int k = 0; k < 3; ++k) {
        for (int l = k + 1; l < 3; ++l) {
          if (m[l] && !m[k]) {
            ++violations;
            out.notes.push_back(fmt::format("!nesting p={:.3f} t={:.3f}", p, t));
          }
        }
      }
    }
  }
  out.check(violations == 0,
            fmt::format("nesting {} points, |S_0.5|={} |S_2/3|={} |S_1|={}", points,
                        members[0], members[1], members[2]));
  return out;
}

Outcome optimality_identity() {
  Outcome out;
  double worst = 0.0;
  int cases = 0;
  for (int i = 0; i < 12; ++i) {
    const double p = 0.04 + 0.075 * i;
    for (int j = 1; j <= 10; ++j) {
      const double t = p + (1.0 - p) * j / 11.0;
      const ProblemSpec spec{p, t};
      if (!is_replica_symmetric(spec)) continue;
      for (double alpha : {2.0 / 3.0, 1.0}) {
        if (alpha != 2.0 / 3.0 && !in_s_alpha(spec, alpha).member) continue;
        const double v = asymptotic_second_moment(spec, TiltParams::triangle(spec, alpha));
        worst = std::max(worst, std::abs(v + 2.0 * rate_function(t, p)));
        ++cases;
      }
    }
  }
  out.check(cases > 50 && worst <= 1e-10,
            fmt::format("{} tilts max|ASM+2I|={:.1e}", cases, worst));

  // Conditioned second-moment curve over beta at h = h_p, alpha = 1.
  const ProblemSpec spec{0.2, 0.3};
  const double hp = log_odds(spec.p);
  const double bstar = beta_star_formula(spec.p, spec.t, 1.0);
  const double r = *separating_minimum({hp, bstar, 1.0});
  auto conditioned = [&](double beta) {
    return asymptotic_second_moment_unchecked(spec, {hp, beta, 1.0}, r);
  };
  const int grid = 801;
  double best_beta = 0.0;
  double best = INFINITY;
  for (int k = 0; k < grid; ++k) {
    const double beta = 8.0 * k / (grid - 1);
    const double v = conditioned(beta);
    if (v < best) {
      best = v;
      best_beta = beta;
    }
  }
  const double target = -2.0 * rate_function(spec.t, spec.p);
  const double at_star = conditioned(bstar);
  out.check(std::abs(best_beta - bstar) <= 8.0 / (grid - 1) && at_star <= best + 1e-12,
            fmt::format("curve argmin beta={:.3f} (beta*={:.4f})", best_beta, bstar));
  out.check(std::abs(at_star - target) <= 1e-10,
            fmt::format("value at beta*={:.8f} (-2I={:.8f})", at_star, target));
  const double un0 = asymptotic_second_moment_unchecked(spec, {hp, 0.0, 1.0}, std::nullopt);
  out.check(std::abs(un0 - conditioned(0.0)) <= 1e-12, "beta=0 curves agree");
  return out;
}

Outcome property_suites() {
  Outcome out;
  const auto start = Clock::now();
  Rng rng(2024);

  {
    Graph g = bernoulli_graph(50, 0.3, rng);
    bool ok = true;
    for (int k = 0; k < 10'000; ++k) {
      const auto i = static_cast<Vertex>(rng() % 50);
      const auto j = static_cast<Vertex>(rng() % 50);
      if (i == j) continue;
      g.flip_edge(i, j);
      if (k % 500 == 0) {
        ok = ok && g.edge_count() == g.recount_edges() &&
             g.triangle_count() == g.recount_triangles();
      }
    }
    ok = ok && g.edge_count() == g.recount_edges() &&
         g.triangle_count() == g.recount_triangles();
    out.check(ok, "incremental counts");
  }
  {
    Graph g = bernoulli_graph(40, 0.4, rng);
    const Graph before = g;
    bool ok = true;
    for (int k = 0; k < 2000 && ok; ++k) {
      const auto i = static_cast<Vertex>(rng() % 40);
      const auto j = static_cast<Vertex>(rng() % 40);
      if (i == j) continue;
      g.flip_edge(i, j);
      g.flip_edge(i, j);
      ok = g == before;
    }
    out.check(ok, "flip involution");
  }
  {
    const TiltParams params{-0.7, 3.0, 0.5};
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const Graph g = bernoulli_graph(10, 0.1 + 0.04 * rep, rng);
      for (Vertex i = 0; i < 10; ++i) {
        for (Vertex j = i + 1; j < 10; ++j) {
          Graph with = g, without = g;
          if (!g.has_edge(i, j)) with.flip_edge(i, j);
          if (g.has_edge(i, j)) without.flip_edge(i, j);
          const double a = scaled_hamiltonian(10, with.recount_edges(),
                                              with.recount_triangles(), params);
          const double b = scaled_hamiltonian(10, without.recount_edges(),
                                              without.recount_triangles(), params);
          const double brute = 1.0 / (1.0 + std::exp(b - a));
          worst = std::max(worst, std::abs(acceptance_prob(g, i, j, params) - brute));
        }
      }
    }
    out.check(worst <= 1e-12, fmt::format("alpha=0.5 brute force {:.1e}", worst));
  }
  {
    const auto cap = ConstraintSet::cap(0.4272);
    GlauberChain chain(24, {log_odds(0.2), 5.99, 1.0}, cap, 3);
    bool ok = true;
    for (int k = 0; k < 200'000 && ok; ++k) {
      chain.step();
      ok = cap.contains(chain.graph());
    }
    out.check(ok, fmt::format("constraint support ({} reverted)", chain.reverted()));
  }
  {
    ExperimentConfig c;
    c.spec = {0.2, 0.3};
    c.tilt = TiltKind::triangle;
    c.alpha = 2.0 / 3.0;
    c.budget_frac = 0.01;
    c.replicas = 3;
    const auto a = run_json(c, 16, run_estimate(c, 16)).dump();
    const auto b = run_json(c, 16, run_estimate(c, 16)).dump();
    c.seed = 2;
    const auto d = run_json(c, 16, run_estimate(c, 16)).dump();
    out.check(a == b && a != d, "seed determinism");
  }
  const double secs = seconds_since(start);
  out.check(secs < 120.0, fmt::format("{:.1f}s", secs));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* title;
    Outcome (*run)();
  };
  const Criterion all[] = {
      {1, "oracle equivalence n=6", oracle_equivalence},
      {2, "exact unbiasedness n<=5", exact_unbiasedness},
      {3, "detailed balance n=4", detailed_balance},
      {4, "hybrid q=0.35 table, n=16,32", table1},
      {5, "p=0.2 t=0.3 table, n=16", table3},
      {6, "second-moment ordering n=32, 10 seeds", second_moment_ordering},
      {7, "analytic values", analytic},
      {8, "phase membership and nesting", phase_tests},
      {9, "asymptotic optimality identity", optimality_identity},
      {10, "property suites", property_suites},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& note : o.notes) detail += (detail.empty() ? "" : "; ") + note;
    std::cout << fmt::format("{} criterion {:>2} ({}) [{:.1f}s]: {}\n",
                             o.ok ? "PASS" : "FAIL", c.id, c.title,
                             seconds_since(start), detail)
              << std::flush;
    failures += !o.ok;
  }
  return failures == 0 ? 0 : 1;
}
